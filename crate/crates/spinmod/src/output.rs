// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Result tables and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::Value;

use crate::config::{toml_to_json, Format, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named real columns of equal length plus a metadata block: tool version,
/// scenario, scenario-derived quantities (`meta.*`) and the full resolved
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub metadata: Vec<(String, Value)>,
}

impl ResultTable {
    pub fn new(name: &str, scenario: &str, cfg: &RunConfig) -> Self {
        let mut metadata = vec![
            ("meta.tool".to_string(), Value::String("spinmod".into())),
            ("meta.version".to_string(), Value::String(env!("CARGO_PKG_VERSION").into())),
            ("meta.scenario".to_string(), Value::String(scenario.into())),
        ];
        metadata.extend(cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
        ResultTable {
            name: name.to_string(),
            columns: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.values.len(), values.len(), "column '{name}' length mismatch");
        }
        self.columns.push(Column {
            name: name.to_string(),
            values,
        });
    }

    /// Adds a derived `meta.<key>` entry (ignored when read back as config).
    pub fn note(&mut self, key: &str, value: Value) {
        self.metadata.push((format!("meta.{key}"), value));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| c.values[i].to_string()).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let metadata: serde_json::Map<String, serde_json::Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect();
        let columns: Vec<serde_json::Value> = self
            .columns
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "values": c.values }))
            .collect();
        let doc = serde_json::json!({ "metadata": metadata, "columns": columns });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }

    /// Writes `<dir>/<name>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf> {
        let (ext, body) = match format {
            Format::Csv => ("csv", self.to_csv()),
            Format::Json => ("json", self.to_json()),
        };
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(format!("{}.{ext}", self.name));
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let cfg = RunConfig::resolve(&[]).unwrap();
        let mut t = ResultTable::new("demo", "mzi", &cfg);
        t.push("tau_ns", vec![0.0, 0.1, 1.0 / 3.0]);
        t.push("g", vec![1.0, -2.5e-17, 6.02e23]);
        t
    }

    #[test]
    fn csv_has_metadata_header_and_rows() {
        let csv = table().to_csv();
        let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "tau_ns,g");
        assert_eq!(lines.len(), 4);
        let back: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(back, vec![1.0 / 3.0, 6.02e23]);
        assert!(csv.contains("# meta.scenario = \"mzi\""));
        assert!(csv.contains("# model.larmor_mhz = 590.0"));
    }

    #[test]
    fn json_values_parse_back_exactly() {
        let doc: serde_json::Value = serde_json::from_str(&table().to_json()).unwrap();
        let g = &doc["columns"][1]["values"];
        assert_eq!(g[1].as_f64().unwrap(), -2.5e-17);
        assert_eq!(doc["metadata"]["preset"], "qd1");
    }
}
