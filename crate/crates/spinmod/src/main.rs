// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinmod::config::{self, Entries, RunConfig};
use spinmod::scenarios::{self, Scenario};
use spinmod::{parallel, tagfile, CliError, Result};
use toml::Value;

/// Simulated interferometry, spectroscopy and photon correlations of light
/// scattered by a driven quantum-dot spin.
#[derive(Debug, Parser)]
#[command(name = "spinmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration, or a CSV/JSON result whose metadata to re-run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Device preset: qd1, qd2, spectrum or custom.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Frequency columns in GHz (si) or in units of Γ (gamma).
    #[arg(long, global = true)]
    units: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated LO phases in radians; `pi` expressions are accepted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi_lo: Option<String>,
    /// Comma-separated detunings in units of Γ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta_scan: Option<String>,
    /// Extra `key=value` configuration overrides.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interferometer visibility |g1(τ)|.
    Mzi,
    /// Emission spectra over a detuning scan.
    Spectrum,
    /// Hanbury Brown-Twiss intensity correlation.
    Hbt,
    /// Phase-resolved homodyne intensity correlation.
    Homodyne,
    /// Monte Carlo time tags and their coincidence histogram.
    Trajectories,
}

fn overrides(cli: &Cli) -> Result<Entries> {
    let mut e = Entries::new();
    if let Some(p) = &cli.preset {
        e.insert("preset".into(), Value::String(p.clone()));
    }
    if let Some(d) = &cli.out {
        e.insert("output.dir".into(), Value::String(d.to_string_lossy().into_owned()));
    }
    if let Some(f) = &cli.format {
        e.insert("output.format".into(), Value::String(f.clone()));
    }
    if let Some(u) = &cli.units {
        e.insert("output.units".into(), Value::String(u.clone()));
    }
    if let Some(s) = cli.seed {
        let s = i64::try_from(s).map_err(|_| CliError::Config(format!("--seed must be below 2^63, got {s}")))?;
        e.insert("seed".into(), Value::Integer(s));
    }
    if let Some(list) = &cli.phi_lo {
        let phases = list
            .split(',')
            .map(|s| config::parse_angle(s).map(Value::Float).map_err(CliError::Config))
            .collect::<Result<Vec<_>>>()?;
        e.insert("homodyne.phi_lo".into(), Value::Array(phases));
    }
    if let Some(list) = &cli.delta_scan {
        let deltas = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map(Value::Float)
                    .map_err(|_| CliError::Config(format!("--delta-scan: bad number '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        e.insert("grid.delta_scan_over_gamma".into(), Value::Array(deltas));
    }
    for kv in &cli.set {
        let parsed = config::parse_toml(kv).map_err(|err| CliError::Config(format!("--set {kv}: {err}")))?;
        e.extend(parsed);
    }
    Ok(e)
}

fn execute(cli: &Cli) -> Result<()> {
    let mut layers = Vec::new();
    if let Some(path) = &cli.config {
        layers.push(config::load(path)?);
    }
    layers.push(overrides(cli)?);
    let cfg = RunConfig::resolve(&layers)?;
    let scenario = match cli.command {
        Command::Mzi => Scenario::Mzi,
        Command::Spectrum => Scenario::Spectrum,
        Command::Hbt => Scenario::Hbt,
        Command::Homodyne => Scenario::Homodyne,
        Command::Trajectories => Scenario::Trajectories,
    };
    let pool = parallel::pool(parallel::threads_from_env()?)?;
    let out = pool.install(|| scenarios::run(scenario, &cfg))?;
    let path = out.table.write(&cfg.output.dir, cfg.output.format)?;
    log::info!("wrote {}", path.display());
    if let Some(tags) = &out.tags {
        let tag_path = cfg.output.dir.join("trajectories.ttag");
        tagfile::write(&tag_path, tags)?;
        log::info!("wrote {}", tag_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinmod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
