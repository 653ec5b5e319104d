// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Binary time-tag files.
//!
//! Little-endian. Header: magic `TTAG`, version (u16), duration in ps (u64),
//! seed (u64). Then one 9-byte record per tag until end of file: channel
//! (u8, 0 = A, 1 = B) and time in ps (u64), ordered by time then channel.

use std::path::Path;

use spinmod_core::trajectories::{Channel, TimeTagStream};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"TTAG";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 8;
const RECORD_LEN: usize = 9;

pub fn encode(stream: &TimeTagStream) -> Vec<u8> {
    let merged = stream.merged();
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * merged.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&stream.duration_ps.to_le_bytes());
    out.extend_from_slice(&stream.seed.to_le_bytes());
    for (t, ch) in merged {
        out.push(ch.code());
        out.extend_from_slice(&t.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> std::result::Result<TimeTagStream, String> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err("not a TTAG file".into());
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(format!("unsupported TTAG version {version}"));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() % RECORD_LEN != 0 {
        return Err(format!("truncated record stream ({} trailing bytes)", body.len() % RECORD_LEN));
    }
    let mut stream = TimeTagStream {
        channel_a: Vec::new(),
        channel_b: Vec::new(),
        duration_ps: u64_at(6),
        seed: u64_at(14),
    };
    for rec in body.chunks_exact(RECORD_LEN) {
        let t = u64::from_le_bytes(rec[1..].try_into().unwrap());
        match Channel::from_code(rec[0]) {
            Some(Channel::A) => stream.channel_a.push(t),
            Some(Channel::B) => stream.channel_b.push(t),
            None => return Err(format!("bad channel code {}", rec[0])),
        }
    }
    if !stream.is_well_formed() {
        return Err("tags out of order or outside the duration".into());
    }
    Ok(stream)
}

pub fn write(path: &Path, stream: &TimeTagStream) -> Result<()> {
    std::fs::write(path, encode(stream)).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> Result<TimeTagStream> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes).map_err(|msg| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream_from(mut a: Vec<u64>, mut b: Vec<u64>, seed: u64) -> TimeTagStream {
        for v in [&mut a, &mut b] {
            v.sort_unstable();
            v.dedup();
        }
        let duration_ps = a.iter().chain(&b).copied().max().unwrap_or(0) + 1;
        TimeTagStream {
            channel_a: a,
            channel_b: b,
            duration_ps,
            seed,
        }
    }

    #[test]
    fn header_layout() {
        let s = stream_from(vec![5], vec![5, 7], 0x0102);
        let bytes = encode(&s);
        assert_eq!(&bytes[..4], b"TTAG");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes.len(), HEADER_LEN + 3 * RECORD_LEN);
        // equal times: channel A first
        assert_eq!(bytes[HEADER_LEN], 0);
        assert_eq!(bytes[HEADER_LEN + RECORD_LEN], 1);
    }

    #[test]
    fn rejects_corruption() {
        let s = stream_from(vec![1, 2], vec![3], 9);
        let mut bytes = encode(&s);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        bytes[HEADER_LEN] = 7;
        assert!(decode(&bytes).is_err());
        assert!(decode(b"TTAX").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            a in proptest::collection::vec(0u64..1 << 50, 0..300),
            b in proptest::collection::vec(0u64..1 << 50, 0..300),
            seed in any::<u64>(),
        ) {
            let s = stream_from(a, b, seed);
            let bytes = encode(&s);
            let back = decode(&bytes).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(encode(&back), bytes);
        }
    }
}
