//! Binary checkpoint of a 1-d run.
//!
//! Layout (little-endian): magic `VLABCKPT`, format version `u32`, SHA-256 config hash
//! (32 bytes), config TOML, solver scalars, the nodal arrays, the sampled series, and a
//! SHA-256 trailer over everything before it. Strings and arrays carry a `u64` length.

use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};
use vacuumlab::euler1d::Snapshot;
use vacuumlab::weights::Family;

pub const MAGIC: &[u8; 8] = b"VLABCKPT";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum CheckpointError {
    Io(String),
    Truncated,
    Checksum,
    BadMagic,
    Version { found: u32, expected: u32 },
    Malformed(String),
}

impl fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(m) => write!(f, "cannot read checkpoint: {m}"),
            Self::Truncated => f.write_str("checkpoint is truncated"),
            Self::Checksum => f.write_str("checkpoint checksum mismatch: the file is corrupted"),
            Self::BadMagic => f.write_str("not a vacuumlab checkpoint"),
            Self::Version { found, expected } => write!(
                f,
                "checkpoint format version {found} is not supported (expected {expected})"
            ),
            Self::Malformed(m) => write!(f, "malformed checkpoint: {m}"),
        }
    }
}

impl std::error::Error for CheckpointError {}

type Result<T> = std::result::Result<T, CheckpointError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    /// Hex SHA-256 of the normalized config, as in the run manifest.
    pub config_hash: String,
    pub config_toml: String,
    pub snapshot: Snapshot,
    /// Sampled series up to the snapshot: column names and rows.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.0.extend_from_slice(b);
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u64(v.len() as u64);
        for x in v {
            self.f64(*x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(CheckpointError::Truncated)?;
        if end > self.buf.len() {
            return Err(CheckpointError::Truncated);
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn len(&mut self, elem: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.saturating_mul(elem) > self.buf.len() - self.pos {
            return Err(CheckpointError::Truncated);
        }
        Ok(n)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn string(&mut self) -> Result<String> {
        let n = self.len(1)?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| CheckpointError::Malformed("string is not UTF-8".into()))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }
}

fn family_code(f: Family) -> u8 {
    match f {
        Family::Jacobi => 0,
        Family::Uniform => 1,
    }
}

fn family_of(c: u8) -> Result<Family> {
    match c {
        0 => Ok(Family::Jacobi),
        1 => Ok(Family::Uniform),
        _ => Err(CheckpointError::Malformed(format!("unknown grid family {c}"))),
    }
}

fn hex_to_bytes(h: &str) -> Vec<u8> {
    (0..h.len() / 2)
        .map(|i| u8::from_str_radix(&h[2 * i..2 * i + 2], 16).unwrap_or(0))
        .collect()
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(FORMAT_VERSION);
        let mut hash = hex_to_bytes(&self.config_hash);
        hash.resize(DIGEST_LEN, 0);
        w.0.extend_from_slice(&hash);
        w.bytes(self.config_toml.as_bytes());
        let s = &self.snapshot;
        for x in [
            s.gamma,
            s.cfl,
            s.alphadot0,
            s.velocity_alpha_power,
            s.dt,
            s.alpha,
            s.alphadot,
            s.weight_integral,
        ] {
            w.f64(x);
        }
        w.u64(s.n as u64);
        w.u8(family_code(s.family));
        w.u8(s.filter as u8);
        w.u64(s.step);
        for a in [&s.deta, &s.v, &s.deta0, &s.max_weighted_v] {
            w.f64s(a);
        }
        w.u64(self.columns.len() as u64);
        for c in &self.columns {
            w.bytes(c.as_bytes());
        }
        w.u64(self.rows.len() as u64);
        for r in &self.rows {
            debug_assert_eq!(r.len(), self.columns.len());
            for x in r {
                w.f64(*x);
            }
        }
        let digest = Sha256::digest(&w.0);
        w.0.extend_from_slice(&digest);
        w.0
    }

    pub fn decode(buf: &[u8]) -> Result<Self> {
        if buf.len() < MAGIC.len() + 4 + 2 * DIGEST_LEN {
            return Err(CheckpointError::Truncated);
        }
        let (body, trailer) = buf.split_at(buf.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != trailer {
            return Err(if &body[..MAGIC.len()] != MAGIC {
                CheckpointError::BadMagic
            } else {
                CheckpointError::Checksum
            });
        }
        let mut r = Reader { buf: body, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(CheckpointError::Version {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let config_hash: String = r
            .take(DIGEST_LEN)?
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let config_toml = r.string()?;
        let mut sc = [0.0; 8];
        for x in sc.iter_mut() {
            *x = r.f64()?;
        }
        let n = r.u64()? as usize;
        let family = family_of(r.u8()?)?;
        let filter = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(CheckpointError::Malformed(format!("filter flag {b}"))),
        };
        let step = r.u64()?;
        let deta = r.f64s()?;
        let v = r.f64s()?;
        let deta0 = r.f64s()?;
        let max_weighted_v = r.f64s()?;
        let ncols = r.len(8)?;
        let columns = (0..ncols).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
        let nrows = r.u64()? as usize;
        if nrows.saturating_mul(ncols).saturating_mul(8) != body.len() - r.pos {
            return Err(CheckpointError::Malformed(
                "series size does not match the remaining bytes".into(),
            ));
        }
        let rows = (0..nrows)
            .map(|_| (0..ncols).map(|_| r.f64()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config_hash,
            config_toml,
            snapshot: Snapshot {
                gamma: sc[0],
                n,
                family,
                cfl: sc[1],
                filter,
                alphadot0: sc[2],
                velocity_alpha_power: sc[3],
                step,
                dt: sc[4],
                alpha: sc[5],
                alphadot: sc[6],
                weight_integral: sc[7],
                deta,
                v,
                deta0,
                max_weighted_v,
            },
            columns,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let buf = std::fs::read(path).map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))?;
        Self::decode(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            config_hash: format!("{:x}", Sha256::digest(b"cfg")),
            config_toml: "kind = \"euler1d\"\n".into(),
            snapshot: Snapshot {
                gamma: 2.0,
                n: 2,
                family: Family::Uniform,
                cfl: 0.5,
                filter: true,
                alphadot0: 1.0,
                velocity_alpha_power: 1.5,
                step: 7,
                dt: 0.01,
                alpha: 1.1,
                alphadot: 0.9,
                weight_integral: 0.07,
                deta: vec![0.0, 1e-3, -0.0],
                v: vec![1.0, 2.0, 3.0],
                deta0: vec![0.0; 3],
                max_weighted_v: vec![1.0, 2.5, 3.5],
            },
            columns: vec!["t".into(), "e".into()],
            rows: vec![vec![0.0, 1.0], vec![0.01, f64::MIN_POSITIVE]],
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = sample();
        let bytes = c.encode();
        assert_eq!(Checkpoint::decode(&bytes).unwrap(), c);
    }

    #[test]
    fn every_flipped_byte_is_detected() {
        let bytes = sample().encode();
        for i in 0..bytes.len() {
            let mut b = bytes.clone();
            b[i] ^= 0x10;
            assert!(Checkpoint::decode(&b).is_err(), "byte {i}");
        }
        let mut b = bytes.clone();
        b[40] ^= 1;
        assert_eq!(Checkpoint::decode(&b), Err(CheckpointError::Checksum));
        assert_eq!(
            Checkpoint::decode(&bytes[..bytes.len() - 1]),
            Err(CheckpointError::Checksum)
        );
    }

    #[test]
    fn newer_version_is_rejected() {
        let mut body = sample().encode();
        body.truncate(body.len() - DIGEST_LEN);
        body[8..12].copy_from_slice(&2u32.to_le_bytes());
        let d = Sha256::digest(&body);
        body.extend_from_slice(&d);
        assert_eq!(
            Checkpoint::decode(&body),
            Err(CheckpointError::Version {
                found: 2,
                expected: 1
            })
        );
    }
}
