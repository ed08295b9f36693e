//! On-disk cache of sieving primes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       8     magic "KLPRIME\0"
//! 8       4     format version (1)
//! 12      4     reserved, zero
//! 16      8     bound: every prime <= bound is listed
//! 24      8     count
//! 32      8*n   primes, ascending
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"KLPRIME\0";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCache {
    pub bound: u64,
    pub primes: Vec<u64>,
}

fn cache_err(e: io::Error) -> Error {
    Error::Cache(e.to_string())
}

pub fn encode(cache: &PrimeCache) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * cache.primes.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&cache.bound.to_le_bytes());
    out.extend_from_slice(&(cache.primes.len() as u64).to_le_bytes());
    for p in &cache.primes {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<PrimeCache> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Cache("truncated header".into()));
    }
    if bytes[..8] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let bound = word(16);
    let count = word(24) as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() != count.saturating_mul(8) {
        return Err(Error::Cache(format!(
            "expected {count} primes, found {} bytes",
            body.len()
        )));
    }
    let primes: Vec<u64> = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if primes.windows(2).any(|w| w[0] >= w[1]) || primes.last().is_some_and(|&p| p > bound) {
        return Err(Error::Cache("primes not ascending or above bound".into()));
    }
    Ok(PrimeCache { bound, primes })
}

pub fn read(path: &Path) -> Result<PrimeCache> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(cache_err)?;
    decode(&bytes)
}

pub fn write(path: &Path, cache: &PrimeCache) -> Result<()> {
    let mut f = fs::File::create(path).map_err(cache_err)?;
    f.write_all(&encode(cache)).map_err(cache_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let bytes = encode(&PrimeCache {
            bound: 10,
            primes: vec![2, 3, 5, 7],
        });
        assert_eq!(&bytes[..8], b"KLPRIME\0");
        assert_eq!(&bytes[8..12], &[1, 0, 0, 0]);
        assert_eq!(&bytes[16..24], &[10, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&bytes[24..32], &[4, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&bytes[32..40], &[2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(bytes.len(), 32 + 4 * 8);
    }

    #[test]
    fn rejects_corruption() {
        let good = encode(&PrimeCache {
            bound: 10,
            primes: vec![2, 3, 5, 7],
        });
        assert!(decode(&good[..20]).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        let mut bad = good.clone();
        bad[8] = 2;
        assert!(decode(&bad).is_err());
        assert!(decode(&good[..good.len() - 1]).is_err());
        let mut bad = good;
        bad[32] = 9;
        assert!(decode(&bad).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("primes.bin");
        let cache = PrimeCache {
            bound: 100,
            primes: crate::arith::sieve_primes(101)
                .into_iter()
                .map(u64::from)
                .collect(),
        };
        write(&path, &cache).unwrap();
        assert_eq!(read(&path).unwrap(), cache);
    }
}
