//! On-disk cache of long computations, keyed by a content hash of their
//! input and stored as gzip-compressed JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::VerifyError;

/// Bumped whenever the layout of cached values changes.
const CACHE_VERSION: &str = "coinv-cache-1";

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// A cache that never stores anything.
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Result<Cache, VerifyError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| VerifyError::io(&dir, e))?;
        Ok(Cache { dir: Some(dir) })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Hex SHA-256 of the kind and the serialized input.
    pub fn key<K: Serialize>(kind: &str, input: &K) -> Result<String, VerifyError> {
        let mut h = Sha256::new();
        h.update(CACHE_VERSION.as_bytes());
        h.update([0]);
        h.update(kind.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(input)?);
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{key}.json.gz")))
    }

    /// The cached value for `input`, or `compute()` (stored on success).
    /// Unreadable cache entries are recomputed and overwritten.
    pub fn get_or_compute<K, T, F>(&self, kind: &str, input: &K, compute: F) -> Result<(T, bool), VerifyError>
    where
        K: Serialize,
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, VerifyError>,
    {
        let Some(path) = self.path(kind, &Self::key(kind, input)?) else {
            return Ok((compute()?, false));
        };
        if let Ok(f) = File::open(&path) {
            if let Ok(v) = serde_json::from_reader(GzDecoder::new(BufReader::new(f))) {
                return Ok((v, true));
            }
        }
        let v = compute()?;
        let tmp = path.with_extension("tmp");
        {
            let f = File::create(&tmp).map_err(|e| VerifyError::io(&tmp, e))?;
            let mut enc = GzEncoder::new(BufWriter::new(f), Compression::default());
            serde_json::to_writer(&mut enc, &v)?;
            enc.finish().map_err(|e| VerifyError::io(&tmp, e))?;
        }
        std::fs::rename(&tmp, &path).map_err(|e| VerifyError::io(&path, e))?;
        Ok((v, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path()).unwrap();
        let (v, hit) = cache.get_or_compute("t", &[1, 2], || Ok(vec![7u64, 8])).unwrap();
        assert_eq!((v, hit), (vec![7, 8], false));
        let (v, hit) = cache.get_or_compute("t", &[1, 2], || -> Result<Vec<u64>, VerifyError> { panic!("cached") }).unwrap();
        assert_eq!((v, hit), (vec![7, 8], true));
        let (_, hit) = cache.get_or_compute("t", &[1, 3], || Ok(vec![0u64])).unwrap();
        assert!(!hit);
    }

    #[test]
    fn corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path()).unwrap();
        cache.get_or_compute("t", &"x", || Ok(1u32)).unwrap();
        for e in std::fs::read_dir(dir.path()).unwrap() {
            std::fs::write(e.unwrap().path(), b"not gzip").unwrap();
        }
        let (v, hit) = cache.get_or_compute("t", &"x", || Ok(2u32)).unwrap();
        assert_eq!((v, hit), (2, false));
    }

    #[test]
    fn disabled_cache_always_computes() {
        let (v, hit) = Cache::disabled().get_or_compute("t", &0, || Ok(5u8)).unwrap();
        assert_eq!((v, hit), (5, false));
    }
}
