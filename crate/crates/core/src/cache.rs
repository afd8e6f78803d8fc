//! On-disk cache for expensive components.
//!
//! Entries are JSON envelopes carrying their key and a SHA-256 digest of
//! the payload. Anything that fails to parse, carries the wrong key or a
//! wrong digest is deleted and treated as a miss. Writes go through a
//! temporary file in the cache directory followed by an atomic rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Bumped whenever a cached payload layout or its meaning changes.
pub const CACHE_FORMAT: u32 = 1;

pub fn code_version() -> String {
    format!("{}+f{}", env!("CARGO_PKG_VERSION"), CACHE_FORMAT)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub module: String,
    pub n: usize,
    pub d: usize,
    pub weight: usize,
    pub version: String,
}

impl CacheKey {
    pub fn new(module: &str, n: usize, d: usize, weight: usize) -> Self {
        CacheKey {
            module: module.to_string(),
            n,
            d,
            weight,
            version: code_version(),
        }
    }

    fn file_name(&self) -> String {
        format!(
            "{}_n{}_d{}_w{}_v{}.json",
            self.module, self.n, self.d, self.weight, self.version
        )
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    key: CacheKey,
    sha256: String,
    payload: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    fn digest(payload: &serde_json::Value) -> String {
        let bytes = serde_json::to_vec(payload).expect("json values serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn store<T: Serialize>(&self, key: &CacheKey, value: &T) -> Result<()> {
        let payload = serde_json::to_value(value)?;
        let env = Envelope {
            key: key.clone(),
            sha256: Self::digest(&payload),
            payload,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, &env)?;
        tmp.flush()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// Returns the cached value, or `None` on a miss. Corrupt entries are
    /// removed.
    pub fn load<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let path = self.path_for(key);
        let bytes = std::fs::read(&path).ok()?;
        let parsed = serde_json::from_slice::<Envelope>(&bytes)
            .ok()
            .filter(|env| env.key == *key && env.sha256 == Self::digest(&env.payload))
            .and_then(|env| serde_json::from_value::<T>(env.payload).ok());
        if parsed.is_none() {
            let _ = std::fs::remove_file(&path);
        }
        parsed
    }

    pub fn get_or_compute<T, F>(&self, key: &CacheKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.load(key) {
            return Ok(v);
        }
        let v = compute()?;
        self.store(key, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_version_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let key = CacheKey::new("test", 3, 4, 2);
        assert_eq!(cache.load::<Vec<u32>>(&key), None);
        let mut calls = 0;
        let v = cache
            .get_or_compute(&key, || {
                calls += 1;
                Ok(vec![1u32, 2, 3])
            })
            .unwrap();
        assert_eq!(v, vec![1, 2, 3]);
        let first = std::fs::read(cache.path_for(&key)).unwrap();
        let again: Vec<u32> = cache.get_or_compute(&key, || unreachable!()).unwrap();
        assert_eq!(again, v);
        assert_eq!(calls, 1);
        cache.store(&key, &again).unwrap();
        assert_eq!(std::fs::read(cache.path_for(&key)).unwrap(), first);

        let mut bumped = key.clone();
        bumped.version.push_str("-next");
        assert_eq!(cache.load::<Vec<u32>>(&bumped), None);
    }

    #[test]
    fn corrupt_entries_are_discarded() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let key = CacheKey::new("test", 1, 4, 1);
        cache.store(&key, &vec![5u32]).unwrap();
        let path = cache.path_for(&key);
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("[5]", "[6]");
        std::fs::write(&path, text).unwrap();
        assert_eq!(cache.load::<Vec<u32>>(&key), None);
        assert!(!path.exists());
        std::fs::write(&path, b"{not json").unwrap();
        assert_eq!(cache.load::<Vec<u32>>(&key), None);
    }
}
