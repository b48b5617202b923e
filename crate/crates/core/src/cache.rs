//! Content-addressed on-disk memoization of JSON results.
//!
//! An entry lives at `<dir>/<op>/<sha256(version, op, key)>.json` and stores
//! its own key and a digest of the payload. Entries whose digest or key does
//! not check out are reported as corrupt and recomputed; entries from another
//! format version are never looked up.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "REPSTAB_CACHE";

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    op: String,
    key: String,
    digest: String,
    payload: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheRecord {
    pub op: String,
    pub key: String,
    pub version: u32,
    pub bytes: u64,
    pub file: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// A corrupt entry was found and replaced.
    Recomputed,
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// A cache rooted at `dir`, or a disabled one.
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    /// `REPSTAB_CACHE` when set and nonempty, else `dir`.
    pub fn from_env_or(dir: Option<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Cache::new(Some(PathBuf::from(v))),
            _ => Cache::new(dir),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, dir: &Path, op: &str, key: &str) -> PathBuf {
        let id = sha_hex(format!("{CACHE_VERSION}\n{op}\n{key}").as_bytes());
        dir.join(op).join(format!("{id}.json"))
    }

    /// The stored payload, `None` on a miss, `CacheCorrupt` if the entry is damaged.
    pub fn get(&self, op: &str, key: &str) -> Result<Option<Value>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        let path = self.path(dir, op, key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io(e)),
        };
        let corrupt = || Error::CacheCorrupt(path.display().to_string());
        let entry: Entry = serde_json::from_str(&text).map_err(|_| corrupt())?;
        let body = serde_json::to_string(&entry.payload).map_err(|_| corrupt())?;
        if entry.version != CACHE_VERSION || entry.op != op || entry.key != key || entry.digest != sha_hex(body.as_bytes()) {
            return Err(corrupt());
        }
        Ok(Some(entry.payload))
    }

    pub fn put(&self, op: &str, key: &str, payload: &Value) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = self.path(dir, op, key);
        fs::create_dir_all(path.parent().unwrap()).map_err(io)?;
        let body = serde_json::to_string(payload).map_err(io)?;
        let entry = Entry { version: CACHE_VERSION, op: op.into(), key: key.into(), digest: sha_hex(body.as_bytes()), payload: payload.clone() };
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(&entry).map_err(io)?).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }

    /// Cached value for `(op, key)`, computing and storing it on a miss. A
    /// corrupt entry is reported on stderr and overwritten.
    pub fn get_or_compute(&self, op: &str, key: &str, f: impl FnOnce() -> Result<Value>) -> Result<(Value, Lookup)> {
        let status = match self.get(op, key) {
            Ok(Some(v)) => return Ok((v, Lookup::Hit)),
            Ok(None) => Lookup::Miss,
            Err(e @ Error::CacheCorrupt(_)) => {
                eprintln!("warning: {e}; recomputing");
                Lookup::Recomputed
            }
            Err(e) => return Err(e),
        };
        let v = f()?;
        self.put(op, key, &v)?;
        Ok((v, status))
    }

    /// Every readable entry, sorted by op and key. Unreadable files are listed
    /// with an empty key.
    pub fn info(&self) -> Result<Vec<CacheRecord>> {
        let Some(dir) = &self.dir else { return Ok(vec![]) };
        let mut out = vec![];
        let Ok(ops) = fs::read_dir(dir) else { return Ok(out) };
        for op in ops {
            let op = op.map_err(io)?;
            if !op.file_type().map_err(io)?.is_dir() {
                continue;
            }
            for f in fs::read_dir(op.path()).map_err(io)? {
                let f = f.map_err(io)?;
                let path = f.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let bytes = f.metadata().map_err(io)?.len();
                let parsed: Option<Entry> = fs::read_to_string(&path).ok().and_then(|t| serde_json::from_str(&t).ok());
                let (key, version) = parsed.map_or((String::new(), 0), |e| (e.key, e.version));
                out.push(CacheRecord {
                    op: op.file_name().to_string_lossy().into_owned(),
                    key,
                    version,
                    bytes,
                    file: path.file_name().unwrap().to_string_lossy().into_owned(),
                });
            }
        }
        out.sort_by(|a, b| (&a.op, &a.key, &a.file).cmp(&(&b.op, &b.key, &b.file)));
        Ok(out)
    }
}
