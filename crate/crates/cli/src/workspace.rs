//! Configuration file, cache directory and the content-addressed manifest.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CONFIG_FILE: &str = "rshintani.conf";
pub const CACHE_ENV: &str = "RSHINTANI_CACHE_DIR";
const MANIFEST: &str = "manifest.json";

/// Flat `key = value` settings; `#` starts a comment.
#[derive(Clone, Debug, Default)]
pub struct Config {
    pub values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("{CONFIG_FILE}:{}: expected key = value", i + 1))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Config> {
        match fs::read_to_string(path) {
            Ok(t) => Config::parse(&t),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Config::default()),
            Err(e) => Err(e).with_context(|| format!("reading {}", path.display())),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.values.get(key).map(|v| v.parse().map_err(|_| anyhow!("config key {key}: not an integer: {v}"))).transpose()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!("replacing {}: {}", path.display(), e.error))?;
    Ok(())
}

pub struct Workspace {
    pub cache_dir: PathBuf,
    pub config: Config,
    manifest: BTreeMap<String, String>,
}

impl Workspace {
    pub fn open(config: Config, cache_override: Option<PathBuf>) -> Result<Workspace> {
        let cache_dir = cache_override
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| config.values.get("cache_dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".rshintani-cache"));
        let mut ws = Workspace { cache_dir, config, manifest: BTreeMap::new() };
        ws.manifest = ws.read_manifest()?;
        Ok(ws)
    }

    fn read_manifest(&self) -> Result<BTreeMap<String, String>> {
        let path = self.cache_dir.join(MANIFEST);
        let text = match fs::read(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        let v: Value = serde_json::from_slice(&text).with_context(|| format!("parsing {}", path.display()))?;
        let entries = v.get("entries").and_then(Value::as_object).ok_or_else(|| anyhow!("manifest lacks \"entries\""))?;
        entries
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.as_str().ok_or_else(|| anyhow!("manifest entry {k} is not a digest"))?.to_string())))
            .collect()
    }

    fn artifact_path(&self, digest: &str) -> PathBuf {
        self.cache_dir.join(format!("{digest}.json"))
    }

    /// Cached bytes for `key`, verified against the recorded digest.
    pub fn get(&self, key: &str) -> Result<Option<Vec<u8>>> {
        let Some(digest) = self.manifest.get(key) else { return Ok(None) };
        let bytes = fs::read(self.artifact_path(digest)).with_context(|| format!("cache artifact for {key}"))?;
        if sha256_hex(&bytes) != *digest {
            bail!("cache artifact for {key} is corrupt (digest mismatch)");
        }
        Ok(Some(bytes))
    }

    /// Records `bytes` under `key`.  Existing entries are never replaced.
    pub fn put(&mut self, key: &str, bytes: &[u8]) -> Result<()> {
        let digest = sha256_hex(bytes);
        if let Some(old) = self.manifest.get(key) {
            if *old != digest {
                bail!("cache entry {key} already exists with different content");
            }
            return Ok(());
        }
        let path = self.artifact_path(&digest);
        if !path.exists() {
            write_atomic(&path, bytes)?;
        }
        // merge with entries written by other runs since we loaded
        let mut merged = self.read_manifest()?;
        merged.insert(key.to_string(), digest);
        let entries: Map<String, Value> = merged.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        write_atomic(&self.cache_dir.join(MANIFEST), &crate::json::to_bytes(&json!({ "entries": entries })))?;
        self.manifest = merged;
        Ok(())
    }

    /// Returns cached bytes for `key` or computes, stores and returns them.
    pub fn cached(&mut self, key: &str, compute: impl FnOnce() -> Result<Value>) -> Result<(Vec<u8>, bool)> {
        if let Some(b) = self.get(key)? {
            return Ok((b, true));
        }
        let bytes = crate::json::to_bytes(&compute()?);
        self.put(key, &bytes)?;
        Ok((bytes, false))
    }

    pub fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        self.manifest.keys().filter(|k| k.starts_with(prefix)).cloned().collect()
    }
}
