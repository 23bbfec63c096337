//! Machine-readable verification reports and the on-disk stats store.
//!
//! Reports serialize with fully deterministic field and entry order, so a
//! rerun with the same options is byte-identical. Exact rationals travel as
//! `num/den` strings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One named check with its witness values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub instance: String,
    pub values: Vec<(String, String)>,
    pub pass: bool,
}

/// The full verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub code_version: String,
    pub level: String,
    pub seed: u64,
    pub deterministic: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// A file-per-key JSON store for computed statistics, keyed by quantity,
/// parameters, and seed. Entries from other code versions are ignored.
pub struct StatsStore {
    dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsEntry {
    pub schema_version: u32,
    pub code_version: String,
    pub quantity: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub value: serde_json::Value,
}

impl StatsEntry {
    pub fn new(
        quantity: &str,
        n: usize,
        k: Option<usize>,
        mode: &str,
        seed: Option<u64>,
        value: serde_json::Value,
    ) -> Self {
        StatsEntry {
            schema_version: REPORT_SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            quantity: quantity.to_string(),
            n,
            k,
            m: None,
            mode: mode.to_string(),
            seed,
            value,
        }
    }

    fn key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.quantity,
            self.n,
            self.k.map_or("-".into(), |k| k.to_string()),
            self.m.map_or("-".into(), |m| m.to_string()),
            self.mode,
            self.seed.map_or("-".into(), |s| s.to_string()),
        )
    }
}

impl StatsStore {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(StatsStore {
            dir: dir.to_path_buf(),
        })
    }

    fn path_for(&self, key: &str) -> PathBuf {
        let mut hasher = Sha256::new();
        hasher.update(key.as_bytes());
        let digest = hasher.finalize();
        let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}.json"))
    }

    pub fn put(&self, entry: &StatsEntry) -> Result<()> {
        let path = self.path_for(&entry.key());
        fs::write(path, serde_json::to_string_pretty(entry).expect("entry"))?;
        Ok(())
    }

    /// Returns a cached entry only when quantity, key, and code version all
    /// match; anything else counts as a miss.
    pub fn get(
        &self,
        quantity: &str,
        n: usize,
        k: Option<usize>,
        mode: &str,
        seed: Option<u64>,
    ) -> Option<StatsEntry> {
        let probe = StatsEntry::new(quantity, n, k, mode, seed, serde_json::Value::Null);
        let path = self.path_for(&probe.key());
        let data = fs::read_to_string(path).ok()?;
        let entry: StatsEntry = serde_json::from_str(&data).ok()?;
        (entry.code_version == env!("CARGO_PKG_VERSION")).then_some(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_roundtrip_and_version_check() {
        let dir = std::env::temp_dir().join(format!("chambers-store-{}", std::process::id()));
        let store = StatsStore::open(&dir).unwrap();
        let entry = StatsEntry::new(
            "delta",
            3,
            Some(4),
            "exhaustive",
            None,
            serde_json::json!("6/35"),
        );
        store.put(&entry).unwrap();
        let back = store.get("delta", 3, Some(4), "exhaustive", None).unwrap();
        assert_eq!(back.value, serde_json::json!("6/35"));
        assert!(store.get("delta", 3, Some(5), "exhaustive", None).is_none());
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn report_serialization_is_stable() {
        let report = VerifyReport {
            schema_version: REPORT_SCHEMA_VERSION,
            code_version: "x".into(),
            level: "quick".into(),
            seed: 7,
            deterministic: true,
            checks: vec![CheckResult {
                name: "a".into(),
                instance: "b".into(),
                values: vec![("k".into(), "v".into())],
                pass: true,
            }],
            passed: true,
            runtime_ms: None,
        };
        assert_eq!(report.to_json(), report.to_json());
        assert!(!report.to_json().contains("runtime_ms"));
    }
}
