use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Length of the hash prefix used in output file names.
pub const NAME_HASH_LEN: usize = 12;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Identity of one CLI invocation; every output names and embeds its hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub output_dir: String,
    /// Taken from `SOURCE_DATE_EPOCH` when set; never from the wall clock.
    pub timestamp: Option<String>,
    pub artifact_version: String,
    /// SHA-256 of the effective configuration (file plus overrides) as JSON.
    pub config_hash: String,
    pub manifest_hash: String,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, cfg: &RunConfig, out: &Path) -> Self {
        let effective = serde_json::to_vec(cfg).expect("config serializes");
        let mut m = RunManifest {
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            seed: cfg.seed,
            output_dir: out.display().to_string(),
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(&effective),
            manifest_hash: String::new(),
        };
        let body = serde_json::to_vec(&m).expect("manifest serializes");
        m.manifest_hash = sha256_hex(&body);
        m
    }

    pub fn short_hash(&self) -> &str {
        &self.manifest_hash[..NAME_HASH_LEN]
    }
}

/// Writes `<stem>_<hash>.<ext>` files under the output directory. The
/// directory and the manifest file appear with the first output.
pub struct OutputSink {
    dir: PathBuf,
    hash: String,
    manifest: Option<String>,
    pub written: Vec<PathBuf>,
}

impl OutputSink {
    pub fn new(manifest: &RunManifest) -> Self {
        let mut body = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        body.push('\n');
        OutputSink {
            dir: PathBuf::from(&manifest.output_dir),
            hash: manifest.short_hash().to_string(),
            manifest: Some(body),
            written: Vec::new(),
        }
    }

    pub fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{stem}_{}.{ext}", self.hash))
    }

    pub fn text(&mut self, stem: &str, ext: &str, body: &str) -> std::io::Result<PathBuf> {
        if let Some(manifest) = self.manifest.take() {
            fs::create_dir_all(&self.dir)?;
            self.text("manifest", "json", &manifest)?;
        }
        let p = self.path(stem, ext);
        fs::write(&p, body)?;
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> std::io::Result<PathBuf> {
        let mut body = serde_json::to_string_pretty(value).expect("report serializes");
        body.push('\n');
        self.text(stem, "json", &body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let cfg = RunConfig::parse("seed = 1\nsites = 3\ncut = 2\n").unwrap();
        let a = RunManifest::new("verify", None, &cfg, Path::new("out"));
        let b = RunManifest::new("verify", None, &cfg, Path::new("out"));
        assert_eq!(a.manifest_hash, b.manifest_hash);
        let c = RunManifest::new("series", None, &cfg, Path::new("out"));
        assert_ne!(a.manifest_hash, c.manifest_hash);
        assert_eq!(a.short_hash().len(), NAME_HASH_LEN);
    }
}
