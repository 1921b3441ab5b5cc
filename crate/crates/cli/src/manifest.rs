use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;

/// Everything that determines a run's outputs. Identical manifests give
/// byte-identical files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub paths: usize,
    pub grid_points: usize,
    pub truncation: usize,
    pub resolution: usize,
    pub version: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    /// Built from the effective config, after command-line overrides.
    pub fn new(config: &Config) -> Self {
        Self {
            config_hash: sha256_hex(config.canonical_json().as_bytes()),
            seed: config.mc.seed,
            paths: config.mc.paths,
            grid_points: config.grid.points,
            truncation: config.series.truncation,
            resolution: config.quadrature.resolution,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// Hash of the serialized manifest, embedded in every output file.
    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// First line of every CSV output.
    pub fn csv_header(&self) -> String {
        format!("# manifest {}\n", self.hash())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_effective_config() {
        let a = RunManifest::new(&Config::default());
        assert_eq!(a, RunManifest::new(&Config::default()));
        let mut c = Config::default();
        c.mc.seed = 2;
        let b = RunManifest::new(&c);
        assert_ne!(a.config_hash, b.config_hash);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
