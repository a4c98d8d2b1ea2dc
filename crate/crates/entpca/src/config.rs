//! Benchmark run configuration, read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::io::Orientation;

/// Column subsample size used for pair statistics when the config says
/// nothing. `null` in the config means every column.
pub const DEFAULT_SUBSAMPLE: usize = 50;

fn default_subsample() -> Option<usize> {
    Some(DEFAULT_SUBSAMPLE)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// CSV file; relative paths resolve against the config file's directory.
    pub dataset: PathBuf,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default)]
    pub has_header: bool,
    /// Ranks to tabulate.
    pub k: Vec<usize>,
    #[serde(default)]
    pub center: bool,
    /// Gaussian queries per rank; 0 skips the query population.
    #[serde(default)]
    pub num_queries: usize,
    pub seed: u64,
    #[serde(default = "default_subsample")]
    pub subsample: Option<usize>,
    /// Gaussian vectors per space for Rayleigh-quotient statistics; 0 skips them.
    #[serde(default)]
    pub rq_vectors: usize,
    /// When set, also run the k-match sweep with `ent` fixed at this rank.
    #[serde(default)]
    pub kmatch_target_k: Option<usize>,
    /// Directory of the config file, against which a relative dataset path
    /// resolves. Not part of the echoed config.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse { path: path.to_owned(), msg: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.to_owned(), source })?;
        let mut cfg = Self::from_json(&text, path)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn dataset_path(&self) -> PathBuf {
        match &self.base_dir {
            Some(dir) if self.dataset.is_relative() => dir.join(&self.dataset),
            _ => self.dataset.clone(),
        }
    }

    /// Checks everything that does not need the dataset.
    pub fn validate(&self) -> Result<()> {
        if self.k.is_empty() {
            return Err(contract("k list is empty"));
        }
        if self.k.contains(&0) {
            return Err(contract("every k must be at least 1"));
        }
        if matches!(self.subsample, Some(s) if s < 2) {
            return Err(contract("subsample needs at least 2 columns"));
        }
        if self.kmatch_target_k == Some(0) {
            return Err(contract("kmatch_target_k must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_json(text, Path::new("cfg.json"))
    }

    #[test]
    fn defaults() {
        let cfg = parse(r#"{"dataset": "d.csv", "k": [1, 2], "seed": 7}"#).unwrap();
        assert_eq!(cfg.orientation, Orientation::ItemsAsRows);
        assert_eq!(cfg.subsample, Some(DEFAULT_SUBSAMPLE));
        assert_eq!(cfg.num_queries, 0);
        assert!(!cfg.center && !cfg.has_header);
        cfg.validate().unwrap();
    }

    #[test]
    fn null_subsample_means_all_pairs() {
        let cfg = parse(r#"{"dataset": "d.csv", "k": [1], "seed": 7, "subsample": null}"#).unwrap();
        assert_eq!(cfg.subsample, None);
    }

    #[test]
    fn seed_is_mandatory_and_unknown_fields_rejected() {
        let err = parse(r#"{"dataset": "d.csv", "k": [1]}"#).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("seed"));
        assert!(parse(r#"{"dataset": "d.csv", "k": [1], "seed": 1, "colour": 2}"#).is_err());
    }

    #[test]
    fn validation() {
        let cfg = parse(r#"{"dataset": "d.csv", "k": [], "seed": 1}"#).unwrap();
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        let cfg = parse(r#"{"dataset": "d.csv", "k": [0], "seed": 1}"#).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse(r#"{"dataset": "d.csv", "k": [3], "seed": 1, "orientation": "items-as-columns"}"#).unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
