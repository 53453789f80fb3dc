//! Run configuration from a TOML file, overridden by command line flags.
//!
//! ```toml
//! threads = 4
//! max_disk = 10_000_000_000
//! fusion = true
//! optimize_root = false
//! store = "store"
//!
//! [heuristic]
//! enabled = true
//! n_lower_max = 500
//! n_h_max = 350
//! n_upper_max = 200
//! subsample = 0.04
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::heuristic::HeuristicConfig;
use crate::solve::{ProblemKind, SolveOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<ProblemKind>,
    pub graph: Option<PathBuf>,
    pub td: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub threads: usize,
    /// Disk budget in bytes for the log and frontier files.
    pub max_disk: Option<u64>,
    pub overestimate: f64,
    pub heuristic: HeuristicConfig,
    pub fusion: bool,
    /// 1-based bag id.
    pub root: Option<usize>,
    pub optimize_root: bool,
    pub out: Option<PathBuf>,
    pub solutions: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: None,
            graph: None,
            td: None,
            store: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_disk: None,
            overestimate: 1.5,
            heuristic: HeuristicConfig::default(),
            fusion: true,
            root: None,
            optimize_root: false,
            out: None,
            solutions: None,
            stats: None,
            plot: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Usage("threads must be at least 1".into()));
        }
        if self.max_disk == Some(0) {
            return Err(Error::Usage("max_disk must be positive".into()));
        }
        if !(self.heuristic.subsample > 0.0 && self.heuristic.subsample <= 1.0) {
            return Err(Error::Usage("heuristic.subsample must lie in (0, 1]".into()));
        }
        if self.root == Some(0) {
            return Err(Error::Usage("root bag ids start at 1".into()));
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            root: self.root.map(|r| r - 1),
            optimize_root: self.optimize_root,
            fusion: self.fusion,
            engine: EngineConfig {
                heuristic: self.heuristic,
                max_disk: self.max_disk,
                overestimate: self.overestimate,
                retain_tables: false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_heuristic_keys() {
        let cfg = RunConfig::from_toml("threads = 2\n[heuristic]\nenabled = false\nn_lower_max = 10\n").unwrap();
        assert_eq!(cfg.threads, 2);
        assert!(!cfg.heuristic.enabled);
        assert_eq!(cfg.heuristic.n_lower_max, 10);
        assert_eq!(cfg.heuristic.n_h_max, 350);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("threads = 0").is_err());
        assert!(RunConfig::from_toml("max_disk = 0").is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }
}
