//! Provenance log, frontier files and their on-disk layout.
//!
//! A store directory holds `origin.bin` (the log), `frontiers/` (one `.sp`
//! file per nonempty DP table entry) and `meta.json`.

pub mod frontier;
pub mod log;
pub mod prune;
pub mod reconstruct;
pub mod record;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use frontier::{FrontierStore, Table};
pub use log::ProvenanceLog;
pub use prune::{prune, recover, PruneReport};
pub use reconstruct::Reconstructor;
pub use record::{Record, RECORD_SIZE};

use crate::error::{Error, Result};
use crate::pareto::{ParetoFront, SolutionId};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreMeta {
    pub problem: String,
    pub dim: usize,
    pub root_node: usize,
    /// Hex key of the root table entry.
    pub root_key: String,
    /// Constant added to every reported cost vector, in tenths.
    pub offset: Vec<i64>,
    /// Join bags of nodes that write SKIPPED records.
    pub skip_bags: BTreeMap<u32, Vec<u32>>,
    /// Display names of element ids; raw ids are printed when empty.
    #[serde(default)]
    pub labels: Vec<String>,
}

pub struct Store {
    pub log: ProvenanceLog,
    pub frontiers: FrontierStore,
    pub meta: StoreMeta,
    dir: Option<PathBuf>,
}

impl Store {
    pub fn in_memory(dim: usize) -> Self {
        Store {
            log: ProvenanceLog::in_memory(),
            frontiers: FrontierStore::in_memory(dim),
            meta: StoreMeta {
                dim,
                ..Default::default()
            },
            dir: None,
        }
    }

    /// Start a fresh store in `dir`, replacing any previous contents.
    pub fn create(dir: &Path, dim: usize) -> Result<Self> {
        let fdir = dir.join("frontiers");
        if fdir.exists() {
            fs::remove_dir_all(&fdir).map_err(|e| Error::io(&fdir, e))?;
        }
        fs::create_dir_all(&fdir).map_err(|e| Error::io(&fdir, e))?;
        Ok(Store {
            log: ProvenanceLog::create(&dir.join("origin.bin"))?,
            frontiers: FrontierStore::in_dir(dim, &fdir)?,
            meta: StoreMeta {
                dim,
                ..Default::default()
            },
            dir: Some(dir.to_path_buf()),
        })
    }

    /// Open an existing store, refusing one left behind by an interrupted prune.
    pub fn open(dir: &Path) -> Result<Self> {
        let mp = dir.join("meta.json");
        let text = fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
        let meta: StoreMeta = serde_json::from_str(&text)?;
        let mut log = ProvenanceLog::open(&dir.join("origin.bin"))?;
        if prune::needs_recovery(&mut log)? {
            return Err(Error::NeedsRecovery(format!(
                "{} was left mid-prune; run a recovery pass first",
                dir.display()
            )));
        }
        Ok(Store {
            log,
            frontiers: FrontierStore::in_dir(meta.dim, &dir.join("frontiers"))?,
            meta,
            dir: Some(dir.to_path_buf()),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Bytes on disk (or held in memory) by the log and frontier data.
    pub fn usage(&self) -> u64 {
        self.log.byte_len() + self.frontiers.byte_len()
    }

    pub fn write_meta(&mut self) -> Result<()> {
        self.log.flush()?;
        if let Some(dir) = &self.dir {
            let p = dir.join("meta.json");
            let text = serde_json::to_string_pretty(&self.meta)?;
            fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }

    pub fn prune(&mut self) -> Result<PruneReport> {
        prune(&mut self.log, &mut self.frontiers)
    }

    /// The root front as recorded in the metadata.
    pub fn root_front(&self) -> Result<ParetoFront> {
        let key = frontier::unhex(&self.meta.root_key)
            .ok_or_else(|| Error::Store(format!("bad root key {:?}", self.meta.root_key)))?;
        Ok(self
            .frontiers
            .get(self.meta.root_node, &key)?
            .unwrap_or_else(|| ParetoFront::new(self.meta.dim)))
    }

    pub fn elements(&mut self, id: SolutionId) -> Result<Vec<u64>> {
        Reconstructor::new(&mut self.log, &self.meta.skip_bags).elements(id)
    }

    /// Element sets of every entry of `front`, in front order.
    pub fn reconstruct_all(&mut self, front: &ParetoFront) -> Result<Vec<Vec<u64>>> {
        let mut r = Reconstructor::new(&mut self.log, &self.meta.skip_bags);
        front.payloads().map(|&id| r.elements(id)).collect()
    }
}
