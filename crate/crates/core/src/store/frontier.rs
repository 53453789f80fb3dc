//! Frontier files: `8 + 8d` byte records of (solution id, cost vector), little-endian,
//! in front order. One file per DP table key, named `node<t>_key<hex>.sp`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pareto::{Cost, ParetoFront, SolutionId};

/// A DP table: key bytes to front.
pub type Table = BTreeMap<Vec<u8>, ParetoFront>;

pub fn record_size(dim: usize) -> usize {
    8 + 8 * dim
}

pub fn encode_frontier(front: &ParetoFront) -> Vec<u8> {
    let mut out = Vec::with_capacity(front.len() * record_size(front.dim()));
    for (c, id) in front.iter() {
        out.extend_from_slice(&id.to_le_bytes());
        for v in c {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_frontier(dim: usize, bytes: &[u8]) -> Result<ParetoFront> {
    let rs = record_size(dim);
    if !bytes.len().is_multiple_of(rs) {
        return Err(Error::Store(format!(
            "frontier data of {} bytes is not a multiple of {rs}",
            bytes.len()
        )));
    }
    let word = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
    let entries: Vec<(Cost, SolutionId)> = bytes
        .chunks_exact(rs)
        .map(|r| {
            let id = word(&r[..8]);
            let c: Cost = r[8..].chunks_exact(8).map(|x| word(x) as i64).collect();
            (c, id)
        })
        .collect();
    let f = ParetoFront::from_sorted(dim, entries);
    f.validate().map_err(Error::Store)?;
    Ok(f)
}

pub fn hex(key: &[u8]) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unhex(s: &str) -> Option<Vec<u8>> {
    if !s.len().is_multiple_of(2) {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).ok())
        .collect()
}

pub fn file_name(node: usize, key: &[u8]) -> String {
    format!("node{node}_key{}.sp", hex(key))
}

pub fn parse_file_name(name: &str) -> Option<(usize, Vec<u8>)> {
    let rest = name.strip_prefix("node")?.strip_suffix(".sp")?;
    let (node, key) = rest.split_once("_key")?;
    Some((node.parse().ok()?, unhex(key)?))
}

enum Backend {
    Memory(BTreeMap<usize, Table>),
    Dir {
        path: PathBuf,
        index: BTreeMap<usize, BTreeSet<Vec<u8>>>,
    },
}

/// Frontier files for every live DP table. Empty fronts are never stored.
pub struct FrontierStore {
    dim: usize,
    backend: Backend,
    bytes: u64,
}

impl FrontierStore {
    pub fn in_memory(dim: usize) -> Self {
        FrontierStore {
            dim,
            backend: Backend::Memory(BTreeMap::new()),
            bytes: 0,
        }
    }

    /// Use `path` as the frontier directory, creating it if needed. Existing
    /// `.sp` files are indexed.
    pub fn in_dir(dim: usize, path: &Path) -> Result<Self> {
        fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
        let mut index: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
        let mut bytes = 0;
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let name = entry.file_name();
            if let Some((node, key)) = name.to_str().and_then(parse_file_name) {
                bytes += entry.metadata().map_err(|e| Error::io(entry.path(), e))?.len();
                index.entry(node).or_default().insert(key);
            }
        }
        Ok(FrontierStore {
            dim,
            backend: Backend::Dir {
                path: path.to_path_buf(),
                index,
            },
            bytes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bytes currently held by frontier data.
    pub fn byte_len(&self) -> u64 {
        self.bytes
    }

    pub fn put(&mut self, node: usize, key: Vec<u8>, front: ParetoFront) -> Result<()> {
        if front.is_empty() {
            return Ok(());
        }
        let size = (front.len() * record_size(self.dim)) as u64;
        match &mut self.backend {
            Backend::Memory(m) => {
                if let Some(old) = m.entry(node).or_default().insert(key, front) {
                    self.bytes -= (old.len() * record_size(self.dim)) as u64;
                }
            }
            Backend::Dir { path, index } => {
                let p = path.join(file_name(node, &key));
                if index.get(&node).is_some_and(|s| s.contains(&key)) {
                    self.bytes -= fs::metadata(&p).map_err(|e| Error::io(&p, e))?.len();
                }
                fs::write(&p, encode_frontier(&front)).map_err(|e| Error::io(&p, e))?;
                index.entry(node).or_default().insert(key);
            }
        }
        self.bytes += size;
        Ok(())
    }

    pub fn put_table(&mut self, node: usize, table: Table) -> Result<()> {
        for (k, f) in table {
            self.put(node, k, f)?;
        }
        Ok(())
    }

    pub fn get(&self, node: usize, key: &[u8]) -> Result<Option<ParetoFront>> {
        match &self.backend {
            Backend::Memory(m) => Ok(m.get(&node).and_then(|t| t.get(key)).cloned()),
            Backend::Dir { path, index } => {
                if !index.get(&node).is_some_and(|s| s.contains(key)) {
                    return Ok(None);
                }
                let p = path.join(file_name(node, key));
                let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
                decode_frontier(self.dim, &bytes).map(Some)
            }
        }
    }

    pub fn keys(&self, node: usize) -> Vec<Vec<u8>> {
        match &self.backend {
            Backend::Memory(m) => m.get(&node).map(|t| t.keys().cloned().collect()).unwrap_or_default(),
            Backend::Dir { index, .. } => index
                .get(&node)
                .map(|s| s.iter().cloned().collect())
                .unwrap_or_default(),
        }
    }

    pub fn nodes(&self) -> Vec<usize> {
        match &self.backend {
            Backend::Memory(m) => m.keys().copied().collect(),
            Backend::Dir { index, .. } => index.keys().copied().collect(),
        }
    }

    /// Load a whole table without removing it.
    pub fn table(&self, node: usize) -> Result<Table> {
        let mut out = Table::new();
        for k in self.keys(node) {
            if let Some(f) = self.get(node, &k)? {
                out.insert(k, f);
            }
        }
        Ok(out)
    }

    /// Load a whole table and delete its files.
    pub fn take_table(&mut self, node: usize) -> Result<Table> {
        let table = match &mut self.backend {
            Backend::Memory(m) => m.remove(&node).unwrap_or_default(),
            Backend::Dir { .. } => {
                let t = self.table(node)?;
                self.remove_node(node)?;
                return Ok(t);
            }
        };
        self.bytes -= table
            .values()
            .map(|f| (f.len() * record_size(self.dim)) as u64)
            .sum::<u64>();
        Ok(table)
    }

    pub fn remove_node(&mut self, node: usize) -> Result<()> {
        match &mut self.backend {
            Backend::Memory(m) => {
                if let Some(t) = m.remove(&node) {
                    self.bytes -= t
                        .values()
                        .map(|f| (f.len() * record_size(self.dim)) as u64)
                        .sum::<u64>();
                }
            }
            Backend::Dir { path, index } => {
                for key in index.remove(&node).unwrap_or_default() {
                    let p = path.join(file_name(node, &key));
                    self.bytes -= fs::metadata(&p).map_err(|e| Error::io(&p, e))?.len();
                    fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
                }
            }
        }
        Ok(())
    }

    /// Every solution id referenced by a stored front.
    pub fn live_ids(&self) -> Result<Vec<SolutionId>> {
        let mut out = Vec::new();
        for node in self.nodes() {
            for key in self.keys(node) {
                if let Some(f) = self.get(node, &key)? {
                    out.extend(f.payloads().copied());
                }
            }
        }
        Ok(out)
    }

    /// Rewrite every stored id through `f`.
    pub fn remap_ids(&mut self, f: impl Fn(SolutionId) -> SolutionId) -> Result<()> {
        for node in self.nodes() {
            for key in self.keys(node) {
                if let Some(front) = self.get(node, &key)? {
                    let front = front.map_payload(&f);
                    self.put(node, key, front)?;
                }
            }
        }
        Ok(())
    }
}
