use std::collections::{BTreeMap, HashMap};

use super::log::ProvenanceLog;
use super::record::Record;
use crate::error::{Error, Result};
use crate::pareto::{SolutionId, EMPTY};

const DEFAULT_CACHE: usize = 1 << 16;

/// Follows provenance pointers back to the element set of a solution.
pub struct Reconstructor<'a> {
    log: &'a mut ProvenanceLog,
    /// Bags that SKIPPED masks index into, by node id.
    skip_bags: &'a BTreeMap<u32, Vec<u32>>,
    cache: HashMap<SolutionId, Record>,
    cache_cap: usize,
}

impl<'a> Reconstructor<'a> {
    pub fn new(log: &'a mut ProvenanceLog, skip_bags: &'a BTreeMap<u32, Vec<u32>>) -> Self {
        Reconstructor {
            log,
            skip_bags,
            cache: HashMap::new(),
            cache_cap: DEFAULT_CACHE,
        }
    }

    pub fn with_cache(mut self, cap: usize) -> Self {
        self.cache_cap = cap;
        self
    }

    fn record(&mut self, id: SolutionId) -> Result<Record> {
        if let Some(r) = self.cache.get(&id) {
            return Ok(*r);
        }
        let (rec, _) = self.log.read(id)?;
        if self.cache.len() >= self.cache_cap {
            self.cache.clear();
        }
        self.cache.insert(id, rec);
        Ok(rec)
    }

    /// Sorted, duplicate-free element ids of solution `id`.
    pub fn elements(&mut self, id: SolutionId) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if x == EMPTY {
                continue;
            }
            match self.record(x)? {
                Record::Introduce { base, element } => {
                    out.push(element);
                    stack.push(base);
                }
                Record::Join { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
                Record::Skipped { base, node, mask } => {
                    let bag = self
                        .skip_bags
                        .get(&node)
                        .ok_or_else(|| Error::Store(format!("no bag recorded for node {node}")))?;
                    for (i, &v) in bag.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            out.push(v as u64);
                        }
                    }
                    stack.push(base);
                }
                Record::Relocated { .. } => {
                    return Err(Error::NeedsRecovery(format!("record {x} is a relocation forwarder")));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}
