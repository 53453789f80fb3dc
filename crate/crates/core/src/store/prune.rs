//! In-place mark and compact of the provenance log.
//!
//! Phase one sets the mark bit on every record reachable from a stored front.
//! Phase two slides marked records down so that each keeps its relative order
//! (new id = number of marked records before it), rewrites references through
//! an in-memory rank directory, leaves RELOCATED forwarders in the tail that is
//! about to be cut off, rewrites the frontier files and truncates the log.

use super::frontier::FrontierStore;
use super::log::ProvenanceLog;
use super::record::Record;
use crate::error::{Error, Result};
use crate::pareto::{SolutionId, EMPTY};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneReport {
    pub records_before: u64,
    pub records_after: u64,
}

struct RankDirectory {
    bits: Vec<u64>,
    prefix: Vec<u64>,
}

impl RankDirectory {
    fn new(len: u64) -> Self {
        RankDirectory {
            bits: vec![0; (len as usize).div_ceil(64)],
            prefix: Vec::new(),
        }
    }

    fn set(&mut self, i: u64) {
        self.bits[(i / 64) as usize] |= 1 << (i % 64);
    }

    fn get(&self, i: u64) -> bool {
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn build(&mut self) -> u64 {
        let mut acc = 0;
        self.prefix = self
            .bits
            .iter()
            .map(|w| {
                let before = acc;
                acc += w.count_ones() as u64;
                before
            })
            .collect();
        acc
    }

    fn rank(&self, i: u64) -> u64 {
        let w = (i / 64) as usize;
        self.prefix[w] + (self.bits[w] & ((1u64 << (i % 64)) - 1)).count_ones() as u64
    }
}

pub fn prune(log: &mut ProvenanceLog, frontiers: &mut FrontierStore) -> Result<PruneReport> {
    let before = log.len();

    // phase 1: mark
    let mut stack: Vec<SolutionId> = frontiers.live_ids()?.into_iter().filter(|&x| x != EMPTY).collect();
    while let Some(id) = stack.pop() {
        let (rec, marked) = log.read(id)?;
        if marked {
            continue;
        }
        if let Record::Relocated { .. } = rec {
            return Err(Error::NeedsRecovery(format!("record {id} is a relocation forwarder")));
        }
        log.write_at(id, &rec, true)?;
        stack.extend(rec.references());
    }

    // phase 2: compact
    let mut dir = RankDirectory::new(before);
    for i in 0..before {
        if log.read(i)?.1 {
            dir.set(i);
        }
    }
    let n = dir.build();
    for i in 0..before {
        if !dir.get(i) {
            continue;
        }
        let (rec, _) = log.read(i)?;
        let moved = rec.map_refs(|r| dir.rank(r));
        let to = dir.rank(i);
        log.write_at(to, &moved, false)?;
        if i >= n {
            log.write_at(i, &Record::Relocated { to }, false)?;
        }
    }
    frontiers.remap_ids(|x| if x == EMPTY { EMPTY } else { dir.rank(x) })?;
    log.truncate(n)?;
    log.flush()?;
    Ok(PruneReport {
        records_before: before,
        records_after: n,
    })
}

/// Bring a log back to a consistent state after an interrupted prune.
///
/// Leftover mark bits are cleared. Forwarders mean compaction had started and
/// frontier ids may no longer match; that case is reported, not repaired.
pub fn recover(log: &mut ProvenanceLog) -> Result<u64> {
    let mut cleared = 0;
    for i in 0..log.len() {
        if let (Record::Relocated { .. }, _) = log.read(i)? {
            return Err(Error::NeedsRecovery(format!(
                "record {i} is a relocation forwarder; compaction was interrupted"
            )));
        }
    }
    for i in 0..log.len() {
        let (rec, marked) = log.read(i)?;
        if marked {
            log.write_at(i, &rec, false)?;
            cleared += 1;
        }
    }
    log.flush()?;
    Ok(cleared)
}

/// Whether the log carries leftovers of an interrupted prune.
pub fn needs_recovery(log: &mut ProvenanceLog) -> Result<bool> {
    for i in 0..log.len() {
        let (rec, marked) = log.read(i)?;
        if marked || matches!(rec, Record::Relocated { .. }) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{cost, ParetoFront};

    fn front_of(ids: &[SolutionId]) -> ParetoFront {
        ParetoFront::from_sorted(
            2,
            ids.iter()
                .enumerate()
                .map(|(k, &id)| (cost(&[k as i64, -(k as i64)]), id))
                .collect(),
        )
    }

    #[test]
    fn one_of_three_reachable() {
        let mut log = ProvenanceLog::in_memory();
        for e in 0..3 {
            log.append(&Record::Introduce {
                base: EMPTY,
                element: e,
            })
            .unwrap();
        }
        let mut fr = FrontierStore::in_memory(2);
        fr.put(0, vec![], front_of(&[1])).unwrap();
        let rep = prune(&mut log, &mut fr).unwrap();
        assert_eq!(rep.records_after, 1);
        assert_eq!(log.byte_len(), 16);
        assert_eq!(
            log.read(0).unwrap(),
            (
                Record::Introduce {
                    base: EMPTY,
                    element: 1
                },
                false
            )
        );
        assert_eq!(fr.live_ids().unwrap(), vec![0]);
    }

    #[test]
    fn all_reachable_is_identity() {
        let mut log = ProvenanceLog::in_memory();
        log.append(&Record::Introduce {
            base: EMPTY,
            element: 0,
        })
        .unwrap();
        log.append(&Record::Introduce { base: 0, element: 1 }).unwrap();
        log.append(&Record::Join { left: 0, right: 1 }).unwrap();
        let before = log.to_bytes().unwrap();
        let mut fr = FrontierStore::in_memory(2);
        fr.put(0, vec![], front_of(&[2])).unwrap();
        prune(&mut log, &mut fr).unwrap();
        assert_eq!(log.to_bytes().unwrap(), before);
    }

    #[test]
    fn diamond_shares_base() {
        let mut log = ProvenanceLog::in_memory();
        log.append(&Record::Introduce {
            base: EMPTY,
            element: 9,
        })
        .unwrap(); // 0 garbage
        log.append(&Record::Introduce {
            base: EMPTY,
            element: 1,
        })
        .unwrap(); // 1 base
        log.append(&Record::Introduce { base: 0, element: 5 }).unwrap(); // 2 garbage
        log.append(&Record::Introduce { base: 1, element: 2 }).unwrap(); // 3
        log.append(&Record::Introduce { base: 1, element: 3 }).unwrap(); // 4
        let mut fr = FrontierStore::in_memory(2);
        fr.put(7, vec![1], front_of(&[3, 4])).unwrap();
        prune(&mut log, &mut fr).unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(
            log.read(0).unwrap().0,
            Record::Introduce {
                base: EMPTY,
                element: 1
            }
        );
        assert_eq!(log.read(1).unwrap().0, Record::Introduce { base: 0, element: 2 });
        assert_eq!(log.read(2).unwrap().0, Record::Introduce { base: 0, element: 3 });
        assert_eq!(fr.live_ids().unwrap(), vec![1, 2]);
    }

    #[test]
    fn recovery_clears_marks() {
        let mut log = ProvenanceLog::in_memory();
        let r = Record::Introduce {
            base: EMPTY,
            element: 0,
        };
        log.append(&r).unwrap();
        log.write_at(0, &r, true).unwrap();
        assert!(needs_recovery(&mut log).unwrap());
        assert_eq!(recover(&mut log).unwrap(), 1);
        assert!(!needs_recovery(&mut log).unwrap());
        log.append(&Record::Relocated { to: 0 }).unwrap();
        assert!(matches!(recover(&mut log), Err(Error::NeedsRecovery(_))));
    }
}
