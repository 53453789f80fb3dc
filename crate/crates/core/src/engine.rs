//! Bottom-up driver shared by all problem solvers.
//!
//! A solver turns the finished child tables of a node into a table whose
//! payloads are [`Pending`] provenance. The engine commits those to the log in
//! key order (so ids do not depend on thread scheduling), stores the table and
//! drops the child tables.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::estimator::estimate_nodes;
use crate::heuristic::{HeuristicConfig, JoinStats};
use crate::pareto::{ParetoFront, SolutionId, EMPTY};
use crate::store::{Record, Store, Table, RECORD_SIZE};
use crate::td::{NiceTd, NodeKind};

/// One side of a join: a child solution plus the skipped introduces
/// (bits over the join bag) that surface with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SideRef {
    pub id: SolutionId,
    pub mask: u32,
}

impl SideRef {
    pub fn plain(id: SolutionId) -> Self {
        SideRef { id, mask: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pending {
    Keep(SolutionId),
    Intro { base: SolutionId, element: u64 },
    Join(SideRef, SideRef),
}

pub type PendingTable = BTreeMap<Vec<u8>, ParetoFront<Pending>>;

/// Per-node context handed to solvers.
pub struct NodeCx<'a> {
    pub heuristic: &'a HeuristicConfig,
    pub joins: JoinStats,
}

pub trait NodeSolver: Sync {
    fn problem(&self) -> &'static str;
    fn dim(&self) -> usize;
    /// Key of the answer in the root table.
    fn root_key(&self) -> Vec<u8>;
    fn solve_node(&self, ntd: &NiceTd, t: usize, children: Vec<Table>, cx: &mut NodeCx) -> Result<PendingTable>;
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub heuristic: HeuristicConfig,
    /// Prune the log before a node whose projected growth would exceed this.
    pub max_disk: Option<u64>,
    pub overestimate: f64,
    /// Keep every node's table in the store (for inspection in tests).
    pub retain_tables: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            heuristic: HeuristicConfig::default(),
            max_disk: None,
            overestimate: 1.5,
            retain_tables: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeStat {
    pub node: usize,
    pub kind: &'static str,
    pub bag: usize,
    pub keys: usize,
    pub entries: usize,
    pub pairs: u128,
    pub skipped: u128,
    pub skip_fraction: f64,
    pub log_records: u64,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PruneEvent {
    pub before_node: usize,
    pub records_before: u64,
    pub records_after: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub nodes: Vec<NodeStat>,
    pub prunes: Vec<PruneEvent>,
    pub peak_disk: u64,
    pub root_entries: usize,
}

impl RunStats {
    pub fn joins(&self) -> JoinStats {
        let mut j = JoinStats::default();
        for n in &self.nodes {
            j.add(JoinStats {
                pairs: n.pairs,
                skipped: n.skipped,
            });
        }
        j
    }
}

fn commit(store: &mut Store, node: u32, p: Pending) -> Result<SolutionId> {
    let side = |store: &mut Store, s: SideRef| -> Result<SolutionId> {
        if s.mask == 0 {
            return Ok(s.id);
        }
        store.log.append(&Record::Skipped {
            base: s.id,
            node,
            mask: s.mask,
        })
    };
    match p {
        Pending::Keep(id) => Ok(id),
        Pending::Intro { base, element } => store.log.append(&Record::Introduce { base, element }),
        Pending::Join(l, r) => {
            let (l, r) = (side(store, l)?, side(store, r)?);
            match (l == EMPTY, r == EMPTY) {
                (true, _) => Ok(r),
                (_, true) => Ok(l),
                _ => store.log.append(&Record::Join { left: l, right: r }),
            }
        }
    }
}

/// Run `solver` over `ntd`, leaving the root table in `store`.
pub fn run(solver: &dyn NodeSolver, ntd: &NiceTd, store: &mut Store, cfg: &EngineConfig) -> Result<RunStats> {
    let mut stats = RunStats::default();
    let forecast = cfg.max_disk.map(|_| estimate_nodes(ntd));
    store.meta.problem = solver.problem().to_string();
    store.meta.dim = solver.dim();
    for t in 0..ntd.len() {
        if let (Some(budget), Some(est)) = (cfg.max_disk, &forecast) {
            let projected = store.usage() as f64 + cfg.overestimate * est[t].records * RECORD_SIZE as f64;
            if projected > budget as f64 && !store.log.is_empty() {
                let rep = store.prune()?;
                stats.prunes.push(PruneEvent {
                    before_node: t,
                    records_before: rep.records_before,
                    records_after: rep.records_after,
                });
            }
        }
        let start = Instant::now();
        let node = &ntd.nodes[t];
        let children = node
            .children
            .iter()
            .map(|&c| {
                if cfg.retain_tables {
                    store.frontiers.table(c)
                } else {
                    store.frontiers.take_table(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cx = NodeCx {
            heuristic: &cfg.heuristic,
            joins: JoinStats::default(),
        };
        let pending = solver.solve_node(ntd, t, children, &mut cx)?;
        if let NodeKind::IntroduceJoinForget { join_bag, .. } = &node.kind {
            store.meta.skip_bags.insert(t as u32, join_bag.clone());
        }
        let mut table = Table::new();
        let mut entries = 0;
        for (key, front) in pending {
            if front.is_empty() {
                continue;
            }
            entries += front.len();
            let dim = front.dim();
            let mut out = Vec::with_capacity(front.len());
            for (c, p) in front.into_entries() {
                out.push((c, commit(store, t as u32, p)?));
            }
            table.insert(key, ParetoFront::from_sorted(dim, out));
        }
        let keys = table.len();
        store.frontiers.put_table(t, table)?;
        stats.peak_disk = stats.peak_disk.max(store.usage());
        stats.nodes.push(NodeStat {
            node: t,
            kind: node.kind.name(),
            bag: node.bag.len(),
            keys,
            entries,
            pairs: cx.joins.pairs,
            skipped: cx.joins.skipped,
            skip_fraction: cx.joins.skip_fraction(),
            log_records: store.log.len(),
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    store.log.flush()?;
    let root = ntd.root();
    store.meta.root_node = root;
    store.meta.root_key = crate::store::frontier::hex(&solver.root_key());
    stats.root_entries = store.root_front()?.len();
    store.write_meta()?;
    Ok(stats)
}
