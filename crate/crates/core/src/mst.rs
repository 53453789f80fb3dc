//! Multiobjective spanning trees over a nice decomposition with edge nodes.
//!
//! `D[t][P]` is the front of acyclic edge sets over the edges introduced below
//! `t` in which every forgotten vertex reaches the bag, and whose components
//! restricted to the bag form the partition `P`. Keys are restricted growth
//! strings: one block label per bag position, labels numbered by first use.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::engine::{NodeCx, NodeSolver, Pending, PendingTable, SideRef};
use crate::error::{Error, Result};
use crate::heuristic::{join_many, JoinStats};
use crate::pareto::{add, reduce_entries, zero, Cost, ParetoFront, EMPTY};
use crate::store::Table;
use crate::td::{Graph, NiceTd, NodeKind, UnionFind};

/// Relabel blocks in order of first appearance.
pub fn canonical(labels: &mut [u8]) {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    for l in labels.iter_mut() {
        if map[*l as usize] == u8::MAX {
            map[*l as usize] = next;
            next += 1;
        }
        *l = map[*l as usize];
    }
}

/// All set partitions of `k` positions as restricted growth strings, in
/// lexicographic order.
pub fn enumerate_partitions(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; k];
    fn rec(i: usize, max: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            if i == 0 && l > 0 {
                break;
            }
            cur[i] = l;
            rec(i + 1, max.max(l), cur, out);
        }
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    rec(0, 0, &mut cur, &mut out);
    out
}

/// Component partition of the union of two forests realising `a` and `b`, or
/// `None` when that union has a cycle.
pub fn partitions_create(a: &[u8], b: &[u8]) -> Option<Vec<u8>> {
    debug_assert_eq!(a.len(), b.len());
    let k = a.len();
    let mut uf = UnionFind::new(k);
    for part in [a, b] {
        let mut first: BTreeMap<u8, usize> = BTreeMap::new();
        for (i, &l) in part.iter().enumerate() {
            match first.get(&l) {
                Some(&j) => {
                    if !uf.union(i, j) {
                        return None;
                    }
                }
                None => {
                    first.insert(l, i);
                }
            }
        }
    }
    let mut labels: Vec<u8> = (0..k).map(|i| uf.find(i) as u8).collect();
    canonical(&mut labels);
    Some(labels)
}

#[derive(Debug, Clone)]
pub struct MstSolver<'a> {
    pub graph: &'a Graph,
    /// Forgotten-vertex counts per node.
    forgotten: Vec<usize>,
}

impl<'a> MstSolver<'a> {
    pub fn new(graph: &'a Graph, ntd: &NiceTd) -> Result<Self> {
        if let Some(e) = graph
            .edges
            .iter()
            .find(|e| e.u == 0 || e.v == 0 || e.u as usize > graph.n || e.v as usize > graph.n)
        {
            return Err(Error::InvalidInstance(format!(
                "edge {{{},{}}} leaves 1..={}",
                e.u, e.v, graph.n
            )));
        }
        Ok(MstSolver {
            graph,
            forgotten: ntd.forgotten_below(),
        })
    }
}

fn collect(dim: usize, acc: BTreeMap<Vec<u8>, Vec<(Cost, Pending)>>) -> PendingTable {
    acc.into_iter()
        .map(|(k, v)| (k, reduce_entries(dim, v)))
        .filter(|(_, f)| !f.is_empty())
        .collect()
}

impl NodeSolver for MstSolver<'_> {
    fn problem(&self) -> &'static str {
        "mst"
    }

    fn dim(&self) -> usize {
        self.graph.dim
    }

    fn root_key(&self) -> Vec<u8> {
        Vec::new()
    }

    fn solve_node(&self, ntd: &NiceTd, t: usize, mut children: Vec<Table>, cx: &mut NodeCx) -> Result<PendingTable> {
        let node = &ntd.nodes[t];
        let dim = self.graph.dim;
        let mut acc: BTreeMap<Vec<u8>, Vec<(Cost, Pending)>> = BTreeMap::new();
        match &node.kind {
            NodeKind::Leaf => {
                acc.entry(Vec::new())
                    .or_default()
                    .push((zero(dim), Pending::Keep(EMPTY)));
            }
            NodeKind::Introduce(v) => {
                let p = node.bag.binary_search(v).expect("in bag");
                for (k, f) in children.pop().expect("child") {
                    let mut key = k.clone();
                    key.insert(p, u8::MAX);
                    canonical(&mut key);
                    acc.entry(key)
                        .or_default()
                        .extend(f.into_entries().into_iter().map(|(c, id)| (c, Pending::Keep(id))));
                }
            }
            NodeKind::Forget(v) => {
                let cbag = &ntd.nodes[node.children[0]].bag;
                let p = cbag.binary_search(v).expect("in child bag");
                let closes = node.bag.is_empty() && self.forgotten[t] == self.graph.n;
                for (k, f) in children.pop().expect("child") {
                    let alone = k.iter().filter(|&&l| l == k[p]).count() == 1;
                    if alone && !closes {
                        continue;
                    }
                    let mut key = k.clone();
                    key.remove(p);
                    canonical(&mut key);
                    acc.entry(key)
                        .or_default()
                        .extend(f.into_entries().into_iter().map(|(c, id)| (c, Pending::Keep(id))));
                }
            }
            NodeKind::IntroduceEdge { edge, u, v } => {
                let pu = node.bag.binary_search(u).expect("in bag");
                let pv = node.bag.binary_search(v).expect("in bag");
                let ec = &self.graph.edges[*edge].cost;
                for (k, f) in children.pop().expect("child") {
                    if k[pu] != k[pv] {
                        let (from, to) = (k[pv], k[pu]);
                        let mut merged: Vec<u8> = k.iter().map(|&l| if l == from { to } else { l }).collect();
                        canonical(&mut merged);
                        acc.entry(merged).or_default().extend(f.iter().map(|(c, id)| {
                            (
                                add(c, ec),
                                Pending::Intro {
                                    base: *id,
                                    element: *edge as u64,
                                },
                            )
                        }));
                    }
                    acc.entry(k)
                        .or_default()
                        .extend(f.into_entries().into_iter().map(|(c, id)| (c, Pending::Keep(id))));
                }
            }
            NodeKind::Join => return Ok(self.join(children, cx)),
            NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. } => {
                return Err(Error::InvalidDecomposition(
                    "spanning tree decompositions are not fused".into(),
                ))
            }
        }
        Ok(collect(dim, acc))
    }
}

impl MstSolver<'_> {
    fn join(&self, children: Vec<Table>, cx: &mut NodeCx) -> PendingTable {
        let dim = self.graph.dim;
        let mut groups: BTreeMap<Vec<u8>, Vec<(&ParetoFront, &ParetoFront)>> = BTreeMap::new();
        for (k1, f1) in &children[0] {
            for (k2, f2) in &children[1] {
                if let Some(target) = partitions_create(k1, k2) {
                    groups.entry(target).or_default().push((f1, f2));
                }
            }
        }
        let h = *cx.heuristic;
        let results: Vec<(Vec<u8>, ParetoFront<Pending>, JoinStats)> = groups
            .into_par_iter()
            .map(|(k, pairs)| {
                let refs: Vec<(&ParetoFront, &ParetoFront, Cost)> =
                    pairs.iter().map(|&(a, b)| (a, b, zero(dim))).collect();
                let mut js = JoinStats::default();
                let f = join_many(dim, &refs, &h, &mut js);
                (
                    k,
                    f.map_payload(|(l, r)| Pending::Join(SideRef::plain(l), SideRef::plain(r))),
                    js,
                )
            })
            .collect();
        let mut out = PendingTable::new();
        for (k, f, js) in results {
            cx.joins.add(js);
            out.insert(k, f);
        }
        out
    }
}
