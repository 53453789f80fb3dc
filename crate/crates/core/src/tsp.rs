//! Multiobjective tours over a nice decomposition with edge nodes.
//!
//! `D[t][state]` is the front of edge sets over the edges introduced below `t`
//! that form vertex-disjoint paths (or, once, the finished tour), give every
//! forgotten vertex degree two, and match `state` on the bag: a degree per bag
//! vertex plus, for each degree-one vertex, the other end of its path.
//!
//! Key byte per bag position: 0 degree zero, 1 degree two, `2 + j` degree one
//! with the path ending at position `j`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::engine::{NodeCx, NodeSolver, Pending, PendingTable, SideRef};
use crate::error::{Error, Result};
use crate::heuristic::{join_many, JoinStats};
use crate::pareto::{add, reduce_entries, zero, Cost, ParetoFront, EMPTY};
use crate::store::Table;
use crate::td::{Graph, NiceTd, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Zero,
    Two,
    /// Degree one; the path ends at this bag position.
    One(usize),
}

impl Slot {
    fn degree(self) -> u8 {
        match self {
            Slot::Zero => 0,
            Slot::One(_) => 1,
            Slot::Two => 2,
        }
    }
}

pub fn decode(key: &[u8]) -> Vec<Slot> {
    key.iter()
        .map(|&b| match b {
            0 => Slot::Zero,
            1 => Slot::Two,
            j => Slot::One(j as usize - 2),
        })
        .collect()
}

pub fn encode(slots: &[Slot]) -> Vec<u8> {
    slots
        .iter()
        .map(|s| match s {
            Slot::Zero => 0,
            Slot::Two => 1,
            Slot::One(j) => *j as u8 + 2,
        })
        .collect()
}

/// Explicit form of a state over bag vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TourState {
    pub d0: BTreeSet<u32>,
    pub d1: BTreeSet<u32>,
    pub d2: BTreeSet<u32>,
    pub matching: Vec<(u32, u32)>,
}

/// Whether the degree classes are disjoint and the matching pairs up exactly `d1`.
pub fn validate_state(s: &TourState) -> bool {
    if !s.d0.is_disjoint(&s.d1) || !s.d0.is_disjoint(&s.d2) || !s.d1.is_disjoint(&s.d2) {
        return false;
    }
    let mut covered = BTreeSet::new();
    for &(a, b) in &s.matching {
        if a == b || !covered.insert(a) || !covered.insert(b) {
            return false;
        }
    }
    covered == s.d1
}

impl TourState {
    pub fn bag(&self) -> Vec<u32> {
        let mut b: Vec<u32> = self.d0.iter().chain(&self.d1).chain(&self.d2).copied().collect();
        b.sort_unstable();
        b
    }

    /// Slots over `bag`; the state must be valid and cover exactly `bag`.
    pub fn slots(&self, bag: &[u32]) -> Vec<Slot> {
        let pos = |v: u32| bag.binary_search(&v).expect("vertex in bag");
        let mut out = vec![Slot::Zero; bag.len()];
        for &v in &self.d2 {
            out[pos(v)] = Slot::Two;
        }
        for &(a, b) in &self.matching {
            out[pos(a)] = Slot::One(pos(b));
            out[pos(b)] = Slot::One(pos(a));
        }
        out
    }
}

/// Combine two states on one bag into the target state and the number of
/// cycles the union closes. `None` when a degree exceeds two.
pub fn join_states(a: &[Slot], b: &[Slot]) -> Option<(Vec<Slot>, usize)> {
    let k = a.len();
    let mut deg = vec![0u8; k];
    for i in 0..k {
        deg[i] = a[i].degree() + b[i].degree();
        if deg[i] > 2 {
            return None;
        }
    }
    // abstract path edges from both sides, as adjacency over positions
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    let mut eid = 0;
    for side in [a, b] {
        for (i, s) in side.iter().enumerate() {
            if let Slot::One(j) = *s {
                if i < j {
                    adj[i].push((j, eid));
                    adj[j].push((i, eid));
                    eid += 1;
                }
            }
        }
    }
    let mut used = vec![false; eid];
    let mut out = vec![Slot::Zero; k];
    for i in 0..k {
        match deg[i] {
            0 => {}
            2 => out[i] = Slot::Two,
            _ => {
                if let Slot::One(_) = out[i] {
                    continue;
                }
                // walk from i to the other endpoint
                let (mut prev_edge, mut cur) = (usize::MAX, i);
                loop {
                    let next = adj[cur].iter().find(|&&(_, e)| e != prev_edge && !used[e]);
                    let Some(&(nxt, e)) = next else { break };
                    used[e] = true;
                    prev_edge = e;
                    cur = nxt;
                    if deg[cur] == 1 {
                        break;
                    }
                }
                out[i] = Slot::One(cur);
                out[cur] = Slot::One(i);
            }
        }
    }
    // whatever abstract edges remain lie on cycles; count them
    let mut cycles = 0;
    for start in 0..k {
        if adj[start].iter().any(|&(_, e)| !used[e]) {
            cycles += 1;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &(y, e) in &adj[x] {
                    if !used[e] {
                        used[e] = true;
                        stack.push(y);
                    }
                }
            }
        }
    }
    Some((out, cycles))
}

/// Degrees add up and the paths of both sides chain into exactly `target`'s
/// paths with no cycle.
pub fn join_compatible(a: &[Slot], b: &[Slot], target: &[Slot]) -> bool {
    matches!(join_states(a, b), Some((t, 0)) if t == target)
}

/// The union of both sides is one cycle through every bag vertex's paths,
/// with all bag vertices at degree two.
pub fn join_closes_tour(a: &[Slot], b: &[Slot]) -> bool {
    matches!(join_states(a, b), Some((t, 1)) if t.iter().all(|s| *s == Slot::Two))
}

#[derive(Debug, Clone)]
pub struct TspSolver<'a> {
    pub graph: &'a Graph,
    forgotten: Vec<usize>,
}

impl<'a> TspSolver<'a> {
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
        if graph.n < 3 {
            return Err(Error::InvalidInstance("a tour needs at least 3 vertices".into()));
        }
        Ok(TspSolver {
            graph,
            forgotten: ntd.forgotten_below(),
        })
    }

    /// Every vertex of the graph is in `V_t`.
    fn all_seen(&self, ntd: &NiceTd, t: usize) -> bool {
        self.forgotten[t] + ntd.nodes[t].bag.len() == self.graph.n
    }
}

/// Upper bound on the number of states per node for bags of `w + 1` vertices.
pub fn state_bound(w: usize) -> f64 {
    (3.0 * w as f64 + 3.0).powi(w as i32 + 1)
}

fn keep(f: ParetoFront) -> impl Iterator<Item = (Cost, Pending)> {
    f.into_entries().into_iter().map(|(c, id)| (c, Pending::Keep(id)))
}

impl NodeSolver for TspSolver<'_> {
    fn problem(&self) -> &'static str {
        "tsp"
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
                    let mut slots: Vec<Slot> = decode(&k)
                        .into_iter()
                        .map(|s| match s {
                            Slot::One(j) if j >= p => Slot::One(j + 1),
                            s => s,
                        })
                        .collect();
                    slots.insert(p, Slot::Zero);
                    acc.entry(encode(&slots)).or_default().extend(keep(f));
                }
            }
            NodeKind::Forget(v) => {
                let p = ntd.nodes[node.children[0]].bag.binary_search(v).expect("in child bag");
                for (k, f) in children.pop().expect("child") {
                    let mut slots = decode(&k);
                    if slots[p] != Slot::Two {
                        continue;
                    }
                    slots.remove(p);
                    for s in &mut slots {
                        if let Slot::One(j) = s {
                            if *j > p {
                                *j -= 1;
                            }
                        }
                    }
                    acc.entry(encode(&slots)).or_default().extend(keep(f));
                }
            }
            NodeKind::IntroduceEdge { edge, u, v } => {
                let pu = node.bag.binary_search(u).expect("in bag");
                let pv = node.bag.binary_search(v).expect("in bag");
                let ec = &self.graph.edges[*edge].cost;
                let all_seen = self.all_seen(ntd, t);
                for (k, f) in children.pop().expect("child") {
                    let slots = decode(&k);
                    if let Some(next) = self.add_edge(&slots, pu, pv, all_seen) {
                        acc.entry(encode(&next)).or_default().extend(f.iter().map(|(c, id)| {
                            (
                                add(c, ec),
                                Pending::Intro {
                                    base: *id,
                                    element: *edge as u64,
                                },
                            )
                        }));
                    }
                    acc.entry(k).or_default().extend(keep(f));
                }
            }
            NodeKind::Join => {
                let all_seen = self.all_seen(ntd, t);
                return Ok(self.join(children, all_seen, cx));
            }
            NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. } => {
                return Err(Error::InvalidDecomposition("tour decompositions are not fused".into()))
            }
        }
        Ok(acc
            .into_iter()
            .map(|(k, v)| (k, reduce_entries(dim, v)))
            .filter(|(_, f)| !f.is_empty())
            .collect())
    }
}

impl TspSolver<'_> {
    /// State after adding an edge between positions `pu` and `pv`.
    fn add_edge(&self, s: &[Slot], pu: usize, pv: usize, all_seen: bool) -> Option<Vec<Slot>> {
        let mut out = s.to_vec();
        match (s[pu], s[pv]) {
            (Slot::Two, _) | (_, Slot::Two) => return None,
            (Slot::Zero, Slot::Zero) => {
                out[pu] = Slot::One(pv);
                out[pv] = Slot::One(pu);
            }
            (Slot::Zero, Slot::One(w)) => {
                out[pv] = Slot::Two;
                out[pu] = Slot::One(w);
                out[w] = Slot::One(pu);
            }
            (Slot::One(w), Slot::Zero) => {
                out[pu] = Slot::Two;
                out[pv] = Slot::One(w);
                out[w] = Slot::One(pv);
            }
            (Slot::One(a), Slot::One(b)) => {
                out[pu] = Slot::Two;
                out[pv] = Slot::Two;
                if a == pv {
                    // closes the path into a cycle: only as the finished tour
                    let others_done = s.iter().enumerate().all(|(i, x)| i == pu || i == pv || *x == Slot::Two);
                    if !(others_done && all_seen) {
                        return None;
                    }
                } else {
                    out[a] = Slot::One(b);
                    out[b] = Slot::One(a);
                }
            }
        }
        Some(out)
    }

    fn join(&self, children: Vec<Table>, all_seen: bool, cx: &mut NodeCx) -> PendingTable {
        let dim = self.graph.dim;
        let mut groups: BTreeMap<Vec<u8>, Vec<(&ParetoFront, &ParetoFront)>> = BTreeMap::new();
        for (k1, f1) in &children[0] {
            let s1 = decode(k1);
            for (k2, f2) in &children[1] {
                let s2 = decode(k2);
                let target = match join_states(&s1, &s2) {
                    Some((t, 0)) => t,
                    Some((t, 1)) if all_seen && t.iter().all(|x| *x == Slot::Two) => t,
                    _ => continue,
                };
                groups.entry(encode(&target)).or_default().push((f1, f2));
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

#[cfg(test)]
mod tests {
    use super::*;

    fn st(d0: &[u32], d1: &[u32], d2: &[u32], m: &[(u32, u32)]) -> TourState {
        TourState {
            d0: d0.iter().copied().collect(),
            d1: d1.iter().copied().collect(),
            d2: d2.iter().copied().collect(),
            matching: m.to_vec(),
        }
    }

    #[test]
    fn state_validation() {
        assert!(validate_state(&st(&[], &[1, 2], &[], &[(1, 2)])));
        assert!(!validate_state(&st(&[], &[1], &[], &[])));
        assert!(!validate_state(&st(&[1], &[], &[1], &[])));
    }

    #[test]
    fn join_examples() {
        // bag u=1, w=2, v=3
        let bag = [1, 2, 3];
        let s1 = st(&[3], &[1, 2], &[], &[(1, 2)]).slots(&bag);
        let s2 = st(&[1], &[2, 3], &[], &[(2, 3)]).slots(&bag);
        let target = st(&[], &[1, 3], &[2], &[(1, 3)]).slots(&bag);
        assert!(join_compatible(&s1, &s2, &target));
        // all-zero side
        let z = vec![Slot::Zero; 3];
        assert!(join_compatible(&z, &s2, &s2));
        assert!(!join_compatible(&z, &s2, &s1));
        // M1 = M2 = {{u,v}}
        let bag = [1, 2];
        let p = st(&[], &[1, 2], &[], &[(1, 2)]).slots(&bag);
        let full = st(&[], &[], &[1, 2], &[]).slots(&bag);
        assert!(!join_compatible(&p, &p, &full));
        assert!(join_closes_tour(&p, &p));
    }

    #[test]
    fn key_roundtrip() {
        let s = vec![Slot::One(2), Slot::Two, Slot::One(0), Slot::Zero];
        assert_eq!(decode(&encode(&s)), s);
    }
}
