//! Multiobjective s-t cuts over a nice tree decomposition.
//!
//! Table entry `D[t][S]` holds the front of cut costs over all source sides
//! `p ⊆ V_t` with `p ∩ X_t = S`, where every vertex outside `p` is on the sink
//! side. Keys are bag bitmasks (bit `i` is `bag[i]`) stored as 4 bytes LE.
//!
//! Everything is expressed through the bag-local function
//! `f(S) = C_s + Σ_{v∈S} a(v) - 2 Σ_{u<v∈S} w(u,v)`, the cut cost of the source
//! side `S` alone, where `C_s` is the total source edge weight,
//! `a(v) = c(v,t) - c(s,v) + Σ_u w(u,v)` and `w` sums inner edges.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::engine::{NodeCx, NodeSolver, Pending, PendingTable, SideRef};
use crate::error::{Error, Result};
use crate::heuristic::{join_many, JoinStats};
use crate::pareto::{add_assign, sub, sub_assign, zero, Cost, ParetoFront, EMPTY};
use crate::store::Table;
use crate::td::{Graph, NiceTd, NodeKind};

#[derive(Debug, Clone)]
pub struct CutInstance {
    pub n: usize,
    pub dim: usize,
    /// Total weight of source edges: the cost of the empty source side.
    pub base: Cost,
    /// `a(v)` indexed by vertex id; entries 0 and `n + 1` are unused.
    pub a: Vec<Cost>,
    /// Summed inner edge weights keyed by `(min, max)`.
    pub w: HashMap<(u32, u32), Cost>,
}

impl CutInstance {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let (s, t) = (g.source(), g.sink());
        let mut base = zero(g.dim);
        let mut a = vec![zero(g.dim); g.n + 2];
        let mut w: HashMap<(u32, u32), Cost> = HashMap::new();
        for e in &g.edges {
            if e.u as usize > g.n + 1 || e.v as usize > g.n + 1 {
                return Err(Error::InvalidInstance(format!(
                    "edge {{{},{}}} leaves 0..={}",
                    e.u,
                    e.v,
                    g.n + 1
                )));
            }
            let (u, v) = (e.u.min(e.v), e.u.max(e.v));
            match (u == s, v == t) {
                (true, true) => return Err(Error::InvalidInstance("edge between source and sink".into())),
                (true, false) => {
                    add_assign(&mut base, &e.cost);
                    sub_assign(&mut a[v as usize], &e.cost);
                }
                (false, true) => add_assign(&mut a[u as usize], &e.cost),
                (false, false) => {
                    add_assign(&mut a[u as usize], &e.cost);
                    add_assign(&mut a[v as usize], &e.cost);
                    add_assign(w.entry((u, v)).or_insert_with(|| zero(g.dim)), &e.cost);
                }
            }
        }
        Ok(CutInstance {
            n: g.n,
            dim: g.dim,
            base,
            a,
            w,
        })
    }

    pub fn inner_edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<_> = self.w.keys().copied().collect();
        e.sort_unstable();
        e
    }

    fn local(&self, bag: &[u32]) -> Local {
        let k = bag.len();
        let mut w = vec![None; k * k];
        for i in 0..k {
            for j in i + 1..k {
                if let Some(c) = self.w.get(&(bag[i], bag[j])) {
                    let twice: Cost = c.iter().map(|x| 2 * x).collect();
                    w[i * k + j] = Some(twice.clone());
                    w[j * k + i] = Some(twice);
                }
            }
        }
        Local {
            k,
            base: self.base.clone(),
            a: bag.iter().map(|&v| self.a[v as usize].clone()).collect(),
            w2: w,
        }
    }
}

/// `f` restricted to one bag.
struct Local {
    k: usize,
    base: Cost,
    a: Vec<Cost>,
    /// Twice the edge weight between bag positions, row-major.
    w2: Vec<Option<Cost>>,
}

impl Local {
    fn f(&self, mask: u32) -> Cost {
        let mut c = self.base.clone();
        for i in bits(mask) {
            add_assign(&mut c, &self.a[i]);
            for j in bits(mask & !((2u32 << i) - 1)) {
                if let Some(w) = &self.w2[i * self.k + j] {
                    sub_assign(&mut c, w);
                }
            }
        }
        c
    }

    /// `f(S) - f(S \ {i})` for `i ∈ S`.
    fn delta(&self, mask: u32, i: usize) -> Cost {
        let mut c = self.a[i].clone();
        for j in bits(mask & !(1 << i)) {
            if let Some(w) = &self.w2[i * self.k + j] {
                sub_assign(&mut c, w);
            }
        }
        c
    }
}

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

pub fn encode_key(mask: u32) -> Vec<u8> {
    mask.to_le_bytes().to_vec()
}

pub fn decode_key(key: &[u8]) -> u32 {
    let mut b = [0u8; 4];
    b.copy_from_slice(&key[..4]);
    u32::from_le_bytes(b)
}

/// Positions of a sub-bag inside a larger bag.
pub(crate) struct BagMap {
    pos: Vec<usize>,
}

impl BagMap {
    /// `small` must be a subset of `big`; both sorted.
    pub(crate) fn new(small: &[u32], big: &[u32]) -> Self {
        BagMap {
            pos: small.iter().map(|v| big.binary_search(v).expect("sub-bag")).collect(),
        }
    }

    pub(crate) fn up(&self, m: u32) -> u32 {
        bits(m).fold(0, |acc, i| acc | 1 << self.pos[i])
    }

    pub(crate) fn down(&self, m: u32) -> u32 {
        self.pos
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| if m >> p & 1 == 1 { acc | 1 << i } else { acc })
    }
}

fn mask_of(bag: &[u32], vs: &[u32]) -> u32 {
    vs.iter()
        .fold(0, |m, v| m | 1 << bag.binary_search(v).expect("vertex in bag"))
}

/// Every submask of `m`, including 0 and `m`.
pub(crate) fn submasks(m: u32) -> impl Iterator<Item = u32> {
    let mut cur = Some(m);
    std::iter::from_fn(move || {
        let x = cur?;
        cur = if x == 0 { None } else { Some((x - 1) & m) };
        Some(x)
    })
}

pub struct CutSolver<'a> {
    pub inst: &'a CutInstance,
}

type Side = ParetoFront<SideRef>;

fn as_side(f: &ParetoFront, shift: Option<&Cost>, mask: u32) -> Side {
    let mut out = f.clone().map_payload(|id| SideRef { id, mask });
    if let Some(d) = shift {
        out.shift(d);
    }
    out
}

impl CutSolver<'_> {
    /// Joins feeding each target key: `(left, right, offset)`.
    fn join_groups(&self, ntd: &NiceTd, t: usize, children: &[Table]) -> BTreeMap<u32, Vec<(Side, Side, Cost)>> {
        let node = &ntd.nodes[t];
        let join_bag = ntd.join_bag(t).to_vec();
        let local = self.inst.local(&join_bag);
        let to_node = BagMap::new(&node.bag, &join_bag);
        let skipped: [Vec<u32>; 2] = match &node.kind {
            NodeKind::IntroduceJoinForget { skipped, .. } => skipped.clone(),
            _ => Default::default(),
        };
        let maps: Vec<BagMap> = node
            .children
            .iter()
            .map(|&c| BagMap::new(&ntd.nodes[c].bag, &join_bag))
            .collect();
        let skip_masks = [mask_of(&join_bag, &skipped[0]), mask_of(&join_bag, &skipped[1])];
        let mut groups: BTreeMap<u32, Vec<(Side, Side, Cost)>> = BTreeMap::new();
        for (k1, f1) in &children[0] {
            let base1 = maps[0].up(decode_key(k1));
            for extra in submasks(skip_masks[0]) {
                let s = base1 | extra;
                let k2 = encode_key(maps[1].down(s));
                let Some(f2) = children[1].get(&k2) else { continue };
                let fs = local.f(s);
                let side = |f: &ParetoFront, i: usize| {
                    let m = s & skip_masks[i];
                    if m == 0 {
                        as_side(f, None, 0)
                    } else {
                        as_side(f, Some(&sub(&fs, &local.f(s & !m))), m)
                    }
                };
                groups
                    .entry(to_node.down(s))
                    .or_default()
                    .push((side(f1, 0), side(f2, 1), fs));
            }
        }
        groups
    }
}

impl NodeSolver for CutSolver<'_> {
    fn problem(&self) -> &'static str {
        "stcut"
    }

    fn dim(&self) -> usize {
        self.inst.dim
    }

    fn root_key(&self) -> Vec<u8> {
        encode_key(0)
    }

    fn solve_node(&self, ntd: &NiceTd, t: usize, mut children: Vec<Table>, cx: &mut NodeCx) -> Result<PendingTable> {
        let node = &ntd.nodes[t];
        let mut out = PendingTable::new();
        match &node.kind {
            NodeKind::Leaf => {
                out.insert(
                    encode_key(0),
                    ParetoFront::singleton(self.inst.base.clone(), Pending::Keep(EMPTY)),
                );
            }
            NodeKind::Introduce(v) => {
                let child = children.pop().expect("one child");
                let cbag = &ntd.nodes[node.children[0]].bag;
                let map = BagMap::new(cbag, &node.bag);
                let p = node.bag.binary_search(v).expect("introduced vertex in bag");
                let local = self.inst.local(&node.bag);
                for (k, f) in child {
                    let m = map.up(decode_key(&k));
                    let with = m | 1 << p;
                    let mut shifted = f.clone().map_payload(|id| Pending::Intro {
                        base: id,
                        element: *v as u64,
                    });
                    shifted.shift(&local.delta(with, p));
                    out.insert(encode_key(with), shifted);
                    out.insert(encode_key(m), f.map_payload(Pending::Keep));
                }
            }
            NodeKind::Forget(_) => {
                let child = children.pop().expect("one child");
                let map = BagMap::new(&node.bag, &ntd.nodes[node.children[0]].bag);
                let mut acc: BTreeMap<u32, Vec<ParetoFront>> = BTreeMap::new();
                for (k, f) in child {
                    acc.entry(map.down(decode_key(&k))).or_default().push(f);
                }
                for (m, fs) in acc {
                    let merged = crate::pareto::merge_many(self.inst.dim, fs);
                    out.insert(encode_key(m), merged.map_payload(Pending::Keep));
                }
            }
            NodeKind::IntroduceEdge { .. } => {
                return Err(Error::InvalidDecomposition(
                    "s-t cut decompositions carry no edge nodes".into(),
                ))
            }
            NodeKind::Join | NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. } => {
                let groups: Vec<_> = self.join_groups(ntd, t, &children).into_iter().collect();
                drop(children);
                let dim = self.inst.dim;
                let h = *cx.heuristic;
                let results: Vec<(u32, ParetoFront<Pending>, JoinStats)> = groups
                    .into_par_iter()
                    .map(|(m, pairs)| {
                        let refs: Vec<(&Side, &Side, Cost)> = pairs.iter().map(|(a, b, o)| (a, b, o.clone())).collect();
                        let mut js = JoinStats::default();
                        let f = join_many(dim, &refs, &h, &mut js);
                        (m, f.map_payload(|(l, r)| Pending::Join(l, r)), js)
                    })
                    .collect();
                for (m, f, js) in results {
                    cx.joins.add(js);
                    out.insert(encode_key(m), f);
                }
            }
        }
        Ok(out)
    }
}

/// Cut cost of a source side given as a vertex-indexed flag vector, straight
/// from the edge list.
pub fn cut_cost(g: &Graph, source_side: &[bool]) -> Cost {
    let side = |v: u32| -> bool {
        if v == g.source() {
            true
        } else if v == g.sink() {
            false
        } else {
            source_side[v as usize]
        }
    };
    let mut c = zero(g.dim);
    for e in &g.edges {
        if side(e.u) != side(e.v) {
            add_assign(&mut c, &e.cost);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::cost;

    fn graph(text: &str) -> Graph {
        Graph::parse(text).unwrap()
    }

    #[test]
    fn submask_enumeration() {
        let v: Vec<u32> = submasks(0b101).collect();
        assert_eq!(v, vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn bag_map_roundtrip() {
        let m = BagMap::new(&[2, 7], &[1, 2, 5, 7]);
        assert_eq!(m.up(0b11), 0b1010);
        assert_eq!(m.down(0b1111), 0b11);
    }

    #[test]
    fn introduce_delta_examples() {
        // only c(s,v) = (5,5)
        let g = graph("p mo 1 1 2\ne 0 1 5 5\n");
        let inst = CutInstance::from_graph(&g).unwrap();
        assert_eq!(inst.local(&[1]).delta(1, 0), cost(&[-50, -50]));
        // isolated vertex
        let g = graph("p mo 1 0 2\n");
        let inst = CutInstance::from_graph(&g).unwrap();
        assert_eq!(inst.local(&[1]).delta(1, 0), cost(&[0, 0]));
        // u = 1, v = 2: c(u,v)=(1,1), c(v,t)=(2,0), c(s,v)=(0,3)
        let g = graph("p mo 2 3 2\ne 1 2 1 1\ne 2 3 2 0\ne 0 2 0 3\n");
        let inst = CutInstance::from_graph(&g).unwrap();
        assert_eq!(inst.local(&[1, 2]).delta(0b11, 1), cost(&[10, -40]));
    }

    #[test]
    fn f_matches_cut_cost() {
        let g = graph("p mo 3 6 2\ne 0 1 1 2\ne 1 2 3 1\ne 2 3 2 2\ne 1 3 1 4\ne 3 4 5 1\ne 0 2 2 2\n");
        let inst = CutInstance::from_graph(&g).unwrap();
        let local = inst.local(&[1, 2, 3]);
        for m in 0u32..8 {
            let side: Vec<bool> = (0..5).map(|v| (1..=3).contains(&v) && m >> (v - 1) & 1 == 1).collect();
            assert_eq!(local.f(m), cut_cost(&g, &side), "mask {m}");
        }
    }

    #[test]
    fn source_sink_edge_rejected() {
        assert!(CutInstance::from_graph(&graph("p mo 1 1 2\ne 0 2 1 1\n")).is_err());
    }
}
