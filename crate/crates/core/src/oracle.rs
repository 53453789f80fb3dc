//! Exhaustive enumerators used as ground truth. They share nothing with the
//! solvers beyond the dominance test.

use std::collections::BTreeSet;

use crate::aggregation::AggregationInstance;
use crate::error::{Error, Result};
use crate::pareto::{weakly_dominates, zero, Cost, ParetoFront};
use crate::td::Graph;

/// A front with one witness element set per entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub dim: usize,
    pub entries: Vec<(Cost, Vec<u64>)>,
}

impl OracleResult {
    fn from_candidates(dim: usize, mut all: Vec<(Cost, Vec<u64>)>) -> Self {
        all.sort_by(|a, b| a.0.cmp(&b.0));
        let mut kept: Vec<(Cost, Vec<u64>)> = Vec::new();
        for (c, w) in all {
            if !kept.iter().any(|(k, _)| weakly_dominates(k, &c)) {
                kept.push((c, w));
            }
        }
        OracleResult { dim, entries: kept }
    }

    pub fn costs(&self) -> Vec<Cost> {
        self.entries.iter().map(|e| e.0.clone()).collect()
    }

    pub fn front(&self) -> ParetoFront<usize> {
        ParetoFront::from_sorted(
            self.dim,
            self.entries.iter().enumerate().map(|(i, e)| (e.0.clone(), i)).collect(),
        )
    }

    pub fn shift(&mut self, delta: &[i64]) {
        for (c, _) in &mut self.entries {
            for (x, d) in c.iter_mut().zip(delta) {
                *x += d;
            }
        }
    }
}

fn add_into(acc: &mut Cost, c: &[i64]) {
    for (a, x) in acc.iter_mut().zip(c) {
        *a += x;
    }
}

/// Every source side `S ⊆ {1..n}`; witnesses are the vertices of `S`.
pub fn brute_cuts(g: &Graph) -> Result<OracleResult> {
    if g.n > 20 {
        return Err(Error::TooLarge(format!("{} inner vertices", g.n)));
    }
    let (s, t) = (0u32, g.n as u32 + 1);
    let mut all = Vec::with_capacity(1 << g.n);
    for mask in 0u64..1 << g.n {
        let side = |v: u32| v == s || (v != t && mask >> (v - 1) & 1 == 1);
        let mut c = zero(g.dim);
        for e in &g.edges {
            if side(e.u) != side(e.v) {
                add_into(&mut c, &e.cost);
            }
        }
        let members = (1..=g.n as u64).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        all.push((c, members));
    }
    Ok(OracleResult::from_candidates(g.dim, all))
}

fn check_plain(g: &Graph) -> Result<()> {
    if let Some(e) = g
        .edges
        .iter()
        .find(|e| e.u == 0 || e.v == 0 || e.u as usize > g.n || e.v as usize > g.n)
    {
        return Err(Error::InvalidInstance(format!(
            "edge {{{},{}}} leaves 1..={}",
            e.u, e.v, g.n
        )));
    }
    Ok(())
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Every spanning tree as an edge subset of size `n - 1`; witnesses are edge indices.
pub fn brute_mst(g: &Graph) -> Result<OracleResult> {
    check_plain(g)?;
    if g.n > 8 {
        return Err(Error::TooLarge(format!("{} vertices", g.n)));
    }
    let need = g.n.saturating_sub(1);
    let mut all = Vec::new();
    let mut chosen = Vec::new();
    fn rec(g: &Graph, next: usize, need: usize, chosen: &mut Vec<usize>, all: &mut Vec<(Cost, Vec<u64>)>) {
        if chosen.len() == need {
            let mut p: Vec<usize> = (0..=g.n).collect();
            let mut c = zero(g.dim);
            for &i in chosen.iter() {
                let e = &g.edges[i];
                let (a, b) = (find(&mut p, e.u as usize), find(&mut p, e.v as usize));
                if a == b {
                    return;
                }
                p[a] = b;
                add_into(&mut c, &e.cost);
            }
            all.push((c, chosen.iter().map(|&i| i as u64).collect()));
            return;
        }
        if g.edges.len() - next < need - chosen.len() {
            return;
        }
        for i in next..g.edges.len() {
            chosen.push(i);
            rec(g, i + 1, need, chosen, all);
            chosen.pop();
        }
    }
    rec(g, 0, need, &mut chosen, &mut all);
    if all.is_empty() {
        return Err(Error::NoSpanningTree);
    }
    Ok(OracleResult::from_candidates(g.dim, all))
}

/// Every Hamiltonian cycle, each undirected tour once per choice of parallel
/// edges; witnesses are edge indices.
pub fn brute_tsp(g: &Graph) -> Result<OracleResult> {
    check_plain(g)?;
    if g.n > 8 {
        return Err(Error::TooLarge(format!("{} vertices", g.n)));
    }
    if g.n < 3 {
        return Err(Error::InvalidInstance("a tour needs at least 3 vertices".into()));
    }
    let n = g.n;
    let mut between = vec![vec![Vec::new(); n + 1]; n + 1];
    for (i, e) in g.edges.iter().enumerate() {
        between[e.u as usize][e.v as usize].push(i);
        between[e.v as usize][e.u as usize].push(i);
    }
    let mut all = Vec::new();
    let mut rest: Vec<usize> = (2..=n).collect();
    permute(&mut rest, 0, &mut |perm| {
        if perm[0] > perm[perm.len() - 1] {
            return;
        }
        let mut order = vec![1usize];
        order.extend_from_slice(perm);
        let legs: Vec<&Vec<usize>> = (0..n).map(|k| &between[order[k]][order[(k + 1) % n]]).collect();
        if legs.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut pick = vec![0usize; n];
        loop {
            let mut c = zero(g.dim);
            let mut ids = Vec::with_capacity(n);
            for k in 0..n {
                let e = legs[k][pick[k]];
                add_into(&mut c, &g.edges[e].cost);
                ids.push(e as u64);
            }
            ids.sort_unstable();
            all.push((c, ids));
            let mut k = 0;
            while k < n {
                pick[k] += 1;
                if pick[k] < legs[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    });
    Ok(OracleResult::from_candidates(g.dim, all))
}

fn permute(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Every triangle subset, measured directly; witnesses are triangle ids.
pub fn brute_aggregation(inst: &AggregationInstance) -> Result<OracleResult> {
    let ids: Vec<u32> = inst.triangles.keys().copied().collect();
    if ids.len() > 20 {
        return Err(Error::TooLarge(format!("{} triangles", ids.len())));
    }
    let mut all = Vec::with_capacity(1 << ids.len());
    for mask in 0u64..1 << ids.len() {
        let sel: BTreeSet<u32> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &t)| t)
            .collect();
        let c = inst.evaluate(&sel);
        all.push((c, sel.into_iter().map(u64::from).collect()));
    }
    Ok(OracleResult::from_candidates(2, all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::cost;

    fn g(text: &str) -> Graph {
        Graph::parse(text).unwrap()
    }

    #[test]
    fn single_vertex_cut() {
        let r = brute_cuts(&g("p mo 1 2 2\ne 0 1 1 3\ne 1 2 3 1\n")).unwrap();
        assert_eq!(r.costs(), vec![cost(&[10, 30]), cost(&[30, 10])]);
    }

    #[test]
    fn trivial_cuts() {
        assert_eq!(brute_cuts(&g("p mo 0 0 2\n")).unwrap().costs(), vec![cost(&[0, 0])]);
        let r = brute_cuts(&g("p mo 2 2 2\ne 0 1 0 0\ne 1 2 0 0\n")).unwrap();
        assert_eq!(r.costs(), vec![cost(&[0, 0])]);
    }

    #[test]
    fn triangle_trees() {
        let r = brute_mst(&g("p mo 3 3 2\ne 1 2 1 3\ne 2 3 2 2\ne 1 3 3 1\n")).unwrap();
        assert_eq!(r.costs(), vec![cost(&[30, 50]), cost(&[40, 40]), cost(&[50, 30])]);
        assert!(matches!(
            brute_mst(&g("p mo 3 1 2\ne 1 2 1 1\n")),
            Err(Error::NoSpanningTree)
        ));
        let r = brute_mst(&g("p mo 2 2 2\ne 1 2 1 1\ne 1 2 1 1\n")).unwrap();
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn tours() {
        let k3 = g("p mo 3 3 2\ne 1 2 1 0\ne 2 3 1 0\ne 1 3 1 0\n");
        assert_eq!(brute_tsp(&k3).unwrap().costs(), vec![cost(&[30, 0])]);
        let mut k4 = String::from("p mo 4 6 2\n");
        for (i, (u, v)) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)].iter().enumerate() {
            k4 += &format!("e {u} {v} {} {}\n", i, 5 - i);
        }
        assert!(brute_tsp(&g(&k4)).unwrap().entries.len() <= 3);
        let star = g("p mo 4 3 2\ne 1 2 1 1\ne 1 3 1 1\ne 1 4 1 1\n");
        assert!(brute_tsp(&star).unwrap().entries.is_empty());
    }
}
