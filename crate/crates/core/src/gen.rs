//! Seeded random instances for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::pareto::{Cost, ParetoFront};
use crate::td::Graph;

/// Uniform weight in `[0, 10]` at one decimal.
pub fn weight<R: Rng>(rng: &mut R) -> i64 {
    rng.gen_range(0..=100)
}

fn costs<R: Rng>(rng: &mut R, dim: usize) -> Cost {
    (0..dim).map(|_| weight(rng)).collect()
}

/// s-t cut instance on `n` inner vertices: each inner pair is joined with
/// probability `p`, and each vertex gets a source and a sink edge with
/// probability one half each.
pub fn cut_graph<R: Rng>(rng: &mut R, n: usize, dim: usize, p: f64) -> Graph {
    let mut g = Graph::new(n, dim);
    let t = n as u32 + 1;
    for u in 1..=n as u32 {
        if rng.gen_bool(0.5) {
            g.add_edge(0, u, costs(rng, dim));
        }
        if rng.gen_bool(0.5) {
            g.add_edge(u, t, costs(rng, dim));
        }
        for v in u + 1..=n as u32 {
            if rng.gen_bool(p) {
                g.add_edge(u, v, costs(rng, dim));
            }
        }
    }
    g
}

/// Connected graph on `1..=n`: a random spanning tree plus each further
/// pair with probability `p`.
pub fn connected_graph<R: Rng>(rng: &mut R, n: usize, dim: usize, p: f64) -> Graph {
    let mut g = Graph::new(n, dim);
    let mut order: Vec<u32> = (1..=n as u32).collect();
    order.shuffle(rng);
    let mut present = std::collections::BTreeSet::new();
    for i in 1..n {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        present.insert((u.min(v), u.max(v)));
    }
    for u in 1..=n as u32 {
        for v in u + 1..=n as u32 {
            if !present.contains(&(u, v)) && rng.gen_bool(p) {
                present.insert((u, v));
            }
        }
    }
    for (u, v) in present {
        g.add_edge(u, v, costs(rng, dim));
    }
    g
}

/// Graph on `1..=n` containing a random Hamiltonian cycle when `hamiltonian`,
/// plus each further pair with probability `p`.
pub fn tour_graph<R: Rng>(rng: &mut R, n: usize, dim: usize, p: f64, hamiltonian: bool) -> Graph {
    let mut g = Graph::new(n, dim);
    let mut present = std::collections::BTreeSet::new();
    if hamiltonian {
        let mut order: Vec<u32> = (1..=n as u32).collect();
        order.shuffle(rng);
        for i in 0..n {
            let (u, v) = (order[i], order[(i + 1) % n]);
            present.insert((u.min(v), u.max(v)));
        }
    }
    for u in 1..=n as u32 {
        for v in u + 1..=n as u32 {
            if rng.gen_bool(p) {
                present.insert((u, v));
            }
        }
    }
    for (u, v) in present {
        g.add_edge(u, v, costs(rng, dim));
    }
    g
}

/// Random bicriteria front of at most `len` points with coordinates below `span`.
pub fn front<R: Rng>(rng: &mut R, len: usize, span: i64) -> ParetoFront<u32> {
    let mut xs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..span)).collect();
    let mut ys: Vec<i64> = (0..len).map(|_| rng.gen_range(0..span)).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable_by(|a, b| b.cmp(a));
    ys.dedup();
    let k = xs.len().min(ys.len());
    ParetoFront::from_sorted(
        2,
        (0..k).map(|i| (smallvec::smallvec![xs[i], ys[i]], i as u32)).collect(),
    )
}
