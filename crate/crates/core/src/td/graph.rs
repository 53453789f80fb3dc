use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fixed;
use crate::pareto::Cost;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub cost: Cost,
}

/// Undirected multigraph with `d`-dimensional edge costs.
///
/// Vertex ids run from 0 to `n + 1`; s-t cut instances use 0 and `n + 1` as the
/// terminals, the other problems use `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub dim: usize,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, dim: usize) -> Self {
        Graph {
            n,
            dim,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, u: u32, v: u32, cost: Cost) {
        debug_assert_eq!(cost.len(), self.dim);
        self.edges.push(Edge { u, v, cost });
    }

    pub fn source(&self) -> u32 {
        0
    }

    pub fn sink(&self) -> u32 {
        self.n as u32 + 1
    }

    pub fn is_terminal(&self, v: u32) -> bool {
        v == 0 || v as usize == self.n + 1
    }

    /// Edges with both endpoints in `1..=n`.
    pub fn inner_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !self.is_terminal(e.u) && !self.is_terminal(e.v))
    }

    pub fn parse(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut g = Graph::new(0, 0);
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let mut tok = raw.split_whitespace();
            match tok.next() {
                None | Some("c") => continue,
                Some(t) if t.starts_with('#') => continue,
                Some("p") => {
                    if header.is_some() {
                        return Err(Error::parse(line, "duplicate header"));
                    }
                    if tok.next() != Some("mo") {
                        return Err(Error::parse(line, "expected header `p mo <n> <m> <d>`"));
                    }
                    let mut num = || -> Result<usize> {
                        tok.next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| Error::parse(line, "expected header `p mo <n> <m> <d>`"))
                    };
                    let (n, m, d) = (num()?, num()?, num()?);
                    if d == 0 {
                        return Err(Error::parse(line, "objective count must be positive"));
                    }
                    header = Some((n, m, d));
                    g = Graph::new(n, d);
                    g.edges.reserve(m);
                }
                Some("e") => {
                    let (n, _, d) = header.ok_or_else(|| Error::parse(line, "edge before header"))?;
                    let mut vid = || -> Result<u32> {
                        let v: u32 = tok
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| Error::parse(line, "expected `e <u> <v> <c1> ... <cd>`"))?;
                        if v as usize > n + 1 {
                            return Err(Error::parse(line, format!("vertex {v} out of range 0..={}", n + 1)));
                        }
                        Ok(v)
                    };
                    let (u, v) = (vid()?, vid()?);
                    if u == v {
                        return Err(Error::parse(line, format!("self loop at vertex {u}")));
                    }
                    let cost: Cost = tok.map(|t| fixed::parse_at(t, line)).collect::<Result<_>>()?;
                    if cost.len() != d {
                        return Err(Error::parse(line, format!("expected {d} costs, found {}", cost.len())));
                    }
                    g.edges.push(Edge { u, v, cost });
                }
                Some(other) => return Err(Error::parse(line, format!("unknown line type {other:?}"))),
            }
        }
        let (_, m, _) = header.ok_or_else(|| Error::parse(0, "missing `p mo` header"))?;
        if m != g.edges.len() {
            return Err(Error::parse(
                0,
                format!("header declares {m} edges, found {}", g.edges.len()),
            ));
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p mo {} {} {}\n", self.n, self.edges.len(), self.dim);
        for e in &self.edges {
            let _ = write!(out, "e {} {}", e.u, e.v);
            for c in &e.cost {
                let _ = write!(out, " {}", fixed::format(*c));
            }
            out.push('\n');
        }
        out
    }

    /// Whether vertices `1..=n` form one connected component using edges among them.
    pub fn inner_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(self.n + 2);
        let mut comps = self.n;
        for (_, e) in self.inner_edges() {
            if uf.union(e.u as usize, e.v as usize) {
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Adjacency lists over `0..=n+1`, holding edge indices.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 2];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u as usize].push(i);
            adj[e.v as usize].push(i);
        }
        adj
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let text = "c toy\np mo 2 3 2\ne 0 1 1.0 3\ne 1 2 0.25 0.5\ne 2 3 1 1\n";
        let g = Graph::parse(text).unwrap();
        assert_eq!(g.n, 2);
        assert_eq!(g.edges[1].cost.as_slice(), &[3, 5]);
        assert_eq!(g.inner_edges().count(), 1);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn parse_errors() {
        assert!(Graph::parse("e 1 2 1 1\n").is_err());
        assert!(Graph::parse("p mo 2 1 2\ne 1 5 1 1\n").is_err());
        assert!(Graph::parse("p mo 2 1 2\ne 1 2 1\n").is_err());
        assert!(Graph::parse("p mo 2 2 2\ne 1 2 1 1\n").is_err());
        assert!(Graph::parse("p mo 2 1 2\ne 1 1 1 1\n").is_err());
    }

    #[test]
    fn connectivity() {
        let g = Graph::parse("p mo 3 1 2\ne 1 2 1 1\n").unwrap();
        assert!(!g.inner_connected());
        let g = Graph::parse("p mo 3 2 2\ne 1 2 1 1\ne 3 2 1 1\n").unwrap();
        assert!(g.inner_connected());
    }
}
