//! Entry points that validate an instance, build the nice decomposition and
//! run the matching solver into a store.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregation::AggregationInstance;
use crate::engine::{run, EngineConfig, NodeSolver, RunStats};
use crate::error::{Error, Result};
use crate::estimator::{candidate_roots, estimate_rooted, rank};
use crate::mst::MstSolver;
use crate::pareto::{zero, ParetoFront};
use crate::stcut::{CutInstance, CutSolver};
use crate::store::Store;
use crate::td::{fuse_nodes, make_nice, min_degree_decomposition, Graph, NiceTd, TreeDecomposition};
use crate::tsp::TspSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Stcut,
    Mst,
    Tsp,
    Aggregation,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Stcut => "stcut",
            ProblemKind::Mst => "mst",
            ProblemKind::Tsp => "tsp",
            ProblemKind::Aggregation => "aggregation",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stcut" => Ok(ProblemKind::Stcut),
            "mst" => Ok(ProblemKind::Mst),
            "tsp" => Ok(ProblemKind::Tsp),
            "aggregation" => Ok(ProblemKind::Aggregation),
            _ => Err(Error::Usage(format!("unknown problem {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// 0-based bag id; chosen by the estimator when unset.
    pub root: Option<usize>,
    /// Let the estimator try every bag rather than only tree leaves.
    pub optimize_root: bool,
    /// Fuse joins with forgets and introduces (s-t cut problems only).
    pub fusion: bool,
    pub engine: EngineConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            root: None,
            optimize_root: false,
            fusion: true,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    /// Root front with the instance offset applied; payloads are log ids.
    pub front: ParetoFront,
    pub stats: RunStats,
    pub root: usize,
    pub nodes: usize,
}

pub fn pick_root(td: &TreeDecomposition, opts: &SolveOptions) -> Result<usize> {
    if let Some(r) = opts.root {
        if r >= td.len().max(1) {
            return Err(Error::Usage(format!("root bag {} does not exist", r + 1)));
        }
        return Ok(r);
    }
    if td.len() <= 1 {
        return Ok(0);
    }
    let roots = candidate_roots(td, opts.optimize_root);
    let est = roots
        .iter()
        .map(|&r| estimate_rooted(td, r, opts.fusion))
        .collect::<Result<Vec<_>>>()?;
    Ok(roots[rank(&est)[0].0])
}

fn finish(
    solver: &dyn NodeSolver,
    ntd: &NiceTd,
    root: usize,
    store: &mut Store,
    opts: &SolveOptions,
) -> Result<Solved> {
    if store.meta.offset.is_empty() {
        store.meta.offset = zero(solver.dim()).to_vec();
    }
    let stats = run(solver, ntd, store, &opts.engine)?;
    let mut front = store.root_front()?;
    front.shift(&store.meta.offset);
    Ok(Solved {
        front,
        stats,
        root,
        nodes: ntd.len(),
    })
}

/// Nice decomposition for the s-t cut solver, fused when requested.
pub fn cut_decomposition(inst: &CutInstance, td: &TreeDecomposition, opts: &SolveOptions) -> Result<(NiceTd, usize)> {
    td.validate(inst.n, inst.inner_edges())?;
    let root = pick_root(td, opts)?;
    let mut ntd = make_nice(td, root, None)?;
    if opts.fusion {
        ntd = fuse_nodes(&ntd);
    }
    Ok((ntd, root))
}

pub fn solve_stcut(g: &Graph, td: &TreeDecomposition, opts: &SolveOptions, store: &mut Store) -> Result<Solved> {
    let inst = CutInstance::from_graph(g)?;
    let (ntd, root) = cut_decomposition(&inst, td, opts)?;
    finish(&CutSolver { inst: &inst }, &ntd, root, store, opts)
}

pub fn solve_aggregation(
    inst: &AggregationInstance,
    td: &TreeDecomposition,
    opts: &SolveOptions,
    store: &mut Store,
) -> Result<Solved> {
    let cg = inst.build_cut_graph();
    let cut = CutInstance::from_graph(&cg.graph)?;
    let (ntd, root) = cut_decomposition(&cut, td, opts)?;
    store.meta.offset = cg.offset.to_vec();
    store.meta.labels = std::iter::once(String::new())
        .chain(cg.triangle_ids.iter().map(|t| format!("t{t}")))
        .collect();
    finish(&CutSolver { inst: &cut }, &ntd, root, store, opts)
}

fn edge_decomposition(g: &Graph, td: &TreeDecomposition, opts: &SolveOptions) -> Result<(NiceTd, usize)> {
    let edges: Vec<(u32, u32)> = g.edges.iter().map(|e| (e.u, e.v)).collect();
    if let Some(&(u, v)) = edges
        .iter()
        .find(|&&(u, v)| u == 0 || v == 0 || u as usize > g.n || v as usize > g.n)
    {
        return Err(Error::InvalidInstance(format!("edge {{{u},{v}}} leaves 1..={}", g.n)));
    }
    td.validate(g.n, edges.iter().copied())?;
    let root = pick_root(
        td,
        &SolveOptions {
            fusion: false,
            ..opts.clone()
        },
    )?;
    Ok((make_nice(td, root, Some(&edges))?, root))
}

fn edge_labels(g: &Graph) -> Vec<String> {
    g.edges.iter().map(|e| format!("{}-{}", e.u, e.v)).collect()
}

pub fn solve_mst(g: &Graph, td: &TreeDecomposition, opts: &SolveOptions, store: &mut Store) -> Result<Solved> {
    let (ntd, root) = edge_decomposition(g, td, opts)?;
    let solver = MstSolver::new(g, &ntd)?;
    store.meta.labels = edge_labels(g);
    let solved = finish(&solver, &ntd, root, store, opts)?;
    if solved.front.is_empty() {
        return Err(Error::NoSpanningTree);
    }
    Ok(solved)
}

/// An empty front means the graph has no tour.
pub fn solve_tsp(g: &Graph, td: &TreeDecomposition, opts: &SolveOptions, store: &mut Store) -> Result<Solved> {
    let (ntd, root) = edge_decomposition(g, td, opts)?;
    let solver = TspSolver::new(g, &ntd)?;
    store.meta.labels = edge_labels(g);
    finish(&solver, &ntd, root, store, opts)
}

/// Solve from file contents: a `p mo` graph, or instance JSON for aggregation.
/// Without a decomposition a min-degree elimination ordering supplies one.
pub fn solve_text(
    problem: ProblemKind,
    input: &str,
    td: Option<&str>,
    opts: &SolveOptions,
    store: &mut Store,
) -> Result<Solved> {
    let load = |n: usize, edges: Vec<(u32, u32)>| match td {
        Some(text) => TreeDecomposition::parse(text),
        None => Ok(min_degree_decomposition(n, edges)),
    };
    let plain = |g: &Graph| g.edges.iter().map(|e| (e.u, e.v)).collect::<Vec<_>>();
    match problem {
        ProblemKind::Aggregation => {
            let inst = AggregationInstance::from_json(input)?;
            let cg = inst.build_cut_graph();
            let td = load(cg.graph.n, CutInstance::from_graph(&cg.graph)?.inner_edges())?;
            solve_aggregation(&inst, &td, opts, store)
        }
        ProblemKind::Stcut => {
            let g = Graph::parse(input)?;
            let td = load(g.n, CutInstance::from_graph(&g)?.inner_edges())?;
            solve_stcut(&g, &td, opts, store)
        }
        ProblemKind::Mst => {
            let g = Graph::parse(input)?;
            let td = load(g.n, plain(&g))?;
            solve_mst(&g, &td, opts, store)
        }
        ProblemKind::Tsp => {
            let g = Graph::parse(input)?;
            let td = load(g.n, plain(&g))?;
            solve_tsp(&g, &td, opts, store)
        }
    }
}

/// Objective count of an input in the `solve_text` formats.
pub fn input_dim(problem: ProblemKind, input: &str) -> Result<usize> {
    Ok(match problem {
        ProblemKind::Aggregation => 2,
        _ => Graph::parse(input)?.dim,
    })
}
