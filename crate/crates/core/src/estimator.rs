//! Solution-count, runtime and storage estimates for ranking decompositions and roots.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::store::RECORD_SIZE;
use crate::td::{fuse_nodes, make_nice, NiceTd, NodeKind, TreeDecomposition};

pub const JOIN_ALPHA: f64 = 0.57;
pub const JOIN_BETA: f64 = 2.15;
pub const FORGET_FACTOR: f64 = 0.5;
pub const JOIN_FORGET_DELTA: f64 = 0.5;
pub const GAMMA: f64 = 1.0;
pub const TIME_WEIGHT: f64 = 0.25;
pub const STORAGE_WEIGHT: f64 = 0.75;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEstimate {
    pub node: usize,
    pub count: f64,
    pub join_work: f64,
    pub records: f64,
}

impl NodeEstimate {
    pub fn log_bytes(&self) -> f64 {
        self.records * RECORD_SIZE as f64
    }
}

/// Size of a join result from the two child sizes.
pub fn join_count(a: f64, b: f64) -> f64 {
    let (small, big) = if a <= b { (a, b) } else { (b, a) };
    if big <= 0.0 {
        return 0.0;
    }
    big * (1.0 + (small / big).powf(JOIN_ALPHA) * JOIN_BETA)
}

/// Work of one join over a bag of `bag` vertices with children of size `a`, `b`,
/// assuming solutions spread evenly over the bag subsets.
pub fn join_time(a: f64, b: f64, bag: usize) -> f64 {
    let subsets = 2f64.powi(bag as i32);
    let (small, big) = if a <= b {
        (a / subsets, b / subsets)
    } else {
        (b / subsets, a / subsets)
    };
    subsets * small * big * small.max(1.0).ln() * GAMMA
}

/// Per-node estimates in postorder.
pub fn estimate_nodes(ntd: &NiceTd) -> Vec<NodeEstimate> {
    let mut out: Vec<NodeEstimate> = Vec::with_capacity(ntd.len());
    for (t, node) in ntd.nodes.iter().enumerate() {
        let child = |i: usize| out[node.children[i]].count;
        let (count, join_work, records) = match &node.kind {
            NodeKind::Leaf => (1.0, 0.0, 0.0),
            NodeKind::Introduce(_) => {
                let c = 2.0 * child(0);
                (c, 0.0, c)
            }
            NodeKind::Forget(_) => (FORGET_FACTOR * child(0), 0.0, 0.0),
            NodeKind::IntroduceEdge { .. } => {
                let c = child(0);
                (c, 0.0, c)
            }
            NodeKind::Join => {
                let c = join_count(child(0), child(1));
                (c, join_time(child(0), child(1), node.bag.len()), c)
            }
            NodeKind::JoinForget { join_bag, forget } => {
                let joined = join_count(child(0), child(1));
                let c = joined * FORGET_FACTOR.powi(forget.len() as i32);
                let work =
                    join_time(child(0), child(1), join_bag.len()) * JOIN_FORGET_DELTA.powi(forget.len() as i32 - 1);
                (c, work, c)
            }
            NodeKind::IntroduceJoinForget {
                join_bag,
                forget,
                skipped,
            } => {
                let a = child(0) * 2f64.powi(skipped[0].len() as i32);
                let b = child(1) * 2f64.powi(skipped[1].len() as i32);
                let c = join_count(a, b) * FORGET_FACTOR.powi(forget.len() as i32);
                let work = join_time(a, b, join_bag.len()) * JOIN_FORGET_DELTA.powi(forget.len() as i32 - 1);
                let skipped_records: f64 = skipped
                    .iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| 1.0 - 2f64.powi(-(s.len() as i32)))
                    .sum();
                (c, work, c * (1.0 + skipped_records))
            }
        };
        out.push(NodeEstimate {
            node: t,
            count,
            join_work,
            records,
        });
    }
    out
}

pub fn estimate_time(est: &[NodeEstimate]) -> f64 {
    est.iter().map(|e| e.join_work).sum()
}

pub fn estimate_storage(est: &[NodeEstimate]) -> f64 {
    est.iter().map(|e| e.log_bytes()).sum()
}

/// Weighted score of every candidate against the per-metric minima.
pub fn scores(candidates: &[(f64, f64)]) -> Vec<f64> {
    let norm = |x: f64, min: f64| if min > 0.0 { x / min } else { (x + EPS) / EPS };
    let min_t = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let min_s = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .map(|&(t, s)| TIME_WEIGHT * norm(t, min_t) + STORAGE_WEIGHT * norm(s, min_s))
        .collect()
}

/// Candidate indices by ascending score; ties keep input order.
pub fn rank(candidates: &[(f64, f64)]) -> Vec<(usize, f64)> {
    let s = scores(candidates);
    let mut order: Vec<(usize, f64)> = s.into_iter().enumerate().collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1));
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub root: usize,
    pub time: f64,
    pub storage: f64,
    pub score: f64,
}

/// Nodes tried as roots: every node, or only leaves of the decomposition tree.
pub fn candidate_roots(td: &TreeDecomposition, all: bool) -> Vec<usize> {
    if td.bags.is_empty() {
        return vec![0];
    }
    if all || td.bags.len() == 1 {
        return (0..td.bags.len()).collect();
    }
    let adj = td.adjacency();
    (0..td.bags.len()).filter(|&x| adj[x].len() <= 1).collect()
}

/// Estimate `td` rooted at `root` in the form the s-t cut solver would run it.
pub fn estimate_rooted(td: &TreeDecomposition, root: usize, fusion: bool) -> Result<(f64, f64)> {
    let mut ntd = make_nice(td, root, None)?;
    if fusion {
        ntd = fuse_nodes(&ntd);
    }
    let est = estimate_nodes(&ntd);
    Ok((estimate_time(&est), estimate_storage(&est)))
}

/// Best root per decomposition, then every decomposition ranked by score.
pub fn rank_decompositions(
    tds: &[(String, TreeDecomposition)],
    all_roots: bool,
    fusion: bool,
) -> Result<Vec<Candidate>> {
    if tds.is_empty() {
        return Err(Error::Usage("no tree decompositions to rank".into()));
    }
    let best: Vec<(String, usize, f64, f64)> = tds
        .par_iter()
        .map(|(name, td)| -> Result<_> {
            let roots = candidate_roots(td, all_roots);
            let est: Vec<(f64, f64)> = roots
                .iter()
                .map(|&r| estimate_rooted(td, r, fusion))
                .collect::<Result<_>>()?;
            let (i, _) = rank(&est)[0];
            Ok((name.clone(), roots[i], est[i].0, est[i].1))
        })
        .collect::<Result<_>>()?;
    let metrics: Vec<(f64, f64)> = best.iter().map(|b| (b.2, b.3)).collect();
    Ok(rank(&metrics)
        .into_iter()
        .map(|(i, score)| Candidate {
            name: best[i].0.clone(),
            root: best[i].1,
            time: best[i].2,
            storage: best[i].3,
            score,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_rules() {
        assert!((join_count(100.0, 100.0) - 315.0).abs() < 0.5);
        assert_eq!(join_count(0.0, 0.0), 0.0);
    }

    #[test]
    fn join_time_formula() {
        let x: f64 = 100.0 / 16.0;
        assert!((join_time(100.0, 100.0, 4) - 16.0 * x * x * x.ln()).abs() < 1e-9);
    }

    #[test]
    fn score_examples() {
        let s = scores(&[(1.0, 1.0), (2.0, 1.0), (1.0, 4.0)]);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 1.25);
        assert_eq!(s[2], 3.25);
        let r = rank(&[(3.0, 2.0), (3.0, 2.0)]);
        assert_eq!(r[0].0, 0);
        let s = scores(&[(0.0, 5.0), (1.0, 5.0)]);
        assert_eq!(s[0], 1.0);
    }

    #[test]
    fn single_introduce_storage() {
        let td = TreeDecomposition::parse("s td 1 1 1\nb 1 1\n").unwrap();
        let ntd = make_nice(&td, 0, None).unwrap();
        let est = estimate_nodes(&ntd);
        assert_eq!(est[0].count, 1.0);
        assert_eq!(est[1].count, 2.0);
        assert_eq!(est[1].log_bytes(), 32.0);
        assert_eq!(estimate_time(&est), 0.0);
    }
}
