//! Lossless pruning of bicriteria joins.
//!
//! Both inputs are cut into sections with shifted chord lower bounds. A cheap
//! approximation `H` of the result is built from representative subsets, and
//! its staircase is covered by shifted chord upper bounds. Any pair of
//! sections whose combined lower polyline lies strictly above every upper bound
//! it overlaps can only produce points strictly dominated by `H`, so the heap
//! join never visits it. All geometry is exact integer arithmetic.

use serde::{Deserialize, Serialize};

use crate::pareto::{heap_join, merge_many, product_fronts, Cost, ParetoFront};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicConfig {
    pub enabled: bool,
    pub n_lower_max: usize,
    pub n_h_max: usize,
    pub n_upper_max: usize,
    pub subsample: f64,
    /// Inputs at most this long on both sides are joined directly.
    pub base_case: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            enabled: true,
            n_lower_max: 500,
            n_h_max: 350,
            n_upper_max: 200,
            subsample: 0.04,
            base_case: 40,
        }
    }
}

impl HeuristicConfig {
    pub fn disabled() -> Self {
        HeuristicConfig {
            enabled: false,
            ..Default::default()
        }
    }

    fn stride(&self) -> usize {
        (1.0 / self.subsample.clamp(1e-6, 1.0)).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinStats {
    pub pairs: u128,
    pub skipped: u128,
}

impl JoinStats {
    pub fn add(&mut self, o: JoinStats) {
        self.pairs += o.pairs;
        self.skipped += o.skipped;
    }

    pub fn skip_fraction(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.skipped as f64 / self.pairs as f64
        }
    }
}

type Pt = (i64, i64);

/// A segment between two points with `a.0 <= b.0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundLine {
    pub a: Pt,
    pub b: Pt,
}

/// Value of a line at `x` as a fraction with positive denominator.
fn eval(a: Pt, b: Pt, x: i64) -> (i128, i128) {
    let dx = (b.0 - a.0) as i128;
    if dx == 0 {
        return (a.1 as i128, 1);
    }
    (a.1 as i128 * dx + (b.1 - a.1) as i128 * (x - a.0) as i128, dx)
}

fn frac_gt(p: (i128, i128), q: (i128, i128)) -> bool {
    p.0 * q.1 > q.0 * p.1
}

fn ceil_div(n: i128, d: i128) -> i128 {
    debug_assert!(d > 0);
    n.div_euclid(d) + i128::from(n.rem_euclid(d) != 0)
}

impl BoundLine {
    pub fn at(&self, x: i64) -> (i128, i128) {
        eval(self.a, self.b, x)
    }

    /// Chord through the end points shifted down until no point lies below it.
    pub fn lower(points: &[Pt]) -> BoundLine {
        let (a, b) = (points[0], points[points.len() - 1]);
        let dx = (b.0 - a.0) as i128;
        let mut alpha: i128 = 0;
        if dx > 0 {
            for &p in points {
                let (num, den) = eval(a, b, p.0);
                alpha = alpha.max(ceil_div(num - p.1 as i128 * den, den));
            }
        }
        let alpha = alpha as i64;
        BoundLine {
            a: (a.0, a.1 - alpha),
            b: (b.0, b.1 - alpha),
        }
    }

    /// Chord through the end points shifted up until no point lies above it.
    pub fn upper(points: &[Pt]) -> BoundLine {
        let (a, b) = (points[0], points[points.len() - 1]);
        let dx = (b.0 - a.0) as i128;
        let mut alpha: i128 = 0;
        if dx > 0 {
            for &p in points {
                let (num, den) = eval(a, b, p.0);
                alpha = alpha.max(ceil_div(p.1 as i128 * den - num, den));
            }
        }
        let alpha = alpha as i64;
        BoundLine {
            a: (a.0, a.1 + alpha),
            b: (b.0, b.1 + alpha),
        }
    }
}

/// Lower polyline of the Minkowski sum of two lower bound segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombinedLowerBound {
    pub v: [Pt; 3],
}

impl CombinedLowerBound {
    pub fn new(l1: &BoundLine, l2: &BoundLine) -> Self {
        let d1 = (l1.b.0 - l1.a.0, l1.b.1 - l1.a.1);
        let d2 = (l2.b.0 - l2.a.0, l2.b.1 - l2.a.1);
        // slope(d1) <= slope(d2) with nonnegative x components
        let first_is_1 = (d1.1 as i128) * (d2.0 as i128) <= (d2.1 as i128) * (d1.0 as i128);
        let (first, second) = if first_is_1 { (d1, d2) } else { (d2, d1) };
        let p0 = (l1.a.0 + l2.a.0, l1.a.1 + l2.a.1);
        let p1 = (p0.0 + first.0, p0.1 + first.1);
        let p2 = (p1.0 + second.0, p1.1 + second.1);
        CombinedLowerBound { v: [p0, p1, p2] }
    }

    pub fn at(&self, x: i64) -> (i128, i128) {
        if x <= self.v[1].0 {
            eval(self.v[0], self.v[1], x)
        } else {
            eval(self.v[1], self.v[2], x)
        }
    }

    pub fn start(&self) -> i64 {
        self.v[0].0
    }

    pub fn end(&self) -> i64 {
        self.v[2].0
    }
}

/// Consecutive section boundaries: `k` sections over `len` items, the first
/// `len % k` one item longer. Returns `k + 1` offsets.
fn split(len: usize, k: usize) -> Vec<usize> {
    let k = k.clamp(1, len.max(1));
    let (q, r) = (len / k, len % k);
    let mut out = Vec::with_capacity(k + 1);
    let mut at = 0;
    out.push(0);
    for i in 0..k {
        at += q + usize::from(i < r);
        out.push(at);
    }
    out
}

fn points<P>(f: &ParetoFront<P>) -> Vec<Pt> {
    f.costs().map(|c| (c[0], c[1])).collect()
}

pub fn section_count(len: usize, cap: usize) -> usize {
    cap.min(len.div_ceil(10)).max(1)
}

/// Sections of a front with their lower bound lines. Returns section starts
/// (plus the end offset) and one line per section.
pub fn section_lower_bounds(pts: &[Pt], cap: usize) -> (Vec<usize>, Vec<BoundLine>) {
    if pts.is_empty() {
        return (vec![0], Vec::new());
    }
    let cuts = split(pts.len(), section_count(pts.len(), cap));
    let lines = cuts.windows(2).map(|w| BoundLine::lower(&pts[w[0]..w[1]])).collect();
    (cuts, lines)
}

/// Staircase corner points of a front: the first point, then each point's x
/// paired with its predecessor's y.
pub fn staircase(h: &[Pt]) -> Vec<Pt> {
    let mut b = Vec::with_capacity(h.len());
    if let Some(&first) = h.first() {
        b.push(first);
    }
    for w in h.windows(2) {
        b.push((w[1].0, w[0].1));
    }
    b
}

/// Upper bound lines over overlapping sections of the staircase of `h`.
pub fn upper_bounds(h: &[Pt], cap: usize) -> Vec<BoundLine> {
    let b = staircase(h);
    if b.is_empty() {
        return Vec::new();
    }
    let k = cap.min((b.len() - 1) / 3).max(1);
    let cuts = split(b.len() - 1, k);
    cuts.windows(2).map(|w| BoundLine::upper(&b[w[0]..=w[1]])).collect()
}

/// Lower convex hull vertices of an x-sorted point list.
fn extreme_points(pts: &[Pt]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let o = pts[hull[hull.len() - 2]];
            let a = pts[hull[hull.len() - 1]];
            let cross = (a.0 - o.0) as i128 * (p.1 - o.1) as i128 - (a.1 - o.1) as i128 * (p.0 - o.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

fn representatives(pts: &[Pt], cfg: &HeuristicConfig, top_level: bool) -> ParetoFront<()> {
    let mut keep: Vec<usize> = Vec::new();
    if top_level {
        let cuts = split(pts.len(), section_count(pts.len(), cfg.n_h_max));
        for w in cuts.windows(2) {
            keep.extend(extreme_points(&pts[w[0]..w[1]]).into_iter().map(|i| i + w[0]));
        }
    } else {
        keep.extend((0..pts.len()).step_by(cfg.stride()));
        if keep.last() != Some(&(pts.len() - 1)) {
            keep.push(pts.len() - 1);
        }
    }
    ParetoFront::from_sorted(
        2,
        keep.into_iter()
            .map(|i| (smallvec::smallvec![pts[i].0, pts[i].1], ()))
            .collect(),
    )
}

/// Which section pairs may hold a point that is not strictly dominated by the
/// staircase covered by `uppers`. Indexed `[section of a][section of b]`.
pub fn allowed_pairs(la: &[BoundLine], lb: &[BoundLine], uppers: &[BoundLine]) -> Vec<Vec<bool>> {
    let mut out = vec![vec![true; lb.len()]; la.len()];
    let (Some(first), Some(last)) = (uppers.first(), uppers.last()) else {
        return out;
    };
    let (lo, hi) = (first.a.0, last.b.0);
    let mut row_cursor = 0;
    for (i, l1) in la.iter().enumerate() {
        let mut cursor = row_cursor;
        for (j, l2) in lb.iter().enumerate() {
            let poly = CombinedLowerBound::new(l1, l2);
            while cursor < uppers.len() && uppers[cursor].b.0 < poly.start() {
                cursor += 1;
            }
            if j == 0 {
                row_cursor = cursor;
            }
            if poly.start() < lo || poly.end() > hi {
                continue;
            }
            out[i][j] = !skip_test(&poly, &uppers[cursor..]);
        }
    }
    out
}

/// True when `poly` lies strictly above every upper bound overlapping it.
/// `uppers` starts at the first bound that can overlap.
pub fn skip_test(poly: &CombinedLowerBound, uppers: &[BoundLine]) -> bool {
    let mut any = false;
    for u in uppers {
        if u.a.0 > poly.end() {
            break;
        }
        let lo = u.a.0.max(poly.start());
        let hi = u.b.0.min(poly.end());
        if lo > hi {
            continue;
        }
        any = true;
        let mut xs = [lo, hi, poly.v[1].0];
        if !(lo..=hi).contains(&xs[2]) {
            xs[2] = lo;
        }
        for x in xs {
            if !frac_gt(poly.at(x), u.at(x)) {
                return false;
            }
        }
    }
    any
}

/// Heap join of `a` and `b` that never visits section pairs ruled out by `h`.
pub fn join_with_h<P1, P2>(
    a: &ParetoFront<P1>,
    b: &ParetoFront<P2>,
    offset: &[i64],
    h: &[Pt],
    cfg: &HeuristicConfig,
    stats: &mut JoinStats,
) -> ParetoFront<(P1, P2)>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    stats.pairs += a.len() as u128 * b.len() as u128;
    if a.is_empty() || b.is_empty() {
        return ParetoFront::new(2);
    }
    let pa = points(a);
    let mut pb = points(b);
    // fold the offset into b so that bounds compare directly against h
    for p in &mut pb {
        p.0 -= offset[0];
        p.1 -= offset[1];
    }
    let (ca, la) = section_lower_bounds(&pa, cfg.n_lower_max);
    let (cb, lb) = section_lower_bounds(&pb, cfg.n_lower_max);
    let uppers = upper_bounds(h, cfg.n_upper_max);
    let allowed = allowed_pairs(&la, &lb, &uppers);
    for (i, row) in allowed.iter().enumerate() {
        for (j, &ok) in row.iter().enumerate() {
            if !ok {
                stats.skipped += ((ca[i + 1] - ca[i]) * (cb[j + 1] - cb[j])) as u128;
            }
        }
    }
    let sec_of = |cuts: &[usize]| {
        let mut s = vec![0u32; cuts[cuts.len() - 1]];
        for (k, w) in cuts.windows(2).enumerate() {
            s[w[0]..w[1]].fill(k as u32);
        }
        s
    };
    let (sa, sb) = (sec_of(&ca), sec_of(&cb));
    let nodes_on_left = a.len() <= b.len();
    let (node_sec, cur_sec, cur_cuts) = if nodes_on_left {
        (&sa, &sb, &cb)
    } else {
        (&sb, &sa, &ca)
    };
    let cur_len = cur_sec.len();
    let skip = |node: usize, mut c: usize| -> usize {
        let ns = node_sec[node] as usize;
        while c < cur_len {
            let cs = cur_sec[c] as usize;
            let ok = if nodes_on_left {
                allowed[ns][cs]
            } else {
                allowed[cs][ns]
            };
            if ok {
                return c;
            }
            c = cur_cuts[cs + 1];
        }
        c
    };
    crate::pareto::heap_join_with(a, b, offset, nodes_on_left, skip)
}

fn heuristic_front<P1, P2>(
    a: &ParetoFront<P1>,
    b: &ParetoFront<P2>,
    offset: &[i64],
    cfg: &HeuristicConfig,
) -> Option<Vec<Pt>> {
    let ra = representatives(&points(a), cfg, true);
    let rb = representatives(&points(b), cfg, true);
    if ra.len() >= a.len() && rb.len() >= b.len() {
        return None;
    }
    let h = join_level(&ra, &rb, offset, cfg, 1, &mut JoinStats::default());
    Some(points(&h))
}

fn join_level<P1, P2>(
    a: &ParetoFront<P1>,
    b: &ParetoFront<P2>,
    offset: &[i64],
    cfg: &HeuristicConfig,
    level: usize,
    stats: &mut JoinStats,
) -> ParetoFront<(P1, P2)>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    let direct = |stats: &mut JoinStats| {
        stats.pairs += a.len() as u128 * b.len() as u128;
        heap_join(a, b, offset).expect("two objectives")
    };
    if a.is_empty() || b.is_empty() || (a.len() <= cfg.base_case && b.len() <= cfg.base_case) {
        return direct(stats);
    }
    let h = if level == 0 {
        heuristic_front(a, b, offset, cfg)
    } else {
        let ra = representatives(&points(a), cfg, false);
        let rb = representatives(&points(b), cfg, false);
        if ra.len() >= a.len() && rb.len() >= b.len() {
            None
        } else {
            let h = join_level(&ra, &rb, offset, cfg, level + 1, &mut JoinStats::default());
            Some(points(&h))
        }
    };
    match h {
        Some(h) => join_with_h(a, b, offset, &h, cfg, stats),
        None => direct(stats),
    }
}

/// Exact `a ⊕ b - offset` for two objectives, pruned by the heuristic.
pub fn heuristic_join<P1, P2>(
    a: &ParetoFront<P1>,
    b: &ParetoFront<P2>,
    offset: &[i64],
    cfg: &HeuristicConfig,
    stats: &mut JoinStats,
) -> ParetoFront<(P1, P2)>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    join_level(a, b, offset, cfg, 0, stats)
}

/// Union front of several joins, as needed when a join is fused with forgets.
/// With the heuristic on, one `H` built from all pairs prunes every pair.
pub fn join_many<P1, P2>(
    dim: usize,
    pairs: &[(&ParetoFront<P1>, &ParetoFront<P2>, Cost)],
    cfg: &HeuristicConfig,
    stats: &mut JoinStats,
) -> ParetoFront<(P1, P2)>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    if dim != 2 {
        let parts = pairs
            .iter()
            .map(|(a, b, o)| {
                stats.pairs += a.len() as u128 * b.len() as u128;
                product_fronts(a, b, o).expect("matching dimensions")
            })
            .collect();
        return merge_many(dim, parts);
    }
    if !cfg.enabled {
        let parts = pairs
            .iter()
            .map(|(a, b, o)| {
                stats.pairs += a.len() as u128 * b.len() as u128;
                heap_join(a, b, o).expect("matching dimensions")
            })
            .collect();
        return merge_many(dim, parts);
    }
    if pairs.len() == 1 {
        let (a, b, o) = &pairs[0];
        return heuristic_join(a, b, o, cfg, stats);
    }
    let small = pairs
        .iter()
        .all(|(a, b, _)| a.len() <= cfg.base_case && b.len() <= cfg.base_case);
    let shared: Option<Vec<Pt>> = if small {
        None
    } else {
        let hs: Vec<ParetoFront<()>> = pairs
            .iter()
            .filter(|(a, b, _)| !a.is_empty() && !b.is_empty())
            .map(|(a, b, o)| {
                let h = heuristic_front(a, b, o, cfg).unwrap_or_else(|| {
                    let ra = representatives(&points(a), cfg, true);
                    let rb = representatives(&points(b), cfg, true);
                    points(&join_level(&ra, &rb, o, cfg, 1, &mut JoinStats::default()))
                });
                ParetoFront::from_sorted(2, h.into_iter().map(|p| (smallvec::smallvec![p.0, p.1], ())).collect())
            })
            .collect();
        Some(points(&merge_many(2, hs)))
    };
    let parts = pairs
        .iter()
        .map(|(a, b, o)| match &shared {
            Some(h) if a.len() > cfg.base_case || b.len() > cfg.base_case => join_with_h(a, b, o, h, cfg, stats),
            _ => {
                stats.pairs += a.len() as u128 * b.len() as u128;
                heap_join(a, b, o).expect("matching dimensions")
            }
        })
        .collect();
    merge_many(2, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{cost, reduce_entries};

    fn front(pts: &[Pt]) -> ParetoFront<u32> {
        reduce_entries(
            2,
            pts.iter()
                .enumerate()
                .map(|(i, p)| (cost(&[p.0, p.1]), i as u32))
                .collect(),
        )
    }

    #[test]
    fn section_counts() {
        assert_eq!(section_count(5000, 500), 500);
        assert_eq!(section_count(7, 500), 1);
        assert_eq!(split(10, 3), vec![0, 4, 7, 10]);
    }

    #[test]
    fn collinear_lower_bound_has_no_shift() {
        let pts = [(0, 10), (1, 8), (2, 6), (3, 4)];
        assert_eq!(BoundLine::lower(&pts), BoundLine { a: (0, 10), b: (3, 4) });
    }

    #[test]
    fn lower_bound_below_points() {
        let pts = [(0, 10), (1, 5), (2, 4), (5, 0)];
        let l = BoundLine::lower(&pts);
        for p in pts {
            let (n, d) = l.at(p.0);
            assert!(n <= p.1 as i128 * d);
        }
    }

    #[test]
    fn staircase_example() {
        assert_eq!(staircase(&[(1, 5), (2, 3)]), vec![(1, 5), (2, 5)]);
        let u = upper_bounds(&[(1, 5)], 200);
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn upper_bound_above_staircase() {
        let h = [(0, 20), (1, 12), (3, 11), (4, 4), (9, 3), (10, 0), (12, -4), (15, -5)];
        let b = staircase(&h);
        for u in upper_bounds(&h, 200) {
            for p in b.iter().filter(|p| p.0 >= u.a.0 && p.0 <= u.b.0) {
                let (n, d) = u.at(p.0);
                assert!(n >= p.1 as i128 * d);
            }
        }
    }

    #[test]
    fn skip_and_no_skip() {
        let u = [BoundLine {
            a: (0, 10),
            b: (10, 10),
        }];
        let above = CombinedLowerBound {
            v: [(2, 11), (3, 11), (4, 11)],
        };
        assert!(skip_test(&above, &u));
        let dips = CombinedLowerBound {
            v: [(2, 11), (3, 9), (4, 11)],
        };
        assert!(!skip_test(&dips, &u));
        let touches = CombinedLowerBound {
            v: [(2, 10), (3, 11), (4, 11)],
        };
        assert!(!skip_test(&touches, &u));
    }

    #[test]
    fn singletons_and_empty() {
        let a = front(&[(1, 1)]);
        let b = front(&[(2, 3)]);
        let mut s = JoinStats::default();
        let j = heuristic_join(&a, &b, &[0, 0], &HeuristicConfig::default(), &mut s);
        assert_eq!(j.entries()[0].0, cost(&[3, 4]));
        let e = front(&[]);
        assert!(heuristic_join(&e, &b, &[0, 0], &HeuristicConfig::default(), &mut s).is_empty());
    }

    #[test]
    fn forced_exact_h_still_exact() {
        let a = front(&(0..300).map(|i| (i * 3, 2000 - i * 5 + (i % 7))).collect::<Vec<_>>());
        let b = front(&(0..250).map(|i| (i * 4 + (i % 3), 1500 - i * 6)).collect::<Vec<_>>());
        let exact = heap_join(&a, &b, &[1, 2]).unwrap();
        let h = points(&exact);
        let mut s = JoinStats::default();
        let j = join_with_h(&a, &b, &[1, 2], &h, &HeuristicConfig::default(), &mut s);
        assert_eq!(j, exact);
        assert!(s.skipped > 0);
    }
}
