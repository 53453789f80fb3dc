use std::cmp::Ordering;

use super::front::ParetoFront;
use super::{check_dim, weakly_dominates, Cost};
use crate::error::Result;

/// Pairs materialised at once by `product_fronts` before reducing.
const PRODUCT_CHUNK: usize = 1 << 20;

/// Nondominated, deduplicated subset of `entries`. Among equal cost vectors the
/// smallest payload is kept.
pub fn reduce_front<P: Ord>(dim: usize, entries: Vec<(Cost, P)>) -> Result<ParetoFront<P>> {
    for (c, _) in &entries {
        check_dim(dim, c.len())?;
    }
    Ok(reduce_entries(dim, entries))
}

/// `reduce_front` without dimension checks.
pub fn reduce_entries<P: Ord>(dim: usize, mut entries: Vec<(Cost, P)>) -> ParetoFront<P> {
    entries.sort_unstable();
    entries.dedup_by(|later, earlier| later.0 == earlier.0);
    ParetoFront::from_sorted(dim, filter_sorted(dim, entries))
}

/// Drop dominated entries from a lexicographically sorted, duplicate-free list.
fn filter_sorted<P>(dim: usize, entries: Vec<(Cost, P)>) -> Vec<(Cost, P)> {
    if dim == 2 {
        let mut best = i64::MAX;
        return entries
            .into_iter()
            .filter(|(c, _)| {
                if c[1] < best {
                    best = c[1];
                    true
                } else {
                    false
                }
            })
            .collect();
    }
    if dim < 2 {
        return entries.into_iter().take(1).collect();
    }
    let keep = kung(&entries, 0, entries.len());
    let mut mask = vec![false; entries.len()];
    for i in keep {
        mask[i] = true;
    }
    entries
        .into_iter()
        .zip(mask)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

/// Kung's divide and conquer maxima filter on `entries[lo..hi]`, which is
/// lexicographically sorted with distinct costs. Returns surviving indices in order.
fn kung<P>(entries: &[(Cost, P)], lo: usize, hi: usize) -> Vec<usize> {
    if hi - lo <= 1 {
        return (lo..hi).collect();
    }
    let mid = lo + (hi - lo) / 2;
    let mut top = kung(entries, lo, mid);
    let bottom = kung(entries, mid, hi);
    let dim = entries[lo].0.len();
    // Everything in `top` is lexicographically smaller than `bottom`, so a
    // bottom point is dominated iff some top point is <= on objectives 2..d.
    if dim == 3 {
        let mut yz: Vec<(i64, i64)> = top.iter().map(|&i| (entries[i].0[1], entries[i].0[2])).collect();
        yz.sort_unstable();
        let mut prefix_min = Vec::with_capacity(yz.len());
        let mut m = i64::MAX;
        for &(_, z) in &yz {
            m = m.min(z);
            prefix_min.push(m);
        }
        for s in bottom {
            let c = &entries[s].0;
            let k = yz.partition_point(|&(y, _)| y <= c[1]);
            if k == 0 || prefix_min[k - 1] > c[2] {
                top.push(s);
            }
        }
    } else {
        let split = top.len();
        for s in bottom {
            let c = &entries[s].0;
            if !top[..split]
                .iter()
                .any(|&r| weakly_dominates(&entries[r].0[1..], &c[1..]))
            {
                top.push(s);
            }
        }
    }
    top
}

/// Pareto front of the union of two fronts.
pub fn merge_fronts<P: Ord>(a: ParetoFront<P>, b: ParetoFront<P>) -> Result<ParetoFront<P>> {
    check_dim(a.dim(), b.dim())?;
    Ok(merge_unchecked(a, b))
}

fn merge_unchecked<P: Ord>(a: ParetoFront<P>, b: ParetoFront<P>) -> ParetoFront<P> {
    let dim = a.dim();
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_entries().into_iter().peekable();
    let mut ib = b.into_entries().into_iter().peekable();
    loop {
        let take_a = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => x <= y,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let next = if take_a { ia.next() } else { ib.next() };
        let e = next.expect("peeked");
        if out.last().is_some_and(|l: &(Cost, P)| l.0 == e.0) {
            continue;
        }
        out.push(e);
    }
    ParetoFront::from_sorted(dim, filter_sorted(dim, out))
}

/// Union front of many fronts, merged pairwise in a balanced tree.
pub fn merge_many<P: Ord>(dim: usize, mut fronts: Vec<ParetoFront<P>>) -> ParetoFront<P> {
    fronts.retain(|f| !f.is_empty());
    while fronts.len() > 1 {
        let mut next = Vec::with_capacity(fronts.len().div_ceil(2));
        let mut it = fronts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge_unchecked(a, b)),
                None => next.push(a),
            }
        }
        fronts = next;
    }
    fronts.pop().unwrap_or_else(|| ParetoFront::new(dim))
}

/// Front of all sums `v1 + v2 - offset` by brute force.
pub fn product_fronts<P1, P2>(a: &ParetoFront<P1>, b: &ParetoFront<P2>, offset: &[i64]) -> Result<ParetoFront<(P1, P2)>>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), offset.len())?;
    let dim = a.dim();
    let mut acc = ParetoFront::new(dim);
    let mut buf: Vec<(Cost, (P1, P2))> = Vec::new();
    for (ca, pa) in a.iter() {
        for (cb, pb) in b.iter() {
            let c: Cost = ca.iter().zip(cb).zip(offset).map(|((x, y), o)| x + y - o).collect();
            buf.push((c, (pa.clone(), pb.clone())));
        }
        if buf.len() >= PRODUCT_CHUNK {
            let part = reduce_entries(dim, std::mem::take(&mut buf));
            acc = merge_unchecked(acc, part);
        }
    }
    let part = reduce_entries(dim, buf);
    Ok(merge_unchecked(acc, part))
}

/// Heap-driven enumeration of pair sums in lexicographic order. Output equals
/// `product_fronts`, including which payload pair represents tied costs.
pub fn heap_join<P1, P2>(a: &ParetoFront<P1>, b: &ParetoFront<P2>, offset: &[i64]) -> Result<ParetoFront<(P1, P2)>>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
{
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), offset.len())?;
    if a.dim() != 2 {
        return product_fronts(a, b, offset);
    }
    let nodes_on_left = a.len() <= b.len();
    Ok(heap_join_with(a, b, offset, nodes_on_left, |_, c| c))
}

#[derive(Clone, Copy)]
struct HeapNode {
    x: i64,
    y: i64,
    i: u32,
    j: u32,
}

/// Core of the heap join for two objectives.
///
/// One heap node per entry of the left front (`nodes_on_left`) or the right
/// front, each walking a cursor over the other front. `skip(node, cursor)`
/// returns the first admissible cursor position `>= cursor` for that node;
/// returning the other front's length retires the node.
pub(crate) fn heap_join_with<P1, P2, F>(
    a: &ParetoFront<P1>,
    b: &ParetoFront<P2>,
    offset: &[i64],
    nodes_on_left: bool,
    skip: F,
) -> ParetoFront<(P1, P2)>
where
    P1: Ord + Clone,
    P2: Ord + Clone,
    F: Fn(usize, usize) -> usize,
{
    let ea = a.entries();
    let eb = b.entries();
    let (ox, oy) = (offset[0], offset[1]);
    let ax: Vec<(i64, i64)> = ea.iter().map(|(c, _)| (c[0], c[1])).collect();
    let bx: Vec<(i64, i64)> = eb.iter().map(|(c, _)| (c[0], c[1])).collect();
    let cursor_len = if nodes_on_left { eb.len() } else { ea.len() };
    let node_len = if nodes_on_left { ea.len() } else { eb.len() };
    let make = |i: usize, j: usize| HeapNode {
        x: ax[i].0 + bx[j].0 - ox,
        y: ax[i].1 + bx[j].1 - oy,
        i: i as u32,
        j: j as u32,
    };
    let less = |p: &HeapNode, q: &HeapNode| -> bool {
        match (p.x, p.y).cmp(&(q.x, q.y)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (&ea[p.i as usize].1, &eb[p.j as usize].1) < (&ea[q.i as usize].1, &eb[q.j as usize].1),
        }
    };

    let mut heap: Vec<HeapNode> = Vec::with_capacity(node_len);
    for n in 0..node_len {
        let c = skip(n, 0);
        if c < cursor_len {
            heap.push(if nodes_on_left { make(n, c) } else { make(c, n) });
        }
    }
    // heapify
    for k in (0..heap.len() / 2).rev() {
        sift_down(&mut heap, k, &less);
    }

    let mut out: Vec<(Cost, (P1, P2))> = Vec::new();
    let mut last_y = i64::MAX;
    while let Some(&top) = heap.first() {
        if top.y < last_y {
            last_y = top.y;
            let (i, j) = (top.i as usize, top.j as usize);
            out.push((smallvec::smallvec![top.x, top.y], (ea[i].1.clone(), eb[j].1.clone())));
        }
        let (node, cur) = if nodes_on_left {
            (top.i as usize, top.j as usize)
        } else {
            (top.j as usize, top.i as usize)
        };
        let next = skip(node, cur + 1);
        if next < cursor_len {
            heap[0] = if nodes_on_left {
                make(node, next)
            } else {
                make(next, node)
            };
        } else {
            let last = heap.pop().expect("nonempty");
            if heap.is_empty() {
                break;
            }
            heap[0] = last;
        }
        sift_down(&mut heap, 0, &less);
    }
    ParetoFront::from_sorted(2, out)
}

fn sift_down<T, L: Fn(&T, &T) -> bool>(heap: &mut [T], mut k: usize, less: &L) {
    let n = heap.len();
    loop {
        let l = 2 * k + 1;
        if l >= n {
            return;
        }
        let r = l + 1;
        let m = if r < n && less(&heap[r], &heap[l]) { r } else { l };
        if less(&heap[m], &heap[k]) {
            heap.swap(m, k);
            k = m;
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::cost;

    fn front(points: &[[i64; 2]]) -> ParetoFront<u64> {
        reduce_entries(2, points.iter().enumerate().map(|(i, p)| (cost(p), i as u64)).collect())
    }

    fn costs<P>(f: &ParetoFront<P>) -> Vec<Vec<i64>> {
        f.costs().map(|c| c.to_vec()).collect()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(costs(&front(&[[1, 5], [2, 4], [2, 6]])), vec![vec![1, 5], vec![2, 4]]);
        assert!(front(&[]).is_empty());
        assert_eq!(costs(&front(&[[7, 7], [7, 7]])), vec![vec![7, 7]]);
    }

    #[test]
    fn duplicate_keeps_smallest_payload() {
        let f = reduce_entries(2, vec![(cost(&[1, 1]), 9u64), (cost(&[1, 1]), 3)]);
        assert_eq!(f.entries()[0].1, 3);
    }

    #[test]
    fn reduce_three_objectives() {
        let pts = [[1, 5, 5], [2, 4, 6], [2, 6, 4], [3, 5, 5], [1, 5, 6], [0, 9, 9]];
        let f = reduce_entries(3, pts.iter().enumerate().map(|(i, p)| (cost(p), i)).collect());
        assert_eq!(
            costs(&f),
            vec![vec![0, 9, 9], vec![1, 5, 5], vec![2, 4, 6], vec![2, 6, 4]]
        );
    }

    #[test]
    fn merge_examples() {
        let m = merge_fronts(front(&[[1, 5], [3, 2]]), front(&[[2, 4], [4, 1]])).unwrap();
        assert_eq!(costs(&m), vec![vec![1, 5], vec![2, 4], vec![3, 2], vec![4, 1]]);
        let m = merge_fronts(front(&[[1, 1]]), front(&[[2, 2]])).unwrap();
        assert_eq!(costs(&m), vec![vec![1, 1]]);
        let m = merge_fronts(front(&[]), front(&[[0, 0]])).unwrap();
        assert_eq!(costs(&m), vec![vec![0, 0]]);
    }

    #[test]
    fn product_examples() {
        let a = front(&[[1, 5], [3, 2]]);
        let b = front(&[[2, 4], [4, 1]]);
        let p = product_fronts(&a, &b, &[0, 0]).unwrap();
        assert_eq!(costs(&p), vec![vec![3, 9], vec![5, 6], vec![7, 3]]);
        assert_eq!(heap_join(&a, &b, &[0, 0]).unwrap(), p);

        let p = product_fronts(&front(&[[2, 2]]), &front(&[[3, 3]]), &[1, 1]).unwrap();
        assert_eq!(costs(&p), vec![vec![4, 4]]);

        let x = front(&[[1, 9], [4, 4], [6, 1]]);
        let id = product_fronts(&front(&[[0, 0]]), &x, &[0, 0]).unwrap();
        assert_eq!(costs(&id), costs(&x));
    }

    #[test]
    fn heap_join_edge_cases() {
        let e = front(&[]);
        let x = front(&[[1, 2]]);
        assert!(heap_join(&e, &x, &[0, 0]).unwrap().is_empty());
        let s = heap_join(&x, &front(&[[3, 4]]), &[0, 0]).unwrap();
        assert_eq!(costs(&s), vec![vec![4, 6]]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = front(&[[1, 2]]);
        let b = reduce_entries(3, vec![(cost(&[1, 2, 3]), 0u64)]);
        assert!(merge_fronts(a.clone(), b.clone()).is_err());
        assert!(product_fronts(&a, &b, &[0, 0]).is_err());
        assert!(heap_join(&a, &a, &[0, 0, 0]).is_err());
    }
}
