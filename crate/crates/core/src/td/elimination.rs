//! Greedy min-degree elimination, used to produce decompositions for tests,
//! generators and benchmarks.

use std::collections::BTreeSet;

use super::decomposition::TreeDecomposition;

/// Tree decomposition of the graph on `1..=n` with the given edges, built by
/// eliminating a minimum-degree vertex at each step (ties by smallest id).
pub fn min_degree_decomposition(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> TreeDecomposition {
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n + 1];
    for (u, v) in edges {
        if u != v && u >= 1 && v >= 1 && (u as usize) <= n && (v as usize) <= n {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
    }
    let mut eliminated = vec![false; n + 1];
    let mut order_pos = vec![usize::MAX; n + 1];
    let mut bags: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut heap: BTreeSet<(usize, u32)> = (1..=n).map(|v| (adj[v].len(), v as u32)).collect();
    while let Some((_, v)) = heap.pop_first() {
        let vi = v as usize;
        eliminated[vi] = true;
        order_pos[vi] = bags.len();
        let nbrs: Vec<u32> = adj[vi].iter().copied().collect();
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        for &a in &nbrs {
            heap.remove(&(adj[a as usize].len(), a));
        }
        for &a in &nbrs {
            adj[a as usize].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a as usize].insert(b);
                }
            }
        }
        for &a in &nbrs {
            heap.insert((adj[a as usize].len(), a));
        }
    }
    // bag i attaches to the bag of its earliest-eliminated later neighbour
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let next = bag.iter().map(|&u| order_pos[u as usize]).filter(|&p| p > i).min();
        match next {
            Some(p) => tree_edges.push((i, p)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(n, bags, tree_edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_has_width_two() {
        let edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)];
        let td = min_degree_decomposition(5, edges);
        assert_eq!(td.width(), 2);
        td.validate(5, edges).unwrap();
    }

    #[test]
    fn disconnected_graph_still_a_tree() {
        let edges = [(1, 2), (3, 4)];
        let td = min_degree_decomposition(5, edges);
        td.validate(5, edges).unwrap();
    }

    #[test]
    fn empty() {
        let td = min_degree_decomposition(0, []);
        assert!(td.is_empty());
        td.validate(0, []).unwrap();
    }
}
