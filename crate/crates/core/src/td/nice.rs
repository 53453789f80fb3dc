use std::collections::BTreeSet;

use super::decomposition::{TreeDecomposition, MAX_BAG};
use crate::error::{Error, Result};

/// Node count of a nice decomposition stays below `NODE_BOUND_C * n * max(w, 1)`.
pub const NODE_BOUND_C: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(u32),
    Forget(u32),
    Join,
    /// Graph edge `edge` with endpoints `u < v`, both in the bag.
    IntroduceEdge {
        edge: usize,
        u: u32,
        v: u32,
    },
    /// Join over `join_bag` followed by forgetting `forget`.
    JoinForget {
        join_bag: Vec<u32>,
        forget: Vec<u32>,
    },
    /// A join-forget whose children skip the introduce chains `skipped[0]` and
    /// `skipped[1]`; child `i` has bag `join_bag \ skipped[i]`.
    IntroduceJoinForget {
        join_bag: Vec<u32>,
        forget: Vec<u32>,
        skipped: [Vec<u32>; 2],
    },
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Introduce(_) => "introduce",
            NodeKind::Forget(_) => "forget",
            NodeKind::Join => "join",
            NodeKind::IntroduceEdge { .. } => "introduce_edge",
            NodeKind::JoinForget { .. } => "join_forget",
            NodeKind::IntroduceJoinForget { .. } => "introduce_join_forget",
        }
    }

    pub fn is_join_family(&self) -> bool {
        matches!(
            self,
            NodeKind::Join | NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted bag. For fused nodes this is the bag after the forgets.
    pub bag: Vec<u32>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A rooted nice tree decomposition with nodes stored in postorder; the root is last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTd {
    pub nodes: Vec<NiceNode>,
    pub n: usize,
    pub width: usize,
    pub edge_count: Option<usize>,
}

impl NiceTd {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_fused(&self) -> bool {
        self.nodes.iter().any(|x| {
            matches!(
                x.kind,
                NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. }
            )
        })
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|x| pred(&x.kind)).count()
    }

    /// The bag a join-family node works on before forgetting.
    pub fn join_bag(&self, t: usize) -> &[u32] {
        match &self.nodes[t].kind {
            NodeKind::JoinForget { join_bag, .. } | NodeKind::IntroduceJoinForget { join_bag, .. } => join_bag,
            _ => &self.nodes[t].bag,
        }
    }

    /// Number of vertices forgotten strictly inside the subtree of each node,
    /// including those forgotten by the node itself.
    pub fn forgotten_below(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            let own = match &node.kind {
                NodeKind::Forget(_) => 1,
                NodeKind::JoinForget { forget, .. } | NodeKind::IntroduceJoinForget { forget, .. } => forget.len(),
                _ => 0,
            };
            out[t] = own + node.children.iter().map(|&c| out[c]).sum::<usize>();
        }
        out
    }

    /// Structural check of every node against its children.
    pub fn validate(&self) -> Result<()> {
        let bad = |t: usize, m: String| Err(Error::InvalidDecomposition(format!("nice node {t}: {m}")));
        if self.nodes.is_empty() {
            return Err(Error::InvalidDecomposition("empty nice decomposition".into()));
        }
        let root = self.root();
        if !self.nodes[root].bag.is_empty() {
            return bad(root, "root bag is not empty".into());
        }
        if self.nodes[root].parent.is_some() {
            return bad(root, "root has a parent".into());
        }
        let mut forgotten = vec![0u32; self.n + 1];
        let mut edge_seen = vec![0u32; self.edge_count.unwrap_or(0)];
        let mut width = 0;
        for (t, node) in self.nodes.iter().enumerate() {
            if node.bag.len() > MAX_BAG {
                return Err(Error::BagTooLarge(node.bag.len()));
            }
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return bad(t, "bag not sorted".into());
            }
            width = width.max(node.bag.len());
            for &c in &node.children {
                if c >= t {
                    return bad(t, "children must precede their parent".into());
                }
                if self.nodes[c].parent != Some(t) {
                    return bad(t, format!("child {c} has wrong parent link"));
                }
            }
            if t != root && node.parent.is_none() {
                return bad(t, "non-root node without parent".into());
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            let arity = match &node.kind {
                NodeKind::Leaf => 0,
                NodeKind::Join | NodeKind::JoinForget { .. } | NodeKind::IntroduceJoinForget { .. } => 2,
                _ => 1,
            };
            if node.children.len() != arity {
                return bad(
                    t,
                    format!("{} node with {} children", node.kind.name(), node.children.len()),
                );
            }
            match &node.kind {
                NodeKind::Leaf => {
                    if !node.bag.is_empty() {
                        return bad(t, "leaf bag is not empty".into());
                    }
                }
                NodeKind::Introduce(v) => {
                    if child_bag(0).contains(v) || with(child_bag(0), *v) != node.bag {
                        return bad(t, format!("introduce {v} does not match child bag"));
                    }
                }
                NodeKind::Forget(v) => {
                    if !child_bag(0).contains(v) || without(child_bag(0), &[*v]) != node.bag {
                        return bad(t, format!("forget {v} does not match child bag"));
                    }
                    forgotten[*v as usize] += 1;
                }
                NodeKind::Join => {
                    if child_bag(0) != &node.bag || child_bag(1) != &node.bag {
                        return bad(t, "join children bags differ".into());
                    }
                }
                NodeKind::IntroduceEdge { edge, u, v } => {
                    if child_bag(0) != &node.bag || !node.bag.contains(u) || !node.bag.contains(v) {
                        return bad(t, format!("introduce edge {{{u},{v}}} outside bag"));
                    }
                    match edge_seen.get_mut(*edge) {
                        Some(c) => *c += 1,
                        None => return bad(t, format!("edge index {edge} out of range")),
                    }
                }
                NodeKind::JoinForget { join_bag, forget } => {
                    if forget.is_empty() || !is_subset(forget, join_bag) {
                        return bad(t, "join-forget set not inside join bag".into());
                    }
                    if child_bag(0) != join_bag || child_bag(1) != join_bag {
                        return bad(t, "join-forget children bags differ".into());
                    }
                    if without(join_bag, forget) != node.bag {
                        return bad(t, "join-forget output bag mismatch".into());
                    }
                    width = width.max(join_bag.len());
                    for &v in forget {
                        forgotten[v as usize] += 1;
                    }
                }
                NodeKind::IntroduceJoinForget {
                    join_bag,
                    forget,
                    skipped,
                } => {
                    if forget.is_empty() || !is_subset(forget, join_bag) {
                        return bad(t, "join-forget set not inside join bag".into());
                    }
                    for (i, s) in skipped.iter().enumerate() {
                        if !is_subset(s, join_bag) || without(join_bag, s) != *child_bag(i) {
                            return bad(t, format!("skipped set of side {i} does not match child bag"));
                        }
                    }
                    if skipped.iter().all(Vec::is_empty) {
                        return bad(t, "introduce-join-forget without skipped vertices".into());
                    }
                    if without(join_bag, forget) != node.bag {
                        return bad(t, "join-forget output bag mismatch".into());
                    }
                    width = width.max(join_bag.len());
                    for &v in forget {
                        forgotten[v as usize] += 1;
                    }
                }
            }
        }
        if let Some(v) = (1..=self.n).find(|&v| forgotten[v] != 1) {
            return Err(Error::InvalidDecomposition(format!(
                "vertex {v} forgotten {} times",
                forgotten[v]
            )));
        }
        if let Some(e) = edge_seen.iter().position(|&c| c != 1) {
            return Err(Error::InvalidDecomposition(format!(
                "edge {e} introduced {} times",
                edge_seen[e]
            )));
        }
        if width.saturating_sub(1) > self.width {
            return Err(Error::InvalidDecomposition("width grew".into()));
        }
        Ok(())
    }

    /// No join-family node has both endpoints of an edge introduced below it in its bag.
    pub fn joins_free_of_introduced_edges(&self, edges: &[(u32, u32)]) -> bool {
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for t in 0..self.nodes.len() {
            let mut acc: Vec<usize> = Vec::new();
            for &c in &self.nodes[t].children {
                acc.extend_from_slice(&below[c]);
                below[c] = Vec::new();
            }
            if let NodeKind::IntroduceEdge { edge, .. } = self.nodes[t].kind {
                acc.push(edge);
            }
            if self.nodes[t].kind.is_join_family() {
                let bag = self.join_bag(t);
                if acc.iter().any(|&e| {
                    let (u, v) = edges[e];
                    bag.contains(&u) && bag.contains(&v)
                }) {
                    return false;
                }
            }
            below[t] = acc;
        }
        true
    }
}

pub(crate) fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

pub(crate) fn with(bag: &[u32], v: u32) -> Vec<u32> {
    let mut b = bag.to_vec();
    if let Err(p) = b.binary_search(&v) {
        b.insert(p, v);
    }
    b
}

pub(crate) fn without(bag: &[u32], remove: &[u32]) -> Vec<u32> {
    bag.iter().copied().filter(|x| !remove.contains(x)).collect()
}

struct Arena {
    nodes: Vec<(NodeKind, Vec<u32>, Vec<usize>)>,
}

impl Arena {
    fn push(&mut self, kind: NodeKind, bag: Vec<u32>, children: Vec<usize>) -> usize {
        self.nodes.push((kind, bag, children));
        self.nodes.len() - 1
    }

    /// Forget `from \ to`, then introduce `to \ from`, in ascending vertex order.
    fn chain(&mut self, mut cur: usize, from: &[u32], to: &[u32]) -> usize {
        let mut bag = from.to_vec();
        for &v in from {
            if to.binary_search(&v).is_err() {
                bag.retain(|&x| x != v);
                cur = self.push(NodeKind::Forget(v), bag.clone(), vec![cur]);
            }
        }
        for &v in to {
            if from.binary_search(&v).is_err() {
                bag = with(&bag, v);
                cur = self.push(NodeKind::Introduce(v), bag.clone(), vec![cur]);
            }
        }
        cur
    }

    /// Postorder renumbering from `root`.
    fn finish(self, root: usize, n: usize, width: usize, edge_count: Option<usize>) -> NiceTd {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(root, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                order.push(x);
                continue;
            }
            stack.push((x, true));
            for &c in self.nodes[x].2.iter().rev() {
                stack.push((c, false));
            }
        }
        let mut index = vec![usize::MAX; self.nodes.len()];
        for (i, &x) in order.iter().enumerate() {
            index[x] = i;
        }
        let mut slots: Vec<Option<_>> = self.nodes.into_iter().map(Some).collect();
        let mut nodes: Vec<NiceNode> = order
            .iter()
            .map(|&x| {
                let (kind, bag, children) = slots[x].take().expect("node visited once");
                NiceNode {
                    kind,
                    bag,
                    children: children.iter().map(|&c| index[c]).collect(),
                    parent: None,
                }
            })
            .collect();
        for t in 0..nodes.len() {
            for c in nodes[t].children.clone() {
                nodes[c].parent = Some(t);
            }
        }
        NiceTd {
            nodes,
            n,
            width,
            edge_count,
        }
    }
}

/// Contract tree edges whose bags are nested. Returns surviving bags, tree
/// adjacency over survivors (by original id) and the node that absorbed `root`.
fn compress(td: &TreeDecomposition, mut root: usize) -> (Vec<bool>, Vec<BTreeSet<usize>>, usize) {
    let k = td.bags.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for &(a, b) in &td.edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive = vec![true; k];
    let mut stack: Vec<usize> = (0..k).rev().collect();
    while let Some(a) = stack.pop() {
        if !alive[a] {
            continue;
        }
        let target = adj[a].iter().copied().find(|&b| is_subset(&td.bags[a], &td.bags[b]));
        if let Some(b) = target {
            let others: Vec<usize> = adj[a].iter().copied().filter(|&c| c != b).collect();
            adj[b].remove(&a);
            for c in others {
                adj[c].remove(&a);
                adj[c].insert(b);
                adj[b].insert(c);
                stack.push(c);
            }
            adj[a].clear();
            alive[a] = false;
            if root == a {
                root = b;
            }
            stack.push(b);
        }
    }
    (alive, adj, root)
}

/// Build a nice tree decomposition rooted at `root` (0-based bag id).
///
/// With `edges`, one introduce-edge node per listed edge is inserted directly
/// below the forget node of whichever endpoint is forgotten first; its index in
/// the slice is the edge id.
pub fn make_nice(td: &TreeDecomposition, root: usize, edges: Option<&[(u32, u32)]>) -> Result<NiceTd> {
    let n = td.n;
    let width = td.width();
    let mut arena = Arena { nodes: Vec::new() };
    if td.bags.is_empty() {
        if n > 0 {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        let leaf = arena.push(NodeKind::Leaf, Vec::new(), Vec::new());
        return Ok(arena.finish(leaf, n, width, edges.map(|e| e.len())));
    }
    if root >= td.bags.len() {
        return Err(Error::InvalidDecomposition(format!(
            "root bag {} does not exist",
            root + 1
        )));
    }
    if let Some(b) = td.bags.iter().find(|b| b.len() > MAX_BAG) {
        return Err(Error::BagTooLarge(b.len()));
    }
    let (alive, adj, root) = compress(td, root);

    // root the compressed tree
    let k = td.bags.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut pre = Vec::new();
    let mut seen = vec![false; k];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(x) = stack.pop() {
        pre.push(x);
        for &y in adj[x].iter().rev() {
            if !seen[y] {
                seen[y] = true;
                children[x].push(y);
                stack.push(y);
            }
        }
        children[x].sort_unstable();
    }
    if let Some(x) = (0..k).find(|&x| alive[x] && !seen[x]) {
        return Err(Error::InvalidDecomposition(format!(
            "bag {} is not connected to the root",
            x + 1
        )));
    }

    let mut top = vec![usize::MAX; k];
    for &x in pre.iter().rev() {
        let bag = &td.bags[x];
        let mut cur: Option<usize> = None;
        for &c in &children[x] {
            let t = arena.chain(top[c], &td.bags[c], bag);
            cur = Some(match cur {
                None => t,
                Some(prev) => arena.push(NodeKind::Join, bag.clone(), vec![prev, t]),
            });
        }
        top[x] = match cur {
            Some(t) => t,
            None => {
                let leaf = arena.push(NodeKind::Leaf, Vec::new(), Vec::new());
                arena.chain(leaf, &[], bag)
            }
        };
    }
    let root_node = arena.chain(top[root], &td.bags[root], &[]);

    let mut out = arena.finish(root_node, n, width, None);
    if let Some(edges) = edges {
        out = insert_edge_nodes(out, edges)?;
    }
    Ok(out)
}

fn insert_edge_nodes(ntd: NiceTd, edges: &[(u32, u32)]) -> Result<NiceTd> {
    let n = ntd.n;
    let mut forget_at = vec![usize::MAX; n + 1];
    for (t, node) in ntd.nodes.iter().enumerate() {
        if let NodeKind::Forget(v) = node.kind {
            forget_at[v as usize] = t;
        }
    }
    let mut arena = Arena {
        nodes: ntd
            .nodes
            .iter()
            .map(|x| (x.kind.clone(), x.bag.clone(), x.children.clone()))
            .collect(),
    };
    for (i, &(a, b)) in edges.iter().enumerate() {
        let (u, v) = (a.min(b), a.max(b));
        if u == 0 || v as usize > n || u == v {
            return Err(Error::InvalidInstance(format!(
                "edge {{{a},{b}}} has an invalid endpoint"
            )));
        }
        // postorder index: the lower forget node has the smaller index
        let f = forget_at[u as usize].min(forget_at[v as usize]);
        let child = arena.nodes[f].2[0];
        let bag = arena.nodes[child].1.clone();
        if bag.binary_search(&u).is_err() || bag.binary_search(&v).is_err() {
            return Err(Error::InvalidDecomposition(format!(
                "edge {{{u},{v}}} is not contained in any bag"
            )));
        }
        let e = arena.push(NodeKind::IntroduceEdge { edge: i, u, v }, bag, vec![child]);
        arena.nodes[f].2[0] = e;
    }
    let root = ntd.nodes.len() - 1;
    Ok(arena.finish(root, n, ntd.width, Some(edges.len())))
}

/// Fuse joins with the forget chains above them, then absorb introduce chains
/// below those fused joins. Expects a decomposition without edge nodes.
pub fn fuse_nodes(ntd: &NiceTd) -> NiceTd {
    let len = ntd.nodes.len();
    let mut absorbed = vec![false; len];
    // top forget of a chain -> (join node, forgotten vertices)
    let mut fused_at: Vec<Option<(usize, Vec<u32>)>> = vec![None; len];
    for (j, node) in ntd.nodes.iter().enumerate() {
        if node.kind != NodeKind::Join {
            continue;
        }
        let mut forget = Vec::new();
        let mut cur = j;
        while let Some(p) = ntd.nodes[cur].parent {
            match ntd.nodes[p].kind {
                NodeKind::Forget(v) => {
                    forget.push(v);
                    cur = p;
                }
                _ => break,
            }
        }
        if cur == j {
            continue;
        }
        let mut x = j;
        while x != cur {
            absorbed[x] = true;
            x = ntd.nodes[x].parent.expect("chain");
        }
        forget.sort_unstable();
        fused_at[cur] = Some((j, forget));
    }

    let mut arena = Arena { nodes: Vec::new() };
    let mut map = vec![usize::MAX; len];
    for t in 0..len {
        if absorbed[t] {
            continue;
        }
        let node = &ntd.nodes[t];
        if let Some((j, forget)) = &fused_at[t] {
            let join_bag = ntd.nodes[*j].bag.clone();
            let mut kids = Vec::with_capacity(2);
            let mut skipped: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
            for (side, &c) in ntd.nodes[*j].children.iter().enumerate() {
                let mut x = c;
                while let NodeKind::Introduce(v) = ntd.nodes[x].kind {
                    skipped[side].push(v);
                    x = ntd.nodes[x].children[0];
                }
                skipped[side].sort_unstable();
                kids.push(x);
            }
            let kind = if skipped.iter().all(Vec::is_empty) {
                NodeKind::JoinForget {
                    join_bag,
                    forget: forget.clone(),
                }
            } else {
                NodeKind::IntroduceJoinForget {
                    join_bag,
                    forget: forget.clone(),
                    skipped,
                }
            };
            map[t] = arena.push(kind, node.bag.clone(), kids.iter().map(|&c| map[c]).collect());
        } else {
            map[t] = arena.push(
                node.kind.clone(),
                node.bag.clone(),
                node.children.iter().map(|&c| map[c]).collect(),
            );
        }
    }
    let root = map[len - 1];
    arena.finish(root, ntd.n, ntd.width, ntd.edge_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(text: &str) -> TreeDecomposition {
        TreeDecomposition::parse(text).unwrap()
    }

    fn kinds(ntd: &NiceTd) -> Vec<String> {
        ntd.nodes.iter().map(|x| format!("{:?}", x.kind)).collect()
    }

    #[test]
    fn single_vertex_chain() {
        let ntd = make_nice(&td("s td 1 1 1\nb 1 1\n"), 0, Some(&[])).unwrap();
        ntd.validate().unwrap();
        assert_eq!(kinds(&ntd), vec!["Leaf", "Introduce(1)", "Forget(1)"]);
    }

    #[test]
    fn empty_graph() {
        let ntd = make_nice(&td("s td 0 0 0\n"), 0, None).unwrap();
        ntd.validate().unwrap();
        assert_eq!(ntd.len(), 1);
    }

    #[test]
    fn triangle_edge_nodes() {
        let t = td("s td 1 3 3\nb 1 1 2 3\n");
        let edges = [(1, 2), (2, 3), (1, 3)];
        let ntd = make_nice(&t, 0, Some(&edges)).unwrap();
        ntd.validate().unwrap();
        assert_eq!(ntd.count(|k| matches!(k, NodeKind::IntroduceEdge { .. })), 3);
        assert!(ntd.joins_free_of_introduced_edges(&edges));
    }

    #[test]
    fn nested_bags_are_compressed() {
        let t = td("s td 4 2 2\nb 1 1 2\nb 2 1\nb 3 1 2\nb 4 2\n1 2\n2 3\n3 4\n");
        let ntd = make_nice(&t, 1, None).unwrap();
        ntd.validate().unwrap();
        assert_eq!(ntd.count(|k| *k == NodeKind::Join), 0);
        assert_eq!(ntd.len(), 5);
    }

    #[test]
    fn join_forget_fusion() {
        // join at {1,2,3}, then forget 2 and 3, then introduce 6 towards the root {1,6}
        let t = td("s td 4 3 6\nb 1 1 2 3\nb 2 1 2 4\nb 3 1 3 5\nb 4 1 6\n1 2\n1 3\n1 4\n");
        let ntd = make_nice(&t, 3, None).unwrap();
        ntd.validate().unwrap();
        let fused = fuse_nodes(&ntd);
        fused.validate().unwrap();
        let jf: Vec<_> = fused.nodes.iter().filter(|x| x.kind.is_join_family()).collect();
        assert_eq!(jf.len(), 1);
        match &jf[0].kind {
            NodeKind::JoinForget { forget, .. } | NodeKind::IntroduceJoinForget { forget, .. } => {
                assert_eq!(forget, &vec![2, 3])
            }
            other => panic!("unexpected {other:?}"),
        }
        let parent = jf[0].parent.unwrap();
        assert_eq!(fused.nodes[parent].kind, NodeKind::Introduce(6));
    }

    #[test]
    fn introduce_chains_absorbed() {
        let t = td("s td 3 3 5\nb 1 1 2 3\nb 2 1 4\nb 3 1 5\n1 2\n1 3\n");
        let ntd = make_nice(&t, 0, None).unwrap();
        ntd.validate().unwrap();
        let fused = fuse_nodes(&ntd);
        fused.validate().unwrap();
        assert_eq!(fused.count(|k| matches!(k, NodeKind::IntroduceJoinForget { .. })), 1);
        assert_eq!(fused.count(|k| *k == NodeKind::Join), 0);
    }

    #[test]
    fn join_below_join_untouched() {
        let t = td("s td 4 2 1\nb 1 1\nb 2 1\nb 3 1\nb 4 1\n1 2\n1 3\n1 4\n");
        // all bags equal, compression leaves one node; no joins
        let ntd = make_nice(&t, 0, None).unwrap();
        assert_eq!(ntd.count(|k| *k == NodeKind::Join), 0);
        let t = td("s td 4 4 7\nb 1 1 5\nb 2 2 6\nb 3 3 7\nb 4 1 2 3 4\n4 1\n4 2\n4 3\n");
        let ntd = make_nice(&t, 3, None).unwrap();
        // two stacked joins at bag {1,2,3,4}; only the upper one sits under forgets
        assert_eq!(ntd.count(|k| *k == NodeKind::Join), 2);
        let fused = fuse_nodes(&ntd);
        fused.validate().unwrap();
        assert_eq!(fused.count(|k| *k == NodeKind::Join), 1);
        assert_eq!(fused.count(|k| k.is_join_family()), 2);
    }
}
