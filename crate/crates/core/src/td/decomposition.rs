use std::collections::VecDeque;
use std::fmt::Write as _;

use super::graph::UnionFind;
use crate::error::{Error, Result};

pub const MAX_BAG: usize = 32;

/// A tree decomposition as read from a `.td` file. Node ids are 0-based here;
/// the file uses 1-based bag ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Number of graph vertices the decomposition is over (`1..=n`).
    pub n: usize,
    /// Sorted, duplicate-free bags.
    pub bags: Vec<Vec<u32>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(n: usize, bags: Vec<Vec<u32>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { n, bags, edges }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Parse PACE `.td` text. Only syntax is checked here; see [`Self::validate`].
    pub fn parse(text: &str) -> Result<TreeDecomposition> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<u32>>> = Vec::new();
        let mut edges = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() || toks[0] == "c" || toks[0].starts_with('#') {
                continue;
            }
            let nums = |from: usize| -> Result<Vec<usize>> {
                toks[from..]
                    .iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::parse(line, format!("not an integer: {t:?}")))
                    })
                    .collect()
            };
            match toks[0] {
                "s" => {
                    if toks.get(1) != Some(&"td") || toks.len() != 5 {
                        return Err(Error::parse(line, "expected header `s td <bags> <width+1> <n>`"));
                    }
                    if header.is_some() {
                        return Err(Error::parse(line, "duplicate header"));
                    }
                    let v = nums(2)?;
                    header = Some((v[0], v[1], v[2]));
                    bags = vec![None; v[0]];
                }
                "b" => {
                    let (nb, _, n) = header.ok_or_else(|| Error::parse(line, "bag before header"))?;
                    let v = nums(1)?;
                    let id = *v.first().ok_or_else(|| Error::parse(line, "bag line without id"))?;
                    if id == 0 || id > nb {
                        return Err(Error::parse(line, format!("bag id {id} out of range 1..={nb}")));
                    }
                    if bags[id - 1].is_some() {
                        return Err(Error::parse(line, format!("bag {id} defined twice")));
                    }
                    let mut bag = Vec::with_capacity(v.len() - 1);
                    for &x in &v[1..] {
                        if x == 0 || x > n {
                            return Err(Error::parse(line, format!("vertex {x} out of range 1..={n}")));
                        }
                        bag.push(x as u32);
                    }
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    let (nb, _, _) = header.ok_or_else(|| Error::parse(line, "tree edge before header"))?;
                    let v = nums(0)?;
                    if v.len() != 2 {
                        return Err(Error::parse(line, "expected tree edge `<i> <j>`"));
                    }
                    for &x in &v {
                        if x == 0 || x > nb {
                            return Err(Error::parse(line, format!("bag id {x} out of range 1..={nb}")));
                        }
                    }
                    edges.push((v[0] - 1, v[1] - 1));
                }
            }
        }
        let (_, declared_w, n) = header.ok_or_else(|| Error::parse(0, "missing `s td` header"))?;
        let bags: Vec<Vec<u32>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::parse(0, format!("bag {} missing", i + 1))))
            .collect::<Result<_>>()?;
        let td = TreeDecomposition::new(n, bags, edges);
        let max_bag = td.bags.iter().map(Vec::len).max().unwrap_or(0);
        if max_bag > declared_w {
            return Err(Error::parse(
                0,
                format!("bag of size {max_bag} exceeds declared maximum {declared_w}"),
            ));
        }
        Ok(td)
    }

    pub fn to_text(&self) -> String {
        let max_bag = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("s td {} {} {}\n", self.bags.len(), max_bag, self.n);
        for (i, b) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", i + 1);
            for v in b {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    /// Check the decomposition conditions against vertices `1..=n` and the given
    /// graph edges (edges touching vertices outside `1..=n` must be filtered out
    /// by the caller).
    pub fn validate(&self, n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDecomposition(m));
        if self.n != n {
            return bad(format!("decomposition is over {} vertices, graph has {n}", self.n));
        }
        let k = self.bags.len();
        if let Some(b) = self.bags.iter().find(|b| b.len() > MAX_BAG) {
            return Err(Error::BagTooLarge(b.len()));
        }
        // tree shape
        if k == 0 {
            if n > 0 {
                return bad("no bags, vertex 1 is not covered".into());
            }
            return Ok(());
        }
        if self.edges.len() != k - 1 {
            return bad(format!(
                "{} tree edges for {k} bags, expected {}",
                self.edges.len(),
                k - 1
            ));
        }
        let mut uf = UnionFind::new(k);
        for &(a, b) in &self.edges {
            if !uf.union(a, b) {
                return bad(format!(
                    "tree edges contain a cycle through bags {} and {}",
                    a + 1,
                    b + 1
                ));
            }
        }
        // coverage and vertex subtrees
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, b) in self.bags.iter().enumerate() {
            for &v in b {
                if v == 0 || v as usize > n {
                    return bad(format!("bag {} holds vertex {v} outside 1..={n}", i + 1));
                }
                holders[v as usize].push(i);
            }
        }
        for (v, h) in holders.iter().enumerate().skip(1) {
            if h.is_empty() {
                return bad(format!("vertex {v} is not covered by any bag"));
            }
        }
        let adj = self.adjacency();
        let mut seen = vec![usize::MAX; k];
        for v in 1..=n {
            let mut count = 0;
            let mut queue = VecDeque::from([holders[v][0]]);
            seen[holders[v][0]] = v;
            while let Some(x) = queue.pop_front() {
                count += 1;
                for &y in &adj[x] {
                    if seen[y] != v && self.bags[y].binary_search(&(v as u32)).is_ok() {
                        seen[y] = v;
                        queue.push_back(y);
                    }
                }
            }
            if count != holders[v].len() {
                return bad(format!("bags holding vertex {v} do not form a connected subtree"));
            }
        }
        for (u, v) in edges {
            if u == v {
                continue;
            }
            let covered = holders[u as usize]
                .iter()
                .any(|&i| self.bags[i].binary_search(&v).is_ok());
            if !covered {
                return bad(format!("edge {{{u},{v}}} is not contained in any bag"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bag() {
        let td = TreeDecomposition::parse("s td 1 2 2\nb 1 1 2\n").unwrap();
        assert_eq!(td.width(), 1);
        td.validate(2, [(1, 2)]).unwrap();
        assert_eq!(TreeDecomposition::parse(&td.to_text()).unwrap(), td);
    }

    #[test]
    fn coverage_error() {
        let td = TreeDecomposition::parse("s td 1 2 3\nb 1 1 2\n").unwrap();
        let err = td.validate(3, [(1, 2)]).unwrap_err().to_string();
        assert!(err.contains("vertex 3 is not covered"), "{err}");
    }

    #[test]
    fn subtree_error() {
        let td = TreeDecomposition::parse("s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 1 3\n1 2\n2 3\n").unwrap();
        let err = td.validate(3, [(1, 2), (2, 3)]).unwrap_err().to_string();
        assert!(err.contains("connected subtree"), "{err}");
    }

    #[test]
    fn edge_error() {
        let td = TreeDecomposition::parse("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        let err = td.validate(3, [(1, 3)]).unwrap_err().to_string();
        assert!(err.contains("edge {1,3}"), "{err}");
    }

    #[test]
    fn malformed() {
        assert!(TreeDecomposition::parse("b 1 1\n").is_err());
        assert!(TreeDecomposition::parse("s td 1 1 1\nb 2 1\n").is_err());
        assert!(TreeDecomposition::parse("s td 1 1 1\nb 1 x\n").is_err());
        assert!(TreeDecomposition::parse("s td 1 1 2\nb 1 1 2\n").is_err());
    }
}
