use std::fmt::Write as _;

use super::{add_assign, dominates_unchecked, Cost, SolutionId};
use crate::error::{Error, Result};
use crate::fixed;

/// Mutually nondominated cost vectors in lexicographic order, each with a payload.
///
/// For two objectives lexicographic order is the usual staircase: objective 1
/// strictly increasing, objective 2 strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoFront<P = SolutionId> {
    dim: usize,
    entries: Vec<(Cost, P)>,
}

impl<P> ParetoFront<P> {
    pub fn new(dim: usize) -> Self {
        ParetoFront {
            dim,
            entries: Vec::new(),
        }
    }

    /// Wrap entries that are already a valid front. Checked in debug builds.
    pub fn from_sorted(dim: usize, entries: Vec<(Cost, P)>) -> Self {
        let f = ParetoFront { dim, entries };
        debug_assert!(f.validate().is_ok(), "{:?}", f.validate());
        f
    }

    pub fn singleton(cost: Cost, payload: P) -> Self {
        ParetoFront {
            dim: cost.len(),
            entries: vec![(cost, payload)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Cost, P)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(Cost, P)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Cost, P)> {
        self.entries.iter()
    }

    pub fn costs(&self) -> impl Iterator<Item = &Cost> {
        self.entries.iter().map(|e| &e.0)
    }

    pub fn payloads(&self) -> impl Iterator<Item = &P> {
        self.entries.iter().map(|e| &e.1)
    }

    /// Add a constant to every entry. Order and nondominance are unaffected.
    pub fn shift(&mut self, delta: &[i64]) {
        if delta.iter().all(|&x| x == 0) {
            return;
        }
        for (c, _) in &mut self.entries {
            add_assign(c, delta);
        }
    }

    pub fn map_payload<Q>(self, mut f: impl FnMut(P) -> Q) -> ParetoFront<Q> {
        ParetoFront {
            dim: self.dim,
            entries: self.entries.into_iter().map(|(c, p)| (c, f(p))).collect(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        for (i, (c, _)) in self.entries.iter().enumerate() {
            if c.len() != self.dim {
                return Err(format!("entry {i} has dimension {}, expected {}", c.len(), self.dim));
            }
        }
        for w in self.entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(format!("entries {:?} and {:?} out of order", w[0].0, w[1].0));
            }
        }
        if self.dim == 2 {
            for w in self.entries.windows(2) {
                if w[0].0[1] <= w[1].0[1] {
                    return Err(format!("{:?} dominates {:?}", w[0].0, w[1].0));
                }
            }
        } else {
            for (i, a) in self.entries.iter().enumerate() {
                for b in &self.entries[i + 1..] {
                    if dominates_unchecked(&a.0, &b.0) {
                        return Err(format!("{:?} dominates {:?}", a.0, b.0));
                    }
                }
            }
        }
        Ok(())
    }

    /// One line per entry, one decimal per objective.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, _) in &self.entries {
            for (k, v) in c.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&fixed::format(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.dim).map(|k| format!("f{k}")).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for (c, _) in &self.entries {
            let row: Vec<String> = c.iter().map(|v| fixed::format(*v)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Parse the front text format. Blank lines and `#` comments are skipped.
/// Returns the cost vectors in file order.
pub fn parse_front_text(text: &str) -> Result<Vec<Cost>> {
    let mut out: Vec<Cost> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let c: Cost = line
            .split_whitespace()
            .map(|t| fixed::parse_at(t, no + 1))
            .collect::<Result<_>>()?;
        if let Some(first) = out.first() {
            if first.len() != c.len() {
                return Err(Error::parse(
                    no + 1,
                    format!("expected {} values, found {}", first.len(), c.len()),
                ));
            }
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::cost;

    #[test]
    fn text_round_trip() {
        let f = ParetoFront::from_sorted(2, vec![(cost(&[10, 55]), 0u64), (cost(&[25, -3]), 1)]);
        let text = f.to_text();
        assert_eq!(text, "1.0 5.5\n2.5 -0.3\n");
        let back = parse_front_text(&format!("# offset 0 0\n{text}")).unwrap();
        assert_eq!(back, vec![cost(&[10, 55]), cost(&[25, -3])]);
    }

    #[test]
    fn validator_rejects_dominated() {
        let f: ParetoFront = ParetoFront {
            dim: 2,
            entries: vec![(cost(&[1, 1]), 0), (cost(&[2, 2]), 1)],
        };
        assert!(f.validate().is_err());
        let g: ParetoFront = ParetoFront {
            dim: 3,
            entries: vec![(cost(&[1, 1, 1]), 0), (cost(&[1, 2, 1]), 1)],
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn shift_keeps_order() {
        let mut f = ParetoFront::from_sorted(2, vec![(cost(&[1, 1]), 7u64)]);
        f.shift(&[2, -1]);
        assert_eq!(f.entries()[0].0, cost(&[3, 0]));
    }
}
