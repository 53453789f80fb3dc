//! Cost vectors, dominance and Pareto fronts.

mod front;
mod ops;

pub use front::{parse_front_text, ParetoFront};
pub(crate) use ops::heap_join_with;
pub use ops::{heap_join, merge_fronts, merge_many, product_fronts, reduce_entries, reduce_front};

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A cost vector in tenths. Ordered lexicographically.
pub type Cost = SmallVec<[i64; 4]>;

/// Index into the provenance log.
pub type SolutionId = u64;

/// Id of the empty solution; it never occupies a record.
pub const EMPTY: SolutionId = (1 << 62) - 1;

pub fn zero(dim: usize) -> Cost {
    SmallVec::from_elem(0, dim)
}

pub fn cost(values: &[i64]) -> Cost {
    SmallVec::from_slice(values)
}

pub fn add(a: &[i64], b: &[i64]) -> Cost {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Cost {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_assign(a: &mut [i64], b: &[i64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub fn sub_assign(a: &mut [i64], b: &[i64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x -= y;
    }
}

/// `a` dominates `b` under minimization.
pub fn dominates(a: &[i64], b: &[i64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub fn dominates_unchecked(a: &[i64], b: &[i64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    strict
}

/// Componentwise `a <= b`.
#[inline]
pub fn weakly_dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
