//! 16-byte provenance records.
//!
//! Word A (bytes 0..8, little-endian): bits 63..62 tag, bit 61 mark, bits 60..0 id.
//! The id field cannot hold `EMPTY` directly, so all ones (`2^61 - 1`) stands for it.
//! Word B (bytes 8..16, little-endian) depends on the tag:
//!
//! | tag | name      | A id        | B                                           |
//! |-----|-----------|-------------|---------------------------------------------|
//! | 00  | INTRODUCE | base        | element id                                  |
//! | 01  | JOIN      | left        | right id (`EMPTY` stored as is)             |
//! | 10  | SKIPPED   | base        | low 32 bits node id, high 32 bits bag mask  |
//! | 11  | RELOCATED | new id      | unused, zero                                |

use crate::error::{Error, Result};
use crate::pareto::{SolutionId, EMPTY};

pub const RECORD_SIZE: usize = 16;

const TAG_SHIFT: u32 = 62;
const MARK_BIT: u64 = 1 << 61;
const ID_MASK: u64 = (1 << 61) - 1;

/// Largest id a record can reference in word A.
pub const MAX_ID: SolutionId = ID_MASK - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Record {
    Introduce { base: SolutionId, element: u64 },
    Join { left: SolutionId, right: SolutionId },
    Skipped { base: SolutionId, node: u32, mask: u32 },
    Relocated { to: SolutionId },
}

fn pack_id(id: SolutionId) -> u64 {
    if id == EMPTY {
        ID_MASK
    } else {
        debug_assert!(id <= MAX_ID);
        id
    }
}

fn unpack_id(field: u64) -> SolutionId {
    if field == ID_MASK {
        EMPTY
    } else {
        field
    }
}

impl Record {
    pub fn encode(&self, mark: bool) -> [u8; RECORD_SIZE] {
        let (tag, a, b) = match *self {
            Record::Introduce { base, element } => (0u64, pack_id(base), element),
            Record::Join { left, right } => (1, pack_id(left), right),
            Record::Skipped { base, node, mask } => (2, pack_id(base), (mask as u64) << 32 | node as u64),
            Record::Relocated { to } => (3, pack_id(to), 0),
        };
        let word_a = tag << TAG_SHIFT | if mark { MARK_BIT } else { 0 } | a;
        let mut out = [0u8; RECORD_SIZE];
        out[..8].copy_from_slice(&word_a.to_le_bytes());
        out[8..].copy_from_slice(&b.to_le_bytes());
        out
    }

    /// Returns the record and its mark bit.
    pub fn decode(bytes: &[u8; RECORD_SIZE]) -> (Record, bool) {
        let word_a = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"));
        let b = u64::from_le_bytes(bytes[8..].try_into().expect("8 bytes"));
        let id = unpack_id(word_a & ID_MASK);
        let mark = word_a & MARK_BIT != 0;
        let rec = match word_a >> TAG_SHIFT {
            0 => Record::Introduce { base: id, element: b },
            1 => Record::Join { left: id, right: b },
            2 => Record::Skipped {
                base: id,
                node: b as u32,
                mask: (b >> 32) as u32,
            },
            _ => Record::Relocated { to: id },
        };
        (rec, mark)
    }

    /// Ids this record points at, excluding `EMPTY`.
    pub fn references(&self) -> impl Iterator<Item = SolutionId> {
        let (a, b) = match *self {
            Record::Introduce { base, .. } | Record::Skipped { base, .. } => (base, EMPTY),
            Record::Join { left, right } => (left, right),
            Record::Relocated { .. } => (EMPTY, EMPTY),
        };
        [a, b].into_iter().filter(|&x| x != EMPTY)
    }

    /// Rewrite every referenced id through `f`.
    pub fn map_refs(&self, f: impl Fn(SolutionId) -> SolutionId) -> Record {
        let g = |x: SolutionId| if x == EMPTY { EMPTY } else { f(x) };
        match *self {
            Record::Introduce { base, element } => Record::Introduce { base: g(base), element },
            Record::Join { left, right } => Record::Join {
                left: g(left),
                right: g(right),
            },
            Record::Skipped { base, node, mask } => Record::Skipped {
                base: g(base),
                node,
                mask,
            },
            r @ Record::Relocated { .. } => r,
        }
    }

    /// Every reference must be `EMPTY` or smaller than the record's own id.
    pub fn check_refs(&self, own: SolutionId) -> Result<()> {
        for r in self.references() {
            if r >= own {
                return Err(Error::Store(format!("record {own} references later id {r}")));
            }
        }
        Ok(())
    }
}
