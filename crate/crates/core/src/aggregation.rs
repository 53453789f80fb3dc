//! Bicriteria polygon aggregation as an s-t cut instance.
//!
//! Fixed polygons always belong to the aggregate; each triangle may be added.
//! The aggregate is the source side: a triangle on the source side pays its
//! area and its boundary towards the outside, a triangle left out pays the
//! boundary it shares with polygons, and two triangles on different sides pay
//! their shared boundary. Polygon areas and polygon/outside boundaries are the
//! constant offset.
//!
//! Instance JSON:
//!
//! ```json
//! {
//!   "triangles": [{"id": 1, "area": 2.0}],
//!   "polygons":  [{"id": 1, "area": 1.0}],
//!   "segments":  [{"a": "t1", "b": "p1", "length": 3.4},
//!                 {"a": "t1", "b": "outside", "length": 2.0}]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed;
use crate::pareto::{cost, Cost};
use crate::td::{Graph, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Triangle(u32),
    Polygon(u32),
    Outside,
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Triangle(i) => write!(f, "t{i}"),
            Elem::Polygon(i) => write!(f, "p{i}"),
            Elem::Outside => f.write_str("outside"),
        }
    }
}

impl FromStr for Elem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Elem> {
        let bad = || Error::InvalidInstance(format!("bad element reference {s:?}"));
        if s == "outside" {
            return Ok(Elem::Outside);
        }
        let (kind, id) = s.split_at(s.len().min(1));
        let id: u32 = id.parse().map_err(|_| bad())?;
        match kind {
            "t" => Ok(Elem::Triangle(id)),
            "p" => Ok(Elem::Polygon(id)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub a: Elem,
    pub b: Elem,
    /// Tenths.
    pub length: i64,
}

/// Areas and lengths are fixed-point tenths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AggregationInstance {
    pub triangles: BTreeMap<u32, i64>,
    pub polygons: BTreeMap<u32, i64>,
    pub segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct RawItem {
    id: u32,
    area: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSegment {
    a: String,
    b: String,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    triangles: Vec<RawItem>,
    #[serde(default)]
    polygons: Vec<RawItem>,
    #[serde(default)]
    segments: Vec<RawSegment>,
}

/// The s-t cut graph of an instance. Vertex `i` (1-based) is `triangle_ids[i - 1]`.
#[derive(Debug, Clone)]
pub struct CutGraph {
    pub graph: Graph,
    pub offset: Cost,
    pub triangle_ids: Vec<u32>,
}

impl AggregationInstance {
    /// Parse the JSON form, rounding every measure to one decimal.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text)?;
        let mut inst = AggregationInstance::default();
        for t in raw.triangles {
            if inst.triangles.insert(t.id, fixed::from_f64(t.area)).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate triangle t{}", t.id)));
            }
        }
        for p in raw.polygons {
            if inst.polygons.insert(p.id, fixed::from_f64(p.area)).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate polygon p{}", p.id)));
            }
        }
        for s in raw.segments {
            inst.segments.push(Segment {
                a: s.a.parse()?,
                b: s.b.parse()?,
                length: fixed::from_f64(s.length),
            });
        }
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            triangles: self
                .triangles
                .iter()
                .map(|(&id, &a)| RawItem {
                    id,
                    area: fixed::to_f64(a),
                })
                .collect(),
            polygons: self
                .polygons
                .iter()
                .map(|(&id, &a)| RawItem {
                    id,
                    area: fixed::to_f64(a),
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| RawSegment {
                    a: s.a.to_string(),
                    b: s.b.to_string(),
                    length: fixed::to_f64(s.length),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain data")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if let Some((id, _)) = self.triangles.iter().find(|(_, &a)| a <= 0) {
            return bad(format!("triangle t{id} has nonpositive area"));
        }
        if let Some((id, _)) = self.polygons.iter().find(|(_, &a)| a <= 0) {
            return bad(format!("polygon p{id} has nonpositive area"));
        }
        let mut per_triangle: BTreeMap<u32, usize> = BTreeMap::new();
        for s in &self.segments {
            if s.length <= 0 {
                return bad(format!("segment {}-{} has nonpositive length", s.a, s.b));
            }
            if s.a == s.b {
                return bad(format!("segment joins {} to itself", s.a));
            }
            for e in [s.a, s.b] {
                match e {
                    Elem::Triangle(i) if !self.triangles.contains_key(&i) => {
                        return bad(format!("unknown triangle t{i}"))
                    }
                    Elem::Polygon(i) if !self.polygons.contains_key(&i) => return bad(format!("unknown polygon p{i}")),
                    Elem::Triangle(i) => *per_triangle.entry(i).or_default() += 1,
                    _ => {}
                }
            }
        }
        if let Some((id, k)) = per_triangle.iter().find(|(_, &k)| k > 3) {
            return bad(format!("triangle t{id} has {k} boundary segments"));
        }
        Ok(())
    }

    pub fn build_cut_graph(&self) -> CutGraph {
        let ids: Vec<u32> = self.triangles.keys().copied().collect();
        let n = ids.len();
        let vertex = |id: u32| ids.binary_search(&id).expect("known triangle") as u32 + 1;
        let sink = n as u32 + 1;
        // (area, perimeter) per edge, keyed by endpoints
        let mut acc: BTreeMap<(u32, u32), (i64, i64)> = BTreeMap::new();
        for (&id, &area) in &self.triangles {
            acc.entry((vertex(id), sink)).or_default().0 += area;
        }
        let mut offset = (self.polygons.values().sum::<i64>(), 0i64);
        for s in &self.segments {
            let (a, b) = (s.a.min(s.b), s.a.max(s.b));
            let key = match (a, b) {
                (Elem::Triangle(x), Elem::Triangle(y)) => Some((vertex(x), vertex(y))),
                (Elem::Triangle(x), Elem::Polygon(_)) => Some((0, vertex(x))),
                (Elem::Triangle(x), Elem::Outside) => Some((vertex(x), sink)),
                (Elem::Polygon(_), Elem::Outside) => {
                    offset.1 += s.length;
                    None
                }
                _ => None,
            };
            if let Some(k) = key {
                acc.entry(k).or_default().1 += s.length;
            }
        }
        let mut graph = Graph::new(n, 2);
        for ((u, v), (x, y)) in acc {
            graph.add_edge(u, v, cost(&[x, y]));
        }
        CutGraph {
            graph,
            offset: cost(&[offset.0, offset.1]),
            triangle_ids: ids,
        }
    }

    /// Area and perimeter of the aggregate with the given triangles, straight
    /// from the measures.
    pub fn evaluate(&self, selected: &BTreeSet<u32>) -> Cost {
        let area = self.polygons.values().sum::<i64>() + selected.iter().map(|t| self.triangles[t]).sum::<i64>();
        let inside = |e: Elem| match e {
            Elem::Triangle(i) => selected.contains(&i),
            Elem::Polygon(_) => true,
            Elem::Outside => false,
        };
        let perimeter = self
            .segments
            .iter()
            .filter(|s| inside(s.a) != inside(s.b))
            .map(|s| s.length)
            .sum::<i64>();
        cost(&[area, perimeter])
    }
}

/// Exact right-triangle legs for one knapsack item: adding the triangle adds
/// area `w` and shortens the perimeter by `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackTriangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl KnapsackTriangle {
    pub fn new(p: f64, w: f64) -> Result<Self> {
        if !(p > 0.0 && w > 0.0 && p.is_finite() && w.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "profit {p} and weight {w} must be positive"
            )));
        }
        let b = (-p * p + 4.0 * w + (p.powi(4) + 24.0 * p * p * w + 16.0 * w * w).sqrt()) / (4.0 * p);
        let a = 2.0 * w / b;
        let c = (a * a + b * b).sqrt();
        Ok(KnapsackTriangle { a, b, c })
    }

    pub fn area(&self) -> f64 {
        self.a * self.b / 2.0
    }

    pub fn perimeter_gain(&self) -> f64 {
        self.a + self.c - self.b
    }
}

/// One polygon with `n` triangles, triangle `i` glued to it along legs `a` and
/// `c` and facing outside with `b`. Measures are rounded to tenths so that the
/// rounded instance realises the rounded `p` and `w` exactly.
pub fn knapsack_instance(profits: &[f64], weights: &[f64]) -> Result<AggregationInstance> {
    if profits.len() != weights.len() {
        return Err(Error::Usage(format!(
            "{} profits but {} weights",
            profits.len(),
            weights.len()
        )));
    }
    let mut inst = AggregationInstance::default();
    inst.polygons.insert(1, fixed::SCALE);
    for (i, (&p, &w)) in profits.iter().zip(weights).enumerate() {
        let tri = KnapsackTriangle::new(p, w)?;
        let id = i as u32 + 1;
        let (aq, bq, pq) = (fixed::from_f64(tri.a), fixed::from_f64(tri.b), fixed::from_f64(p));
        let cq = pq + bq - aq;
        inst.triangles.insert(id, fixed::from_f64(w));
        let t = Elem::Triangle(id);
        let p1 = Elem::Polygon(1);
        inst.segments.push(Segment {
            a: t,
            b: p1,
            length: aq,
        });
        inst.segments.push(Segment {
            a: t,
            b: p1,
            length: cq,
        });
        inst.segments.push(Segment {
            a: t,
            b: Elem::Outside,
            length: bq,
        });
    }
    inst.segments.push(Segment {
        a: Elem::Polygon(1),
        b: Elem::Outside,
        length: fixed::SCALE,
    });
    inst.validate()?;
    Ok(inst)
}

/// Profits and weights `2^i` for `i` in `0..n`.
pub fn powers(n: usize) -> (Vec<f64>, Vec<f64>) {
    let v: Vec<f64> = (0..n).map(|i| 2f64.powi(i as i32)).collect();
    (v.clone(), v)
}

/// Path decomposition `{1} - {2} - ... - {n}` for instances without triangle
/// adjacencies.
pub fn path_decomposition(n: usize) -> TreeDecomposition {
    TreeDecomposition::new(
        n,
        (1..=n as u32).map(|v| vec![v]).collect(),
        (1..n).map(|i| (i - 1, i)).collect(),
    )
}
