//! Closed integer intervals, axis-parallel boxes, box representations, and
//! the geometric predicates the lemma checkers re-validate against:
//! intersection, corner points, crossing pairs, Helly witnesses,
//! difference-hitting and union coverage.
//!
//! Coordinates are integers throughout; the solver's realization step makes
//! this lossless. All predicates are decided by endpoint comparisons, never
//! by sampling, so there are no tolerance questions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("interval lo {0} exceeds hi {1}")]
    BadInterval(i64, i64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("boxes do not intersect")]
    NoIntersection,
    #[error("representation missing vertex {0}")]
    MissingVertex(Vertex),
    #[error("dimension must be >= 1")]
    ZeroDimension,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepParseError {
    #[error("malformed representation line: {0:?}")]
    BadLine(String),
    #[error("inconsistent dimension on line {0:?}")]
    InconsistentDimension(String),
    #[error("interval lo {0} exceeds hi {1}")]
    BadInterval(i64, i64),
    #[error("vertex {0} defined twice")]
    DuplicateVertex(Vertex),
    #[error("empty representation")]
    Empty,
}

/// Closed interval `[lo, hi]`, possibly a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self, GeometryError> {
        if lo > hi {
            return Err(GeometryError::BadInterval(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: i64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_point(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Non-strict containment: `self` inside `other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if self.overlaps(other) {
            Some(Interval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) })
        } else {
            None
        }
    }

    /// Is every real point of `self` inside `a` or `b`?
    ///
    /// True iff `self` fits in one of them, or the two together form a
    /// gap-free interval that spans `self`. A gap between disjoint closed
    /// intervals always contains real points, so disjoint covers only work
    /// via a single side.
    pub fn subset_of_union(&self, a: &Interval, b: &Interval) -> bool {
        if self.subset_of(a) || self.subset_of(b) {
            return true;
        }
        a.overlaps(b) && a.lo.min(b.lo) <= self.lo && self.hi <= a.hi.max(b.hi)
    }

    /// Does `self ∩ a` contain a real point outside `b`?
    pub fn diff_hits(&self, a: &Interval, b: &Interval) -> bool {
        match self.intersection(a) {
            Some(cap) => !cap.subset_of(b),
            None => false,
        }
    }
}

/// Axis-parallel box: a product of closed intervals, one per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxisBox {
    intervals: Vec<Interval>,
}

impl AxisBox {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, GeometryError> {
        if intervals.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        Ok(AxisBox { intervals })
    }

    /// 2-D convenience constructor.
    pub fn rect(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Result<Self, GeometryError> {
        Ok(AxisBox {
            intervals: vec![Interval::new(x_lo, x_hi)?, Interval::new(y_lo, y_hi)?],
        })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, i: usize) -> &Interval {
        &self.intervals[i]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains_point(&self, p: &[i64]) -> bool {
        p.len() == self.dim()
            && self.intervals.iter().zip(p).all(|(iv, &x)| iv.contains_point(x))
    }

    pub fn subset_of(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(s, o)| s.subset_of(o))
    }
}

fn check_dims(a: &AxisBox, b: &AxisBox) -> Result<(), GeometryError> {
    if a.dim() != b.dim() {
        return Err(GeometryError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn check_dim2(b: &AxisBox) -> Result<(), GeometryError> {
    if b.dim() != 2 {
        return Err(GeometryError::WrongDimension { expected: 2, got: b.dim() });
    }
    Ok(())
}

/// Closed boxes intersect iff their projections pairwise overlap.
pub fn boxes_intersect(x: &AxisBox, y: &AxisBox) -> Result<bool, GeometryError> {
    check_dims(x, y)?;
    Ok(x.intervals.iter().zip(&y.intervals).all(|(a, b)| a.overlaps(b)))
}

/// The four extreme points of the intersection of two 2-D boxes, built from
/// `l'_i = max(lo_i)` and `r'_i = min(hi_i)`. Not necessarily distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerPoints {
    pub points: [(i64, i64); 4],
}

pub fn corner_points(x: &AxisBox, y: &AxisBox) -> Result<CornerPoints, GeometryError> {
    check_dim2(x)?;
    check_dim2(y)?;
    if !boxes_intersect(x, y)? {
        return Err(GeometryError::NoIntersection);
    }
    let l1 = x.interval(0).lo().max(y.interval(0).lo());
    let r1 = x.interval(0).hi().min(y.interval(0).hi());
    let l2 = x.interval(1).lo().max(y.interval(1).lo());
    let r2 = x.interval(1).hi().min(y.interval(1).hi());
    Ok(CornerPoints { points: [(l1, l2), (l1, r2), (r1, l2), (r1, r2)] })
}

/// Crossing pair: each box's projection contains the other's, in opposite
/// dimensions. Containment is non-strict, so equal boxes cross.
pub fn boxes_cross(u: &AxisBox, v: &AxisBox) -> Result<bool, GeometryError> {
    check_dim2(u)?;
    check_dim2(v)?;
    let c1 = u.interval(0).subset_of(v.interval(0)) && v.interval(1).subset_of(u.interval(1));
    let c2 = v.interval(0).subset_of(u.interval(0)) && u.interval(1).subset_of(v.interval(1));
    Ok(c1 || c2)
}

/// Does `c ∩ a` contain a real point outside `b`? Decided per dimension:
/// the intersection box is nonempty and in some dimension its projection is
/// not inside `b`'s.
pub fn box_diff_hits(c: &AxisBox, a: &AxisBox, b: &AxisBox) -> Result<bool, GeometryError> {
    check_dims(c, a)?;
    check_dims(c, b)?;
    if !boxes_intersect(c, a)? {
        return Ok(false);
    }
    Ok((0..c.dim()).any(|i| {
        let cap = c.interval(i).intersection(a.interval(i)).unwrap();
        !cap.subset_of(b.interval(i))
    }))
}

/// Is every point of the 2-D box `c` inside `a` or `b`?
///
/// Closed form: c fits in a, or in b, or in one dimension c's projection is
/// inside both a's and b's while in the other it is covered by their
/// gap-free union.
pub fn box_in_union(c: &AxisBox, a: &AxisBox, b: &AxisBox) -> Result<bool, GeometryError> {
    check_dim2(c)?;
    check_dim2(a)?;
    check_dim2(b)?;
    if c.subset_of(a) || c.subset_of(b) {
        return Ok(true);
    }
    let in_cap = |i: usize| {
        c.interval(i).subset_of(a.interval(i)) && c.interval(i).subset_of(b.interval(i))
    };
    let in_cup = |i: usize| c.interval(i).subset_of_union(a.interval(i), b.interval(i));
    Ok((in_cap(0) && in_cup(1)) || (in_cap(1) && in_cup(0)))
}

/// If the three boxes pairwise intersect, a point of the triple intersection
/// (per-dimension max of the lower endpoints); otherwise `None`.
pub fn helly_witness(
    x: &AxisBox,
    y: &AxisBox,
    z: &AxisBox,
) -> Result<Option<Vec<i64>>, GeometryError> {
    check_dims(x, y)?;
    check_dims(x, z)?;
    if !(boxes_intersect(x, y)? && boxes_intersect(x, z)? && boxes_intersect(y, z)?) {
        return Ok(None);
    }
    let mut point = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let lo = x.interval(i).lo().max(y.interval(i).lo()).max(z.interval(i).lo());
        let hi = x.interval(i).hi().min(y.interval(i).hi()).min(z.interval(i).hi());
        // Intervals on a line have the Helly property: pairwise overlap
        // forces max(lo) <= min(hi).
        debug_assert!(lo <= hi);
        point.push(lo);
    }
    Ok(Some(point))
}

/// A d-box per vertex of a graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRepresentation {
    d: usize,
    boxes: Vec<AxisBox>,
}

impl BoxRepresentation {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self, GeometryError> {
        let d = boxes.first().ok_or(GeometryError::ZeroDimension)?.dim();
        for b in &boxes {
            if b.dim() != d {
                return Err(GeometryError::DimensionMismatch(d, b.dim()));
            }
        }
        Ok(BoxRepresentation { d, boxes })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.boxes.len()
    }

    pub fn get(&self, v: Vertex) -> Result<&AxisBox, GeometryError> {
        self.boxes.get(v as usize).ok_or(GeometryError::MissingVertex(v))
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }
}

/// Crossing-pair test on two vertices of a representation (d = 2 only).
pub fn is_crossing_pair(
    rep: &BoxRepresentation,
    u: Vertex,
    v: Vertex,
) -> Result<bool, GeometryError> {
    boxes_cross(rep.get(u)?, rep.get(v)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepViolation {
    /// Vertices are adjacent but their boxes miss each other.
    MissingIntersection(Vertex, Vertex),
    /// Vertices are non-adjacent but their boxes meet.
    SpuriousIntersection(Vertex, Vertex),
}

/// Check `(u,v) ∈ E  ⟺  θ(u) ∩ θ(v) ≠ ∅` over all pairs; returns the first
/// offending pair if any.
pub fn verify_representation(
    g: &Graph,
    rep: &BoxRepresentation,
) -> Result<Option<RepViolation>, GeometryError> {
    if rep.n() < g.n() as usize {
        return Err(GeometryError::MissingVertex(rep.n() as Vertex));
    }
    for u in g.vertices() {
        for v in u + 1..g.n() {
            let meet = boxes_intersect(rep.get(u)?, rep.get(v)?)?;
            match (g.has_edge(u, v), meet) {
                (true, false) => return Ok(Some(RepViolation::MissingIntersection(u, v))),
                (false, true) => return Ok(Some(RepViolation::SpuriousIntersection(u, v))),
                _ => {}
            }
        }
    }
    Ok(None)
}

/// Text format: one line per vertex, `v l_1 r_1 ... l_d r_d`, d fixed by the
/// first line.
pub fn serialize_representation(rep: &BoxRepresentation) -> String {
    let mut out = String::new();
    for (v, b) in rep.boxes().iter().enumerate() {
        write!(out, "{}", v).unwrap();
        for iv in b.intervals() {
            write!(out, " {} {}", iv.lo(), iv.hi()).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_representation(text: &str) -> Result<BoxRepresentation, RepParseError> {
    let mut by_vertex: BTreeMap<Vertex, AxisBox> = BTreeMap::new();
    let mut d: Option<usize> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        let nums = nums.map_err(|_| RepParseError::BadLine(line.to_string()))?;
        if nums.len() < 3 || (nums.len() - 1) % 2 != 0 {
            return Err(RepParseError::BadLine(line.to_string()));
        }
        let dim = (nums.len() - 1) / 2;
        match d {
            None => d = Some(dim),
            Some(expect) if expect != dim => {
                return Err(RepParseError::InconsistentDimension(line.to_string()))
            }
            _ => {}
        }
        let v = u32::try_from(nums[0]).map_err(|_| RepParseError::BadLine(line.to_string()))?;
        let mut intervals = Vec::with_capacity(dim);
        for pair in nums[1..].chunks(2) {
            intervals.push(
                Interval::new(pair[0], pair[1])
                    .map_err(|_| RepParseError::BadInterval(pair[0], pair[1]))?,
            );
        }
        if by_vertex.insert(v, AxisBox::new(intervals).unwrap()).is_some() {
            return Err(RepParseError::DuplicateVertex(v));
        }
    }
    if by_vertex.is_empty() {
        return Err(RepParseError::Empty);
    }
    // Vertices must be exactly 0..n.
    let n = by_vertex.len() as u32;
    if by_vertex.keys().last() != Some(&(n - 1)) {
        return Err(RepParseError::BadLine(format!(
            "vertex ids must be contiguous 0..{}",
            n - 1
        )));
    }
    Ok(BoxRepresentation::new(by_vertex.into_values().collect()).unwrap())
}
