//! Complete decision procedure for "does `g` admit a d-box representation
//! satisfying the given side constraints".
//!
//! Three engines share one semantics:
//!
//! * `endpoint` — per dimension, Boolean atoms "e <= f" over the 2n interval
//!   endpoint tokens form a total preorder; edges, non-edges and side
//!   constraints compile to comparison formulas. Complete for closed
//!   intervals: snapping endpoints to their ranks preserves every
//!   comparison, and all predicates here are functions of comparisons only.
//! * `before-cegar` — per dimension and ordered vertex pair, an atom
//!   "u ends before v begins"; the interval-order axioms are added lazily
//!   from violations. Plain boxicity only (containment is not a function of
//!   the before relation), but far smaller on large graphs.
//! * `brute` — exhaustive endpoint-sequence backtracking for oracle duty on
//!   tiny graphs.
//!
//! Every `Feasible` answer carries a concrete integer representation that is
//! re-verified geometrically before being returned; `Infeasible` is only
//! produced by a completed refutation, never by a budget.

pub mod cdcl;
pub mod cnf;

mod before;
mod brute;
mod endpoint;
mod formula;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::geometry::{
    self, BoxRepresentation, GeometryError, Interval,
};
use crate::graph::{Graph, Vertex};

pub use cdcl::SearchStats;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid side constraint: {0}")]
    InvalidConstraint(String),
    #[error("brute engine handles n <= 7, got n = {0}")]
    BruteTooLarge(u32),
    #[error("eager export needs {needed} clauses, cap is {cap}")]
    ClauseCapExceeded { needed: u64, cap: u64 },
    #[error("internal soundness failure: {0}")]
    Soundness(String),
    #[error("invalid endpoint order: {0}")]
    BadEndpointOrder(String),
    #[error("bad model: {0}")]
    BadModel(String),
    #[error("malformed CNF: {0}")]
    BadCnf(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Endpoint,
    BeforeCegar,
    Brute,
}

impl std::str::FromStr for Engine {
    type Err = SolveError;
    fn from_str(s: &str) -> Result<Self, SolveError> {
        match s {
            "endpoint" => Ok(Engine::Endpoint),
            "before-cegar" | "before" | "cegar" => Ok(Engine::BeforeCegar),
            "brute" => Ok(Engine::Brute),
            _ => Err(SolveError::Unsupported(format!("unknown engine {s:?}"))),
        }
    }
}

/// Declarative restriction on representations, used to encode lemma
/// negations. Dimension indices are 1-based and currently limited to 2-D
/// queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideConstraint {
    RequireCrossing(Vertex, Vertex),
    ForbidCrossing(Vertex, Vertex),
    /// theta(c) must lie inside theta(a) union theta(b).
    RequireBoxInUnion { c: Vertex, a: Vertex, b: Vertex },
    /// theta(c) intersect theta(a) must lie inside theta(b).
    RequireIntersectionContained { c: Vertex, a: Vertex, b: Vertex },
    /// Pi_dim(c) must NOT be inside Pi_dim(a) intersect Pi_dim(b).
    ForbidProjectionInCap { dim: u32, c: Vertex, a: Vertex, b: Vertex },
    /// theta(c) must contain no corner point of theta(a) intersect theta(b).
    ForbidCornerMembership { c: Vertex, a: Vertex, b: Vertex },
}

impl SideConstraint {
    fn vertices(&self) -> Vec<Vertex> {
        match *self {
            SideConstraint::RequireCrossing(u, v) | SideConstraint::ForbidCrossing(u, v) => {
                vec![u, v]
            }
            SideConstraint::RequireBoxInUnion { c, a, b }
            | SideConstraint::RequireIntersectionContained { c, a, b }
            | SideConstraint::ForbidProjectionInCap { c, a, b, .. }
            | SideConstraint::ForbidCornerMembership { c, a, b } => vec![c, a, b],
        }
    }

    fn needs_dim2(&self) -> bool {
        !matches!(self, SideConstraint::RequireIntersectionContained { .. })
    }

    pub fn validate(&self, g: &Graph, d: u32) -> Result<(), SolveError> {
        for v in self.vertices() {
            if v >= g.n() {
                return Err(SolveError::InvalidConstraint(format!(
                    "vertex {v} out of range in {self:?}"
                )));
            }
        }
        if self.needs_dim2() && d != 2 {
            return Err(SolveError::InvalidConstraint(format!(
                "{self:?} requires d = 2, got d = {d}"
            )));
        }
        if let SideConstraint::ForbidProjectionInCap { dim, .. } = *self {
            if dim != 1 && dim != 2 {
                return Err(SolveError::InvalidConstraint(format!(
                    "projection dimension must be 1 or 2, got {dim}"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for SideConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SideConstraint::RequireCrossing(u, v) => write!(f, "require-crossing({u},{v})"),
            SideConstraint::ForbidCrossing(u, v) => write!(f, "forbid-crossing({u},{v})"),
            SideConstraint::RequireBoxInUnion { c, a, b } => {
                write!(f, "require-box-in-union({c};{a},{b})")
            }
            SideConstraint::RequireIntersectionContained { c, a, b } => {
                write!(f, "require-intersection-contained({c},{a};{b})")
            }
            SideConstraint::ForbidProjectionInCap { dim, c, a, b } => {
                write!(f, "forbid-projection-in-cap(dim{dim};{c};{a},{b})")
            }
            SideConstraint::ForbidCornerMembership { c, a, b } => {
                write!(f, "forbid-corner-membership({c};{a},{b})")
            }
        }
    }
}

/// Geometric re-check of one constraint against a concrete representation.
/// This is the trusted side of the pipeline: solver models are never
/// believed until they pass here.
pub fn constraint_satisfied(
    rep: &BoxRepresentation,
    con: &SideConstraint,
) -> Result<bool, GeometryError> {
    match *con {
        SideConstraint::RequireCrossing(u, v) => geometry::is_crossing_pair(rep, u, v),
        SideConstraint::ForbidCrossing(u, v) => Ok(!geometry::is_crossing_pair(rep, u, v)?),
        SideConstraint::RequireBoxInUnion { c, a, b } => {
            geometry::box_in_union(rep.get(c)?, rep.get(a)?, rep.get(b)?)
        }
        SideConstraint::RequireIntersectionContained { c, a, b } => {
            Ok(!geometry::box_diff_hits(rep.get(c)?, rep.get(a)?, rep.get(b)?)?)
        }
        SideConstraint::ForbidProjectionInCap { dim, c, a, b } => {
            let i = (dim - 1) as usize;
            let pc = rep.get(c)?.interval(i);
            let pa = rep.get(a)?.interval(i);
            let pb = rep.get(b)?.interval(i);
            Ok(!(pc.subset_of(pa) && pc.subset_of(pb)))
        }
        SideConstraint::ForbidCornerMembership { c, a, b } => {
            let (bc, ba, bb) = (rep.get(c)?, rep.get(a)?, rep.get(b)?);
            if !geometry::boxes_intersect(ba, bb)? {
                return Ok(true);
            }
            let corners = geometry::corner_points(ba, bb)?;
            Ok(corners.points.iter().all(|&(x, y)| !bc.contains_point(&[x, y])))
        }
    }
}

/// Resource limits; `None` means unlimited. `Infeasible` is never produced
/// by a budget cut-off.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub wall: Option<Duration>,
    pub conflicts: Option<u64>,
    /// Cap on literals retained in learned clauses (memory proxy).
    pub memory_literals: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn wall_secs(secs: u64) -> Self {
        Budget { wall: Some(Duration::from_secs(secs)), ..Budget::default() }
    }

    pub(crate) fn limits_from(&self, start: Instant) -> cdcl::Limits {
        cdcl::Limits {
            deadline: self.wall.map(|w| start + w),
            conflicts: self.conflicts,
            learned_literals: self.memory_literals,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub cegar_rounds: u64,
    pub clauses: u64,
    pub variables: u64,
    pub wall: Duration,
}

impl SolveStats {
    pub(crate) fn absorb(&mut self, s: &SearchStats) {
        self.decisions = s.decisions;
        self.conflicts = s.conflicts;
        self.propagations = s.propagations;
        self.restarts = s.restarts;
        self.learned = s.learned;
    }
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Feasible(BoxRepresentation),
    Infeasible,
    BudgetExhausted,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }
    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveOutcome::Infeasible)
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub stats: SolveStats,
}

/// Callback receiving periodic statistics snapshots during long searches.
pub type ProgressFn = Box<dyn FnMut(&SolveStats) + Send>;

/// Extended options for solver-internal callers (lemma checkers). The plain
/// public entry point uses the defaults.
#[derive(Default)]
pub struct SolveOptions {
    /// Branching seed; outcomes are seed-independent, representations need
    /// not be.
    pub seed: Option<u64>,
    /// Symmetry breaking: for each chain, the listed vertices' left
    /// endpoints in dimension 1 are constrained to appear in this order.
    /// Only admissible when the listed vertices are pairwise interchangeable
    /// by graph automorphisms that fix the constraint set.
    pub lex_chains: Vec<Vec<Vertex>>,
    /// Use only the first orientation of every RequireCrossing constraint.
    /// Admissible only when the remaining constraint set is invariant under
    /// swapping the two dimensions (swapping dimensions maps one orientation
    /// of a crossing onto the other).
    pub oriented_crossing: bool,
    /// Invoked periodically with solver statistics for long runs.
    pub progress: Option<ProgressFn>,
}

/// A total preorder (ranks with ties) over the 2n endpoint tokens of one
/// dimension. Token `2v` is the left endpoint of vertex `v`, token `2v + 1`
/// the right one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointOrder {
    ranks: Vec<u32>,
}

impl EndpointOrder {
    pub fn new(ranks: Vec<u32>) -> Result<Self, SolveError> {
        if ranks.is_empty() || !ranks.len().is_multiple_of(2) {
            return Err(SolveError::BadEndpointOrder(
                "token count must be positive and even".into(),
            ));
        }
        let max = *ranks.iter().max().unwrap();
        let mut present = vec![false; max as usize + 1];
        for &r in &ranks {
            present[r as usize] = true;
        }
        if !present.iter().all(|&p| p) {
            return Err(SolveError::BadEndpointOrder("ranks must be contiguous from 0".into()));
        }
        let n = ranks.len() / 2;
        for v in 0..n {
            if ranks[2 * v] > ranks[2 * v + 1] {
                return Err(SolveError::BadEndpointOrder(format!(
                    "vertex {v}: left endpoint ranks after right"
                )));
            }
        }
        Ok(EndpointOrder { ranks })
    }

    /// Derive the order from concrete interval coordinates.
    pub fn from_intervals(intervals: &[Interval]) -> Self {
        let mut coords: Vec<i64> = Vec::with_capacity(2 * intervals.len());
        for iv in intervals {
            coords.push(iv.lo());
            coords.push(iv.hi());
        }
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let ranks = coords
            .iter()
            .map(|c| sorted.binary_search(c).unwrap() as u32)
            .collect();
        EndpointOrder { ranks }
    }

    pub fn n(&self) -> usize {
        self.ranks.len() / 2
    }

    pub fn rank(&self, token: usize) -> u32 {
        self.ranks[token]
    }

    pub fn rank_left(&self, v: Vertex) -> u32 {
        self.ranks[2 * v as usize]
    }

    pub fn rank_right(&self, v: Vertex) -> u32 {
        self.ranks[2 * v as usize + 1]
    }
}

/// Turn per-dimension endpoint orders into integer boxes by reading each
/// endpoint's rank off as its coordinate. Ranks live in `[0, 2n)`, so the
/// realized boxes reproduce exactly the comparisons of the input orders;
/// this is checked, not assumed.
pub fn realize(orders: &[EndpointOrder], n: u32) -> Result<BoxRepresentation, SolveError> {
    if orders.is_empty() {
        return Err(SolveError::BadEndpointOrder("need at least one dimension".into()));
    }
    for o in orders {
        if o.n() != n as usize {
            return Err(SolveError::BadEndpointOrder(format!(
                "order covers {} vertices, expected {n}",
                o.n()
            )));
        }
    }
    let mut boxes = Vec::with_capacity(n as usize);
    for v in 0..n {
        let mut ivs = Vec::with_capacity(orders.len());
        for o in orders {
            ivs.push(
                Interval::new(o.rank_left(v) as i64, o.rank_right(v) as i64)
                    .map_err(|_| SolveError::BadEndpointOrder(format!("vertex {v} inverted")))?,
            );
        }
        boxes.push(geometry::AxisBox::new(ivs)?);
    }
    let rep = BoxRepresentation::new(boxes)?;
    // Postcondition: coordinate comparisons reproduce rank comparisons.
    for (dim, o) in orders.iter().enumerate() {
        for t1 in 0..2 * n as usize {
            for t2 in 0..2 * n as usize {
                let c1 = coord(&rep, dim, t1);
                let c2 = coord(&rep, dim, t2);
                if (c1 <= c2) != (o.rank(t1) <= o.rank(t2)) {
                    return Err(SolveError::Soundness(
                        "realization does not reproduce the endpoint order".into(),
                    ));
                }
            }
        }
    }
    Ok(rep)
}

fn coord(rep: &BoxRepresentation, dim: usize, token: usize) -> i64 {
    let iv = rep.boxes()[token / 2].interval(dim);
    if token.is_multiple_of(2) {
        iv.lo()
    } else {
        iv.hi()
    }
}

/// Re-verify a candidate representation against the graph and every side
/// constraint; promotes it to a trusted `Feasible` payload.
fn certify(
    g: &Graph,
    cons: &[SideConstraint],
    rep: BoxRepresentation,
) -> Result<BoxRepresentation, SolveError> {
    if let Some(viol) = geometry::verify_representation(g, &rep)? {
        return Err(SolveError::Soundness(format!(
            "model fails graph verification: {viol:?}"
        )));
    }
    for con in cons {
        if !constraint_satisfied(&rep, con)? {
            return Err(SolveError::Soundness(format!(
                "model violates side constraint {con}"
            )));
        }
    }
    Ok(rep)
}

/// Decide whether `g` has a d-box representation satisfying `cons`.
pub fn decide_box_le(
    g: &Graph,
    d: u32,
    cons: &[SideConstraint],
    engine: Engine,
    budget: &Budget,
) -> Result<SolveReport, SolveError> {
    decide_box_le_opt(g, d, cons, engine, budget, &mut SolveOptions::default())
}

pub fn decide_box_le_opt(
    g: &Graph,
    d: u32,
    cons: &[SideConstraint],
    engine: Engine,
    budget: &Budget,
    opts: &mut SolveOptions,
) -> Result<SolveReport, SolveError> {
    if d < 1 {
        return Err(SolveError::Unsupported("d must be >= 1".into()));
    }
    for con in cons {
        con.validate(g, d)?;
    }
    match engine {
        Engine::Endpoint => endpoint::decide(g, d, cons, budget, opts),
        Engine::BeforeCegar => {
            if !cons.is_empty() {
                return Err(SolveError::Unsupported(
                    "before-cegar supports no side constraints (containment is not a \
                     function of the before relation)"
                        .into(),
                ));
            }
            before::decide(g, d, budget, opts)
        }
        Engine::Brute => {
            if g.n() > 7 {
                return Err(SolveError::BruteTooLarge(g.n()));
            }
            if !cons.is_empty() {
                return Err(SolveError::Unsupported(
                    "brute engine supports no side constraints".into(),
                ));
            }
            brute::decide(g, d, budget)
        }
    }
}

/// Run the endpoint and before-cegar engines concurrently and take the first
/// definitive answer. Plain boxicity queries only.
pub fn decide_portfolio(
    g: &Graph,
    d: u32,
    budget: &Budget,
) -> Result<SolveReport, SolveError> {
    use std::sync::mpsc;
    let (tx, rx) = mpsc::channel();
    let mut handles = Vec::new();
    for engine in [Engine::Endpoint, Engine::BeforeCegar] {
        let tx = tx.clone();
        let g = g.clone();
        let budget = budget.clone();
        handles.push(std::thread::spawn(move || {
            let res = decide_box_le(&g, d, &[], engine, &budget);
            let _ = tx.send(res);
        }));
    }
    drop(tx);
    let mut fallback: Option<Result<SolveReport, SolveError>> = None;
    for res in rx {
        match &res {
            Ok(rep) if !matches!(rep.outcome, SolveOutcome::BudgetExhausted) => {
                for h in handles {
                    // Let the loser finish; budgets bound its lifetime.
                    drop(h);
                }
                return res;
            }
            _ => fallback = Some(res),
        }
    }
    fallback.unwrap_or_else(|| Err(SolveError::Unsupported("portfolio produced no result".into())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoxicityOutcome {
    /// The exact boxicity (0 for complete graphs by convention).
    Exact(u32),
    /// All of 1..=d_max are infeasible.
    ExceedsMax(u32),
    BudgetExhausted,
}

/// Smallest d in `[0, d_max]` admitting a representation; complete graphs
/// get 0 by convention (empty intersection of interval graphs).
pub fn compute_boxicity(
    g: &Graph,
    d_max: u32,
    engine: Engine,
    budget: &Budget,
) -> Result<(BoxicityOutcome, SolveStats), SolveError> {
    let mut stats = SolveStats::default();
    if g.is_complete() {
        return Ok((BoxicityOutcome::Exact(0), stats));
    }
    for d in 1..=d_max {
        let report = decide_box_le(g, d, &[], engine, budget)?;
        stats = report.stats;
        match report.outcome {
            SolveOutcome::Feasible(_) => return Ok((BoxicityOutcome::Exact(d), stats)),
            SolveOutcome::Infeasible => continue,
            SolveOutcome::BudgetExhausted => {
                return Ok((BoxicityOutcome::BudgetExhausted, stats))
            }
        }
    }
    Ok((BoxicityOutcome::ExceedsMax(d_max), stats))
}

pub use before::eager_before_clause_count;
pub use cnf::{export_cnf, import_model, CnfDocument, DEFAULT_CLAUSE_CAP};
