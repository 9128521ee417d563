//! Endpoint-order engine: per dimension a total preorder over the 2n
//! interval endpoint tokens, expressed with one Boolean atom per ordered
//! token pair, solved by the CDCL core.
//!
//! Completeness argument: a d-box representation with closed intervals is
//! determined, up to every predicate used here, by the per-dimension order
//! of its endpoints. Snapping endpoints to their ranks therefore loses
//! nothing, and each rank vector is a model of this encoding, so the
//! encoding is both sound and complete.

use std::time::Instant;

use super::cdcl::{Lit, SatResult, Solver, Var};
use super::formula::{ClauseBuf, Formula};
use super::{
    certify, realize, Budget, EndpointOrder, SideConstraint, SolveError, SolveOptions,
    SolveOutcome, SolveReport, SolveStats,
};
use crate::graph::{Graph, Vertex};

/// CNF encoding of one decision query, kept around for DIMACS export and
/// model decoding.
pub(crate) struct EndpointEncoding {
    pub n: u32,
    pub d: u32,
    /// Atom variables come first; Tseitin auxiliaries follow.
    pub num_atom_vars: u32,
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

/// Left endpoint token of `v`.
#[inline]
pub(crate) fn tok_l(v: Vertex) -> u32 {
    2 * v
}

/// Right endpoint token of `v`.
#[inline]
pub(crate) fn tok_r(v: Vertex) -> u32 {
    2 * v + 1
}

impl EndpointEncoding {
    /// Atom for "token e sorts at or before token f in dimension `dim`"
    /// (0-based dim, e != f).
    pub fn le_var(&self, dim: u32, e: u32, f: u32) -> Var {
        debug_assert!(e != f);
        let t = 2 * self.n;
        let pair = e * (t - 1) + f - u32::from(f > e);
        dim * t * (t - 1) + pair
    }

    /// Inverse of `le_var`, valid for atom variables only.
    pub fn var_atom(&self, var: Var) -> (u32, u32, u32) {
        let t = 2 * self.n;
        let block = t * (t - 1);
        let dim = var / block;
        let pair = var % block;
        let e = pair / (t - 1);
        let mut f = pair % (t - 1);
        if f >= e {
            f += 1;
        }
        (dim, e, f)
    }

    fn le(&self, dim: u32, e: u32, f: u32) -> Formula {
        if e == f {
            Formula::True
        } else {
            Formula::Lit(Lit::pos(self.le_var(dim, e, f)))
        }
    }

    /// Projection containment: Pi_dim(u) inside Pi_dim(v).
    fn sub(&self, dim: u32, u: Vertex, v: Vertex) -> Formula {
        Formula::and(vec![
            self.le(dim, tok_l(v), tok_l(u)),
            self.le(dim, tok_r(u), tok_r(v)),
        ])
    }

    fn overlap(&self, dim: u32, u: Vertex, v: Vertex) -> Formula {
        Formula::and(vec![
            self.le(dim, tok_l(u), tok_r(v)),
            self.le(dim, tok_l(v), tok_r(u)),
        ])
    }

    /// Pi_dim(c) inside Pi_dim(a) union Pi_dim(b); mirrors
    /// `Interval::subset_of_union`.
    fn sub_union(&self, dim: u32, c: Vertex, a: Vertex, b: Vertex) -> Formula {
        let spanned = Formula::and(vec![
            self.overlap(dim, a, b),
            Formula::or(vec![
                self.le(dim, tok_l(a), tok_l(c)),
                self.le(dim, tok_l(b), tok_l(c)),
            ]),
            Formula::or(vec![
                self.le(dim, tok_r(c), tok_r(a)),
                self.le(dim, tok_r(c), tok_r(b)),
            ]),
        ]);
        Formula::or(vec![self.sub(dim, c, a), self.sub(dim, c, b), spanned])
    }

    fn crossing(&self, u: Vertex, v: Vertex, oriented: bool) -> Formula {
        let first = Formula::and(vec![self.sub(0, u, v), self.sub(1, v, u)]);
        if oriented {
            return first;
        }
        let second = Formula::and(vec![self.sub(0, v, u), self.sub(1, u, v)]);
        Formula::or(vec![first, second])
    }

    /// Does the corner point with the chosen extremes (`hi_x`: min of right
    /// ends instead of max of left ends, same for `hi_y`) of
    /// `theta(a) ∩ theta(b)` lie inside `theta(c)`?
    fn corner_in(&self, c: Vertex, a: Vertex, b: Vertex, hi_x: bool, hi_y: bool) -> Formula {
        let axis = |dim: u32, hi: bool| -> Formula {
            if hi {
                // coordinate = min(r_a, r_b)
                Formula::and(vec![
                    Formula::or(vec![
                        self.le(dim, tok_r(a), tok_r(c)),
                        self.le(dim, tok_r(b), tok_r(c)),
                    ]),
                    self.le(dim, tok_l(c), tok_r(a)),
                    self.le(dim, tok_l(c), tok_r(b)),
                ])
            } else {
                // coordinate = max(l_a, l_b)
                Formula::and(vec![
                    Formula::or(vec![
                        self.le(dim, tok_l(c), tok_l(a)),
                        self.le(dim, tok_l(c), tok_l(b)),
                    ]),
                    self.le(dim, tok_l(a), tok_r(c)),
                    self.le(dim, tok_l(b), tok_r(c)),
                ])
            }
        };
        Formula::and(vec![axis(0, hi_x), axis(1, hi_y)])
    }

    fn constraint_formula(&self, con: &SideConstraint, oriented: bool) -> Formula {
        match *con {
            SideConstraint::RequireCrossing(u, v) => self.crossing(u, v, oriented),
            SideConstraint::ForbidCrossing(u, v) => self.crossing(u, v, false).negate(),
            SideConstraint::RequireBoxInUnion { c, a, b } => {
                let inside = |x: Vertex| -> Formula {
                    Formula::and(vec![self.sub(0, c, x), self.sub(1, c, x)])
                };
                let cap = |dim: u32| -> Formula {
                    Formula::and(vec![self.sub(dim, c, a), self.sub(dim, c, b)])
                };
                Formula::or(vec![
                    inside(a),
                    inside(b),
                    Formula::and(vec![cap(0), self.sub_union(1, c, a, b)]),
                    Formula::and(vec![cap(1), self.sub_union(0, c, a, b)]),
                ])
            }
            SideConstraint::RequireIntersectionContained { c, a, b } => {
                let disjoint = Formula::or(
                    (0..self.d).map(|i| self.overlap(i, c, a).negate()).collect(),
                );
                // cap = [max(l_c, l_a), min(r_c, r_a)] inside [l_b, r_b].
                let contained = Formula::and(
                    (0..self.d)
                        .map(|i| {
                            Formula::and(vec![
                                Formula::or(vec![
                                    self.le(i, tok_l(b), tok_l(c)),
                                    self.le(i, tok_l(b), tok_l(a)),
                                ]),
                                Formula::or(vec![
                                    self.le(i, tok_r(c), tok_r(b)),
                                    self.le(i, tok_r(a), tok_r(b)),
                                ]),
                            ])
                        })
                        .collect(),
                );
                Formula::or(vec![disjoint, contained])
            }
            SideConstraint::ForbidProjectionInCap { dim, c, a, b } => {
                let i = dim - 1;
                Formula::and(vec![self.sub(i, c, a), self.sub(i, c, b)]).negate()
            }
            SideConstraint::ForbidCornerMembership { c, a, b } => {
                let disjoint = Formula::or(vec![
                    self.overlap(0, a, b).negate(),
                    self.overlap(1, a, b).negate(),
                ]);
                let mut misses = Vec::with_capacity(4);
                for hi_x in [false, true] {
                    for hi_y in [false, true] {
                        misses.push(self.corner_in(c, a, b, hi_x, hi_y).negate());
                    }
                }
                Formula::or(vec![disjoint, Formula::and(misses)])
            }
        }
    }

    /// The optional deadline bounds encoding construction itself, which is
    /// cubic in the vertex count; expiry surfaces as the same budget
    /// sentinel the callers of `decide` map to an exhausted outcome.
    pub fn build(
        g: &Graph,
        d: u32,
        cons: &[SideConstraint],
        lex_chains: &[Vec<Vertex>],
        oriented_crossing: bool,
        deadline: Option<Instant>,
    ) -> Result<EndpointEncoding, SolveError> {
        let n = g.n();
        if n == 0 {
            return Err(SolveError::Unsupported("empty graph".into()));
        }
        let t = 2 * n;
        let num_atom_vars = d * t * (t - 1);
        let mut enc = EndpointEncoding { n, d, num_atom_vars, num_vars: num_atom_vars, clauses: Vec::new() };
        let mut clauses: Vec<Vec<Lit>> = Vec::new();

        for dim in 0..d {
            // Totality over every unordered token pair.
            for e in 0..t {
                for f in e + 1..t {
                    clauses.push(vec![
                        Lit::pos(enc.le_var(dim, e, f)),
                        Lit::pos(enc.le_var(dim, f, e)),
                    ]);
                }
            }
            // Transitivity over every ordered distinct triple.
            for e in 0..t {
                if let Some(dl) = deadline {
                    if Instant::now() >= dl {
                        return Err(SolveError::Unsupported("budget".into()));
                    }
                }
                for f in 0..t {
                    if f == e {
                        continue;
                    }
                    for h in 0..t {
                        if h == e || h == f {
                            continue;
                        }
                        clauses.push(vec![
                            Lit::neg(enc.le_var(dim, e, f)),
                            Lit::neg(enc.le_var(dim, f, h)),
                            Lit::pos(enc.le_var(dim, e, h)),
                        ]);
                    }
                }
            }
            // Left endpoint never after the right one.
            for v in 0..n {
                clauses.push(vec![Lit::pos(enc.le_var(dim, tok_l(v), tok_r(v)))]);
            }
            // Adjacent boxes must overlap in every dimension.
            for (u, v) in g.edges() {
                clauses.push(vec![Lit::pos(enc.le_var(dim, tok_l(u), tok_r(v)))]);
                clauses.push(vec![Lit::pos(enc.le_var(dim, tok_l(v), tok_r(u)))]);
            }
        }
        // Non-adjacent boxes must be separated in some dimension: not both
        // of the overlap comparisons may hold everywhere.
        for u in 0..n {
            for v in u + 1..n {
                if g.has_edge(u, v) {
                    continue;
                }
                let mut cl = Vec::with_capacity(2 * d as usize);
                for dim in 0..d {
                    cl.push(Lit::neg(enc.le_var(dim, tok_l(u), tok_r(v))));
                    cl.push(Lit::neg(enc.le_var(dim, tok_l(v), tok_r(u))));
                }
                clauses.push(cl);
            }
        }
        // Symmetry breaking: fix the dimension-1 left-endpoint order along
        // each declared chain of interchangeable vertices.
        for chain in lex_chains {
            for w in chain.windows(2) {
                clauses.push(vec![Lit::pos(enc.le_var(0, tok_l(w[0]), tok_l(w[1])))]);
            }
        }

        let mut buf = ClauseBuf::new(num_atom_vars);
        buf.clauses = clauses;
        for con in cons {
            let f = enc.constraint_formula(con, oriented_crossing);
            buf.assert_true(f);
        }
        enc.num_vars = buf.next_var;
        enc.clauses = buf.clauses;
        Ok(enc)
    }

    /// Read per-dimension endpoint orders off a model and verify that the
    /// ranks reproduce every atom the model asserted.
    pub fn decode(
        &self,
        model: &dyn Fn(Var) -> bool,
    ) -> Result<Vec<EndpointOrder>, SolveError> {
        orders_from_le(self.n, self.d, &|dim, e, f| model(self.le_var(dim, e, f)))
    }
}

/// Rebuild per-dimension endpoint orders from an "e at or before f" oracle
/// over distinct tokens, verifying that it is a total preorder.
pub(crate) fn orders_from_le(
    n: u32,
    d: u32,
    le: &dyn Fn(u32, u32, u32) -> bool,
) -> Result<Vec<EndpointOrder>, SolveError> {
    let t = 2 * n;
    let mut orders = Vec::with_capacity(d as usize);
    for dim in 0..d {
        // A token's key is the number of tokens strictly before it; equal
        // keys mean the same equivalence class.
        let mut keys: Vec<u32> = Vec::with_capacity(t as usize);
        for e in 0..t {
            let mut key = 0;
            for f in 0..t {
                if f != e && le(dim, f, e) && !le(dim, e, f) {
                    key += 1;
                }
            }
            keys.push(key);
        }
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let ranks: Vec<u32> = keys
            .iter()
            .map(|k| sorted.binary_search(k).unwrap() as u32)
            .collect();
        // The relation must itself be a total preorder; any totality or
        // transitivity gap shows up as a rank/atom mismatch here.
        for e in 0..t {
            for f in 0..t {
                if e != f && le(dim, e, f) != (ranks[e as usize] <= ranks[f as usize]) {
                    return Err(SolveError::BadModel(format!(
                        "dimension {}: atoms do not form a total preorder",
                        dim + 1
                    )));
                }
            }
        }
        orders.push(EndpointOrder::new(ranks)?);
    }
    Ok(orders)
}

pub(crate) fn decide(
    g: &Graph,
    d: u32,
    cons: &[SideConstraint],
    budget: &Budget,
    opts: &mut SolveOptions,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let deadline = budget.wall.map(|w| start + w);
    let enc = match EndpointEncoding::build(
        g,
        d,
        cons,
        &opts.lex_chains,
        opts.oriented_crossing,
        deadline,
    ) {
        Ok(enc) => enc,
        Err(SolveError::Unsupported(msg)) if msg == "budget" => {
            let stats = SolveStats { wall: start.elapsed(), ..SolveStats::default() };
            return Ok(SolveReport { outcome: SolveOutcome::BudgetExhausted, stats });
        }
        Err(e) => return Err(e),
    };
    let mut stats = SolveStats {
        variables: enc.num_vars as u64,
        clauses: enc.clauses.len() as u64,
        ..SolveStats::default()
    };

    let mut solver = Solver::new();
    solver.new_vars(enc.num_vars as usize);
    if let Some(seed) = opts.seed {
        solver.seed_order(seed);
    }
    if let Some(cb) = opts.progress.take() {
        let mut cb = cb;
        let base = stats.clone();
        solver.progress = Some(Box::new(move |s: &super::cdcl::SearchStats| {
            let mut snap = base.clone();
            snap.absorb(s);
            snap.wall = s.wall;
            cb(&snap);
        }));
    }
    let mut ok = true;
    for c in &enc.clauses {
        ok &= solver.add_clause(c);
        if !ok {
            break;
        }
    }
    if !ok {
        stats.wall = start.elapsed();
        return Ok(SolveReport { outcome: SolveOutcome::Infeasible, stats });
    }
    let result = solver.solve(&budget.limits_from(start));
    stats.absorb(&solver.stats);
    stats.wall = start.elapsed();
    let outcome = match result {
        SatResult::Unsat => SolveOutcome::Infeasible,
        SatResult::Unknown => SolveOutcome::BudgetExhausted,
        SatResult::Sat => {
            let orders = enc.decode(&|v| solver.model_value(v))?;
            let rep = realize(&orders, g.n())?;
            SolveOutcome::Feasible(certify(g, cons, rep)?)
        }
    };
    Ok(SolveReport { outcome, stats })
}
