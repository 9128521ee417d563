//! Before-relation engine with lazy axiom generation.
//!
//! One atom per dimension and ordered non-adjacent vertex pair: "u's
//! interval ends strictly before v's begins". Pairs that share an edge can
//! never separate, so their atoms are constant false and get no variable.
//! Antisymmetry and the non-edge cover clauses are eager; the quadratic
//! family of interval-order exclusion axioms
//!
//! ```text
//! b(u1,v1) and b(u2,v2)  ->  b(u1,v2) or b(u2,v1)
//! ```
//!
//! is added only when a model violates one (CEGAR). A per-dimension
//! relation extends to real intervals exactly when the predecessor sets
//! `Pred(v) = {u : b(u,v)}` form a chain under inclusion, which is also a
//! linear-time certificate for extracting concrete coordinates.

use std::collections::HashSet;
use std::time::Instant;

use super::cdcl::{Lit, SatResult, Solver, Var};
use super::{
    certify, Budget, SolveError, SolveOptions, SolveOutcome, SolveReport, SolveStats,
};
use crate::geometry::{AxisBox, BoxRepresentation, Interval};
use crate::graph::{Graph, Vertex};

pub(crate) struct BeforeEncoding {
    pub n: u32,
    pub d: u32,
    /// Ordered non-adjacent distinct pairs, in enumeration order.
    pub pairs: Vec<(Vertex, Vertex)>,
    /// n*n lookup into `pairs`; `u32::MAX` marks edges and the diagonal.
    idx: Vec<u32>,
}

impl BeforeEncoding {
    pub fn build(g: &Graph, d: u32) -> Result<BeforeEncoding, SolveError> {
        let n = g.n();
        if n == 0 {
            return Err(SolveError::Unsupported("empty graph".into()));
        }
        let mut pairs = Vec::new();
        let mut idx = vec![u32::MAX; (n * n) as usize];
        for u in 0..n {
            for v in 0..n {
                if u != v && !g.has_edge(u.min(v), u.max(v)) {
                    idx[(u * n + v) as usize] = pairs.len() as u32;
                    pairs.push((u, v));
                }
            }
        }
        Ok(BeforeEncoding { n, d, pairs, idx })
    }

    pub fn num_vars(&self) -> u32 {
        self.d * self.pairs.len() as u32
    }

    /// Variable for "u before v in `dim`"; `None` when the atom is constant
    /// false (edge or diagonal).
    pub fn var(&self, dim: u32, u: Vertex, v: Vertex) -> Option<Var> {
        let i = self.idx[(u * self.n + v) as usize];
        if i == u32::MAX {
            None
        } else {
            Some(dim * self.pairs.len() as u32 + i)
        }
    }

    pub fn var_atom(&self, var: Var) -> (u32, Vertex, Vertex) {
        let p = self.pairs.len() as u32;
        let (u, v) = self.pairs[(var % p) as usize];
        (var / p, u, v)
    }

    pub fn base_clauses(&self, g: &Graph) -> Vec<Vec<Lit>> {
        let mut clauses = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if g.has_edge(u, v) {
                    continue;
                }
                for dim in 0..self.d {
                    clauses.push(vec![
                        Lit::neg(self.var(dim, u, v).unwrap()),
                        Lit::neg(self.var(dim, v, u).unwrap()),
                    ]);
                }
                let mut cover = Vec::with_capacity(2 * self.d as usize);
                for dim in 0..self.d {
                    cover.push(Lit::pos(self.var(dim, u, v).unwrap()));
                    cover.push(Lit::pos(self.var(dim, v, u).unwrap()));
                }
                clauses.push(cover);
            }
        }
        clauses
    }

    /// Exclusion axiom for two premise atoms of one dimension. Head
    /// literals whose atom is constant false are dropped; that only
    /// strengthens the clause toward a statement that is still valid for
    /// real intervals.
    fn axiom(&self, dim: u32, p1: (Vertex, Vertex), p2: (Vertex, Vertex)) -> Vec<Lit> {
        let mut cl = vec![
            Lit::neg(self.var(dim, p1.0, p1.1).unwrap()),
            Lit::neg(self.var(dim, p2.0, p2.1).unwrap()),
        ];
        if let Some(v) = self.var(dim, p1.0, p2.1) {
            cl.push(Lit::pos(v));
        }
        if let Some(v) = self.var(dim, p2.0, p1.1) {
            cl.push(Lit::pos(v));
        }
        cl
    }

    /// All exclusion axioms, eagerly. Pair order within an axiom is
    /// irrelevant and reversed-pair combinations collapse to antisymmetry,
    /// so both are skipped.
    fn eager_axioms(&self, sink: &mut dyn FnMut(Vec<Lit>)) {
        for dim in 0..self.d {
            for i in 0..self.pairs.len() {
                for j in i + 1..self.pairs.len() {
                    let (p1, p2) = (self.pairs[i], self.pairs[j]);
                    if p1.0 == p2.1 && p1.1 == p2.0 {
                        continue;
                    }
                    sink(self.axiom(dim, p1, p2));
                }
            }
        }
    }

    pub fn eager_clause_count(&self) -> u64 {
        let p = self.pairs.len() as u64;
        let unordered = p / 2;
        let base = u64::from(self.d) * unordered + unordered;
        base + u64::from(self.d) * (p * p.saturating_sub(1) / 2 - unordered)
    }

    pub fn eager_clauses(&self, g: &Graph) -> Vec<Vec<Lit>> {
        let mut out = self.base_clauses(g);
        self.eager_axioms(&mut |c| out.push(c));
        out
    }
}

/// Number of clauses a fully eager encoding would need; used to enforce the
/// export cap without materializing anything.
pub fn eager_before_clause_count(g: &Graph, d: u32) -> Result<u64, SolveError> {
    Ok(BeforeEncoding::build(g, d)?.eager_clause_count())
}

/// Predecessor sets as fixed-width bitsets.
struct Preds {
    words: usize,
    bits: Vec<u64>,
}

impl Preds {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Preds { words, bits: vec![0; words * n] }
    }

    fn set(&mut self, v: usize, u: usize) {
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn first_in_diff(a: &[u64], b: &[u64]) -> Option<usize> {
    for (w, (x, y)) in a.iter().zip(b).enumerate() {
        let diff = x & !y;
        if diff != 0 {
            return Some(w * 64 + diff.trailing_zeros() as usize);
        }
    }
    None
}

/// Build the relation's interval realization, assuming the chain condition
/// holds in this dimension.
fn realize_dimension(n: usize, preds: &Preds) -> Result<Vec<Interval>, SolveError> {
    let mut distinct: Vec<&[u64]> = Vec::new();
    'rows: for v in 0..n {
        let row = preds.row(v);
        if row.iter().all(|&w| w == 0) {
            continue;
        }
        for d in &distinct {
            if *d == row {
                continue 'rows;
            }
        }
        distinct.push(row);
    }
    distinct.sort_by_key(|r| r.iter().map(|w| w.count_ones() as usize).sum::<usize>());
    for w in distinct.windows(2) {
        if !subset(w[0], w[1]) {
            return Err(SolveError::Soundness(
                "predecessor sets are not a chain at realization time".into(),
            ));
        }
    }
    let k = distinct.len() as i64;
    let rank_of = |row: &[u64]| -> i64 {
        if row.iter().all(|&w| w == 0) {
            return 0;
        }
        1 + distinct.iter().position(|d| *d == row).unwrap() as i64
    };
    let mut intervals = Vec::with_capacity(n);
    for v in 0..n {
        let l = 2 * rank_of(preds.row(v));
        let mut t = k + 1;
        for (rank0, d) in distinct.iter().enumerate() {
            if d[v / 64] >> (v % 64) & 1 == 1 {
                t = rank0 as i64 + 1;
                break;
            }
        }
        let r = 2 * t - 1;
        if l > r {
            return Err(SolveError::Soundness("inverted interval in realization".into()));
        }
        intervals.push(Interval::new(l, r).unwrap());
    }
    Ok(intervals)
}

/// Realize a full before relation (already known to satisfy antisymmetry
/// and the exclusion axioms) as integer boxes. Used by the model importer.
pub(crate) fn realize_from(
    n: usize,
    d: u32,
    before: &dyn Fn(u32, usize, usize) -> bool,
) -> Result<BoxRepresentation, SolveError> {
    let mut per_dim = Vec::with_capacity(d as usize);
    for dim in 0..d {
        let mut preds = Preds::new(n);
        for v in 0..n {
            for u in 0..n {
                if u != v && before(dim, u, v) {
                    preds.set(v, u);
                }
            }
        }
        per_dim.push(realize_dimension(n, &preds)?);
    }
    let mut boxes = Vec::with_capacity(n);
    for v in 0..n {
        let ivs: Vec<Interval> = per_dim.iter().map(|dim_ivs| dim_ivs[v]).collect();
        boxes.push(AxisBox::new(ivs)?);
    }
    Ok(BoxRepresentation::new(boxes)?)
}

pub(crate) fn decide(
    g: &Graph,
    d: u32,
    budget: &Budget,
    opts: &mut SolveOptions,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let enc = BeforeEncoding::build(g, d)?;
    let base = enc.base_clauses(g);
    let mut stats = SolveStats {
        variables: enc.num_vars() as u64,
        clauses: base.len() as u64,
        ..SolveStats::default()
    };

    let mut solver = Solver::new();
    solver.new_vars(enc.num_vars() as usize);
    if let Some(seed) = opts.seed {
        solver.seed_order(seed);
    }
    if let Some(cb) = opts.progress.take() {
        let mut cb = cb;
        let base_stats = stats.clone();
        solver.progress = Some(Box::new(move |s: &super::cdcl::SearchStats| {
            let mut snap = base_stats.clone();
            snap.absorb(s);
            snap.wall = s.wall;
            cb(&snap);
        }));
    }
    let mut ok = true;
    for c in &base {
        ok &= solver.add_clause(c);
        if !ok {
            break;
        }
    }
    if !ok {
        stats.wall = start.elapsed();
        return Ok(SolveReport { outcome: SolveOutcome::Infeasible, stats });
    }

    let n = g.n() as usize;
    let mut added: HashSet<Vec<Lit>> = HashSet::new();
    let limits = budget.limits_from(start);
    loop {
        if let Some(deadline) = limits.deadline {
            if Instant::now() >= deadline {
                stats.absorb(&solver.stats);
                stats.wall = start.elapsed();
                return Ok(SolveReport { outcome: SolveOutcome::BudgetExhausted, stats });
            }
        }
        match solver.solve(&limits) {
            SatResult::Unsat => {
                stats.absorb(&solver.stats);
                stats.wall = start.elapsed();
                return Ok(SolveReport { outcome: SolveOutcome::Infeasible, stats });
            }
            SatResult::Unknown => {
                stats.absorb(&solver.stats);
                stats.wall = start.elapsed();
                return Ok(SolveReport { outcome: SolveOutcome::BudgetExhausted, stats });
            }
            SatResult::Sat => {}
        }

        // Extract predecessor sets per dimension from the model.
        let mut all_preds: Vec<Preds> = Vec::with_capacity(d as usize);
        for dim in 0..d {
            let mut preds = Preds::new(n);
            for &(u, v) in &enc.pairs {
                if solver.model_value(enc.var(dim, u, v).unwrap()) {
                    preds.set(v as usize, u as usize);
                }
            }
            all_preds.push(preds);
        }

        // Any incomparable predecessor-set pair is a violated axiom.
        let mut new_axioms: Vec<Vec<Lit>> = Vec::new();
        for (dim, preds) in all_preds.iter().enumerate() {
            for v1 in 0..n {
                for v2 in v1 + 1..n {
                    let (r1, r2) = (preds.row(v1), preds.row(v2));
                    if subset(r1, r2) || subset(r2, r1) {
                        continue;
                    }
                    let u1 = first_in_diff(r1, r2).unwrap();
                    let u2 = first_in_diff(r2, r1).unwrap();
                    let mut cl = enc.axiom(
                        dim as u32,
                        (u1 as Vertex, v1 as Vertex),
                        (u2 as Vertex, v2 as Vertex),
                    );
                    cl.sort_by_key(|l| (l.var(), l.is_pos()));
                    if added.insert(cl.clone()) {
                        new_axioms.push(cl);
                    }
                }
            }
        }

        if new_axioms.is_empty() {
            // Chain condition holds everywhere: realize and certify.
            let mut per_dim = Vec::with_capacity(d as usize);
            for preds in &all_preds {
                per_dim.push(realize_dimension(n, preds)?);
            }
            let mut boxes = Vec::with_capacity(n);
            for v in 0..n {
                let ivs: Vec<Interval> =
                    per_dim.iter().map(|dim_ivs| dim_ivs[v]).collect();
                boxes.push(AxisBox::new(ivs)?);
            }
            let rep = certify(g, &[], BoxRepresentation::new(boxes)?)?;
            stats.absorb(&solver.stats);
            stats.wall = start.elapsed();
            return Ok(SolveReport { outcome: SolveOutcome::Feasible(rep), stats });
        }

        stats.cegar_rounds += 1;
        stats.clauses += new_axioms.len() as u64;
        let mut ok = true;
        for c in &new_axioms {
            ok &= solver.add_clause(c);
            if !ok {
                break;
            }
        }
        if !ok {
            stats.absorb(&solver.stats);
            stats.wall = start.elapsed();
            return Ok(SolveReport { outcome: SolveOutcome::Infeasible, stats });
        }
    }
}
