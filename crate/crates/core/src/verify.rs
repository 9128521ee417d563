//! Lemma-level checkers: each reduces one structural claim about 2-D box
//! representations of a gadget to solver infeasibility, or to a
//! high-volume sampled geometric identity with an exact grid oracle.
//!
//! Hard rule: a budget cut-off yields `Undecided`, never `Verified`; a
//! `Refuted` verdict always carries a concrete representation that has been
//! re-verified geometrically.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::gadgets::{
    build_gadget, check_embedding, embedded_subgadget, GadgetError, GadgetName, GadgetSpec,
    Side, SubgadgetRef,
};
use crate::geometry::{helly_witness, AxisBox, BoxRepresentation, Interval};
use crate::graph::{Graph, Vertex};
use crate::solver::{
    decide_box_le_opt, Budget, Engine, ProgressFn, SideConstraint, SolveError, SolveOptions,
    SolveOutcome,
    SolveStats,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    Pendant,
    Helly,
    Difference,
    Projection,
    Corner,
    Cross,
    Main,
}

pub const ALL_LEMMAS: [LemmaId; 7] = [
    LemmaId::Pendant,
    LemmaId::Helly,
    LemmaId::Difference,
    LemmaId::Projection,
    LemmaId::Corner,
    LemmaId::Cross,
    LemmaId::Main,
];

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LemmaId::Pendant => "pendant",
            LemmaId::Helly => "helly",
            LemmaId::Difference => "difference",
            LemmaId::Projection => "projection",
            LemmaId::Corner => "corner",
            LemmaId::Cross => "cross",
            LemmaId::Main => "main",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LemmaId {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        match s.to_ascii_lowercase().as_str() {
            "pendant" => Ok(LemmaId::Pendant),
            "helly" => Ok(LemmaId::Helly),
            "difference" => Ok(LemmaId::Difference),
            "projection" => Ok(LemmaId::Projection),
            "corner" => Ok(LemmaId::Corner),
            "cross" => Ok(LemmaId::Cross),
            "main" => Ok(LemmaId::Main),
            _ => Err(VerifyError::UnknownLemma(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown lemma {0:?}")]
    UnknownLemma(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("embedding {which} mismatches on labels {label_a:?}, {label_b:?}")]
    Embedding { which: String, label_a: String, label_b: String },
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Verified,
    /// Counterexample representation, geometrically re-checked.
    Refuted(Box<BoxRepresentation>),
    /// Search incomplete within the budget.
    Undecided(SolveStats),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

/// One solver query (or sampling pass) issued by a checker, for reporting.
#[derive(Debug, Clone)]
pub struct QueryRecord {
    pub graph: String,
    pub d: u32,
    pub engine: Engine,
    pub constraints: Vec<String>,
    pub outcome: String,
    pub stats: SolveStats,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub verdict: Verdict,
    pub queries: Vec<QueryRecord>,
}

const SAMPLES: u32 = 100_000;

/// Run one negated-lemma query: `Infeasible` supports the lemma, `Feasible`
/// refutes it with the (already certified) witness.
struct QueryPlan<'a> {
    graph_name: String,
    graph: Graph,
    cons: Vec<SideConstraint>,
    lex_chains: Vec<Vec<Vertex>>,
    oriented_crossing: bool,
    budget: &'a Budget,
}

fn run_queries(
    lemma: LemmaId,
    plans: Vec<QueryPlan<'_>>,
    progress: Option<ProgressFn>,
) -> Result<LemmaReport, VerifyError> {
    let mut queries = Vec::new();
    let mut undecided: Option<SolveStats> = None;
    let mut refuted: Option<Box<BoxRepresentation>> = None;
    let mut progress = progress;
    for plan in plans {
        let mut opts = SolveOptions {
            lex_chains: plan.lex_chains.clone(),
            oriented_crossing: plan.oriented_crossing,
            progress: progress.take(),
            ..SolveOptions::default()
        };
        let report = decide_box_le_opt(
            &plan.graph,
            2,
            &plan.cons,
            Engine::Endpoint,
            plan.budget,
            &mut opts,
        )?;
        let outcome_name = match &report.outcome {
            SolveOutcome::Feasible(_) => "feasible",
            SolveOutcome::Infeasible => "infeasible",
            SolveOutcome::BudgetExhausted => "budget-exhausted",
        };
        queries.push(QueryRecord {
            graph: plan.graph_name,
            d: 2,
            engine: Engine::Endpoint,
            constraints: plan.cons.iter().map(|c| c.to_string()).collect(),
            outcome: outcome_name.to_string(),
            stats: report.stats.clone(),
        });
        match report.outcome {
            SolveOutcome::Feasible(rep) => {
                refuted = Some(Box::new(rep));
                break;
            }
            SolveOutcome::Infeasible => {}
            SolveOutcome::BudgetExhausted => {
                undecided = Some(report.stats);
                break;
            }
        }
    }
    let verdict = if let Some(rep) = refuted {
        Verdict::Refuted(rep)
    } else if let Some(stats) = undecided {
        Verdict::Undecided(stats)
    } else {
        Verdict::Verified
    };
    Ok(LemmaReport { lemma, verdict, queries })
}

fn gadget(name: GadgetName, k: u32) -> Result<Graph, VerifyError> {
    Ok(build_gadget(GadgetSpec::new(name, k)?)?)
}

fn v(g: &Graph, name: &str) -> Result<Vertex, VerifyError> {
    g.label(name)
        .ok_or_else(|| VerifyError::Gadget(GadgetError::MissingLabel(name.to_string())))
}

fn fan_chain(g: &Graph, k: u32) -> Result<Vec<Vertex>, VerifyError> {
    (1..=k).map(|i| v(g, &format!("c{i}"))).collect()
}

fn random_interval(rng: &mut impl Rng) -> Interval {
    let a = rng.gen_range(0..=12i64);
    let b = rng.gen_range(0..=12i64);
    Interval::new(a.min(b), a.max(b)).unwrap()
}

fn random_box(rng: &mut impl Rng) -> AxisBox {
    AxisBox::new(vec![random_interval(rng), random_interval(rng)]).unwrap()
}

/// Exact oracle on the half-integer grid: does `c ∩ a` contain a point
/// outside `b`? Samples every grid point of the doubled-coordinate lattice
/// covering `c ∩ a`, which decides the real-point question because all box
/// endpoints are integers.
fn grid_diff_hits(c: &AxisBox, a: &AxisBox, b: &AxisBox) -> bool {
    let mut ranges = Vec::new();
    for i in 0..2 {
        match c.interval(i).intersection(a.interval(i)) {
            None => return false,
            Some(cap) => ranges.push((2 * cap.lo(), 2 * cap.hi())),
        }
    }
    for x2 in ranges[0].0..=ranges[0].1 {
        for y2 in ranges[1].0..=ranges[1].1 {
            let in_b = 2 * b.interval(0).lo() <= x2
                && x2 <= 2 * b.interval(0).hi()
                && 2 * b.interval(1).lo() <= y2
                && y2 <= 2 * b.interval(1).hi();
            if !in_b {
                return true;
            }
        }
    }
    false
}

fn sampled_record(graph: &str, outcome: &str, samples: u32) -> QueryRecord {
    QueryRecord {
        graph: graph.to_string(),
        d: 2,
        engine: Engine::Brute,
        constraints: vec![format!("sampled identity, {samples} cases")],
        outcome: outcome.to_string(),
        stats: SolveStats::default(),
    }
}

/// Sampled check that three pairwise-intersecting boxes always share a
/// point, and that the max-of-lower-ends witness lies in all three.
fn check_helly() -> Result<LemmaReport, VerifyError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x48454C4C59);
    let mut checked = 0;
    while checked < SAMPLES {
        let a = random_box(&mut rng);
        let b = random_box(&mut rng);
        let c = random_box(&mut rng);
        let w = helly_witness(&a, &b, &c).map_err(SolveError::Geometry)?;
        let pairwise = crate::geometry::boxes_intersect(&a, &b).unwrap()
            && crate::geometry::boxes_intersect(&a, &c).unwrap()
            && crate::geometry::boxes_intersect(&b, &c).unwrap();
        if !pairwise {
            continue;
        }
        checked += 1;
        let ok = match w {
            None => false,
            Some(p) => {
                a.contains_point(&p) && b.contains_point(&p) && c.contains_point(&p)
            }
        };
        if !ok {
            let rep = BoxRepresentation::new(vec![a, b, c]).map_err(SolveError::Geometry)?;
            return Ok(LemmaReport {
                lemma: LemmaId::Helly,
                verdict: Verdict::Refuted(Box::new(rep)),
                queries: vec![sampled_record("K3", "counterexample", checked)],
            });
        }
    }
    Ok(LemmaReport {
        lemma: LemmaId::Helly,
        verdict: Verdict::Verified,
        queries: vec![sampled_record("K3", "all-pass", SAMPLES)],
    })
}

/// Sampled equivalence (both directions) of the closed-form difference test
/// against the per-dimension disjunction and the exact grid oracle.
fn check_projection() -> Result<LemmaReport, VerifyError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x50524F4A);
    for i in 0..SAMPLES {
        let c = random_box(&mut rng);
        let a = random_box(&mut rng);
        let b = random_box(&mut rng);
        let closed = crate::geometry::box_diff_hits(&c, &a, &b).map_err(SolveError::Geometry)?;
        let per_dim = (0..2).all(|i| c.interval(i).overlaps(a.interval(i)))
            && (0..2).any(|i| {
                !c.interval(i)
                    .intersection(a.interval(i))
                    .unwrap()
                    .subset_of(b.interval(i))
            });
        let grid = grid_diff_hits(&c, &a, &b);
        if closed != grid || per_dim != grid {
            let rep =
                BoxRepresentation::new(vec![c, a, b]).map_err(SolveError::Geometry)?;
            return Ok(LemmaReport {
                lemma: LemmaId::Projection,
                verdict: Verdict::Refuted(Box::new(rep)),
                queries: vec![sampled_record("triple", "counterexample", i + 1)],
            });
        }
    }
    Ok(LemmaReport {
        lemma: LemmaId::Projection,
        verdict: Verdict::Verified,
        queries: vec![sampled_record("triple", "all-pass", SAMPLES)],
    })
}

/// Check one lemma. `Verified` means every negated-lemma query came back
/// `Infeasible` (or every sample passed); any budget cut-off yields
/// `Undecided` with the statistics of the interrupted query.
pub fn check_lemma(id: LemmaId, budget: &Budget) -> Result<LemmaReport, VerifyError> {
    check_lemma_with_progress(id, budget, None)
}

pub fn check_lemma_with_progress(
    id: LemmaId,
    budget: &Budget,
    progress: Option<ProgressFn>,
) -> Result<LemmaReport, VerifyError> {
    match id {
        LemmaId::Helly => check_helly(),
        LemmaId::Projection => check_projection(),
        LemmaId::Pendant => {
            let g = gadget(GadgetName::L1, 1)?;
            let (c, a, b) = (v(&g, "c")?, v(&g, "a")?, v(&g, "b")?);
            run_queries(
                id,
                vec![QueryPlan {
                    graph_name: "L1".into(),
                    graph: g,
                    cons: vec![SideConstraint::RequireBoxInUnion { c, a, b }],
                    lex_chains: vec![],
                    oriented_crossing: false,
                    budget,
                }],
                progress,
            )
        }
        LemmaId::Difference => {
            let g = gadget(GadgetName::L2, 1)?;
            let (c, a, b) = (v(&g, "c")?, v(&g, "a")?, v(&g, "b")?);
            let plan = |cons| QueryPlan {
                graph_name: "L2".into(),
                graph: g.clone(),
                cons,
                lex_chains: vec![],
                oriented_crossing: false,
                budget,
            };
            run_queries(
                id,
                vec![
                    plan(vec![SideConstraint::RequireIntersectionContained { c, a, b }]),
                    plan(vec![SideConstraint::RequireIntersectionContained { c, a: b, b: a }]),
                ],
                progress,
            )
        }
        LemmaId::Corner => {
            let g = gadget(GadgetName::L2, 1)?;
            let (c, a, b) = (v(&g, "c")?, v(&g, "a")?, v(&g, "b")?);
            run_queries(
                id,
                vec![QueryPlan {
                    graph_name: "L2".into(),
                    graph: g,
                    cons: vec![
                        SideConstraint::ForbidProjectionInCap { dim: 1, c, a, b },
                        SideConstraint::ForbidProjectionInCap { dim: 2, c, a, b },
                        SideConstraint::ForbidCornerMembership { c, a, b },
                    ],
                    lex_chains: vec![],
                    oriented_crossing: false,
                    budget,
                }],
                progress,
            )
        }
        LemmaId::Cross => {
            let g = gadget(GadgetName::L3, 5)?;
            let (a, b) = (v(&g, "a")?, v(&g, "b")?);
            // Symmetry breaking, both admissible:
            // - every permutation of the fan blocks (c_i, x_i, y_i) is a
            //   graph automorphism fixing a and b, so the c_i left endpoints
            //   may be ordered by index;
            // - swapping the two dimensions maps one crossing orientation
            //   of (a, b) onto the other while the rest of the encoding is
            //   dimension-symmetric, so one orientation suffices. Fan
            //   permutations can restore the lex chain afterwards because
            //   they commute with the dimension swap.
            let chain = fan_chain(&g, 5)?;
            run_queries(
                id,
                vec![QueryPlan {
                    graph_name: "L3(5)".into(),
                    graph: g,
                    cons: vec![SideConstraint::RequireCrossing(a, b)],
                    lex_chains: vec![chain],
                    oriented_crossing: true,
                    budget,
                }],
                progress,
            )
        }
        LemmaId::Main => {
            let g = gadget(GadgetName::L4, 5)?;
            let (a, b) = (v(&g, "a")?, v(&g, "b")?);
            let mut cons = Vec::new();
            for i in 1..=5 {
                let ci = v(&g, &format!("c{i}"))?;
                cons.push(SideConstraint::ForbidCrossing(a, ci));
                cons.push(SideConstraint::ForbidCrossing(b, ci));
            }
            // Fan-block permutations (c_i, x_i, y_i, z_i) are automorphisms
            // fixing a and b and permute the constraint set onto itself, so
            // ordering the c_i left endpoints is admissible.
            let chain = fan_chain(&g, 5)?;
            run_queries(
                id,
                vec![QueryPlan {
                    graph_name: "L4(5)".into(),
                    graph: g,
                    cons,
                    lex_chains: vec![chain],
                    oriented_crossing: false,
                    budget,
                }],
                progress,
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub k: u32,
    /// Human-readable names of the embeddings, all verified.
    pub embeddings: Vec<String>,
}

/// Verify the construction's decomposition: the host graph built at fan
/// width `k` contains one induced copy of L4 and 2k induced copies of L3,
/// each checked label-pair by label-pair.
pub fn check_theorem_decomposition(k: u32) -> Result<DecompositionReport, VerifyError> {
    let host = gadget(GadgetName::G, k)?;
    let l4 = gadget(GadgetName::L4, k)?;
    let l3 = gadget(GadgetName::L3, k)?;
    let mut embeddings = Vec::new();
    let mut run = |name: String, pattern: &Graph, which: SubgadgetRef| -> Result<(), VerifyError> {
        let emb = embedded_subgadget(&host, k, which)?;
        check_embedding(&host, pattern, &emb).map_err(|(la, lb)| VerifyError::Embedding {
            which: name.clone(),
            label_a: la,
            label_b: lb,
        })?;
        embeddings.push(name);
        Ok(())
    };
    run("L4".into(), &l4, SubgadgetRef::L4)?;
    for i in 1..=k {
        run(format!("L3@fan{i}/A"), &l3, SubgadgetRef::L3At { i, side: Side::A })?;
        run(format!("L3@fan{i}/B"), &l3, SubgadgetRef::L3At { i, side: Side::B })?;
    }
    Ok(DecompositionReport { k, embeddings })
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub verdict: Verdict,
    pub query: QueryRecord,
}

/// Decide whether the full counterexample graph at fan width `k` fits in
/// two dimensions. `Infeasible` establishes the lower bound of three;
/// expect `Undecided` at modest budgets.
pub fn check_theorem_full_at(
    k: u32,
    budget: &Budget,
    progress: Option<ProgressFn>,
) -> Result<TheoremReport, VerifyError> {
    let g = gadget(GadgetName::G, k)?;
    let mut opts = SolveOptions { progress, ..SolveOptions::default() };
    let report = decide_box_le_opt(&g, 2, &[], Engine::BeforeCegar, budget, &mut opts)?;
    let (verdict, outcome) = match report.outcome {
        SolveOutcome::Infeasible => (Verdict::Verified, "infeasible"),
        SolveOutcome::Feasible(rep) => (Verdict::Refuted(Box::new(rep)), "feasible"),
        SolveOutcome::BudgetExhausted => {
            (Verdict::Undecided(report.stats.clone()), "budget-exhausted")
        }
    };
    Ok(TheoremReport {
        verdict,
        query: QueryRecord {
            graph: format!("G({k})"),
            d: 2,
            engine: Engine::BeforeCegar,
            constraints: vec![],
            outcome: outcome.to_string(),
            stats: report.stats,
        },
    })
}

pub fn check_theorem_full(
    budget: &Budget,
    progress: Option<ProgressFn>,
) -> Result<TheoremReport, VerifyError> {
    check_theorem_full_at(5, budget, progress)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_counts() {
        for k in [1, 3, 5] {
            let report = check_theorem_decomposition(k).unwrap();
            assert_eq!(report.embeddings.len(), 1 + 2 * k as usize);
        }
    }

    #[test]
    fn sampled_lemmas_verify() {
        assert!(check_lemma(LemmaId::Helly, &Budget::unlimited()).unwrap().verdict.is_verified());
        assert!(
            check_lemma(LemmaId::Projection, &Budget::unlimited())
                .unwrap()
                .verdict
                .is_verified()
        );
    }

    #[test]
    fn pendant_lemma_verifies() {
        let report = check_lemma(LemmaId::Pendant, &Budget::wall_secs(60)).unwrap();
        assert!(report.verdict.is_verified(), "verdict: {:?}", report.verdict);
    }

    #[test]
    fn tiny_budget_is_undecided_not_verified() {
        let tight = Budget { conflicts: Some(1), ..Budget::default() };
        let report = check_lemma(LemmaId::Main, &tight).unwrap();
        assert!(matches!(report.verdict, Verdict::Undecided(_)));
    }
}
