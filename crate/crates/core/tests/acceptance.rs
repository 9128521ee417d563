//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Run with `--nocapture` to see the lines for passing
//! criteria as well.

use rand::{Rng, SeedableRng};

use boxkit_core::gadgets::{build_gadget, GadgetName, GadgetSpec};
use boxkit_core::geometry::verify_representation;
use boxkit_core::graph::Graph;
use boxkit_core::solver::cdcl::{Limits, Lit, SatResult, Solver};
use boxkit_core::solver::{
    compute_boxicity, constraint_satisfied, decide_box_le, export_cnf, import_model,
    BoxicityOutcome, Budget, Engine, SideConstraint, SolveOutcome,
};
use boxkit_core::verify::{
    check_lemma, check_theorem_decomposition, check_theorem_full, LemmaId, Verdict,
};

fn gadget(name: GadgetName, k: u32) -> Graph {
    build_gadget(GadgetSpec::new(name, k).unwrap()).unwrap()
}

fn pass(n: u32, msg: &str) {
    println!("criterion {n}: PASS - {msg}");
}

#[test]
fn acceptance_1_gadget_fidelity() {
    let expect = [
        (GadgetName::L1, 1, 4, 4),
        (GadgetName::L2, 1, 5, 7),
        (GadgetName::L3, 5, 17, 31),
        (GadgetName::L4, 5, 22, 41),
        (GadgetName::G, 5, 157, 311),
    ];
    for (name, k, n, m) in expect {
        let g = gadget(name, k);
        assert_eq!((g.n(), g.m()), (n, m), "{name:?} size mismatch");
    }
    let g = gadget(GadgetName::G, 5);
    assert!(g.is_series_parallel());
    assert!(g.is_2_tree());
    assert_eq!(g.m() as u64, 2 * g.n() as u64 - 3);
    pass(1, "gadget sizes exact; host graph is a 2-tree with m = 2n - 3");
}

#[test]
fn acceptance_2_embeddings() {
    let report = check_theorem_decomposition(5).unwrap();
    assert_eq!(report.embeddings.len(), 11, "expected 1 + 2*5 embeddings");
    pass(2, "all 11 subgadget embeddings verified by label bijection");
}

#[test]
fn acceptance_3_oracle_equivalence() {
    let budget = Budget::wall_secs(60);
    let mut checked = 0u32;
    for n in [4u32, 5u32] {
        let pairs: Vec<(u32, u32)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let mut g = Graph::new(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v).unwrap();
                }
            }
            for d in 1..=2 {
                let mut answers = Vec::new();
                for engine in [Engine::Endpoint, Engine::BeforeCegar, Engine::Brute] {
                    let r = decide_box_le(&g, d, &[], engine, &budget).unwrap();
                    match r.outcome {
                        SolveOutcome::Feasible(_) => answers.push(true),
                        SolveOutcome::Infeasible => answers.push(false),
                        SolveOutcome::BudgetExhausted => {
                            panic!("budget exhausted on n={n} mask={mask}")
                        }
                    }
                }
                assert!(
                    answers.windows(2).all(|w| w[0] == w[1]),
                    "disagreement on n={n} mask={mask} d={d}: {answers:?}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, (64 + 1024) * 2);
    pass(3, "endpoint, before-cegar, and brute agree on all 1088 labeled graphs");
}

#[test]
fn acceptance_4_lemma_suite() {
    // Budgets are four times the per-lemma targets.
    let suite = [
        (LemmaId::Pendant, 4 * 60),
        (LemmaId::Difference, 4 * 300),
        (LemmaId::Corner, 4 * 600),
        (LemmaId::Cross, 4 * 1800),
        (LemmaId::Main, 4 * 7200),
    ];
    for (id, secs) in suite {
        let report = check_lemma(id, &Budget::wall_secs(secs)).unwrap();
        match &report.verdict {
            Verdict::Verified => {}
            Verdict::Refuted(rep) => panic!("{id} refuted by a {}-box model", rep.d()),
            Verdict::Undecided(stats) => {
                panic!("{id} undecided after {:?} within 4x budget", stats.wall)
            }
        }
    }
    pass(4, "pendant, difference, corner, cross, and main all Verified");
}

#[test]
fn acceptance_5_geometric_identities() {
    for id in [LemmaId::Helly, LemmaId::Projection] {
        let report = check_lemma(id, &Budget::unlimited()).unwrap();
        assert!(report.verdict.is_verified(), "{id} failed sampling");
    }
    pass(5, "Helly witness and projection identity hold on 10^5 samples each");
}

#[test]
fn acceptance_6_soundness_pipeline() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x534F554E44);
    let budget = Budget::wall_secs(120);
    let mut feasible = 0u32;
    for i in 0..10_000u32 {
        let n = rng.gen_range(2..=12u32);
        let density = rng.gen_range(0.2..0.8);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let d = rng.gen_range(1..=2u32);
        // A quarter of the planar endpoint queries carry a side constraint.
        let mut cons = Vec::new();
        let engine = if i % 2 == 0 { Engine::Endpoint } else { Engine::BeforeCegar };
        if engine == Engine::Endpoint && d == 2 && n >= 3 && i % 4 == 0 {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            while v == u {
                v = rng.gen_range(0..n);
            }
            cons.push(if i % 8 == 0 {
                SideConstraint::RequireCrossing(u, v)
            } else {
                SideConstraint::ForbidCrossing(u, v)
            });
        }
        let r = decide_box_le(&g, d, &cons, engine, &budget).unwrap();
        if let SolveOutcome::Feasible(rep) = &r.outcome {
            assert_eq!(verify_representation(&g, rep).unwrap(), None, "instance {i}");
            for con in &cons {
                assert!(constraint_satisfied(rep, con).unwrap(), "instance {i}: {con}");
            }
            feasible += 1;
        }
    }
    pass(6, &format!("10^4 random solves sound; {feasible} feasible, all re-verified"));
}

#[test]
fn acceptance_7_known_values() {
    let budget = Budget::wall_secs(60);
    let exact = |g: &Graph, engine: Engine| -> u32 {
        match compute_boxicity(g, 3, engine, &budget).unwrap().0 {
            BoxicityOutcome::Exact(d) => d,
            other => panic!("expected exact boxicity, got {other:?}"),
        }
    };
    for n in 1..=6 {
        assert_eq!(exact(&Graph::complete(n), Engine::Endpoint), 0, "K_{n}");
    }
    // P2 is complete, so the zero-dimension convention applies to it.
    assert_eq!(exact(&Graph::path(2), Engine::Endpoint), 0, "P_2");
    for n in 3..=7 {
        assert_eq!(exact(&Graph::path(n), Engine::Endpoint), 1, "P_{n}");
    }
    // Caterpillars: a spine path with pendant legs.
    let mut cat1 = Graph::path(3);
    for spine in 0..3 {
        cat1 = cat1.add_pendant(spine).unwrap().0;
    }
    assert_eq!(cat1.n(), 6);
    assert_eq!(exact(&cat1, Engine::Endpoint), 1, "caterpillar on 6 vertices");
    let cat2 = Graph::path(4).add_pendant(1).unwrap().0.add_pendant(2).unwrap().0;
    assert_eq!(cat2.n(), 6);
    assert_eq!(exact(&cat2, Engine::Endpoint), 1, "caterpillar on a P4 spine");
    assert_eq!(exact(&Graph::cycle(4), Engine::Endpoint), 2, "C4");
    // Spider with three legs of length two, decided by exhaustive search.
    let spider =
        Graph::from_edges(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
    assert_eq!(exact(&spider, Engine::Brute), 2, "S(2,2,2)");
    pass(7, "complete graphs 0, paths and caterpillars 1, C4 and spider 2");
}

#[test]
fn acceptance_8_full_counterexample_graph() {
    // The full run finishes well inside the hour-long allowance, so the
    // best-effort criterion is exercised for real: a Verified verdict
    // reproduces the lower bound of three on the 157-vertex graph.
    let report = check_theorem_full(&Budget::wall_secs(3600), None).unwrap();
    match &report.verdict {
        Verdict::Verified => {
            let s = &report.query.stats;
            pass(
                8,
                &format!(
                    "G(5) infeasible in the plane: boxicity 3 reproduced \
                     ({} conflicts, {} refinement rounds, {:?})",
                    s.conflicts, s.cegar_rounds, s.wall
                ),
            );
        }
        Verdict::Refuted(rep) => panic!("G(5) claimed planar-representable in d={}", rep.d()),
        Verdict::Undecided(stats) => {
            // Non-blocking by design: an honest Unknown after the full
            // budget is reported, not failed.
            pass(8, &format!("G(5) undecided after {:?} (non-blocking)", stats.wall));
        }
    }
}

#[test]
fn acceptance_9_cnf_round_trip() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x434E46);
    let budget = Budget::wall_secs(60);
    for i in 0..100u32 {
        let n = rng.gen_range(2..=8u32);
        let density = rng.gen_range(0.2..0.8);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let d = rng.gen_range(1..=2u32);
        let engine = if i % 2 == 0 { Engine::Endpoint } else { Engine::BeforeCegar };
        let doc = export_cnf(&g, d, &[], engine, None).unwrap();
        // The text form must survive a parse.
        let doc = boxkit_core::solver::CnfDocument::parse(&doc.to_dimacs()).unwrap();

        let mut sat = Solver::new();
        sat.new_vars(doc.num_vars as usize);
        let mut conflicting = false;
        for clause in &doc.clauses {
            if !sat.add_clause(clause) {
                conflicting = true;
                break;
            }
        }
        let result = if conflicting { SatResult::Unsat } else { sat.solve(&Limits::default()) };

        let internal = decide_box_le(&g, d, &[], engine, &budget).unwrap();
        match result {
            SatResult::Sat => {
                let mut assignment = String::from("v");
                for v in 0..doc.num_vars {
                    let lit = Lit::new(v, sat.model_value(v));
                    assignment.push_str(&format!(" {}", lit.to_dimacs()));
                }
                assignment.push_str(" 0");
                let rep = import_model(&g, &doc, &assignment).unwrap();
                assert_eq!(verify_representation(&g, &rep).unwrap(), None, "instance {i}");
                assert!(internal.outcome.is_feasible(), "instance {i}: external SAT, internal no");
            }
            SatResult::Unsat => {
                assert!(
                    internal.outcome.is_infeasible(),
                    "instance {i}: external UNSAT, internal disagrees"
                );
            }
            SatResult::Unknown => panic!("instance {i}: unlimited solve returned Unknown"),
        }
    }
    pass(9, "100 exported instances round-trip; SAT models verify, UNSAT answers agree");
}
