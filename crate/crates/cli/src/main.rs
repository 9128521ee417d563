//! Command-line surface for the boxicity toolkit.
//!
//! Exit codes: 0 success / Feasible / Verified, 1 the query was answered
//! "no" (Infeasible, Refuted), 2 usage error, 3 budget exhausted.

mod render;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use boxkit_core::gadgets::{build_gadget, GadgetName, GadgetSpec};
use boxkit_core::geometry::{parse_representation, serialize_representation};
use boxkit_core::graph::{parse_graph, serialize_graph, Graph};
use boxkit_core::solver::{
    decide_box_le_opt, decide_portfolio, export_cnf, import_model,
    BoxicityOutcome, Budget, CnfDocument, Engine, SolveOptions, SolveOutcome, SolveStats,
};
use boxkit_core::verify::{
    check_lemma, check_theorem_decomposition, check_theorem_full_at, LemmaId, LemmaReport,
    QueryRecord, Verdict, ALL_LEMMAS,
};

const EXIT_NO: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(name = "boxkit", version, about = "Exact boxicity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArg {
    /// Graph file in the text format; reads standard input when omitted.
    input: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget: Option<u64>,
    /// Conflict budget for the search.
    #[arg(long)]
    conflicts: Option<u64>,
}

impl BudgetArgs {
    fn to_budget(&self) -> Budget {
        Budget {
            wall: self.budget.map(Duration::from_secs),
            conflicts: self.conflicts,
            memory_literals: None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a gadget graph in the text format.
    Gadget {
        /// Gadget name: L1, L2, L3, L4 or G.
        name: String,
        /// Fan width.
        #[arg(long, default_value_t = 5)]
        k: u32,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compute exact boxicity up to a bound.
    Boxicity {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 3)]
        max_d: u32,
        /// endpoint, before-cegar, brute or portfolio.
        #[arg(long, default_value = "endpoint")]
        engine: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
        /// Write the witness representation of the final dimension here.
        #[arg(long)]
        rep_out: Option<PathBuf>,
    },
    /// Check one lemma by refuting its negation.
    VerifyLemma {
        /// pendant, helly, difference, projection, corner, cross or main.
        id: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check the construction's decomposition, the lemma suite, or the full
    /// two-dimensional refutation.
    VerifyTheorem {
        #[arg(long, default_value_t = 5)]
        k: u32,
        /// Also run all seven lemma checks.
        #[arg(long)]
        lemmas: bool,
        /// Run the full-graph d=2 query (long; prints checkpoints).
        #[arg(long)]
        full: bool,
        /// Parallel lemma checks.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Export the CNF encoding of a decision query.
    ExportCnf {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// endpoint or before-cegar.
        #[arg(long, default_value = "endpoint")]
        engine: String,
        /// Clause cap for eager export.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decode an external SAT model against an exported CNF.
    ImportModel {
        #[command(flatten)]
        input: InputArg,
        /// The exported CNF file (with its variable map comments).
        #[arg(long)]
        cnf: PathBuf,
        /// Model file (DIMACS model line); standard input when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Report structural class memberships of a graph.
    Recognize {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        json: bool,
    },
    /// Render a representation (d <= 2) as SVG.
    Render {
        #[command(flatten)]
        input: InputArg,
        /// Representation file in the text format.
        #[arg(long)]
        rep: PathBuf,
        /// Pixels per coordinate unit.
        #[arg(long, default_value_t = 40)]
        unit: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading standard input")?;
            Ok(buf)
        }
    }
}

fn read_graph(path: &Option<PathBuf>) -> Result<Graph> {
    Ok(parse_graph(&read_input(path)?)?)
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn default_seed(explicit: Option<u64>) -> Option<u64> {
    explicit.or_else(|| {
        std::env::var("BOXKIT_SEED").ok().and_then(|s| s.parse().ok())
    })
}

fn parse_engine(s: &str) -> Result<Engine> {
    s.parse::<Engine>().map_err(|e| anyhow::anyhow!("{e}"))
}

#[derive(serde::Serialize)]
struct JsonStats {
    decisions: u64,
    conflicts: u64,
    propagations: u64,
    restarts: u64,
    learned: u64,
    cegar_rounds: u64,
    variables: u64,
    clauses: u64,
    wall_ms: u128,
}

impl From<&SolveStats> for JsonStats {
    fn from(s: &SolveStats) -> Self {
        JsonStats {
            decisions: s.decisions,
            conflicts: s.conflicts,
            propagations: s.propagations,
            restarts: s.restarts,
            learned: s.learned,
            cegar_rounds: s.cegar_rounds,
            variables: s.variables,
            clauses: s.clauses,
            wall_ms: s.wall.as_millis(),
        }
    }
}

#[derive(serde::Serialize)]
struct JsonQuery {
    graph: String,
    d: u32,
    engine: String,
    constraints: Vec<String>,
    outcome: String,
    stats: JsonStats,
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Endpoint => "endpoint",
        Engine::BeforeCegar => "before-cegar",
        Engine::Brute => "brute",
    }
}

impl From<&QueryRecord> for JsonQuery {
    fn from(q: &QueryRecord) -> Self {
        JsonQuery {
            graph: q.graph.clone(),
            d: q.d,
            engine: engine_name(q.engine).to_string(),
            constraints: q.constraints.clone(),
            outcome: q.outcome.clone(),
            stats: (&q.stats).into(),
        }
    }
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Verified => "verified",
        Verdict::Refuted(_) => "refuted",
        Verdict::Undecided(_) => "undecided",
    }
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v {
        Verdict::Verified => 0,
        Verdict::Refuted(_) => EXIT_NO,
        Verdict::Undecided(_) => EXIT_BUDGET,
    }
}

fn print_lemma_report(report: &LemmaReport, json: bool) -> Result<()> {
    if json {
        #[derive(serde::Serialize)]
        struct Out {
            lemma: String,
            verdict: String,
            counterexample: Option<String>,
            queries: Vec<JsonQuery>,
            stats: Option<JsonStats>,
        }
        let out = Out {
            lemma: report.lemma.to_string(),
            verdict: verdict_name(&report.verdict).to_string(),
            counterexample: match &report.verdict {
                Verdict::Refuted(rep) => Some(serialize_representation(rep)),
                _ => None,
            },
            queries: report.queries.iter().map(Into::into).collect(),
            stats: match &report.verdict {
                Verdict::Undecided(s) => Some(s.into()),
                _ => None,
            },
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("lemma {}: {}", report.lemma, verdict_name(&report.verdict));
        for q in &report.queries {
            println!(
                "  query {} d={} [{}] -> {} ({} conflicts, {:.1}s)",
                q.graph,
                q.d,
                q.constraints.join(", "),
                q.outcome,
                q.stats.conflicts,
                q.stats.wall.as_secs_f64()
            );
        }
        if let Verdict::Refuted(rep) = &report.verdict {
            println!("counterexample representation:");
            print!("{}", serialize_representation(rep));
        }
    }
    Ok(())
}

fn checkpoint_printer(tag: &'static str) -> Box<dyn FnMut(&SolveStats) + Send> {
    Box::new(move |s: &SolveStats| {
        eprintln!(
            "[{tag}] checkpoint: conflicts={} decisions={} learned={} cegar_rounds={} wall={:.0}s",
            s.conflicts,
            s.decisions,
            s.learned,
            s.cegar_rounds,
            s.wall.as_secs_f64()
        );
    })
}

fn cmd_boxicity(
    input: &InputArg,
    max_d: u32,
    engine: &str,
    budget: &Budget,
    seed: Option<u64>,
    json: bool,
    rep_out: &Option<PathBuf>,
) -> Result<i32> {
    let g = read_graph(&input.input)?;
    let (outcome, rep, stats) = if engine == "portfolio" {
        let mut answer = None;
        let mut stats = SolveStats::default();
        let mut rep = None;
        if g.is_complete() {
            answer = Some(BoxicityOutcome::Exact(0));
        } else {
            for d in 1..=max_d {
                let report = decide_portfolio(&g, d, budget).map_err(|e| anyhow::anyhow!("{e}"))?;
                stats = report.stats.clone();
                match report.outcome {
                    SolveOutcome::Feasible(r) => {
                        rep = Some(r);
                        answer = Some(BoxicityOutcome::Exact(d));
                        break;
                    }
                    SolveOutcome::Infeasible => continue,
                    SolveOutcome::BudgetExhausted => {
                        answer = Some(BoxicityOutcome::BudgetExhausted);
                        break;
                    }
                }
            }
            if answer.is_none() {
                answer = Some(BoxicityOutcome::ExceedsMax(max_d));
            }
        }
        (answer.unwrap(), rep, stats)
    } else {
        let engine = parse_engine(engine)?;
        let mut rep = None;
        let mut stats = SolveStats::default();
        let mut answer = None;
        if g.is_complete() {
            answer = Some(BoxicityOutcome::Exact(0));
        } else {
            for d in 1..=max_d {
                let mut opts = SolveOptions { seed: default_seed(seed), ..SolveOptions::default() };
                let report = decide_box_le_opt(&g, d, &[], engine, budget, &mut opts)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                stats = report.stats.clone();
                match report.outcome {
                    SolveOutcome::Feasible(r) => {
                        rep = Some(r);
                        answer = Some(BoxicityOutcome::Exact(d));
                        break;
                    }
                    SolveOutcome::Infeasible => continue,
                    SolveOutcome::BudgetExhausted => {
                        answer = Some(BoxicityOutcome::BudgetExhausted);
                        break;
                    }
                }
            }
            if answer.is_none() {
                answer = Some(BoxicityOutcome::ExceedsMax(max_d));
            }
        }
        (answer.unwrap(), rep, stats)
    };

    if let (Some(rep), Some(path)) = (&rep, rep_out) {
        fs::write(path, serialize_representation(rep))?;
    }
    let (text, code) = match &outcome {
        BoxicityOutcome::Exact(d) => (format!("{d}"), 0),
        BoxicityOutcome::ExceedsMax(d) => (format!("> {d}"), EXIT_NO),
        BoxicityOutcome::BudgetExhausted => ("undecided".to_string(), EXIT_BUDGET),
    };
    if json {
        #[derive(serde::Serialize)]
        struct Out {
            boxicity: Option<u32>,
            exceeds_max: Option<u32>,
            undecided: bool,
            representation: Option<String>,
            stats: JsonStats,
        }
        let out = Out {
            boxicity: match outcome {
                BoxicityOutcome::Exact(d) => Some(d),
                _ => None,
            },
            exceeds_max: match outcome {
                BoxicityOutcome::ExceedsMax(d) => Some(d),
                _ => None,
            },
            undecided: matches!(outcome, BoxicityOutcome::BudgetExhausted),
            representation: rep.as_ref().map(serialize_representation),
            stats: (&stats).into(),
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("{text}");
    }
    Ok(code)
}

fn cmd_verify_theorem(
    k: u32,
    lemmas: bool,
    full: bool,
    jobs: usize,
    budget: &Budget,
    json: bool,
) -> Result<i32> {
    let decomposition = check_theorem_decomposition(k).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut lemma_reports: Vec<LemmaReport> = Vec::new();
    if lemmas {
        let jobs = jobs.max(1);
        let ids: Vec<LemmaId> = ALL_LEMMAS.to_vec();
        let mut results: Vec<Option<LemmaReport>> = (0..ids.len()).map(|_| None).collect();
        // Run up to `jobs` checks at once; output stays ordered by lemma
        // index regardless of completion order.
        let mut next = 0;
        while next < ids.len() {
            let batch: Vec<(usize, LemmaId)> = (next..ids.len().min(next + jobs))
                .map(|i| (i, ids[i]))
                .collect();
            next += batch.len();
            let handles: Vec<_> = batch
                .into_iter()
                .map(|(i, id)| {
                    let budget = budget.clone();
                    std::thread::spawn(move || (i, check_lemma(id, &budget)))
                })
                .collect();
            for h in handles {
                let (i, res) = h.join().expect("lemma check thread panicked");
                results[i] = Some(res.map_err(|e| anyhow::anyhow!("{e}"))?);
            }
        }
        lemma_reports = results.into_iter().map(Option::unwrap).collect();
    }
    let full_report = if full {
        Some(
            check_theorem_full_at(k, budget, Some(checkpoint_printer("verify-theorem")))
                .map_err(|e| anyhow::anyhow!("{e}"))?,
        )
    } else {
        None
    };

    let mut code = 0;
    for r in &lemma_reports {
        code = code.max(verdict_exit(&r.verdict));
    }
    if let Some(f) = &full_report {
        // The full run is best-effort: Undecided does not fail the command,
        // Refuted does.
        if matches!(f.verdict, Verdict::Refuted(_)) {
            code = code.max(EXIT_NO);
        }
    }

    if json {
        #[derive(serde::Serialize)]
        struct Out {
            k: u32,
            embeddings: Vec<String>,
            lemmas: Vec<serde_json::Value>,
            full: Option<serde_json::Value>,
        }
        let lemmas_json = lemma_reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "lemma": r.lemma.to_string(),
                    "verdict": verdict_name(&r.verdict),
                    "queries": r.queries.iter().map(|q| serde_json::to_value(JsonQuery::from(q)).unwrap()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let full_json = full_report.as_ref().map(|f| {
            serde_json::json!({
                "verdict": verdict_name(&f.verdict),
                "query": serde_json::to_value(JsonQuery::from(&f.query)).unwrap(),
            })
        });
        let out = Out {
            k,
            embeddings: decomposition.embeddings.clone(),
            lemmas: lemmas_json,
            full: full_json,
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!(
            "decomposition at k={k}: {} embeddings verified",
            decomposition.embeddings.len()
        );
        for r in &lemma_reports {
            println!("lemma {}: {}", r.lemma, verdict_name(&r.verdict));
        }
        if let Some(f) = &full_report {
            println!(
                "full d=2 query on G({k}): {} ({} conflicts, {} cegar rounds, {:.0}s)",
                verdict_name(&f.verdict),
                f.query.stats.conflicts,
                f.query.stats.cegar_rounds,
                f.query.stats.wall.as_secs_f64()
            );
        }
    }
    Ok(code)
}

fn cmd_recognize(input: &InputArg, json: bool) -> Result<i32> {
    let g = read_graph(&input.input)?;
    let sp = g.is_series_parallel();
    let two_tree = g.is_2_tree();
    let edge_maximal_sp = g.m() == 2 * g.n() as usize - 3;
    // Interval recognition is a d=1 feasibility query; stay exact but bail
    // out to "undecided" on large instances instead of stalling.
    let interval = if g.n() <= 40 {
        let budget = Budget::wall_secs(30);
        match decide_box_le_opt(
            &g,
            1,
            &[],
            Engine::Endpoint,
            &budget,
            &mut SolveOptions::default(),
        ) {
            Ok(r) => match r.outcome {
                SolveOutcome::Feasible(_) => Some(true),
                SolveOutcome::Infeasible => Some(false),
                SolveOutcome::BudgetExhausted => None,
            },
            Err(e) => bail!("{e}"),
        }
    } else {
        None
    };
    if json {
        let out = serde_json::json!({
            "n": g.n(),
            "m": g.m(),
            "series_parallel": sp,
            "two_tree": two_tree,
            "edge_maximal_sp": edge_maximal_sp,
            "interval": interval,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("n = {}, m = {}", g.n(), g.m());
        println!("series-parallel: {}", if sp { "yes" } else { "no" });
        println!("2-tree: {}", if two_tree { "yes" } else { "no" });
        println!("m = 2n-3: {}", if edge_maximal_sp { "yes" } else { "no" });
        match interval {
            Some(true) => println!("interval: yes"),
            Some(false) => println!("interval: no"),
            None => println!("interval: undecided"),
        }
    }
    Ok(0)
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gadget { name, k, out } => {
            let name: GadgetName = name.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
            let spec = GadgetSpec::new(name, k).map_err(|e| anyhow::anyhow!("{e}"))?;
            let g = build_gadget(spec).map_err(|e| anyhow::anyhow!("{e}"))?;
            write_output(&out, &serialize_graph(&g))?;
            Ok(0)
        }
        Command::Boxicity { input, max_d, engine, budget, seed, json, rep_out } => {
            cmd_boxicity(&input, max_d, &engine, &budget.to_budget(), seed, json, &rep_out)
        }
        Command::VerifyLemma { id, budget, json } => {
            let id: LemmaId = id.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
            let report =
                check_lemma(id, &budget.to_budget()).map_err(|e| anyhow::anyhow!("{e}"))?;
            print_lemma_report(&report, json)?;
            Ok(verdict_exit(&report.verdict))
        }
        Command::VerifyTheorem { k, lemmas, full, jobs, budget, json } => {
            cmd_verify_theorem(k, lemmas, full, jobs, &budget.to_budget(), json)
        }
        Command::ExportCnf { input, d, engine, cap, out } => {
            let g = read_graph(&input.input)?;
            let engine = parse_engine(&engine)?;
            let doc = export_cnf(&g, d, &[], engine, cap).map_err(|e| anyhow::anyhow!("{e}"))?;
            write_output(&out, &doc.to_dimacs())?;
            Ok(0)
        }
        Command::ImportModel { input, cnf, model } => {
            let g = read_graph(&input.input)?;
            let doc_text = fs::read_to_string(&cnf)
                .with_context(|| format!("reading {}", cnf.display()))?;
            let doc = CnfDocument::parse(&doc_text).map_err(|e| anyhow::anyhow!("{e}"))?;
            let model_text = read_input(&model)?;
            let rep =
                import_model(&g, &doc, &model_text).map_err(|e| anyhow::anyhow!("{e}"))?;
            print!("{}", serialize_representation(&rep));
            Ok(0)
        }
        Command::Recognize { input, json } => cmd_recognize(&input, json),
        Command::Render { input, rep, unit, out } => {
            let g = read_graph(&input.input)?;
            let rep_text = fs::read_to_string(&rep)
                .with_context(|| format!("reading {}", rep.display()))?;
            let rep = parse_representation(&rep_text)?;
            let svg = render::render_svg(&g, &rep, unit)?;
            write_output(&out, &svg)?;
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
