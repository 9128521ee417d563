//! DIMACS CNF export and external-model import.
//!
//! Exported files carry a `c boxkit ...` header and one `c map ...` comment
//! per atom variable so that a model returned by any external SAT solver
//! can be decoded without out-of-band state. Imported models are treated as
//! untrusted: every clause is re-checked, the decoded orders are validated,
//! and the realized representation is verified against the graph.

use std::fmt::Write as _;

use super::before::BeforeEncoding;
use super::cdcl::Lit;
use super::endpoint::{orders_from_le, tok_l, tok_r, EndpointEncoding};
use super::{realize, Engine, SideConstraint, SolveError};
use crate::graph::Graph;

/// Default ceiling on exported clauses (the before engine's eager axiom
/// set is quadratic in the number of non-adjacent pairs).
pub const DEFAULT_CLAUSE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Atom {
    /// Token `e` sorts at or before token `f` in `dim` (all 0-based).
    Le { dim: u32, e: u32, f: u32 },
    /// Vertex `u` ends before vertex `v` begins in `dim`.
    Before { dim: u32, u: u32, v: u32 },
}

/// A CNF instance plus the variable map needed to decode its models.
#[derive(Debug)]
pub struct CnfDocument {
    pub engine: Engine,
    pub n: u32,
    pub d: u32,
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    /// Atom behind each variable; Tseitin auxiliaries are `None`.
    map: Vec<Option<Atom>>,
}

fn token_name(t: u32) -> String {
    if t.is_multiple_of(2) {
        format!("L{}", t / 2)
    } else {
        format!("R{}", t / 2)
    }
}

fn parse_token(s: &str) -> Option<u32> {
    let (kind, v) = s.split_at(1);
    let v: u32 = v.parse().ok()?;
    match kind {
        "L" => Some(tok_l(v)),
        "R" => Some(tok_r(v)),
        _ => None,
    }
}

impl CnfDocument {
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let engine = match self.engine {
            Engine::Endpoint => "endpoint",
            Engine::BeforeCegar => "before",
            Engine::Brute => unreachable!("brute engine has no CNF form"),
        };
        writeln!(out, "c boxkit engine {} n {} d {}", engine, self.n, self.d).unwrap();
        for (var0, atom) in self.map.iter().enumerate() {
            let Some(atom) = atom else { continue };
            match *atom {
                Atom::Le { dim, e, f } => writeln!(
                    out,
                    "c map {} le {} {} dim {}",
                    var0 + 1,
                    token_name(e),
                    token_name(f),
                    dim + 1
                )
                .unwrap(),
                Atom::Before { dim, u, v } => {
                    writeln!(out, "c map {} before {} {} dim {}", var0 + 1, u, v, dim + 1)
                        .unwrap()
                }
            }
        }
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for c in &self.clauses {
            for l in c {
                write!(out, "{} ", l.to_dimacs()).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<CnfDocument, SolveError> {
        let bad = |m: &str| SolveError::BadCnf(m.to_string());
        let mut engine = None;
        let mut n = 0u32;
        let mut d = 0u32;
        let mut header: Option<(u32, u64)> = None;
        let mut map_lines: Vec<(u32, Atom)> = Vec::new();
        let mut clauses: Vec<Vec<Lit>> = Vec::new();
        let mut current: Vec<Lit> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "c" => {
                    if fields.get(1) == Some(&"boxkit") {
                        if fields.len() != 8 || fields[2] != "engine" || fields[4] != "n" || fields[6] != "d" {
                            return Err(bad("malformed boxkit header comment"));
                        }
                        engine = Some(fields[3].parse::<Engine>()?);
                        n = fields[5].parse().map_err(|_| bad("bad n in header"))?;
                        d = fields[7].parse().map_err(|_| bad("bad d in header"))?;
                    } else if fields.get(1) == Some(&"map") {
                        if fields.len() != 8 || fields[6] != "dim" {
                            return Err(bad("malformed map comment"));
                        }
                        let var: u32 =
                            fields[2].parse().map_err(|_| bad("bad variable in map comment"))?;
                        let dim: u32 =
                            fields[7].parse().map_err(|_| bad("bad dim in map comment"))?;
                        if var == 0 || dim == 0 {
                            return Err(bad("map indices are 1-based"));
                        }
                        let atom = match fields[3] {
                            "le" => Atom::Le {
                                dim: dim - 1,
                                e: parse_token(fields[4])
                                    .ok_or_else(|| bad("bad token in map comment"))?,
                                f: parse_token(fields[5])
                                    .ok_or_else(|| bad("bad token in map comment"))?,
                            },
                            "before" => Atom::Before {
                                dim: dim - 1,
                                u: fields[4].parse().map_err(|_| bad("bad vertex in map"))?,
                                v: fields[5].parse().map_err(|_| bad("bad vertex in map"))?,
                            },
                            _ => return Err(bad("unknown atom kind in map comment")),
                        };
                        map_lines.push((var, atom));
                    }
                }
                "p" => {
                    if fields.len() != 4 || fields[1] != "cnf" {
                        return Err(bad("malformed p line"));
                    }
                    header = Some((
                        fields[2].parse().map_err(|_| bad("bad variable count"))?,
                        fields[3].parse().map_err(|_| bad("bad clause count"))?,
                    ));
                }
                _ => {
                    for tok in fields {
                        let x: i64 = tok.parse().map_err(|_| bad("bad literal"))?;
                        match Lit::from_dimacs(x) {
                            None => clauses.push(std::mem::take(&mut current)),
                            Some(l) => current.push(l),
                        }
                    }
                }
            }
        }
        if !current.is_empty() {
            return Err(bad("unterminated clause"));
        }
        let (num_vars, num_clauses) =
            header.ok_or_else(|| bad("missing p cnf header"))?;
        if clauses.len() as u64 != num_clauses {
            return Err(bad("clause count does not match header"));
        }
        let engine = engine.ok_or_else(|| bad("missing boxkit header comment"))?;
        if n == 0 || d == 0 {
            return Err(bad("header must give positive n and d"));
        }
        let mut map: Vec<Option<Atom>> = vec![None; num_vars as usize];
        for (var, atom) in map_lines {
            if var > num_vars {
                return Err(bad("map variable out of range"));
            }
            let slot = &mut map[var as usize - 1];
            if slot.is_some() {
                return Err(bad("variable mapped twice"));
            }
            *slot = Some(atom);
        }
        for c in &clauses {
            for l in c {
                if l.var() >= num_vars {
                    return Err(bad("literal out of range"));
                }
            }
        }
        Ok(CnfDocument { engine, n, d, num_vars, clauses, map })
    }
}

/// Number of clauses the endpoint encoding needs before side constraints,
/// computable without materializing anything.
fn endpoint_base_clause_count(g: &Graph, d: u32) -> u64 {
    let t = 2 * g.n() as u64;
    let m = g.m() as u64;
    let non_edges = t / 2 * (t / 2 - 1) / 2 - m;
    let per_dim = t * (t - 1) / 2 + t * (t - 1) * (t - 2) + t / 2 + 2 * m;
    u64::from(d) * per_dim + non_edges
}

/// Build the full CNF for a decision query. The before engine exports its
/// eager axiom set, which can be huge; `clause_cap` (default 10^8) guards
/// against runaway output.
pub fn export_cnf(
    g: &Graph,
    d: u32,
    cons: &[SideConstraint],
    engine: Engine,
    clause_cap: Option<u64>,
) -> Result<CnfDocument, SolveError> {
    let cap = clause_cap.unwrap_or(DEFAULT_CLAUSE_CAP);
    for con in cons {
        con.validate(g, d)?;
    }
    match engine {
        Engine::Brute => Err(SolveError::Unsupported(
            "brute engine has no CNF encoding to export".into(),
        )),
        Engine::Endpoint => {
            let needed = endpoint_base_clause_count(g, d);
            if needed > cap {
                return Err(SolveError::ClauseCapExceeded { needed, cap });
            }
            let enc = EndpointEncoding::build(g, d, cons, &[], false, None)?;
            let mut map = vec![None; enc.num_vars as usize];
            for var in 0..enc.num_atom_vars {
                let (dim, e, f) = enc.var_atom(var);
                map[var as usize] = Some(Atom::Le { dim, e, f });
            }
            Ok(CnfDocument {
                engine,
                n: g.n(),
                d,
                num_vars: enc.num_vars,
                clauses: enc.clauses,
                map,
            })
        }
        Engine::BeforeCegar => {
            if !cons.is_empty() {
                return Err(SolveError::Unsupported(
                    "before-cegar supports no side constraints".into(),
                ));
            }
            let enc = BeforeEncoding::build(g, d)?;
            let needed = enc.eager_clause_count();
            if needed > cap {
                return Err(SolveError::ClauseCapExceeded { needed, cap });
            }
            let clauses = enc.eager_clauses(g);
            let mut map = vec![None; enc.num_vars() as usize];
            for var in 0..enc.num_vars() {
                let (dim, u, v) = enc.var_atom(var);
                map[var as usize] = Some(Atom::Before { dim, u, v });
            }
            Ok(CnfDocument {
                engine,
                n: g.n(),
                d,
                num_vars: enc.num_vars(),
                clauses,
                map,
            })
        }
    }
}

/// Parse a DIMACS-convention model line: space-separated signed integers,
/// optionally "v"-prefixed, terminated by 0 or end of input.
fn parse_assignment(num_vars: u32, text: &str) -> Result<Vec<bool>, SolveError> {
    let mut value: Vec<Option<bool>> = vec![None; num_vars as usize];
    'outer: for tok in text.split_whitespace() {
        if tok == "v" || tok == "s" || tok == "SATISFIABLE" {
            continue;
        }
        let x: i64 = tok
            .parse()
            .map_err(|_| SolveError::BadModel(format!("bad model token {tok:?}")))?;
        if x == 0 {
            break 'outer;
        }
        let v = x.unsigned_abs() - 1;
        if v >= u64::from(num_vars) {
            return Err(SolveError::BadModel(format!("literal {x} out of range")));
        }
        let slot = &mut value[v as usize];
        if slot.is_some_and(|b| b != (x > 0)) {
            return Err(SolveError::BadModel(format!("contradictory literals for variable {}", v + 1)));
        }
        *slot = Some(x > 0);
    }
    value
        .into_iter()
        .enumerate()
        .map(|(v, b)| {
            b.ok_or_else(|| SolveError::BadModel(format!("variable {} unassigned", v + 1)))
        })
        .collect()
}

/// Decode an external model against an exported document: re-check every
/// clause, rebuild the orders, realize and verify against the graph. All
/// failure modes are reported, none trusted away.
pub fn import_model(
    g: &Graph,
    doc: &CnfDocument,
    assignment: &str,
) -> Result<crate::geometry::BoxRepresentation, SolveError> {
    if doc.n != g.n() {
        return Err(SolveError::BadModel(format!(
            "document is for n = {}, graph has n = {}",
            doc.n,
            g.n()
        )));
    }
    let model = parse_assignment(doc.num_vars, assignment)?;
    for c in &doc.clauses {
        if !c.iter().any(|l| model[l.var() as usize] == l.is_pos()) {
            return Err(SolveError::BadModel("model falsifies an exported clause".into()));
        }
    }
    let rep = match doc.engine {
        Engine::Endpoint => {
            let t = 2 * doc.n;
            let mut le = vec![None::<bool>; (doc.d * t * t) as usize];
            for (var0, atom) in doc.map.iter().enumerate() {
                if let Some(Atom::Le { dim, e, f }) = atom {
                    if *dim >= doc.d || *e >= t || *f >= t {
                        return Err(SolveError::BadCnf("map atom out of range".into()));
                    }
                    le[((dim * t + e) * t + f) as usize] = Some(model[var0]);
                }
            }
            for dim in 0..doc.d {
                for e in 0..t {
                    for f in 0..t {
                        if e != f && le[((dim * t + e) * t + f) as usize].is_none() {
                            return Err(SolveError::BadCnf(format!(
                                "no variable mapped for le({},{}) in dimension {}",
                                e,
                                f,
                                dim + 1
                            )));
                        }
                    }
                }
            }
            let orders = orders_from_le(doc.n, doc.d, &|dim, e, f| {
                le[((dim * t + e) * t + f) as usize].unwrap()
            })?;
            realize(&orders, doc.n)?
        }
        Engine::BeforeCegar => {
            let n = doc.n as usize;
            let mut before = vec![false; doc.d as usize * n * n];
            for (var0, atom) in doc.map.iter().enumerate() {
                if let Some(Atom::Before { dim, u, v }) = atom {
                    if *dim >= doc.d || *u >= doc.n || *v >= doc.n {
                        return Err(SolveError::BadCnf("map atom out of range".into()));
                    }
                    before[(*dim as usize * n + *u as usize) * n + *v as usize] = model[var0];
                }
            }
            super::before::realize_from(n, doc.d, &|dim, u, v| {
                before[(dim as usize * n + u) * n + v]
            })
            .map_err(|e| SolveError::BadModel(format!("relation not realizable: {e}")))?
        }
        Engine::Brute => {
            return Err(SolveError::Unsupported("brute engine has no CNF form".into()))
        }
    };
    if let Some(viol) = crate::geometry::verify_representation(g, &rep)? {
        return Err(SolveError::BadModel(format!(
            "decoded representation fails verification: {viol:?}"
        )));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::cdcl::{Limits, SatResult, Solver};

    fn solve_doc(doc: &CnfDocument) -> (SatResult, String) {
        let mut s = Solver::new();
        s.new_vars(doc.num_vars as usize);
        let mut ok = true;
        for c in &doc.clauses {
            ok &= s.add_clause(c);
        }
        if !ok {
            return (SatResult::Unsat, String::new());
        }
        let r = s.solve(&Limits::default());
        let mut line = String::new();
        if r == SatResult::Sat {
            for v in 0..doc.num_vars {
                let val = if s.model_value(v) { v as i64 + 1 } else { -(v as i64 + 1) };
                line.push_str(&val.to_string());
                line.push(' ');
            }
            line.push('0');
        }
        (r, line)
    }

    #[test]
    fn k2_endpoint_roundtrip() {
        let g = Graph::k2();
        let doc = export_cnf(&g, 1, &[], Engine::Endpoint, None).unwrap();
        let reparsed = CnfDocument::parse(&doc.to_dimacs()).unwrap();
        let (r, model) = solve_doc(&reparsed);
        assert_eq!(r, SatResult::Sat);
        let rep = import_model(&g, &reparsed, &model).unwrap();
        assert_eq!(rep.n(), 2);
    }

    #[test]
    fn c4_one_dimension_unsat() {
        let g = Graph::cycle(4);
        for engine in [Engine::Endpoint, Engine::BeforeCegar] {
            let doc = export_cnf(&g, 1, &[], engine, None).unwrap();
            let reparsed = CnfDocument::parse(&doc.to_dimacs()).unwrap();
            let (r, _) = solve_doc(&reparsed);
            assert_eq!(r, SatResult::Unsat);
        }
    }

    #[test]
    fn before_roundtrip_on_path() {
        let g = Graph::path(5);
        let doc = export_cnf(&g, 2, &[], Engine::BeforeCegar, None).unwrap();
        let reparsed = CnfDocument::parse(&doc.to_dimacs()).unwrap();
        let (r, model) = solve_doc(&reparsed);
        assert_eq!(r, SatResult::Sat);
        let rep = import_model(&g, &reparsed, &model).unwrap();
        assert_eq!(rep.d(), 2);
    }

    #[test]
    fn clause_cap_is_enforced() {
        let g = Graph::cycle(12);
        let err = export_cnf(&g, 2, &[], Engine::BeforeCegar, Some(10)).unwrap_err();
        assert!(matches!(err, SolveError::ClauseCapExceeded { .. }));
    }

    #[test]
    fn corrupted_model_is_rejected() {
        let g = Graph::k2();
        let doc = export_cnf(&g, 1, &[], Engine::Endpoint, None).unwrap();
        let (r, model) = solve_doc(&doc);
        assert_eq!(r, SatResult::Sat);
        // Flip the first literal: either a clause breaks or decoding does.
        let flipped: String = model
            .split_whitespace()
            .enumerate()
            .map(|(i, t)| {
                if i == 0 {
                    let x: i64 = t.parse().unwrap();
                    (-x).to_string()
                } else {
                    t.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        assert!(import_model(&g, &doc, &flipped).is_err());
    }
}
