//! Small Boolean-formula layer over solver atoms, with constant folding and
//! a polarity-aware (one-sided) Tseitin transform used to compile side
//! constraints into clauses.

use super::cdcl::Lit;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Lit(Lit),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::Or(parts)
    }

    /// Negation by De Morgan push-down; the AST has no Not node.
    pub fn negate(self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => Formula::Lit(!l),
            Formula::And(parts) => Formula::Or(parts.into_iter().map(Formula::negate).collect()),
            Formula::Or(parts) => Formula::And(parts.into_iter().map(Formula::negate).collect()),
        }
    }

    fn simplify(self) -> Formula {
        match self {
            Formula::And(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    match p.simplify() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        Formula::And(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                match out.len() {
                    0 => Formula::True,
                    1 => out.pop().unwrap(),
                    _ => Formula::And(out),
                }
            }
            Formula::Or(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    match p.simplify() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        Formula::Or(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                match out.len() {
                    0 => Formula::False,
                    1 => out.pop().unwrap(),
                    _ => Formula::Or(out),
                }
            }
            other => other,
        }
    }

    /// Evaluate under a total assignment over the atom variables. Serves as
    /// the semantic oracle for the Tseitin tests.
    #[cfg(test)]
    pub fn eval(&self, assignment: &dyn Fn(Lit) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => assignment(*l),
            Formula::And(ps) => ps.iter().all(|p| p.eval(assignment)),
            Formula::Or(ps) => ps.iter().any(|p| p.eval(assignment)),
        }
    }
}

/// Clause sink: accumulates clauses and hands out fresh auxiliary variables.
pub struct ClauseBuf {
    pub clauses: Vec<Vec<Lit>>,
    pub next_var: u32,
}

impl ClauseBuf {
    pub fn new(num_atom_vars: u32) -> Self {
        ClauseBuf { clauses: Vec::new(), next_var: num_atom_vars }
    }

    pub fn push(&mut self, clause: Vec<Lit>) {
        self.clauses.push(clause);
    }

    fn fresh(&mut self) -> Lit {
        let v = self.next_var;
        self.next_var += 1;
        Lit::pos(v)
    }

    /// Returns a literal L with emitted clauses guaranteeing L -> f.
    fn encode_pos(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Lit(l) => *l,
            Formula::And(parts) => {
                let x = self.fresh();
                for p in parts {
                    let lp = self.encode_pos(p);
                    self.push(vec![!x, lp]);
                }
                x
            }
            Formula::Or(parts) => {
                let x = self.fresh();
                let mut cl = vec![!x];
                cl.extend(parts.iter().map(|p| self.encode_pos(p)));
                self.push(cl);
                x
            }
            Formula::True | Formula::False => unreachable!("constants folded before encoding"),
        }
    }

    /// Assert the formula true, emitting CNF clauses.
    pub fn assert_true(&mut self, f: Formula) {
        match f.simplify() {
            Formula::True => {}
            Formula::False => self.push(vec![]),
            Formula::Lit(l) => self.push(vec![l]),
            Formula::And(parts) => {
                for p in parts {
                    self.assert_true(p);
                }
            }
            Formula::Or(parts) => {
                let mut cl = Vec::with_capacity(parts.len());
                for p in &parts {
                    cl.push(self.encode_pos(p));
                }
                self.push(cl);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::cdcl::{Limits, SatResult, Solver};

    fn solve_with(num_atoms: u32, build: impl Fn() -> Formula) -> (SatResult, Option<Vec<bool>>) {
        let mut buf = ClauseBuf::new(num_atoms);
        buf.assert_true(build());
        let mut s = Solver::new();
        s.new_vars(buf.next_var as usize);
        let mut ok = true;
        for c in &buf.clauses {
            ok &= s.add_clause(c);
        }
        if !ok {
            return (SatResult::Unsat, None);
        }
        let r = s.solve(&Limits::default());
        let model = if r == SatResult::Sat {
            Some((0..num_atoms).map(|v| s.model_value(v)).collect())
        } else {
            None
        };
        (r, model)
    }

    #[test]
    fn tseitin_models_satisfy_formula() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let num_atoms = 6u32;
            // Random depth-3 formula.
            fn random_formula(rng: &mut rand_chacha::ChaCha8Rng, depth: u32, atoms: u32) -> Formula {
                use rand::Rng;
                if depth == 0 || rng.gen_bool(0.3) {
                    let v = rng.gen_range(0..atoms);
                    return Formula::Lit(Lit::new(v, rng.gen_bool(0.5)));
                }
                let parts = (0..rng.gen_range(2..4))
                    .map(|_| random_formula(rng, depth - 1, atoms))
                    .collect();
                if rng.gen_bool(0.5) {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            let f = random_formula(&mut rng, 3, num_atoms);
            let brute_sat = (0..1u32 << num_atoms)
                .any(|mask| f.eval(&|l: Lit| ((mask >> l.var()) & 1 == 1) == l.is_pos()));
            let (res, model) = solve_with(num_atoms, || f.clone());
            assert_eq!(res == SatResult::Sat, brute_sat);
            if let Some(m) = model {
                assert!(f.eval(&|l: Lit| m[l.var() as usize] == l.is_pos()));
            }
        }
    }

    #[test]
    fn negate_is_involution_on_eval() {
        let f = Formula::Or(vec![
            Formula::Lit(Lit::pos(0)),
            Formula::And(vec![Formula::Lit(Lit::neg(1)), Formula::Lit(Lit::pos(2))]),
        ]);
        let g = f.clone().negate();
        for mask in 0..8u32 {
            let assign = |l: Lit| ((mask >> l.var()) & 1 == 1) == l.is_pos();
            assert_eq!(f.eval(&assign), !g.eval(&assign));
        }
    }
}
