//! Conflict-driven clause-learning search over Boolean atoms: two watched
//! literals, first-UIP learning, VSIDS branching, phase saving, Luby
//! restarts and activity-based learnt-clause deletion.
//!
//! Refutations are exhaustive: `Unsat` is only returned after a complete
//! search, never from a budget cut-off. Budgets surface as `Unknown`.
//! Branching is deterministic for a fixed seed.

use std::time::{Duration, Instant};

/// Propositional variable, 0-based.
pub type Var = u32;

/// Literal: variable plus sign, packed as `var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn pos(v: Var) -> Lit {
        Lit(v << 1)
    }

    #[inline]
    pub fn neg(v: Var) -> Lit {
        Lit(v << 1 | 1)
    }

    #[inline]
    pub fn new(v: Var, positive: bool) -> Lit {
        if positive {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        self.0 >> 1
    }

    #[inline]
    pub fn is_pos(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }

    /// DIMACS convention: 1-based, sign carries polarity.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_pos() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 {
            return None;
        }
        let v = (x.unsigned_abs() - 1) as u32;
        Some(Lit::new(v, x > 0))
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub learned_literals: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Unknown,
}

/// Resource limits for one `solve` call. `None` means unlimited.
#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub conflicts: Option<u64>,
    /// Cap on literals held in learnt clauses; stands in for a memory limit.
    pub learned_literals: Option<u64>,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f32,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

/// Indexed max-heap over variable activities (deterministic: ties break
/// toward the smaller variable index).
struct VarOrder {
    heap: Vec<Var>,
    pos: Vec<i32>,
}

impl VarOrder {
    fn new(n: usize) -> Self {
        VarOrder { heap: (0..n as Var).collect(), pos: (0..n as i32).collect() }
    }

    fn grow(&mut self, n: usize, act: &[f64]) {
        while self.pos.len() < n {
            let v = self.pos.len() as Var;
            self.pos.push(-1);
            self.insert(v, act);
        }
    }

    fn less(a: Var, b: Var, act: &[f64]) -> bool {
        let (aa, ab) = (act[a as usize], act[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn percolate_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) >> 1;
            if Self::less(v, self.heap[p], act) {
                self.heap[i] = self.heap[p];
                self.pos[self.heap[i] as usize] = i as i32;
                i = p;
            } else {
                break;
            }
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn percolate_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let len = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= len {
                break;
            }
            let r = l + 1;
            let child = if r < len && Self::less(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if Self::less(self.heap[child], v, act) {
                self.heap[i] = self.heap[child];
                self.pos[self.heap[i] as usize] = i as i32;
                i = child;
            } else {
                break;
            }
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.pos[v as usize] >= 0 {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as i32;
        self.percolate_up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.percolate_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: Var, act: &[f64]) {
        let i = self.pos[v as usize];
        if i >= 0 {
            self.percolate_up(i as usize, act);
        }
    }
}

pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assign: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<i32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    order: VarOrder,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    n_learnt: usize,
    learnt_literals: u64,
    pub stats: SearchStats,
    /// Invoked roughly every `progress_interval` conflicts.
    pub progress: Option<SearchProgressFn>,
    pub progress_interval: u64,
}

/// Callback receiving periodic search statistics.
pub type SearchProgressFn = Box<dyn FnMut(&SearchStats) + Send>;

const VAR_DECAY: f64 = 1.0 / 0.95;
const CLA_DECAY: f32 = 1.0 / 0.999;

fn luby(i: u64) -> u64 {
    // Luby sequence 1,1,2,1,1,2,4,...
    let mut k = 1u32;
    while (1u64 << k) - 1 < i + 1 {
        k += 1;
    }
    let mut i = i;
    let mut kk = k;
    loop {
        if (1u64 << kk) - 1 == i + 1 {
            return 1u64 << (kk - 1);
        }
        kk -= 1;
        i -= (1u64 << kk) - 1;
        let mut k2 = 1u32;
        while (1u64 << k2) - 1 < i + 1 {
            k2 += 1;
        }
        kk = k2;
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarOrder::new(0),
            phase: Vec::new(),
            seen: Vec::new(),
            unsat: false,
            n_learnt: 0,
            learnt_literals: 0,
            stats: SearchStats::default(),
            progress: None,
            progress_interval: 20_000,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn new_vars(&mut self, n: usize) {
        let total = self.assign.len() + n;
        self.assign.resize(total, Value::Undef);
        self.level.resize(total, 0);
        self.reason.resize(total, -1);
        self.activity.resize(total, 0.0);
        // Default phase true: for the order encodings a fully tied preorder
        // satisfies most clauses, so "true" is the productive first guess.
        self.phase.resize(total, true);
        self.seen.resize(total, false);
        self.watches.resize(2 * total, Vec::new());
        self.order.grow(total, &self.activity);
    }

    /// Perturb initial branching order; outcomes are seed-independent.
    pub fn seed_order(&mut self, seed: u64) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for v in 0..self.num_vars() {
            self.activity[v] = rng.gen_range(0.0..1e-6);
            self.phase[v] = rng.gen_bool(0.9);
        }
        let n = self.num_vars();
        self.order = VarOrder::new(0);
        self.order.grow(n, &self.activity);
    }

    #[inline]
    fn value(&self, l: Lit) -> Value {
        match self.assign[l.var() as usize] {
            Value::Undef => Value::Undef,
            Value::True => {
                if l.is_pos() {
                    Value::True
                } else {
                    Value::False
                }
            }
            Value::False => {
                if l.is_pos() {
                    Value::False
                } else {
                    Value::True
                }
            }
        }
    }

    pub fn model_value(&self, v: Var) -> bool {
        matches!(self.assign[v as usize], Value::True)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: i32) {
        debug_assert_eq!(self.value(l), Value::Undef);
        self.assign[l.var() as usize] = if l.is_pos() { Value::True } else { Value::False };
        self.level[l.var() as usize] = self.decision_level();
        self.reason[l.var() as usize] = reason;
        self.trail.push(l);
    }

    /// Add a clause; returns false if the instance became trivially unsat.
    /// Backtracks to the root level first, so interleaving with `solve`
    /// calls is fine.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        self.backtrack(0);
        if self.unsat {
            return false;
        }
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            debug_assert!((l.var() as usize) < self.num_vars());
            match self.value(l) {
                Value::True => return true,
                Value::False => continue,
                Value::Undef => {
                    if c.contains(&!l) {
                        return true; // tautology
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.enqueue(c[0], -1);
                if self.propagate().is_some() {
                    self.unsat = true;
                    false
                } else {
                    true
                }
            }
            _ => {
                self.attach(c, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let id = self.clauses.len() as u32;
        let w0 = lits[0];
        let w1 = lits[1];
        if learnt {
            self.n_learnt += 1;
            self.learnt_literals += lits.len() as u64;
            self.stats.learned += 1;
            self.stats.learned_literals += lits.len() as u64;
        }
        self.clauses.push(Clause { lits, learnt, activity: 0.0, deleted: false });
        self.watches[(!w0).idx()].push(Watcher { clause: id, blocker: w1 });
        self.watches[(!w1).idx()].push(Watcher { clause: id, blocker: w0 });
        id
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let mut i = 0;
            let mut j = 0;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut conflict: Option<u32> = None;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let ci = w.clause as usize;
                // Deleted clauses are lazily dropped from watch lists.
                if self.clauses[ci].deleted {
                    continue;
                }
                let false_lit = !p;
                {
                    let lits = &mut self.clauses[ci].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[ci].lits[0];
                if first != w.blocker && self.value(first) == Value::True {
                    ws[j] = Watcher { clause: w.clause, blocker: first };
                    j += 1;
                    continue;
                }
                // Look for a new literal to watch.
                let len = self.clauses[ci].lits.len();
                for k in 2..len {
                    let lk = self.clauses[ci].lits[k];
                    if self.value(lk) != Value::False {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[(!lk).idx()]
                            .push(Watcher { clause: w.clause, blocker: first });
                        continue 'watchers;
                    }
                }
                // Unit or conflicting.
                ws[j] = Watcher { clause: w.clause, blocker: first };
                j += 1;
                if self.value(first) == Value::False {
                    // Conflict: copy the rest of the watchers back.
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                    conflict = Some(w.clause);
                } else {
                    self.enqueue(first, w.clause as i32);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, ci: usize) {
        self.clauses[ci].activity += self.cla_inc;
        if self.clauses[ci].activity > 1e20 {
            for c in &mut self.clauses {
                if c.learnt {
                    c.activity *= 1e-20;
                }
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::pos(0)]; // slot for the asserting literal
        let mut path = 0u32;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            let ci = confl as usize;
            if self.clauses[ci].learnt {
                self.bump_clause(ci);
            }
            let start = if p.is_some() { 1 } else { 0 };
            for k in start..self.clauses[ci].lits.len() {
                let q = self.clauses[ci].lits[k];
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // Next literal on the trail to resolve on.
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = !lit;
                break;
            }
            p = Some(lit);
            confl = self.reason[lit.var() as usize] as u32;
        }
        // Cheap clause minimization: drop literals whose reason clause is
        // entirely covered by the rest of the learnt clause.
        let keep: Vec<Lit> = learnt[1..]
            .iter()
            .copied()
            .filter(|&l| {
                let r = self.reason[l.var() as usize];
                if r < 0 {
                    return true;
                }
                !self.clauses[r as usize].lits.iter().all(|&q| {
                    q == !l
                        || learnt.contains(&q)
                        || (self.level[q.var() as usize] == 0)
                })
            })
            .collect();
        let mut out = vec![learnt[0]];
        out.extend(keep);
        for l in &out {
            self.seen[l.var() as usize] = false;
        }
        for l in &learnt {
            self.seen[l.var() as usize] = false;
        }
        // Backtrack level: highest level among the non-asserting literals.
        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var() as usize] > self.level[out[max_i].var() as usize] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.level[out[1].var() as usize];
        }
        (out, bt)
    }

    fn backtrack(&mut self, level: u32) {
        while self.decision_level() > level {
            let lim = self.trail_lim.pop().unwrap();
            for &l in self.trail[lim..].iter().rev() {
                let v = l.var();
                self.phase[v as usize] = l.is_pos();
                self.assign[v as usize] = Value::Undef;
                self.reason[v as usize] = -1;
                self.order.insert(v, &self.activity);
            }
            self.trail.truncate(lim);
        }
        self.qhead = self.trail.len();
    }

    fn reduce_db(&mut self) {
        let mut learnt_ids: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2
            })
            .collect();
        learnt_ids.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        let locked: Vec<bool> = learnt_ids
            .iter()
            .map(|&i| {
                let c = &self.clauses[i];
                let l0 = c.lits[0];
                self.value(l0) == Value::True && self.reason[l0.var() as usize] == i as i32
            })
            .collect();
        let target = learnt_ids.len() / 2;
        let mut removed = 0;
        for (pos, &i) in learnt_ids.iter().enumerate() {
            if removed >= target {
                break;
            }
            if locked[pos] {
                continue;
            }
            self.clauses[i].deleted = true;
            self.learnt_literals -= self.clauses[i].lits.len() as u64;
            self.clauses[i].lits.clear();
            self.clauses[i].lits.shrink_to_fit();
            self.n_learnt -= 1;
            removed += 1;
        }
    }

    /// Solve under the current clause set. May be called repeatedly with
    /// clauses added in between; learnt clauses persist.
    pub fn solve(&mut self, limits: &Limits) -> SatResult {
        let start = Instant::now();
        let conflict_start = self.stats.conflicts;
        self.backtrack(0);
        if self.unsat {
            return SatResult::Unsat;
        }
        if self.propagate().is_some() {
            self.unsat = true;
            return SatResult::Unsat;
        }
        let mut max_learnts = ((self.clauses.len() - self.n_learnt) / 3).max(4000);
        let mut restart_idx = 0u64;
        let mut restart_budget = 128 * luby(restart_idx);
        let mut conflicts_in_restart = 0u64;
        let mut last_progress = self.stats.conflicts;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_in_restart += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    self.stats.wall += start.elapsed();
                    return SatResult::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], -1);
                } else {
                    let id = self.attach(learnt.clone(), true);
                    self.bump_clause(id as usize);
                    self.enqueue(learnt[0], id as i32);
                }
                self.var_inc *= VAR_DECAY;
                self.cla_inc *= CLA_DECAY;

                if self.stats.conflicts - last_progress >= self.progress_interval {
                    last_progress = self.stats.conflicts;
                    self.stats.wall = start.elapsed();
                    if let Some(cb) = self.progress.as_mut() {
                        let snapshot = self.stats.clone();
                        cb(&snapshot);
                    }
                }
                // Budget checks happen on conflicts only; cheap and frequent
                // enough.
                if let Some(cap) = limits.conflicts {
                    if self.stats.conflicts - conflict_start >= cap {
                        self.stats.wall += start.elapsed();
                        return SatResult::Unknown;
                    }
                }
                if self.stats.conflicts.is_multiple_of(256) {
                    if let Some(deadline) = limits.deadline {
                        if Instant::now() >= deadline {
                            self.stats.wall += start.elapsed();
                            return SatResult::Unknown;
                        }
                    }
                    if let Some(cap) = limits.learned_literals {
                        if self.learnt_literals > cap {
                            // Try to shed memory first; give up only if still
                            // over the cap.
                            self.reduce_db();
                            if self.learnt_literals > cap {
                                self.stats.wall += start.elapsed();
                                return SatResult::Unknown;
                            }
                        }
                    }
                }
            } else {
                if conflicts_in_restart >= restart_budget {
                    conflicts_in_restart = 0;
                    restart_idx += 1;
                    restart_budget = 128 * luby(restart_idx);
                    self.stats.restarts += 1;
                    self.backtrack(0);
                    max_learnts = (max_learnts as f64 * 1.02) as usize;
                    continue;
                }
                if self.n_learnt >= max_learnts {
                    self.reduce_db();
                }
                // Pick the next decision variable.
                let mut next: Option<Var> = None;
                while let Some(v) = self.order.pop(&self.activity) {
                    if self.assign[v as usize] == Value::Undef {
                        next = Some(v);
                        break;
                    }
                }
                match next {
                    None => {
                        self.stats.wall += start.elapsed();
                        return SatResult::Sat;
                    }
                    Some(v) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(Lit::new(v, self.phase[v as usize]), -1);
                    }
                }
            }
        }
    }
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    #[test]
    fn trivial_sat_unsat() {
        let mut s = Solver::new();
        s.new_vars(2);
        assert!(s.add_clause(&lits(&[1, 2])));
        assert!(s.add_clause(&lits(&[-1])));
        assert_eq!(s.solve(&Limits::default()), SatResult::Sat);
        assert!(s.model_value(1));

        let mut s = Solver::new();
        s.new_vars(1);
        s.add_clause(&lits(&[1]));
        assert!(!s.add_clause(&lits(&[-1])));
        assert_eq!(s.solve(&Limits::default()), SatResult::Unsat);
    }

    #[test]
    fn pigeonhole_unsat() {
        // PHP(4 pigeons, 3 holes): classic small refutation exercise.
        let p = 4usize;
        let h = 3usize;
        let var = |i: usize, j: usize| (i * h + j) as Var;
        let mut s = Solver::new();
        s.new_vars(p * h);
        for i in 0..p {
            let c: Vec<Lit> = (0..h).map(|j| Lit::pos(var(i, j))).collect();
            s.add_clause(&c);
        }
        for j in 0..h {
            for i1 in 0..p {
                for i2 in i1 + 1..p {
                    s.add_clause(&[Lit::neg(var(i1, j)), Lit::neg(var(i2, j))]);
                }
            }
        }
        assert_eq!(s.solve(&Limits::default()), SatResult::Unsat);
    }

    #[test]
    fn random_3sat_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.gen_range(3..10usize);
            let m = rng.gen_range(1..40usize);
            let mut cls: Vec<Vec<Lit>> = Vec::new();
            for _ in 0..m {
                let mut c = Vec::new();
                for _ in 0..3 {
                    let v = rng.gen_range(0..n) as Var;
                    c.push(Lit::new(v, rng.gen_bool(0.5)));
                }
                cls.push(c);
            }
            let brute = (0..1u32 << n).any(|mask| {
                cls.iter().all(|c| {
                    c.iter()
                        .any(|l| ((mask >> l.var()) & 1 == 1) == l.is_pos())
                })
            });
            let mut s = Solver::new();
            s.new_vars(n);
            let mut ok = true;
            for c in &cls {
                ok &= s.add_clause(c);
            }
            let res = if ok { s.solve(&Limits::default()) } else { SatResult::Unsat };
            assert_eq!(res == SatResult::Sat, brute);
            if res == SatResult::Sat {
                for c in &cls {
                    assert!(c.iter().any(|l| s.model_value(l.var()) == l.is_pos()));
                }
            }
        }
    }

    #[test]
    fn incremental_clause_addition() {
        let mut s = Solver::new();
        s.new_vars(3);
        s.add_clause(&lits(&[1, 2, 3]));
        assert_eq!(s.solve(&Limits::default()), SatResult::Sat);
        s.add_clause(&lits(&[-1]));
        s.add_clause(&lits(&[-2]));
        assert_eq!(s.solve(&Limits::default()), SatResult::Sat);
        assert!(s.model_value(2));
        s.add_clause(&lits(&[-3]));
        assert_eq!(s.solve(&Limits::default()), SatResult::Unsat);
    }

    #[test]
    fn conflict_budget_reports_unknown() {
        // A hard pigeonhole instance with a one-conflict budget.
        let p = 8usize;
        let h = 7usize;
        let var = |i: usize, j: usize| (i * h + j) as Var;
        let mut s = Solver::new();
        s.new_vars(p * h);
        for i in 0..p {
            let c: Vec<Lit> = (0..h).map(|j| Lit::pos(var(i, j))).collect();
            s.add_clause(&c);
        }
        for j in 0..h {
            for i1 in 0..p {
                for i2 in i1 + 1..p {
                    s.add_clause(&[Lit::neg(var(i1, j)), Lit::neg(var(i2, j))]);
                }
            }
        }
        let limits = Limits { conflicts: Some(1), ..Limits::default() };
        assert_eq!(s.solve(&limits), SatResult::Unknown);
    }
}
