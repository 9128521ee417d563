//! Exhaustive oracle for tiny graphs (n <= 7).
//!
//! A d-box representation is d interval systems in which every edge
//! overlaps in all of them and every non-edge is separated in at least one.
//! The search assigns each dimension a "kill set" of non-edges to separate
//! (enumerating submasks of the still-unseparated ones) and solves the
//! per-dimension problem by backtracking over endpoint event sequences:
//! open or close one interval at a time, opening is blocked next to an open
//! killed partner, closing is blocked until all required neighbours have
//! opened. Any representation can be perturbed to distinct endpoints, so
//! event sequences lose no generality.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::{certify, Budget, SolveError, SolveOutcome, SolveReport, SolveStats};
use crate::geometry::{AxisBox, BoxRepresentation, Interval};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
enum Event {
    Open(u32),
    Close(u32),
}

struct Ctx {
    n: u32,
    /// Required-overlap adjacency masks (the graph's edges).
    req: Vec<u32>,
    /// Unordered non-edge pairs, indexed by bit position in kill masks.
    non_edges: Vec<(u32, u32)>,
    sandwich_memo: HashMap<u32, Option<Vec<Event>>>,
    deadline: Option<Instant>,
    calls: u64,
}

impl Ctx {
    fn forb_masks(&self, kill: u32) -> Vec<u32> {
        let mut forb = vec![0u32; self.n as usize];
        for (i, &(u, v)) in self.non_edges.iter().enumerate() {
            if kill >> i & 1 == 1 {
                forb[u as usize] |= 1 << v;
                forb[v as usize] |= 1 << u;
            }
        }
        forb
    }

    /// Interval sandwich: intervals where `req` pairs overlap and `kill`
    /// pairs do not. Returns a feasible event sequence, memoized by kill
    /// mask.
    fn sandwich(&mut self, kill: u32) -> Result<Option<Vec<Event>>, SolveError> {
        if let Some(hit) = self.sandwich_memo.get(&kill) {
            return Ok(hit.clone());
        }
        self.calls += 1;
        if self.calls.is_multiple_of(4096) {
            if let Some(dl) = self.deadline {
                if Instant::now() >= dl {
                    return Err(SolveError::Unsupported("budget".into()));
                }
            }
        }
        let forb = self.forb_masks(kill);
        let full = (1u32 << self.n) - 1;
        let mut failed: HashSet<u32> = HashSet::new();
        let mut events = Vec::new();
        let found = self.dfs(0, 0, full, &forb, &mut failed, &mut events);
        let result = if found {
            events.reverse();
            Some(events)
        } else {
            None
        };
        self.sandwich_memo.insert(kill, result.clone());
        Ok(result)
    }

    fn dfs(
        &self,
        opened: u32,
        open: u32,
        full: u32,
        forb: &[u32],
        failed: &mut HashSet<u32>,
        events: &mut Vec<Event>,
    ) -> bool {
        if opened == full && open == 0 {
            return true;
        }
        let key = opened << self.n | open;
        if failed.contains(&key) {
            return false;
        }
        for v in 0..self.n {
            let bit = 1u32 << v;
            if opened & bit == 0 {
                if forb[v as usize] & open == 0
                    && self.dfs(opened | bit, open | bit, full, forb, failed, events)
                {
                    events.push(Event::Open(v));
                    return true;
                }
            } else if open & bit != 0 && self.req[v as usize] & !opened == 0
                && self.dfs(opened, open & !bit, full, forb, failed, events) {
                    events.push(Event::Close(v));
                    return true;
                }
        }
        failed.insert(key);
        false
    }

    /// Assign kill sets to `dims_left` dimensions covering `remaining`.
    fn search(
        &mut self,
        remaining: u32,
        dims_left: u32,
        chosen: &mut Vec<Vec<Event>>,
    ) -> Result<bool, SolveError> {
        if dims_left == 1 {
            if let Some(ev) = self.sandwich(remaining)? {
                chosen.push(ev);
                return Ok(true);
            }
            return Ok(false);
        }
        let mut kill = remaining;
        loop {
            if let Some(ev) = self.sandwich(kill)? {
                chosen.push(ev);
                if self.search(remaining & !kill, dims_left - 1, chosen)? {
                    return Ok(true);
                }
                chosen.pop();
            }
            if kill == 0 {
                return Ok(false);
            }
            kill = (kill - 1) & remaining;
        }
    }
}

fn events_to_intervals(n: u32, events: &[Event]) -> Vec<Interval> {
    let mut lo = vec![0i64; n as usize];
    let mut hi = vec![0i64; n as usize];
    for (pos, ev) in events.iter().enumerate() {
        match *ev {
            Event::Open(v) => lo[v as usize] = pos as i64,
            Event::Close(v) => hi[v as usize] = pos as i64,
        }
    }
    (0..n as usize)
        .map(|v| Interval::new(lo[v], hi[v]).unwrap())
        .collect()
}

pub(crate) fn decide(g: &Graph, d: u32, budget: &Budget) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let n = g.n();
    if n == 0 {
        return Err(SolveError::Unsupported("empty graph".into()));
    }
    let mut req = vec![0u32; n as usize];
    for (u, v) in g.edges() {
        req[u as usize] |= 1 << v;
        req[v as usize] |= 1 << u;
    }
    let mut non_edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                non_edges.push((u, v));
            }
        }
    }
    let mut ctx = Ctx {
        n,
        req,
        non_edges,
        sandwich_memo: HashMap::new(),
        deadline: budget.wall.map(|w| start + w),
        calls: 0,
    };
    let remaining = if ctx.non_edges.is_empty() {
        0
    } else {
        (1u32 << ctx.non_edges.len()) - 1
    };
    let mut chosen: Vec<Vec<Event>> = Vec::new();
    // The only error `search` can surface is the deadline sentinel raised
    // inside `sandwich`.
    let found = match ctx.search(remaining, d, &mut chosen) {
        Ok(f) => f,
        Err(_) => {
            let stats = SolveStats { wall: start.elapsed(), ..SolveStats::default() };
            return Ok(SolveReport { outcome: SolveOutcome::BudgetExhausted, stats });
        }
    };
    let stats = SolveStats { wall: start.elapsed(), ..SolveStats::default() };
    if !found {
        return Ok(SolveReport { outcome: SolveOutcome::Infeasible, stats });
    }
    let per_dim: Vec<Vec<Interval>> =
        chosen.iter().map(|ev| events_to_intervals(n, ev)).collect();
    let mut boxes = Vec::with_capacity(n as usize);
    for v in 0..n as usize {
        let ivs: Vec<Interval> = per_dim.iter().map(|dim_ivs| dim_ivs[v]).collect();
        boxes.push(AxisBox::new(ivs)?);
    }
    let rep = certify(g, &[], BoxRepresentation::new(boxes)?)?;
    Ok(SolveReport { outcome: SolveOutcome::Feasible(rep), stats })
}
