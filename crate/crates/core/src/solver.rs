//! Branch-and-bound weighted partial MaxSAT, and an exhaustive oracle.
//!
//! The search keeps, for every clause, the number of true and false
//! literals under the current partial assignment. A node is pruned when
//! its lower bound reaches the incumbent cost. The bound is the weight of
//! falsified soft clauses plus, per variable, the smaller of the weights of
//! pending soft unit clauses on each polarity.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{Assignment, Formula, Lit, Var, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// `cost` is optimal.
    Optimum,
    /// No assignment satisfies the hard clauses.
    HardUnsat,
    /// The budget ran out; `cost` (if any) is the best found so far.
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult {
    pub status: Status,
    /// Total weight of unsatisfied soft clauses under `witness`.
    pub cost: Option<u64>,
    pub witness: Option<Assignment>,
    /// Search nodes visited (assignments enumerated for the oracle).
    pub nodes: u64,
    /// Costs of successive incumbents, non-increasing.
    pub incumbents: Vec<u64>,
}

impl OptResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimum
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("{num_vars} variables exceed the enumeration cap of {cap}")]
    TooManyVars { num_vars: u32, cap: u32 },
}

pub const DEFAULT_BRUTE_FORCE_CAP: u32 = 26;

/// Enumerates all `2^n` assignments. Among optimal assignments the witness is
/// the lexicographically least one (`x1` first, false before true).
pub fn brute_force(f: &Formula) -> Result<OptResult, SolveError> {
    brute_force_capped(f, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_capped(f: &Formula, cap: u32) -> Result<OptResult, SolveError> {
    let n = f.num_vars();
    if n > cap.min(63) {
        return Err(SolveError::TooManyVars { num_vars: n, cap });
    }
    // x_v lives at bit n - v so that counting upwards walks assignments in
    // lexicographic order
    let bit = |l: Lit| 1u64 << (n - l.var().index());
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    for wc in f.clauses() {
        let (mut pos, mut neg) = (0u64, 0u64);
        for &l in wc.clause.lits() {
            if l.is_negated() {
                neg |= bit(l);
            } else {
                pos |= bit(l);
            }
        }
        match wc.weight {
            Weight::Hard => hard.push((pos, neg)),
            Weight::Soft(w) => soft.push((pos, neg, w)),
        }
    }
    let sat = |m: u64, pos: u64, neg: u64| m & pos != 0 || !m & neg != 0;

    let mut best: Option<(u64, u64)> = None;
    let mut incumbents = Vec::new();
    for m in 0..1u64 << n {
        if !hard.iter().all(|&(p, q)| sat(m, p, q)) {
            continue;
        }
        let bound = best.map_or(u64::MAX, |b| b.0);
        let mut cost = 0u64;
        for &(p, q, w) in &soft {
            if !sat(m, p, q) {
                cost += w;
                if cost >= bound {
                    break;
                }
            }
        }
        if cost < bound {
            best = Some((cost, m));
            incumbents.push(cost);
        }
    }
    let nodes = 1u64 << n;
    Ok(match best {
        Some((cost, m)) => OptResult {
            status: Status::Optimum,
            cost: Some(cost),
            witness: Some(Assignment::new(
                (1..=n).map(|v| m >> (n - v) & 1 == 1).collect(),
            )),
            nodes,
            incumbents,
        },
        None => OptResult {
            status: Status::HardUnsat,
            cost: None,
            witness: None,
            nodes,
            incumbents,
        },
    })
}

#[derive(Clone, Debug)]
struct SClause {
    lits: Vec<Lit>,
    /// `None` for hard clauses.
    weight: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    /// Literals set by propagation, in order.
    Fixed(Vec<Lit>),
    /// Some hard clause is falsified.
    Conflict,
}

/// Partial assignment with per-clause counters and an undo trail.
#[derive(Clone, Debug)]
pub struct SearchState {
    num_vars: u32,
    clauses: Vec<SClause>,
    occurs: Vec<Vec<u32>>,
    value: Vec<Option<bool>>,
    n_true: Vec<u32>,
    n_false: Vec<u32>,
    trail: Vec<Lit>,
    queue: Vec<u32>,
    cost: u64,
    hard_falsified: u32,
}

impl SearchState {
    pub fn new(f: &Formula) -> SearchState {
        let clauses: Vec<SClause> = f
            .clauses()
            .iter()
            .map(|wc| SClause {
                lits: wc.clause.lits().to_vec(),
                weight: wc.weight.soft(),
            })
            .collect();
        let mut occurs = vec![Vec::new(); 2 * f.num_vars() as usize];
        let mut queue = Vec::new();
        let mut cost = 0;
        let mut hard_falsified = 0;
        for (i, c) in clauses.iter().enumerate() {
            for &l in &c.lits {
                occurs[l.code()].push(i as u32);
            }
            match (c.lits.len(), c.weight) {
                (0, None) => hard_falsified += 1,
                (0, Some(w)) => cost += w,
                (1, _) => queue.push(i as u32),
                _ => {}
            }
        }
        SearchState {
            num_vars: f.num_vars(),
            n_true: vec![0; clauses.len()],
            n_false: vec![0; clauses.len()],
            clauses,
            occurs,
            value: vec![None; f.num_vars() as usize],
            trail: Vec::new(),
            queue,
            cost,
            hard_falsified,
        }
    }

    /// Weight of soft clauses falsified so far.
    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn has_conflict(&self) -> bool {
        self.hard_falsified > 0
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.value[v.idx0()]
    }

    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var().idx0()].map(|b| b != l.is_negated())
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    fn is_open(&self, c: usize) -> bool {
        self.n_true[c] == 0 && (self.n_false[c] as usize) < self.clauses[c].lits.len()
    }

    /// Makes `l` true. The variable must be unassigned.
    pub fn assign(&mut self, l: Lit) {
        debug_assert!(self.value[l.var().idx0()].is_none());
        self.value[l.var().idx0()] = Some(!l.is_negated());
        self.trail.push(l);
        for &c in &self.occurs[l.code()] {
            self.n_true[c as usize] += 1;
        }
        for i in 0..self.occurs[(!l).code()].len() {
            let c = self.occurs[(!l).code()][i] as usize;
            self.n_false[c] += 1;
            if self.n_true[c] > 0 {
                continue;
            }
            let len = self.clauses[c].lits.len() as u32;
            if self.n_false[c] == len {
                match self.clauses[c].weight {
                    None => self.hard_falsified += 1,
                    Some(w) => self.cost += w,
                }
            } else if self.n_false[c] + 1 == len {
                self.queue.push(c as u32);
            }
        }
    }

    /// Undoes assignments until the trail has length `len`.
    pub fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            for i in 0..self.occurs[(!l).code()].len() {
                let c = self.occurs[(!l).code()][i] as usize;
                if self.n_true[c] == 0 && self.n_false[c] as usize == self.clauses[c].lits.len() {
                    match self.clauses[c].weight {
                        None => self.hard_falsified -= 1,
                        Some(w) => self.cost -= w,
                    }
                }
                self.n_false[c] -= 1;
            }
            for &c in &self.occurs[l.code()] {
                self.n_true[c as usize] -= 1;
            }
            self.value[l.var().idx0()] = None;
        }
        self.queue.clear();
    }

    fn unassigned_lit(&self, c: usize) -> Option<Lit> {
        self.clauses[c]
            .lits
            .iter()
            .copied()
            .find(|l| self.value[l.var().idx0()].is_none())
    }

    /// Queues every open clause with a single unassigned literal.
    fn requeue_units(&mut self) {
        self.queue.clear();
        for c in 0..self.clauses.len() {
            if self.is_open(c) && self.n_false[c] as usize + 1 == self.clauses[c].lits.len() {
                self.queue.push(c as u32);
            }
        }
    }

    /// Assigns the literals forced by unit hard clauses until fixpoint.
    pub fn unit_propagate(&mut self) -> Propagation {
        let start = self.trail.len();
        if self.queue.is_empty() {
            self.requeue_units();
        }
        while let Some(c) = self.queue.pop() {
            if self.has_conflict() {
                break;
            }
            let c = c as usize;
            if self.clauses[c].weight.is_some() || !self.is_open(c) {
                continue;
            }
            if let Some(l) = self.unassigned_lit(c) {
                self.assign(l);
            }
        }
        self.queue.clear();
        if self.has_conflict() {
            Propagation::Conflict
        } else {
            Propagation::Fixed(self.trail[start..].to_vec())
        }
    }

    /// Per-variable weight of pending soft units `(on x, on ~x)`.
    fn pending_soft_units(&self) -> Vec<(u64, u64)> {
        let mut w = vec![(0u64, 0u64); self.num_vars as usize];
        for (c, cl) in self.clauses.iter().enumerate() {
            let Some(weight) = cl.weight else { continue };
            if !self.is_open(c) || self.n_false[c] as usize + 1 != cl.lits.len() {
                continue;
            }
            let l = self.unassigned_lit(c).expect("open unit clause");
            let slot = &mut w[l.var().idx0()];
            if l.is_negated() {
                slot.1 += weight;
            } else {
                slot.0 += weight;
            }
        }
        w
    }

    /// Admissible lower bound on the soft cost of any completion.
    pub fn lower_bound(&self) -> u64 {
        self.cost
            + self
                .pending_soft_units()
                .iter()
                .map(|&(p, n)| p.min(n))
                .sum::<u64>()
    }

    /// Current values as a total assignment, unassigned variables false.
    pub fn to_assignment(&self) -> Assignment {
        Assignment::new(self.value.iter().map(|v| v.unwrap_or(false)).collect())
    }
}

/// Search limits; `None` means unlimited.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

struct Bnb<'a> {
    state: SearchState,
    top: u64,
    best: u64,
    witness: Option<Assignment>,
    incumbents: Vec<u64>,
    nodes: u64,
    budget: Budget,
    started: Instant,
    exhausted: bool,
    on_incumbent: Option<&'a mut dyn FnMut(u64)>,
}

enum NodeOutcome {
    Prune,
    Branch(Var, bool),
    Leaf,
}

impl Bnb<'_> {
    fn out_of_budget(&mut self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes >= max {
                self.exhausted = true;
            }
        }
        if let Some(limit) = self.budget.time_limit {
            if self.nodes.is_multiple_of(256) && self.started.elapsed() >= limit {
                self.exhausted = true;
            }
        }
        self.exhausted
    }

    /// Propagates, bounds and picks the branching variable.
    fn process(&mut self) -> NodeOutcome {
        loop {
            if self.state.unit_propagate() == Propagation::Conflict {
                return NodeOutcome::Prune;
            }
            let pending = self.state.pending_soft_units();
            let extra: u64 = pending.iter().map(|&(p, n)| p.min(n)).sum();
            let lb = self.state.cost + extra;
            if lb >= self.best {
                return NodeOutcome::Prune;
            }
            // a polarity whose pending units alone would reach the incumbent
            // is forced
            let mut forced = false;
            for (i, &(p, n)) in pending.iter().enumerate() {
                let base = lb - p.min(n);
                let v = Var::new(i as u32 + 1);
                if base + p >= self.best {
                    self.state.assign(v.pos());
                    forced = true;
                } else if base + n >= self.best {
                    self.state.assign(v.neg());
                    forced = true;
                }
            }
            if !forced {
                break;
            }
            self.state.requeue_units();
        }

        // branching: most occurrences in open clauses, lowest index on ties
        let n = self.state.num_vars as usize;
        let mut occ = vec![0u32; n];
        let mut weight = vec![(0u64, 0u64); n];
        for (c, cl) in self.state.clauses.iter().enumerate() {
            if !self.state.is_open(c) {
                continue;
            }
            let w = cl.weight.unwrap_or(self.top);
            for &l in &cl.lits {
                let i = l.var().idx0();
                if self.state.value[i].is_some() {
                    continue;
                }
                occ[i] += 1;
                if l.is_negated() {
                    weight[i].1 = weight[i].1.saturating_add(w);
                } else {
                    weight[i].0 = weight[i].0.saturating_add(w);
                }
            }
        }
        let mut pick: Option<usize> = None;
        for i in 0..n {
            if occ[i] > 0 && pick.is_none_or(|j| occ[i] > occ[j]) {
                pick = Some(i);
            }
        }
        match pick {
            Some(i) => NodeOutcome::Branch(Var::new(i as u32 + 1), weight[i].0 >= weight[i].1),
            None => NodeOutcome::Leaf,
        }
    }

    fn search(&mut self) {
        if self.out_of_budget() {
            return;
        }
        self.nodes += 1;
        let mark = self.state.trail.len();
        match self.process() {
            NodeOutcome::Prune => {}
            NodeOutcome::Leaf => {
                self.best = self.state.cost;
                self.witness = Some(self.state.to_assignment());
                self.incumbents.push(self.best);
                if let Some(cb) = self.on_incumbent.as_mut() {
                    cb(self.best);
                }
            }
            NodeOutcome::Branch(v, first) => {
                for value in [first, !first] {
                    let m = self.state.trail.len();
                    self.state.assign(Lit::new(v, !value));
                    self.search();
                    self.state.undo_to(m);
                    if self.exhausted {
                        break;
                    }
                }
            }
        }
        self.state.undo_to(mark);
    }
}

/// Solves `f` by depth-first branch and bound.
pub fn solve_bnb(f: &Formula, budget: Budget) -> OptResult {
    solve_bnb_with(f, budget, None)
}

/// As [`solve_bnb`], calling `on_incumbent` with each improved cost.
pub fn solve_bnb_with(
    f: &Formula,
    budget: Budget,
    on_incumbent: Option<&mut dyn FnMut(u64)>,
) -> OptResult {
    let mut bnb = Bnb {
        state: SearchState::new(f),
        top: f.top(),
        best: f.soft_weight_sum() + 1,
        witness: None,
        incumbents: Vec::new(),
        nodes: 0,
        budget,
        started: Instant::now(),
        exhausted: false,
        on_incumbent,
    };
    bnb.search();
    let status = if bnb.exhausted {
        Status::Incomplete
    } else if bnb.witness.is_some() {
        Status::Optimum
    } else {
        Status::HardUnsat
    };
    OptResult {
        status,
        cost: bnb.witness.as_ref().map(|_| bnb.best),
        witness: bnb.witness,
        nodes: bnb.nodes,
        incumbents: bnb.incumbents,
    }
}
