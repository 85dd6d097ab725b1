//! CDCL search: decisions, propagation, conflict analysis with a pluggable
//! weakening strategy, learning, backjumping, restarts and database
//! reduction.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{resolve_step_rec, Recorder, Strategy, Tracked};
use crate::assignment::Assignment;
use crate::constraint::{Constraint, Normalized};
use crate::int::Int;
use crate::lit::{Literal, Var};
use crate::opb::{ParsedInstance, Status};
use crate::propagation::{CRef, Propagator, Reason, Trail};
use crate::rules::{self, Operand, Rule, RuleError, RuleStep};
use crate::trace::{DerivationTrace, TraceId};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Drives random decisions; irrelevant while `random_decision_freq` is 0.
    pub seed: u64,
    /// Variable-activity decay, in (0, 1).
    pub decay: f64,
    /// Conflicts per unit of the Luby sequence; 0 disables restarts.
    pub restart_base: u64,
    /// Learned constraints between two database reductions; 0 disables.
    pub reduce_interval: u64,
    pub random_decision_freq: f64,
    pub conflict_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Set from outside to stop the search with UNKNOWN.
    pub interrupt: Option<Arc<AtomicBool>>,
    pub record_trace: bool,
    /// Re-check slacks, fixpoint and reasons after every propagation. Slow.
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::GenRes,
            seed: 0,
            decay: 0.95,
            restart_base: 100,
            reduce_interval: 2000,
            random_decision_freq: 0.0,
            conflict_budget: None,
            time_budget: None,
            interrupt: None,
            record_trace: false,
            check_invariants: false,
        }
    }
}

impl SolverConfig {
    pub fn new(strategy: Strategy) -> SolverConfig {
        SolverConfig {
            strategy,
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(SolverError::Config(format!("decay {} not in (0, 1)", self.decay)));
        }
        if !(0.0..=1.0).contains(&self.random_decision_freq) {
            return Err(SolverError::Config(format!(
                "random decision frequency {} not in [0, 1]",
                self.random_decision_freq
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
    pub resolve_steps: u64,
    /// Bit width of the largest coefficient or degree of any learned constraint.
    pub max_coeff_bits: u64,
    /// Multiply-and-weaken steps that fell back to plain weakening.
    pub fallbacks: u64,
    /// Resolution outputs that were not falsified where they were derived.
    pub conflictuality_violations: u64,
    pub seconds: f64,
}

impl SolverStats {
    /// Propagations plus decisions per second of wall-clock time.
    pub fn assignments_per_second(&self) -> f64 {
        if self.seconds > 0.0 {
            (self.propagations + self.decisions) as f64 / self.seconds
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub status: Status,
    /// Total assignment, present iff the status is SAT.
    pub model: Option<Vec<bool>>,
    pub stats: SolverStats,
    pub trace: Option<DerivationTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    /// The interrupt flag or time budget fired inside conflict analysis;
    /// [`Solver::solve`] reports this as UNKNOWN.
    #[error("interrupted")]
    Interrupted,
}

/// Variable activities with a max-heap (ties: lowest index) and saved phases.
#[derive(Debug, Clone)]
pub struct Vsids {
    activity: Vec<f64>,
    inc: f64,
    decay: f64,
    heap: Vec<usize>,
    pos: Vec<usize>,
    phase: Vec<bool>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl Vsids {
    pub fn new(num_vars: usize, decay: f64) -> Vsids {
        Vsids {
            activity: vec![0.0; num_vars],
            inc: 1.0,
            decay,
            heap: (0..num_vars).collect(),
            pos: (0..num_vars).collect(),
            phase: vec![false; num_vars],
        }
    }

    pub fn activity(&self, v: Var) -> f64 {
        self.activity[v.slot()]
    }

    fn better(&self, a: usize, b: usize) -> bool {
        let (x, y) = (self.activity[a], self.activity[b]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.better(v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.better(self.heap[r], self.heap[l]) { r } else { l };
            if !self.better(self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    pub fn insert(&mut self, v: Var) {
        let s = v.slot();
        if self.pos[s] != NOT_IN_HEAP {
            return;
        }
        self.heap.push(s);
        let i = self.heap.len() - 1;
        self.pos[s] = i;
        self.sift_up(i);
    }

    fn pop(&mut self) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty heap");
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0);
        }
        Some(top)
    }

    pub fn bump(&mut self, v: Var) {
        let s = v.slot();
        self.activity[s] += self.inc;
        if self.activity[s] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        if self.pos[s] != NOT_IN_HEAP {
            self.sift_up(self.pos[s]);
        }
    }

    pub fn decay(&mut self) {
        self.inc /= self.decay;
    }

    pub fn save_phase(&mut self, lit: Literal) {
        self.phase[lit.var().slot()] = lit.is_positive();
    }

    pub fn phase(&self, v: Var) -> bool {
        self.phase[v.slot()]
    }

    /// Unassigned variable of highest activity with its saved phase, or
    /// `None` if everything is assigned.
    pub fn decide(&mut self, assigned: impl Fn(Var) -> bool) -> Option<Literal> {
        while let Some(s) = self.pop() {
            let v = Var::from_slot(s);
            if !assigned(v) {
                return Some(Literal::new(v, self.phase[s]));
            }
        }
        None
    }
}

/// `i`-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ...
pub fn luby(i: u64) -> u64 {
    let mut i = i.max(1);
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// True iff, under the trail restricted to levels ≤ `level`, `c` has
/// non-negative slack and some literal to propagate.
pub fn is_assertive(c: &Constraint, trail: &Trail, level: u32) -> bool {
    let rho = trail.at_level(level);
    match c.propagation_candidates(&rho) {
        Ok(cands) => !cands.is_empty(),
        Err(_) => false,
    }
}

/// Smallest level below `below` at which `c` is assertive.
pub fn assertion_level(c: &Constraint, trail: &Trail, below: u32) -> Option<u32> {
    // (level, weight, falsified) with unassigned literals at level ∞
    let mut terms: Vec<(u32, &Int, bool)> = c
        .terms()
        .iter()
        .map(|(l, w)| match trail.level(l.var()) {
            Some(lv) => (lv, w, trail.is_falsified(*l)),
            None => (u32::MAX, w, false),
        })
        .collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(a.1)));
    // max weight among terms at index ≥ i
    let mut suffix_max: Vec<&Int> = vec![&Int::ZERO; terms.len() + 1];
    for i in (0..terms.len()).rev() {
        suffix_max[i] = suffix_max[i + 1].max(terms[i].1);
    }
    let mut slack = &c.weight_sum() - c.degree();
    let mut i = 0;
    let mut level = 0;
    loop {
        if level >= below {
            return None;
        }
        while i < terms.len() && terms[i].0 <= level {
            if terms[i].2 {
                slack -= terms[i].1;
            }
            i += 1;
        }
        if !slack.is_negative() && *suffix_max[i] > slack {
            return Some(level);
        }
        if i == terms.len() {
            return None;
        }
        level = terms[i].0;
    }
}

/// Smallest level below the current one at which `c` is assertive.
pub fn backjump_level(c: &Constraint, trail: &Trail) -> Result<u32, SolverError> {
    assertion_level(c, trail, trail.decision_level())
        .ok_or_else(|| SolverError::Invariant(format!("{c} is not assertive below the current level")))
}

/// Result of analysing one conflict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Analysis {
    /// `constraint` is assertive at `level`. `existing` is set when no
    /// resolution was needed and the constraint is already stored.
    Learn {
        constraint: Constraint,
        level: u32,
        id: TraceId,
        existing: Option<CRef>,
    },
    /// A contradiction was derived.
    Refuted,
}

enum Stop {
    Sat,
    Unsat,
    Unknown,
}

pub struct Solver {
    config: SolverConfig,
    engine: Propagator,
    vsids: Vsids,
    rng: ChaCha8Rng,
    inputs: Vec<Constraint>,
    infeasible: bool,
    trace: Option<DerivationTrace>,
    ids: Vec<TraceId>,
    stats: SolverStats,
    cla_inc: f64,
    learned_since_reduce: u64,
    luby_index: u64,
    conflicts_since_restart: u64,
    start: Instant,
    level0_conflict: Option<CRef>,
}

impl Solver {
    pub fn new(instance: &ParsedInstance, config: SolverConfig) -> Result<Solver, SolverError> {
        config.validate()?;
        let n = instance.num_vars();
        let mut s = Solver {
            engine: Propagator::new(n),
            vsids: Vsids::new(n, config.decay),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            inputs: instance.constraints.clone(),
            infeasible: instance.infeasible,
            trace: config.record_trace.then(DerivationTrace::new),
            ids: Vec::new(),
            stats: SolverStats::default(),
            cla_inc: 1.0,
            learned_since_reduce: 0,
            luby_index: 1,
            conflicts_since_restart: 0,
            start: Instant::now(),
            level0_conflict: None,
            config,
        };
        for c in &instance.constraints {
            let mut id = s.trace_input(Normalized::Constraint(c.clone()));
            let sat = rules::saturate(c);
            if &sat != c {
                id = s.trace_step(vec![id], Rule::Saturate, Normalized::Constraint(sat.clone()));
            }
            s.engine.add(sat, false);
            s.ids.push(id);
        }
        let refs: Vec<CRef> = s.engine.refs().collect();
        for r in refs {
            if let Some(c) = s.engine.check(r) {
                s.level0_conflict = Some(c);
                break;
            }
        }
        Ok(s)
    }

    fn trace_input(&mut self, c: Normalized) -> TraceId {
        self.trace.as_mut().map_or(0, |t| t.input(c))
    }

    fn trace_step(&mut self, inputs: Vec<TraceId>, rule: Rule, out: Normalized) -> TraceId {
        self.trace.as_mut().map_or(0, |t| t.step(inputs, rule, out))
    }

    pub fn trail(&self) -> &Trail {
        self.engine.trail()
    }

    pub fn engine(&self) -> &Propagator {
        &self.engine
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn vsids(&self) -> &Vsids {
        &self.vsids
    }

    /// Opens a new decision level with `lit` and propagates. Returns the
    /// conflict, if any.
    pub fn assume(&mut self, lit: Literal) -> Result<Option<CRef>, SolverError> {
        if let Some(c) = self.level0_conflict.take() {
            return Ok(Some(c));
        }
        if let Some(c) = self.engine.propagate_all() {
            return Ok(Some(c));
        }
        self.engine
            .assign(lit, Reason::Decision)
            .map_err(|e| SolverError::Invariant(e.to_string()))?;
        Ok(self.engine.propagate_all())
    }

    fn bump_constraint(&mut self, r: CRef) {
        let inc = self.cla_inc;
        let slot = self.engine.slot_mut(r);
        if slot.learned {
            slot.activity += inc;
            if slot.activity > 1e100 {
                let refs: Vec<CRef> = self.engine.refs().collect();
                for r in refs {
                    self.engine.slot_mut(r).activity *= 1e-100;
                }
                self.cla_inc *= 1e-100;
            }
        }
    }

    /// Turns recorded steps into trace lines and returns the id of `last`.
    fn emit(&mut self, steps: Vec<RuleStep>, last: Operand, conflict: TraceId, reason: TraceId) -> TraceId {
        let Some(trace) = self.trace.as_mut() else {
            return 0;
        };
        let mut step_ids = Vec::with_capacity(steps.len());
        let map = |op: &Operand, step_ids: &[TraceId]| match op {
            Operand::Conflict => conflict,
            Operand::Reason => reason,
            Operand::Step(k) => step_ids[*k],
        };
        for st in steps {
            let inputs = st.inputs.iter().map(|op| map(op, &step_ids)).collect();
            step_ids.push(trace.step(inputs, st.rule, st.output));
        }
        map(&last, &step_ids)
    }

    /// One resolution of `cur` with the reason of trail entry `pos`.
    fn resolve_at(
        &mut self,
        cur: &Tracked,
        cur_id: TraceId,
        pos: usize,
        r: CRef,
    ) -> Result<(Normalized, TraceId), SolverError> {
        if self.interrupted() {
            return Err(SolverError::Interrupted);
        }
        let lit = self.engine.trail().entries()[pos].lit;
        let reason = self.engine.constraint(r).clone();
        for v in reason.vars() {
            self.vsids.bump(v);
        }
        self.bump_constraint(r);
        let mut rec = Recorder::new(self.trace.is_some());
        let rho = self.engine.trail().prefix(pos + 1);
        let reason_t = Tracked { c: reason, op: Operand::Reason };
        let (out, last, fallback) =
            resolve_step_rec(cur, &reason_t, lit, &rho, self.config.strategy, &mut rec)?;
        let ok = match &out {
            Normalized::Constraint(c) => c.is_conflicting(&rho),
            Normalized::False => true,
            Normalized::True => false,
        };
        self.stats.resolve_steps += 1;
        self.stats.fallbacks += u64::from(fallback);
        if fallback {
            if let Some(t) = self.trace.as_mut() {
                t.comment(format!("multiply-weaken fallback on {lit}"));
            }
        }
        if !ok {
            self.stats.conflictuality_violations += 1;
        }
        let reason_id = self.ids[r.0 as usize];
        let id = self.emit(rec.steps, last, cur_id, reason_id);
        Ok((out, id))
    }

    /// Derives a contradiction from `cur`, falsified by the level-0 prefix of
    /// length `i`: resolve away every falsified literal, then weaken the rest.
    fn refute(&mut self, mut cur: Tracked, mut cur_id: TraceId, mut i: usize) -> Result<Analysis, SolverError> {
        while i > 0 {
            i -= 1;
            let e = self.engine.trail().entries()[i];
            let Reason::Constraint(r) = e.reason else {
                return Err(SolverError::Invariant("decision at level 0".into()));
            };
            if !cur.c.contains(!e.lit) {
                continue;
            }
            let (out, id) = self.resolve_at(&cur, cur_id, i, r)?;
            cur_id = id;
            match out {
                Normalized::Constraint(c) => cur = Tracked { c, op: Operand::Conflict },
                _ => return self.finish_refutation(cur_id),
            }
        }
        let lits: Vec<Literal> = cur.c.literals().collect();
        for lit in lits {
            let out = rules::weaken(&cur.c, lit)?;
            cur_id = self.trace_step(vec![cur_id], Rule::Weaken { lit }, out.clone());
            match out {
                Normalized::Constraint(c) => cur.c = c,
                Normalized::False => return self.finish_refutation(cur_id),
                Normalized::True => {
                    return Err(SolverError::Invariant("level-0 conflict weakened to a tautology".into()))
                }
            }
        }
        Err(SolverError::Invariant(format!("{} survived full weakening", cur.c)))
    }

    fn finish_refutation(&mut self, id: TraceId) -> Result<Analysis, SolverError> {
        if let Some(t) = self.trace.as_mut() {
            t.refutation(id);
        }
        Ok(Analysis::Refuted)
    }

    /// Walks the trail from the top, resolving `conflict` with the reasons of
    /// the literals it falsifies until the result is assertive below the
    /// level of the walk, or a contradiction is derived at level 0.
    pub fn analyze_conflict(&mut self, conflict: CRef) -> Result<Analysis, SolverError> {
        let c = self.engine.constraint(conflict).clone();
        if !c.is_conflicting(self.engine.trail()) {
            return Err(SolverError::Invariant(format!("{c} is not falsified")));
        }
        for v in c.vars() {
            self.vsids.bump(v);
        }
        self.bump_constraint(conflict);
        let mut cur = Tracked { c, op: Operand::Conflict };
        let mut cur_id = self.ids[conflict.0 as usize];
        let mut resolved = 0usize;
        let mut checked_at: Option<u32> = None;
        let mut i = self.engine.trail().len();
        loop {
            let cl = if i == 0 { 0 } else { self.engine.trail().entries()[i - 1].level };
            if cl == 0 {
                return self.refute(cur, cur_id, i);
            }
            if checked_at != Some(cl) {
                if let Some(level) = assertion_level(&cur.c, self.engine.trail(), cl) {
                    return Ok(Analysis::Learn {
                        constraint: cur.c,
                        level,
                        id: cur_id,
                        existing: (resolved == 0).then_some(conflict),
                    });
                }
                checked_at = Some(cl);
            }
            i -= 1;
            let e = self.engine.trail().entries()[i];
            let Reason::Constraint(r) = e.reason else { continue };
            if !cur.c.contains(!e.lit) {
                continue;
            }
            let (out, id) = self.resolve_at(&cur, cur_id, i, r)?;
            cur_id = id;
            resolved += 1;
            checked_at = None;
            match out {
                Normalized::Constraint(c) => cur = Tracked { c, op: Operand::Conflict },
                _ => return self.finish_refutation(cur_id),
            }
        }
    }

    fn backjump(&mut self, level: u32) -> Result<(), SolverError> {
        if level >= self.engine.decision_level() {
            return Ok(());
        }
        let keep = self.engine.trail().level_start(level + 1);
        for e in &self.engine.trail().entries()[keep..] {
            self.vsids.save_phase(e.lit);
            self.vsids.insert(e.lit.var());
        }
        self.engine
            .backjump_to(level)
            .map_err(|e| SolverError::Invariant(e.to_string()))
    }

    /// Stores the outcome of an analysis and propagates it. Returns a new
    /// conflict if storing it immediately falsifies something.
    fn learn(&mut self, analysis: Analysis) -> Result<Option<CRef>, SolverError> {
        let Analysis::Learn { constraint, level, id, existing } = analysis else {
            return Err(SolverError::Invariant("learn called on a refutation".into()));
        };
        self.backjump(level)?;
        let r = match existing {
            Some(r) => r,
            None => {
                self.stats.max_coeff_bits = self.stats.max_coeff_bits.max(constraint.coeff_bits());
                let r = self.engine.add(constraint, true);
                self.ids.push(id);
                if let Some(t) = self.trace.as_mut() {
                    t.learned(id);
                }
                self.stats.learned += 1;
                self.learned_since_reduce += 1;
                self.bump_constraint(r);
                r
            }
        };
        let before = self.engine.trail().len();
        let conflict = self.engine.check(r);
        if conflict.is_none() && self.engine.trail().len() == before {
            return Err(SolverError::Invariant(format!(
                "learned constraint {} propagates nothing at level {level}",
                self.engine.constraint(r)
            )));
        }
        Ok(conflict)
    }

    fn reduce_db(&mut self) {
        let mut learned: Vec<(f64, CRef)> = self
            .engine
            .refs()
            .filter(|r| self.engine.slot(*r).learned)
            .map(|r| (self.engine.slot(r).activity, r))
            .collect();
        learned.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1 .0.cmp(&b.1 .0)));
        let half = learned.len() / 2;
        let drop: Vec<CRef> = learned[..half]
            .iter()
            .map(|(_, r)| *r)
            .filter(|r| !self.engine.is_locked(*r))
            .collect();
        self.stats.deleted += drop.len() as u64;
        self.engine.remove(&drop);
    }

    /// Checked once per resolution step, where a single analysis on huge
    /// coefficients can otherwise outlive the time limit.
    fn interrupted(&self) -> bool {
        self.config.interrupt.as_ref().is_some_and(|f| f.load(Ordering::Relaxed))
            || self.config.time_budget.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn out_of_budget(&self) -> bool {
        if let Some(flag) = &self.config.interrupt {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        if let Some(b) = self.config.conflict_budget {
            if self.stats.conflicts >= b {
                return true;
            }
        }
        if let Some(t) = self.config.time_budget {
            if self.stats.conflicts.is_multiple_of(1024) && self.start.elapsed() >= t {
                return true;
            }
        }
        false
    }

    fn check_invariants(&self) -> Result<(), SolverError> {
        if !self.engine.slacks_coherent() {
            return Err(SolverError::Invariant("incremental slacks drifted".into()));
        }
        if !self.engine.at_fixpoint() {
            return Err(SolverError::Invariant("propagation stopped before fixpoint".into()));
        }
        if !self.engine.reasons_valid() {
            return Err(SolverError::Invariant("a reason does not imply its literal".into()));
        }
        Ok(())
    }

    fn pick_branch(&mut self) -> Option<Literal> {
        let trail = self.engine.trail();
        let n = trail.num_vars();
        if self.config.random_decision_freq > 0.0 && n > 0 && self.rng.gen_bool(self.config.random_decision_freq) {
            let v = Var::from_slot(self.rng.gen_range(0..n));
            if trail.var_value(v).is_none() {
                return Some(Literal::new(v, self.vsids.phase(v)));
            }
        }
        self.vsids.decide(|v| trail.var_value(v).is_some())
    }

    fn search(&mut self) -> Result<Stop, SolverError> {
        if self.infeasible {
            let id = self.trace_input(Normalized::False);
            self.finish_refutation(id)?;
            return Ok(Stop::Unsat);
        }
        let mut pending = self.level0_conflict.take();
        loop {
            let conflict = match pending.take() {
                Some(c) => Some(c),
                None => self.engine.propagate_all(),
            };
            if let Some(conflict) = conflict {
                self.stats.conflicts += 1;
                self.conflicts_since_restart += 1;
                let analysis = if self.engine.decision_level() == 0 {
                    let cur = Tracked {
                        c: self.engine.constraint(conflict).clone(),
                        op: Operand::Conflict,
                    };
                    let id = self.ids[conflict.0 as usize];
                    let len = self.engine.trail().len();
                    self.refute(cur, id, len)?
                } else {
                    self.analyze_conflict(conflict)?
                };
                if analysis == Analysis::Refuted {
                    return Ok(Stop::Unsat);
                }
                pending = self.learn(analysis)?;
                self.vsids.decay();
                self.cla_inc /= 0.999;
                if self.out_of_budget() {
                    return Ok(Stop::Unknown);
                }
                if pending.is_some() {
                    continue;
                }
                if self.config.reduce_interval > 0 && self.learned_since_reduce >= self.config.reduce_interval {
                    self.learned_since_reduce = 0;
                    self.reduce_db();
                }
                if self.config.restart_base > 0
                    && self.conflicts_since_restart >= luby(self.luby_index) * self.config.restart_base
                {
                    self.conflicts_since_restart = 0;
                    self.luby_index += 1;
                    self.stats.restarts += 1;
                    self.backjump(0)?;
                }
                continue;
            }
            if self.config.check_invariants {
                self.check_invariants()?;
            }
            if let Some(flag) = &self.config.interrupt {
                if flag.load(Ordering::Relaxed) {
                    return Ok(Stop::Unknown);
                }
            }
            match self.pick_branch() {
                Some(lit) => {
                    self.stats.decisions += 1;
                    self.engine
                        .assign(lit, Reason::Decision)
                        .map_err(|e| SolverError::Invariant(e.to_string()))?;
                }
                None => return Ok(Stop::Sat),
            }
        }
    }

    pub fn solve(mut self) -> Result<SolverResult, SolverError> {
        self.start = Instant::now();
        let stop = match self.search() {
            Err(SolverError::Interrupted) => Stop::Unknown,
            other => other?,
        };
        self.stats.propagations = self.engine.propagations;
        self.stats.seconds = self.start.elapsed().as_secs_f64();
        let (status, model) = match stop {
            Stop::Sat => {
                let model = self.engine.trail().model();
                let ok = self.inputs.iter().all(|c| c.is_satisfied_by(|l| model[l.var().slot()] == l.is_positive()));
                if !ok {
                    return Err(SolverError::Invariant("model violates an input constraint".into()));
                }
                (Status::Sat, Some(model))
            }
            Stop::Unsat => (Status::Unsat, None),
            Stop::Unknown => (Status::Unknown, None),
        };
        Ok(SolverResult {
            status,
            model,
            stats: self.stats,
            trace: self.trace,
        })
    }
}

/// Solves `instance` from scratch under `config`.
pub fn solve(instance: &ParsedInstance, config: SolverConfig) -> Result<SolverResult, SolverError> {
    Solver::new(instance, config)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let v: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(v, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn first_decision_is_x1_false() {
        let mut h = Vsids::new(4, 0.95);
        assert_eq!(h.decide(|_| false), Some(!Literal::new(Var::new(1), true)));
    }

    #[test]
    fn bumped_variable_is_chosen_and_phase_kept() {
        let mut h = Vsids::new(5, 0.95);
        h.bump(Var::new(3));
        h.decay();
        h.bump(Var::new(4));
        h.save_phase(Literal::new(Var::new(4), true));
        assert_eq!(h.decide(|_| false), Some(Literal::new(Var::new(4), true)));
        assert_eq!(h.decide(|_| false), Some(!Literal::new(Var::new(3), true)));
        assert_eq!(h.decide(|v| v.index() == 1), Some(!Literal::new(Var::new(2), true)));
        h.insert(Var::new(1));
        assert_eq!(h.decide(|_| false), Some(!Literal::new(Var::new(1), true)));
        assert_eq!(h.decide(|_| false), Some(!Literal::new(Var::new(5), true)));
        assert_eq!(h.decide(|_| false), None);
    }

    #[test]
    fn rescaling_keeps_order() {
        let mut h = Vsids::new(3, 0.5);
        h.bump(Var::new(1));
        for _ in 0..400 {
            h.bump(Var::new(2));
            h.decay();
        }
        assert!(h.activity(Var::new(2)).is_finite());
        assert!(h.activity(Var::new(2)) > h.activity(Var::new(1)));
        assert_eq!(h.decide(|_| false).map(|l| l.var()), Some(Var::new(2)));
    }

    #[test]
    fn rejects_bad_decay() {
        let cfg = SolverConfig { decay: 1.0, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
