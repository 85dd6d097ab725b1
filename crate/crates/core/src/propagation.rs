//! Trail and counter-based propagation. Every stored constraint keeps its
//! slack under the current trail; assigning a literal subtracts its
//! negation's weight from each constraint containing the negation.

use crate::assignment::Assignment;
use crate::constraint::Constraint;
use crate::int::Int;
use crate::lit::{Literal, Var};

/// Index of a constraint in the [`Propagator`] database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CRef(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Decision,
    Constraint(CRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub lit: Literal,
    pub level: u32,
    pub reason: Reason,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PropagationError {
    #[error("variable {0} is already assigned")]
    AlreadyAssigned(Var),
    #[error("cannot backjump to level {target} from level {current}")]
    BadBackjump { target: u32, current: u32 },
}

#[derive(Debug, Clone, Copy)]
struct VarInfo {
    value: Option<bool>,
    level: u32,
    position: usize,
    reason: Reason,
}

const UNASSIGNED: VarInfo = VarInfo {
    value: None,
    level: 0,
    position: usize::MAX,
    reason: Reason::Decision,
};

/// Assigned literals in order, with their levels and reasons.
#[derive(Debug, Clone, Default)]
pub struct Trail {
    entries: Vec<TrailEntry>,
    level_starts: Vec<usize>,
    vars: Vec<VarInfo>,
}

impl Trail {
    pub fn new(num_vars: usize) -> Trail {
        Trail {
            entries: Vec::with_capacity(num_vars),
            level_starts: Vec::new(),
            vars: vec![UNASSIGNED; num_vars],
        }
    }

    fn ensure_var(&mut self, var: Var) {
        if var.slot() >= self.vars.len() {
            self.vars.resize(var.slot() + 1, UNASSIGNED);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn entries(&self) -> &[TrailEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn decision_level(&self) -> u32 {
        self.level_starts.len() as u32
    }

    /// Trail position where `level` starts (level 0 starts at 0).
    pub fn level_start(&self, level: u32) -> usize {
        if level == 0 {
            0
        } else {
            self.level_starts
                .get(level as usize - 1)
                .copied()
                .unwrap_or(self.entries.len())
        }
    }

    pub fn var_value(&self, var: Var) -> Option<bool> {
        self.vars.get(var.slot()).and_then(|i| i.value)
    }

    pub fn level(&self, var: Var) -> Option<u32> {
        self.vars
            .get(var.slot())
            .filter(|i| i.value.is_some())
            .map(|i| i.level)
    }

    pub fn position(&self, var: Var) -> Option<usize> {
        self.vars
            .get(var.slot())
            .filter(|i| i.value.is_some())
            .map(|i| i.position)
    }

    pub fn reason(&self, var: Var) -> Option<Reason> {
        self.vars
            .get(var.slot())
            .filter(|i| i.value.is_some())
            .map(|i| i.reason)
    }

    fn push(&mut self, lit: Literal, reason: Reason) -> Result<(), PropagationError> {
        self.ensure_var(lit.var());
        let info = &mut self.vars[lit.var().slot()];
        if info.value.is_some() {
            return Err(PropagationError::AlreadyAssigned(lit.var()));
        }
        if reason == Reason::Decision {
            self.level_starts.push(self.entries.len());
        }
        let level = self.level_starts.len() as u32;
        *info = VarInfo {
            value: Some(lit.is_positive()),
            level,
            position: self.entries.len(),
            reason,
        };
        self.entries.push(TrailEntry { lit, level, reason });
        Ok(())
    }

    fn pop(&mut self) -> Option<TrailEntry> {
        let e = self.entries.pop()?;
        self.vars[e.lit.var().slot()] = UNASSIGNED;
        if self.level_starts.last() == Some(&self.entries.len()) {
            self.level_starts.pop();
        }
        Some(e)
    }

    /// The assignment made by the first `len` trail entries.
    pub fn prefix(&self, len: usize) -> TrailPrefix<'_> {
        TrailPrefix { trail: self, len }
    }

    /// The assignment made by entries at levels `≤ level`.
    pub fn at_level(&self, level: u32) -> TrailPrefix<'_> {
        self.prefix(self.level_start(level + 1))
    }

    /// Model over all variables, unassigned ones read as false.
    pub fn model(&self) -> Vec<bool> {
        self.vars.iter().map(|i| i.value.unwrap_or(false)).collect()
    }
}

impl Assignment for Trail {
    fn value(&self, lit: Literal) -> Option<bool> {
        self.var_value(lit.var()).map(|v| v == lit.is_positive())
    }
}

/// View of the assignment made by a prefix of the trail.
#[derive(Clone, Copy)]
pub struct TrailPrefix<'a> {
    trail: &'a Trail,
    len: usize,
}

impl TrailPrefix<'_> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Assignment for TrailPrefix<'_> {
    fn value(&self, lit: Literal) -> Option<bool> {
        let info = self.trail.vars.get(lit.var().slot())?;
        match info.value {
            Some(v) if info.position < self.len => Some(v == lit.is_positive()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintSlot {
    pub constraint: Constraint,
    pub slack: Int,
    max_weight: Int,
    pub learned: bool,
    pub activity: f64,
    pub deleted: bool,
}

/// Constraint database with incremental slacks, plus the trail.
#[derive(Debug, Clone, Default)]
pub struct Propagator {
    trail: Trail,
    slots: Vec<ConstraintSlot>,
    /// For each literal code, the constraints containing that literal.
    occurs: Vec<Vec<(CRef, Int)>>,
    qhead: usize,
    pub propagations: u64,
}

impl Propagator {
    pub fn new(num_vars: usize) -> Propagator {
        Propagator {
            trail: Trail::new(num_vars),
            slots: Vec::new(),
            occurs: vec![Vec::new(); 2 * num_vars],
            qhead: 0,
            propagations: 0,
        }
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn decision_level(&self) -> u32 {
        self.trail.decision_level()
    }

    pub fn slot(&self, r: CRef) -> &ConstraintSlot {
        &self.slots[r.0 as usize]
    }

    pub fn slot_mut(&mut self, r: CRef) -> &mut ConstraintSlot {
        &mut self.slots[r.0 as usize]
    }

    pub fn constraint(&self, r: CRef) -> &Constraint {
        &self.slots[r.0 as usize].constraint
    }

    pub fn slack(&self, r: CRef) -> &Int {
        &self.slots[r.0 as usize].slack
    }

    pub fn refs(&self) -> impl Iterator<Item = CRef> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.deleted)
            .map(|(i, _)| CRef(i as u32))
    }

    pub fn num_constraints(&self) -> usize {
        self.slots.iter().filter(|s| !s.deleted).count()
    }

    fn ensure_lit(&mut self, lit: Literal) {
        let need = lit.var().slot() * 2 + 2;
        if self.occurs.len() < need {
            self.occurs.resize(need, Vec::new());
        }
    }

    /// Stores `c` with its slack under the current trail. Call
    /// [`Propagator::check`] afterwards to act on it.
    pub fn add(&mut self, c: Constraint, learned: bool) -> CRef {
        let r = CRef(self.slots.len() as u32);
        for (l, w) in c.terms() {
            self.ensure_lit(*l);
            self.occurs[l.code()].push((r, w.clone()));
        }
        let slack = c.slack(&self.trail);
        let max_weight = c.max_weight();
        self.slots.push(ConstraintSlot {
            constraint: c,
            slack,
            max_weight,
            learned,
            activity: 0.0,
            deleted: false,
        });
        r
    }

    /// Assigns `lit`, lowering the slack of every constraint containing its
    /// negation.
    pub fn assign(&mut self, lit: Literal, reason: Reason) -> Result<(), PropagationError> {
        self.trail.push(lit, reason)?;
        self.ensure_lit(lit);
        let neg = (!lit).code();
        for (r, w) in &self.occurs[neg] {
            self.slots[r.0 as usize].slack -= w;
        }
        if reason != Reason::Decision {
            self.propagations += 1;
        }
        Ok(())
    }

    /// Returns `Some(r)` if `r` is falsified, otherwise assigns every
    /// unassigned literal of `r` heavier than its slack.
    pub fn check(&mut self, r: CRef) -> Option<CRef> {
        let slot = &self.slots[r.0 as usize];
        if slot.deleted {
            return None;
        }
        if slot.slack.is_negative() {
            return Some(r);
        }
        if slot.slack >= slot.max_weight {
            return None;
        }
        let implied: Vec<Literal> = slot
            .constraint
            .terms()
            .iter()
            .filter(|(l, w)| *w > slot.slack && self.trail.is_unassigned(*l))
            .map(|(l, _)| *l)
            .collect();
        for l in implied {
            self.assign(l, Reason::Constraint(r))
                .expect("candidate literal was unassigned");
        }
        None
    }

    /// Processes falsified literals in FIFO order until fixpoint or the first
    /// falsified constraint, which is returned. On conflict the rest of the
    /// queue is dropped.
    pub fn propagate_all(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let lit = self.trail.entries[self.qhead].lit;
            self.qhead += 1;
            let neg = (!lit).code();
            let mut i = 0;
            while i < self.occurs[neg].len() {
                let r = self.occurs[neg][i].0;
                i += 1;
                if let Some(conflict) = self.check(r) {
                    self.qhead = self.trail.len();
                    return Some(conflict);
                }
            }
        }
        None
    }

    /// Undoes every assignment above `level`.
    pub fn backjump_to(&mut self, level: u32) -> Result<(), PropagationError> {
        let current = self.decision_level();
        if level >= current {
            return Err(PropagationError::BadBackjump { target: level, current });
        }
        let keep = self.trail.level_start(level + 1);
        while self.trail.len() > keep {
            let e = self.trail.pop().expect("non-empty trail");
            for (r, w) in &self.occurs[(!e.lit).code()] {
                self.slots[r.0 as usize].slack += w;
            }
        }
        self.qhead = self.qhead.min(self.trail.len());
        Ok(())
    }

    /// Whether `r` is the reason of some assigned literal.
    pub fn is_locked(&self, r: CRef) -> bool {
        self.slots[r.0 as usize]
            .constraint
            .literals()
            .any(|l| self.trail.reason(l.var()) == Some(Reason::Constraint(r)))
    }

    /// Marks constraints deleted and drops them from the occurrence lists.
    pub fn remove(&mut self, refs: &[CRef]) {
        if refs.is_empty() {
            return;
        }
        for r in refs {
            debug_assert!(!self.is_locked(*r));
            let slot = &mut self.slots[r.0 as usize];
            slot.deleted = true;
            slot.constraint = Constraint::from_parts_unchecked(Vec::new(), Int::ONE);
        }
        let slots = &self.slots;
        for list in &mut self.occurs {
            list.retain(|(r, _)| !slots[r.0 as usize].deleted);
        }
    }

    /// Recomputes every slack from scratch and compares with the stored one.
    pub fn slacks_coherent(&self) -> bool {
        self.slots
            .iter()
            .filter(|s| !s.deleted)
            .all(|s| s.constraint.slack(&self.trail) == s.slack)
    }

    /// No stored constraint is falsified or can propagate further.
    pub fn at_fixpoint(&self) -> bool {
        self.slots.iter().filter(|s| !s.deleted).all(|s| {
            s.constraint
                .propagation_candidates(&self.trail)
                .map(|c| c.is_empty())
                .unwrap_or(false)
        })
    }

    /// Every propagated trail literal was implied by its reason under the
    /// assignment strictly before it.
    pub fn reasons_valid(&self) -> bool {
        self.trail.entries.iter().enumerate().all(|(pos, e)| match e.reason {
            Reason::Decision => true,
            Reason::Constraint(r) => {
                let c = self.constraint(r);
                let before = self.trail.prefix(pos);
                match (c.weight(e.lit), c.propagation_candidates(&before)) {
                    (Some(_), Ok(cands)) => cands.contains(&e.lit),
                    _ => false,
                }
            }
        })
    }
}
