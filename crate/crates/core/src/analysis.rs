//! Conflict-analysis strategies. Each one reduces the conflict side, the
//! reason side or both before they are cancelled on the pivot, so that the
//! result stays falsified and coefficients stay small.
//!
//! All functions are pure: they take constraints by reference and an
//! [`Assignment`] view, and return new constraints together with the list of
//! rule applications that derive them.

use std::fmt;
use std::str::FromStr;

use crate::assignment::Assignment;
use crate::constraint::{Constraint, Normalized};
use crate::int::Int;
use crate::lit::Literal;
use crate::rules::{self, Operand, Rule, RuleError, RuleStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Conflict,
    Reason,
    Both,
}

impl Side {
    fn conflict(self) -> bool {
        matches!(self, Side::Conflict | Side::Both)
    }

    fn reason(self) -> bool {
        matches!(self, Side::Reason | Side::Both)
    }

    fn as_str(self) -> &'static str {
        match self {
            Side::Conflict => "conflict",
            Side::Reason => "reason",
            Side::Both => "both",
        }
    }
}

/// One of the eleven conflict-analysis strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// LCM cancellation, weakening the reason until the sum stays falsified.
    GenRes,
    /// Weaken non-falsified literals whose weight the pivot weight does not
    /// divide, then divide by the pivot weight.
    Rs(Side),
    /// As `Rs`, but only weaken each such literal by its remainder.
    PartialRs(Side),
    /// Weaken every literal that is not needed for the conflict (resp. the
    /// propagation).
    WeakenIneffective(Side),
    /// Scale the reason so its pivot weight just covers the conflict's, then
    /// weaken ineffective literals until saturation brings it down exactly.
    MultiplyWeaken,
}

impl Strategy {
    pub const ALL: [Strategy; 11] = [
        Strategy::GenRes,
        Strategy::Rs(Side::Both),
        Strategy::Rs(Side::Conflict),
        Strategy::Rs(Side::Reason),
        Strategy::PartialRs(Side::Both),
        Strategy::PartialRs(Side::Conflict),
        Strategy::PartialRs(Side::Reason),
        Strategy::WeakenIneffective(Side::Both),
        Strategy::WeakenIneffective(Side::Conflict),
        Strategy::WeakenIneffective(Side::Reason),
        Strategy::MultiplyWeaken,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::GenRes => f.write_str("gen-res"),
            Strategy::Rs(s) => write!(f, "rs-{}", s.as_str()),
            Strategy::PartialRs(s) => write!(f, "partial-rs-{}", s.as_str()),
            Strategy::WeakenIneffective(s) => write!(f, "weaken-ineffective-{}", s.as_str()),
            Strategy::MultiplyWeaken => f.write_str("multiply-weaken"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected one of gen-res, rs-*, partial-rs-*, weaken-ineffective-*, multiply-weaken)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.to_string() == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// The constraint derived by one resolution step and how it was derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveOutcome {
    /// Saturated cancellation result, or `False` if it has no literal left.
    pub constraint: Normalized,
    /// Empty unless recording was requested.
    pub steps: Vec<RuleStep>,
    /// Multiply-and-weaken could not reach the target degree and fell back to
    /// generalized-resolution weakening.
    pub fallback: bool,
}

/// What [`weaken_ineffective`] must keep true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preserve {
    /// Slack stays negative; `pivot` (if any) is never weakened.
    Conflict { pivot: Option<Literal> },
    /// `pivot` stays heavier than the slack.
    Propagation { pivot: Literal },
}

#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub(crate) c: Constraint,
    pub(crate) op: Operand,
}

#[derive(Debug, Default)]
pub(crate) struct Recorder {
    enabled: bool,
    pub(crate) steps: Vec<RuleStep>,
}

impl Recorder {
    pub(crate) fn new(enabled: bool) -> Recorder {
        Recorder {
            enabled,
            steps: Vec::new(),
        }
    }

    fn record(&mut self, rule: Rule, inputs: &[Operand], output: &Normalized) -> Operand {
        if self.enabled {
            self.steps.push(RuleStep {
                rule,
                inputs: inputs.to_vec(),
                output: output.clone(),
            });
            Operand::Step(self.steps.len() - 1)
        } else {
            Operand::Step(usize::MAX)
        }
    }

    fn derive(&mut self, rule: Rule, inputs: &[&Tracked]) -> Result<(Normalized, Operand), RuleError> {
        let cs: Vec<&Constraint> = inputs.iter().map(|t| &t.c).collect();
        let out = rule.apply(&cs)?;
        let ops: Vec<Operand> = inputs.iter().map(|t| t.op).collect();
        let op = self.record(rule, &ops, &out);
        Ok((out, op))
    }

    fn derive_constraint(&mut self, rule: Rule, inputs: &[&Tracked], what: &str) -> Result<Tracked, RuleError> {
        match self.derive(rule, inputs)? {
            (Normalized::Constraint(c), op) => Ok(Tracked { c, op }),
            (other, _) => Err(RuleError::Invariant(format!("{what} produced {other}"))),
        }
    }

    fn saturate(&mut self, t: Tracked) -> Tracked {
        if t.c.is_saturated() {
            return t;
        }
        let c = rules::saturate(&t.c);
        let op = self.record(Rule::Saturate, &[t.op], &Normalized::Constraint(c.clone()));
        Tracked { c, op }
    }

    /// Records a tentatively computed weaken + saturate pair.
    fn accept_weaken(&mut self, from: &Tracked, lit: Literal, weakened: Constraint) -> Tracked {
        let op = self.record(
            Rule::Weaken { lit },
            &[from.op],
            &Normalized::Constraint(weakened.clone()),
        );
        self.saturate(Tracked { c: weakened, op })
    }
}

fn pivot_weight(c: &Constraint, lit: Literal) -> Result<Int, RuleError> {
    c.weight(lit)
        .cloned()
        .ok_or(RuleError::LiteralAbsent(lit))
}

/// Non-falsified literals of `c` other than `pivot`, lightest first.
/// `descending_ties` breaks equal weights by decreasing variable index.
fn ineffective_by_weight(
    c: &Constraint,
    pivot: Option<Literal>,
    rho: &impl Assignment,
    descending_ties: bool,
) -> Vec<(Literal, Int)> {
    let mut v: Vec<(Literal, Int)> = c
        .terms()
        .iter()
        .filter(|(l, _)| Some(*l) != pivot && !rho.is_falsified(*l))
        .cloned()
        .collect();
    if descending_ties {
        v.sort_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
    } else {
        v.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    }
    v
}

/// Weakens the reason (then saturates) until
/// `μ·slack(conflict) + ν·slack(reason) < 0` for the LCM multipliers.
fn genres_loop(
    conflict: &Tracked,
    mut reason: Tracked,
    pivot: Literal,
    rho: &impl Assignment,
    rec: &mut Recorder,
) -> Result<Tracked, RuleError> {
    let conflict_slack = conflict.c.slack(rho);
    let cw = pivot_weight(&conflict.c, !pivot)?;
    loop {
        let rw = pivot_weight(&reason.c, pivot)?;
        let lcm = cw.lcm(&rw);
        let (mu, nu) = (lcm.div_floor(&cw), lcm.div_floor(&rw));
        if (&mu * &conflict_slack + &nu * reason.c.slack(rho)).is_negative() {
            return Ok(reason);
        }
        let Some((lit, _)) = ineffective_by_weight(&reason.c, Some(pivot), rho, true)
            .into_iter()
            .next()
        else {
            return Err(RuleError::Invariant(
                "reason fully weakened but cancellation is still not falsified".into(),
            ));
        };
        let w = rec.derive_constraint(Rule::Weaken { lit }, &[&reason], "reason weakening")?;
        reason = rec.saturate(w);
    }
}

fn rs_reduce(t: Tracked, pivot: Literal, rho: &impl Assignment, partial: bool, rec: &mut Recorder) -> Result<Tracked, RuleError> {
    let r = pivot_weight(&t.c, pivot)?;
    let mut cur = t;
    if !r.is_one() {
        let offending: Vec<(Literal, Int)> = cur
            .c
            .terms()
            .iter()
            .filter(|(l, w)| *l != pivot && !rho.is_falsified(*l) && !w.is_multiple_of(&r))
            .cloned()
            .collect();
        for (lit, w) in offending {
            let rule = if partial && w > r {
                Rule::PartialWeaken {
                    lit,
                    amount: w.rem_floor(&r),
                }
            } else {
                Rule::Weaken { lit }
            };
            cur = rec.derive_constraint(rule, &[&cur], "divisibility weakening")?;
        }
    }
    if r.is_one() {
        return Ok(cur);
    }
    rec.derive_constraint(Rule::Divide { divisor: r }, &[&cur], "division")
}

fn preserves(c: &Constraint, rho: &impl Assignment, mode: Preserve) -> bool {
    match mode {
        Preserve::Conflict { .. } => c.is_conflicting(rho),
        Preserve::Propagation { pivot } => match c.weight(pivot) {
            Some(w) => {
                let s = c.slack(rho);
                !s.is_negative() && *w > s
            }
            None => false,
        },
    }
}

fn weaken_ineffective_rec(
    t: Tracked,
    rho: &impl Assignment,
    mode: Preserve,
    rec: &mut Recorder,
) -> Result<Tracked, RuleError> {
    if !preserves(&t.c, rho, mode) {
        return Err(RuleError::Precondition(format!(
            "weaken_ineffective: {} does not satisfy {mode:?}",
            t.c
        )));
    }
    let pivot = match mode {
        Preserve::Conflict { pivot } => pivot,
        Preserve::Propagation { pivot } => Some(pivot),
    };
    // non-falsified literals first, then falsified ones; lightest first
    let mut order: Vec<(bool, Int, Literal)> = t
        .c
        .terms()
        .iter()
        .filter(|(l, _)| Some(*l) != pivot)
        .map(|(l, w)| (rho.is_falsified(*l), w.clone(), *l))
        .collect();
    order.sort();
    let mut cur = t;
    loop {
        let mut changed = false;
        for (_, _, lit) in &order {
            if !cur.c.contains(*lit) {
                continue;
            }
            if let Normalized::Constraint(w) = rules::weaken(&cur.c, *lit)? {
                if preserves(&rules::saturate(&w), rho, mode) {
                    cur = rec.accept_weaken(&cur, *lit, w);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // a constraint whose remaining literals all have to be true or false
    // together with the degree rounds to a clause
    if !cur.c.is_clause() {
        let d = cur.c.degree().clone();
        let rounded = rules::divide(&cur.c, &d)?;
        if preserves(&rounded, rho, mode) {
            cur = rec.derive_constraint(Rule::Divide { divisor: d }, &[&cur], "clausal rounding")?;
        }
    }
    Ok(cur)
}

/// `(μ, ν)` with `(ν − 1)·r < μ·c ≤ ν·r`, `μ` minimal. Since `ν = ⌈c / r⌉`
/// satisfies the chain for `μ = 1`, the minimal `μ` is always 1.
pub fn multiply_weaken_factors(reason_weight: &Int, conflict_weight: &Int) -> (Int, Int) {
    (Int::ONE, conflict_weight.div_ceil(reason_weight))
}

/// Returns the reduced reason with pivot weight `μ·c`, or `None` when the
/// ineffective literals cannot absorb enough of the degree.
fn multiply_weaken_rec(
    reason: &Tracked,
    pivot: Literal,
    conflict_weight: &Int,
    rho: &impl Assignment,
    rec: &mut Recorder,
) -> Result<Option<(Tracked, Int)>, RuleError> {
    let r = pivot_weight(&reason.c, pivot)?;
    let (mu, nu) = multiply_weaken_factors(&r, conflict_weight);
    let target = &mu * conflict_weight;
    let ineffective = ineffective_by_weight(&reason.c, Some(pivot), rho, false);
    let available: Int = ineffective.iter().map(|(_, w)| w).sum();
    // saturation caps the pivot at the degree, so the degree has to come down
    // to the target only when the scaled pivot overshoots it
    let mut need = if &r * &nu > target {
        &(reason.c.degree() * &nu) - &target
    } else {
        Int::ZERO
    };
    if need.is_negative() || &available * &nu < need {
        return Ok(None);
    }
    // the recorder only sees this once we know the target is reachable
    let mut cur = if nu.is_one() {
        reason.clone()
    } else {
        rec.derive_constraint(Rule::Multiply { factor: nu }, &[reason], "multiplication")?
    };
    for (lit, _) in ineffective {
        if !need.is_positive() {
            break;
        }
        let w = match cur.c.weight(lit) {
            Some(w) => w.clone(),
            None => continue,
        };
        let rule = if w <= need {
            need -= &w;
            Rule::Weaken { lit }
        } else {
            let amount = std::mem::take(&mut need);
            Rule::PartialWeaken { lit, amount }
        };
        let next = rec.derive_constraint(rule, &[&cur], "multiply-and-weaken weakening")?;
        cur = rec.saturate(next);
    }
    if need.is_positive() {
        // saturation ate into the weights we meant to remove
        return Ok(None);
    }
    cur = rec.saturate(cur);
    if cur.c.weight(pivot) != Some(&target) {
        return Err(RuleError::Invariant(format!(
            "multiply-and-weaken left pivot weight {:?}, expected {target}",
            cur.c.weight(pivot)
        )));
    }
    Ok(Some((cur, mu)))
}

fn check_resolvable(
    conflict: &Constraint,
    reason: &Constraint,
    pivot: Literal,
    rho: &impl Assignment,
) -> Result<(), RuleError> {
    if !conflict.is_conflicting(rho) {
        return Err(RuleError::Precondition(format!("{conflict} is not falsified")));
    }
    if !conflict.contains(!pivot) {
        return Err(RuleError::LiteralAbsent(!pivot));
    }
    if !preserves(reason, rho, Preserve::Propagation { pivot }) {
        return Err(RuleError::Precondition(format!("{reason} does not propagate {pivot}")));
    }
    Ok(())
}

pub(crate) fn resolve_step_rec(
    conflict: &Tracked,
    reason: &Tracked,
    pivot: Literal,
    rho: &impl Assignment,
    strategy: Strategy,
    rec: &mut Recorder,
) -> Result<(Normalized, Operand, bool), RuleError> {
    check_resolvable(&conflict.c, &reason.c, pivot, rho)?;
    let mut fallback = false;
    let (c_side, r_side) = match strategy {
        Strategy::GenRes => (conflict.clone(), reason.clone()),
        Strategy::Rs(side) | Strategy::PartialRs(side) => {
            let partial = matches!(strategy, Strategy::PartialRs(_));
            let c = if side.conflict() {
                rs_reduce(conflict.clone(), !pivot, rho, partial, rec)?
            } else {
                conflict.clone()
            };
            let r = if side.reason() {
                rs_reduce(reason.clone(), pivot, rho, partial, rec)?
            } else {
                reason.clone()
            };
            (c, r)
        }
        Strategy::WeakenIneffective(side) => {
            let c = if side.conflict() {
                let mode = Preserve::Conflict { pivot: Some(!pivot) };
                weaken_ineffective_rec(conflict.clone(), rho, mode, rec)?
            } else {
                conflict.clone()
            };
            let r = if side.reason() {
                weaken_ineffective_rec(reason.clone(), rho, Preserve::Propagation { pivot }, rec)?
            } else {
                reason.clone()
            };
            (c, r)
        }
        Strategy::MultiplyWeaken => {
            let cw = pivot_weight(&conflict.c, !pivot)?;
            match multiply_weaken_rec(reason, pivot, &cw, rho, rec)? {
                Some((r, _mu)) => (conflict.clone(), r),
                None => {
                    fallback = true;
                    (conflict.clone(), reason.clone())
                }
            }
        }
    };
    // no-op whenever the reduction already guarantees a falsified result
    let r_side = genres_loop(&c_side, r_side, pivot, rho, rec)?;
    let (mu, nu) = rules::cancel_multipliers(&c_side.c, &r_side.c, pivot.var())?;
    let (out, op) = rec.derive(Rule::Cancel { pivot: pivot.var(), mu, nu }, &[&c_side, &r_side])?;
    match out {
        Normalized::Constraint(c) => {
            let t = rec.saturate(Tracked { c, op });
            if !t.c.is_conflicting(rho) {
                return Err(RuleError::Invariant(format!(
                    "{strategy}: cancellation result {} is not falsified",
                    t.c
                )));
            }
            Ok((Normalized::Constraint(t.c), t.op, fallback))
        }
        Normalized::False => Ok((Normalized::False, op, fallback)),
        Normalized::True => Err(RuleError::Invariant(format!(
            "{strategy}: cancellation produced a tautology"
        ))),
    }
}

fn tracked(c: &Constraint, op: Operand) -> Tracked {
    Tracked { c: c.clone(), op }
}

fn finish(rec: Recorder, t: Tracked) -> (Constraint, Vec<RuleStep>) {
    (t.c, rec.steps)
}

/// One cancellation between a falsified `conflict` and the `reason` that
/// propagated `pivot`, after the reductions of `strategy`. `rho` is the
/// assignment up to and including `pivot`.
pub fn resolve_step(
    conflict: &Constraint,
    reason: &Constraint,
    pivot: Literal,
    rho: &impl Assignment,
    strategy: Strategy,
) -> Result<ResolveOutcome, RuleError> {
    let mut rec = Recorder::new(true);
    let (constraint, _, fallback) = resolve_step_rec(
        &tracked(conflict, Operand::Conflict),
        &tracked(reason, Operand::Reason),
        pivot,
        rho,
        strategy,
        &mut rec,
    )?;
    Ok(ResolveOutcome {
        constraint,
        steps: rec.steps,
        fallback,
    })
}

/// Generalized-resolution reduction of the reason: weaken and saturate until
/// the LCM cancellation is guaranteed to stay falsified.
pub fn reduce_genres(
    conflict: &Constraint,
    reason: &Constraint,
    pivot: Literal,
    rho: &impl Assignment,
) -> Result<(Constraint, Vec<RuleStep>), RuleError> {
    let mut rec = Recorder::new(true);
    let t = genres_loop(
        &tracked(conflict, Operand::Conflict),
        tracked(reason, Operand::Reason),
        pivot,
        rho,
        &mut rec,
    )?;
    Ok(finish(rec, t))
}

/// Weakens every non-falsified literal (other than `pivot`) whose weight is
/// not a multiple of the pivot weight, then divides by the pivot weight.
pub fn reduce_rs(c: &Constraint, pivot: Literal, rho: &impl Assignment) -> Result<(Constraint, Vec<RuleStep>), RuleError> {
    let mut rec = Recorder::new(true);
    let t = rs_reduce(tracked(c, Operand::Conflict), pivot, rho, false, &mut rec)?;
    Ok(finish(rec, t))
}

/// Like [`reduce_rs`], but each offending literal is only weakened by its
/// remainder modulo the pivot weight.
pub fn reduce_partial_rs(c: &Constraint, pivot: Literal, rho: &impl Assignment) -> Result<(Constraint, Vec<RuleStep>), RuleError> {
    let mut rec = Recorder::new(true);
    let t = rs_reduce(tracked(c, Operand::Conflict), pivot, rho, true, &mut rec)?;
    Ok(finish(rec, t))
}

/// Greedily weakens literals (non-falsified first, lightest first) while
/// `mode` keeps holding after saturation; finally rounds to a clause when
/// that still preserves `mode`.
pub fn weaken_ineffective(
    c: &Constraint,
    rho: &impl Assignment,
    mode: Preserve,
) -> Result<(Constraint, Vec<RuleStep>), RuleError> {
    let mut rec = Recorder::new(true);
    let t = weaken_ineffective_rec(tracked(c, Operand::Conflict), rho, mode, &mut rec)?;
    Ok(finish(rec, t))
}

/// Multiply-and-weaken reduction of a reason whose pivot weight is `r`
/// against a conflict pivot weight `conflict_weight`. Returns the reduced
/// reason and `μ`, or `None` when the target degree is out of reach.
pub fn reduce_multiply_weaken(
    reason: &Constraint,
    pivot: Literal,
    conflict_weight: &Int,
    rho: &impl Assignment,
) -> Result<Option<(Constraint, Int, Vec<RuleStep>)>, RuleError> {
    let mut rec = Recorder::new(true);
    let out = multiply_weaken_rec(&tracked(reason, Operand::Reason), pivot, conflict_weight, rho, &mut rec)?;
    Ok(out.map(|(t, mu)| (t.c, mu, rec.steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        let names: Vec<String> = Strategy::ALL.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            names,
            [
                "gen-res",
                "rs-both",
                "rs-conflict",
                "rs-reason",
                "partial-rs-both",
                "partial-rs-conflict",
                "partial-rs-reason",
                "weaken-ineffective-both",
                "weaken-ineffective-conflict",
                "weaken-ineffective-reason",
                "multiply-weaken",
            ]
        );
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("rs".parse::<Strategy>().is_err());
        assert!("gen-res-both".parse::<Strategy>().is_err());
    }

    #[test]
    fn factors_satisfy_chain() {
        for r in 1..20i64 {
            for c in 1..20i64 {
                let (mu, nu) = multiply_weaken_factors(&Int::from(r), &Int::from(c));
                let (mu, nu) = (mu.to_i64().unwrap(), nu.to_i64().unwrap());
                assert!((nu - 1) * r < mu * c && mu * c <= nu * r);
                assert_eq!(mu, 1);
            }
        }
    }
}
