//! Seeded random inputs for fuzzing the rules and the analysis: constraints,
//! partial assignments, and valid (conflict, reason, pivot, assignment)
//! resolution inputs.

use rand::seq::index::sample;
use rand::Rng;

use crate::assignment::{Assignment, PartialAssignment};
use crate::constraint::Constraint;
use crate::int::Int;
use crate::lit::{Literal, Var};
use crate::rules::saturate;

/// A constraint over a random subset of `x1..x{vars}` with weights in
/// `[1, max_weight]` and a degree in `[1, Σ weights]`.
pub fn constraint(rng: &mut impl Rng, vars: usize, max_weight: i64) -> Constraint {
    let len = rng.gen_range(1..=vars);
    let chosen = sample(rng, vars, len).into_vec();
    let terms: Vec<(Literal, Int)> = chosen
        .into_iter()
        .map(|s| (Literal::new(Var::from_slot(s), rng.gen_bool(0.5)), Int::from(rng.gen_range(1..=max_weight))))
        .collect();
    let sum: i64 = terms.iter().map(|(_, w)| w.to_i64().expect("small weight")).sum();
    Constraint::new(terms, Int::from(rng.gen_range(1..=sum))).expect("valid sample")
}

/// Assigns each of `x1..x{vars}` with probability `density`, random value.
pub fn assignment(rng: &mut impl Rng, vars: usize, density: f64) -> PartialAssignment {
    let mut a = PartialAssignment::with_vars(vars);
    for s in 0..vars {
        if rng.gen_bool(density) {
            a.assign(Literal::new(Var::from_slot(s), rng.gen_bool(0.5)));
        }
    }
    a
}

/// Inputs of one resolution step: `reason` propagates `pivot` under `rho`
/// without `pivot`, and `conflict` contains `~pivot` and is falsified under
/// `rho`. Both are saturated, as stored constraints are.
#[derive(Debug, Clone)]
pub struct Triple {
    pub conflict: Constraint,
    pub reason: Constraint,
    pub pivot: Literal,
    pub rho: PartialAssignment,
}

fn with_literal(rng: &mut impl Rng, vars: usize, max_weight: i64, lit: Literal) -> Vec<(Literal, Int)> {
    let mut terms: Vec<(Literal, Int)> = constraint(rng, vars, max_weight)
        .terms()
        .iter()
        .filter(|(l, _)| l.var() != lit.var())
        .cloned()
        .collect();
    terms.push((lit, Int::from(rng.gen_range(1..=max_weight))));
    terms
}

fn sum_where(terms: &[(Literal, Int)], mut keep: impl FnMut(Literal) -> bool) -> i64 {
    terms
        .iter()
        .filter(|(l, _)| keep(*l))
        .map(|(_, w)| w.to_i64().expect("small weight"))
        .sum()
}

/// A random valid resolution input over at most `vars` (≥ 2) variables.
pub fn triple(rng: &mut impl Rng, vars: usize, max_weight: i64) -> Triple {
    assert!(vars >= 2, "need at least two variables");
    loop {
        let pivot = Literal::new(Var::from_slot(rng.gen_range(0..vars)), rng.gen_bool(0.5));
        let mut before = assignment(rng, vars, 0.6);
        before.unassign(pivot.var());

        let terms = with_literal(rng, vars, max_weight, pivot);
        let free = sum_where(&terms, |l| !before.is_falsified(l));
        let wp = terms.last().expect("pivot term").1.to_i64().expect("small");
        // slack = free − degree must lie in [0, wp)
        let degree = free - rng.gen_range(0..wp);
        let reason = saturate(&Constraint::new(terms, Int::from(degree)).expect("valid reason"));
        let s = reason.slack(&before);
        if s.is_negative() || reason.weight(pivot).is_none_or(|w| *w <= s) {
            continue;
        }

        let mut rho = before;
        rho.assign(pivot);
        let terms = with_literal(rng, vars, max_weight, !pivot);
        let free = sum_where(&terms, |l| !rho.is_falsified(l));
        let total = sum_where(&terms, |_| true);
        let degree = rng.gen_range(free + 1..=total);
        let conflict = saturate(&Constraint::new(terms, Int::from(degree)).expect("valid conflict"));
        if !conflict.is_conflicting(&rho) {
            continue;
        }
        return Triple { conflict, reason, pivot, rho };
    }
}
