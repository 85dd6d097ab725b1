//! Exhaustive-enumeration checks over small variable sets. These evaluate
//! constraints directly (`Σ w·[l true] ≥ d`) and never go through slack or
//! propagation, so they can serve as oracles for the rest of the crate.

use std::collections::BTreeSet;

use crate::constraint::{Constraint, Normalized};
use crate::lit::{Literal, Var};
use crate::rules::RuleError;

pub const ENUMERATION_BOUND: usize = 20;

fn holds(n: &Normalized, model: &[bool], index: &dyn Fn(Var) -> usize) -> bool {
    match n {
        Normalized::True => true,
        Normalized::False => false,
        Normalized::Constraint(c) => eval(c, model, index),
    }
}

fn eval(c: &Constraint, model: &[bool], index: &dyn Fn(Var) -> usize) -> bool {
    c.is_satisfied_by(|l: Literal| model[index(l.var())] == l.is_positive())
}

fn check_vars(vars: &[Var], all: impl Iterator<Item = Var>) -> Result<(), RuleError> {
    if vars.len() > ENUMERATION_BOUND {
        return Err(RuleError::EnumerationBound(vars.len()));
    }
    for v in all {
        if !vars.contains(&v) {
            return Err(RuleError::Precondition(format!("{v} is outside the enumerated set")));
        }
    }
    Ok(())
}

/// Calls `f` on every total assignment of `vars` (as a bool per position).
fn for_each_model(n: usize, mut f: impl FnMut(&[bool]) -> bool) {
    let mut model = vec![false; n];
    for bits in 0u64..(1u64 << n) {
        for (i, m) in model.iter_mut().enumerate() {
            *m = bits >> i & 1 == 1;
        }
        if !f(&model) {
            return;
        }
    }
}

/// True iff every total assignment of `vars` satisfying all `premises` also
/// satisfies `conclusion`.
pub fn implies_semantically(
    premises: &[Normalized],
    conclusion: &Normalized,
    vars: &[Var],
) -> Result<bool, RuleError> {
    let mentioned = premises
        .iter()
        .chain(std::iter::once(conclusion))
        .filter_map(Normalized::constraint)
        .flat_map(|c| c.vars().collect::<Vec<_>>());
    check_vars(vars, mentioned)?;
    let index = |v: Var| vars.iter().position(|u| *u == v).unwrap();
    let mut implied = true;
    for_each_model(vars.len(), |model| {
        if premises.iter().all(|p| holds(p, model, &index)) && !holds(conclusion, model, &index) {
            implied = false;
        }
        implied
    });
    Ok(implied)
}

/// Convenience for constraint premises and conclusion over their own variables.
pub fn constraints_imply(premises: &[&Constraint], conclusion: &Normalized) -> Result<bool, RuleError> {
    let mut vars: BTreeSet<Var> = premises.iter().flat_map(|c| c.vars()).collect();
    if let Some(c) = conclusion.constraint() {
        vars.extend(c.vars());
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    let ps: Vec<Normalized> = premises.iter().map(|c| Normalized::Constraint((*c).clone())).collect();
    implies_semantically(&ps, conclusion, &vars)
}

/// A model of `constraints` over variables `1..=num_vars`, by enumeration.
pub fn brute_force_model(
    constraints: &[Normalized],
    num_vars: usize,
) -> Result<Option<Vec<bool>>, RuleError> {
    let vars: Vec<Var> = (1..=num_vars as u32).map(Var::new).collect();
    check_vars(&vars, constraints.iter().filter_map(Normalized::constraint).flat_map(|c| c.vars().collect::<Vec<_>>()))?;
    let index = |v: Var| v.slot();
    let mut found = None;
    for_each_model(num_vars, |model| {
        if constraints.iter().all(|c| holds(c, model, &index)) {
            found = Some(model.to_vec());
            false
        } else {
            true
        }
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Normalized {
        s.parse().unwrap()
    }

    #[test]
    fn reflexive() {
        let x = n("+1 x1 >= 1");
        assert!(implies_semantically(std::slice::from_ref(&x), &x, &[Var::new(1)]).unwrap());
    }

    #[test]
    fn empty_premises_imply_only_tautologies() {
        let x = n("+1 x1 >= 1");
        assert!(!implies_semantically(&[], &x, &[Var::new(1)]).unwrap());
        assert!(implies_semantically(&[], &Normalized::True, &[]).unwrap());
    }

    #[test]
    fn bound_enforced() {
        let vars: Vec<Var> = (1..=21).map(Var::new).collect();
        assert_eq!(
            implies_semantically(&[], &Normalized::True, &vars),
            Err(RuleError::EnumerationBound(21))
        );
    }

    #[test]
    fn model_search() {
        let cs = vec![n("+1 x1 +1 x2 >= 2"), n("+1 ~x1 +1 x3 >= 1")];
        let m = brute_force_model(&cs, 3).unwrap().unwrap();
        assert_eq!(m, vec![true, true, true]);
        let unsat = vec![n("+1 x1 >= 1"), n("+1 ~x1 >= 1")];
        assert_eq!(brute_force_model(&unsat, 1).unwrap(), None);
    }
}
