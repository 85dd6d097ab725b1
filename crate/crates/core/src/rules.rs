//! Cutting-planes inference rules as pure functions on constraints, and
//! [`RuleStep`] records that can be replayed to check a derivation.

use std::fmt;

use crate::constraint::{Constraint, Normalized};
use crate::int::Int;
use crate::lit::{Literal, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("pivot {0} does not occur with opposite signs in both constraints")]
    PivotNotOpposed(Var),
    #[error("literal {0} does not occur in the constraint")]
    LiteralAbsent(Literal),
    #[error("partial weakening amount {amount} outside 1..={weight}")]
    AmountOutOfRange { amount: Int, weight: Int },
    #[error("divisor must be positive, got {0}")]
    BadDivisor(Int),
    #[error("multiplier must be positive, got {0}")]
    BadFactor(Int),
    #[error("cancellation multipliers ({mu}, {nu}) do not match the pivot weights")]
    MultiplierMismatch { mu: Int, nu: Int },
    #[error("rule {rule} expects {expected} input(s), got {got}")]
    Arity {
        rule: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration over {0} variables exceeds the bound of 20")]
    EnumerationBound(usize),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Multipliers `(μ, ν)` with `μ·w1 = ν·w2 = lcm(w1, w2)` for the pivot
/// weights of `c1` and `c2`.
pub fn cancel_multipliers(
    c1: &Constraint,
    c2: &Constraint,
    pivot: Var,
) -> Result<(Int, Int), RuleError> {
    let (l1, w1) = c1.term_of(pivot).ok_or(RuleError::PivotNotOpposed(pivot))?;
    let (l2, w2) = c2.term_of(pivot).ok_or(RuleError::PivotNotOpposed(pivot))?;
    if l1 != !l2 {
        return Err(RuleError::PivotNotOpposed(pivot));
    }
    let lcm = w1.lcm(w2);
    Ok((lcm.div_floor(w1), lcm.div_floor(w2)))
}

/// Cancellation: `μ·c1 + ν·c2` with the LCM multipliers, so the pivot drops
/// out. Other opposing literals are merged. Not saturated.
pub fn cancel(c1: &Constraint, c2: &Constraint, pivot: Var) -> Result<Normalized, RuleError> {
    let (mu, nu) = cancel_multipliers(c1, c2, pivot)?;
    Ok(linear_combination(c1, &mu, c2, &nu))
}

/// `mu·c1 + nu·c2`, normalized. Callers guarantee positive multipliers.
fn linear_combination(c1: &Constraint, mu: &Int, c2: &Constraint, nu: &Int) -> Normalized {
    let mut terms = Vec::with_capacity(c1.len() + c2.len());
    for (l, w) in c1.terms() {
        terms.push((*l, w * mu));
    }
    for (l, w) in c2.terms() {
        terms.push((*l, w * nu));
    }
    Constraint::from_sum(terms, c1.degree() * mu + c2.degree() * nu)
}

/// Weakening: drops `lit` and lowers the degree by its weight.
pub fn weaken(c: &Constraint, lit: Literal) -> Result<Normalized, RuleError> {
    let w = c.weight(lit).ok_or(RuleError::LiteralAbsent(lit))?.clone();
    partial_weaken(c, lit, &w)
}

/// Partial weakening: lowers the weight of `lit` and the degree by `amount`,
/// with `0 < amount ≤ weight(lit)`.
pub fn partial_weaken(c: &Constraint, lit: Literal, amount: &Int) -> Result<Normalized, RuleError> {
    let w = c.weight(lit).ok_or(RuleError::LiteralAbsent(lit))?;
    if !amount.is_positive() || amount > w {
        return Err(RuleError::AmountOutOfRange {
            amount: amount.clone(),
            weight: w.clone(),
        });
    }
    let terms = c
        .terms()
        .iter()
        .filter_map(|(l, wl)| {
            if *l == lit {
                let rest = wl - amount;
                (!rest.is_zero()).then_some((*l, rest))
            } else {
                Some((*l, wl.clone()))
            }
        })
        .collect();
    Ok(Constraint::classify(terms, c.degree() - amount))
}

/// Saturation: caps every weight at the degree. Idempotent.
pub fn saturate(c: &Constraint) -> Constraint {
    if c.is_saturated() {
        return c.clone();
    }
    let d = c.degree();
    let terms = c
        .terms()
        .iter()
        .map(|(l, w)| (*l, w.min_ref(d).clone()))
        .collect();
    Constraint::from_parts_unchecked(terms, d.clone())
}

/// Division: ceiling-divides every weight and the degree by `r ≥ 1`.
pub fn divide(c: &Constraint, r: &Int) -> Result<Constraint, RuleError> {
    if !r.is_positive() {
        return Err(RuleError::BadDivisor(r.clone()));
    }
    if r.is_one() {
        return Ok(c.clone());
    }
    let terms = c
        .terms()
        .iter()
        .map(|(l, w)| (*l, w.div_ceil(r)))
        .collect();
    Ok(Constraint::from_parts_unchecked(terms, c.degree().div_ceil(r)))
}

/// Scales weights and degree by a positive factor.
pub fn multiply(c: &Constraint, k: &Int) -> Result<Constraint, RuleError> {
    if !k.is_positive() {
        return Err(RuleError::BadFactor(k.clone()));
    }
    if k.is_one() {
        return Ok(c.clone());
    }
    let terms = c.terms().iter().map(|(l, w)| (*l, w * k)).collect();
    Ok(Constraint::from_parts_unchecked(terms, c.degree() * k))
}

/// One inference rule with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `mu · input0 + nu · input1`, eliminating `pivot`.
    Cancel { pivot: Var, mu: Int, nu: Int },
    Weaken { lit: Literal },
    PartialWeaken { lit: Literal, amount: Int },
    Saturate,
    Divide { divisor: Int },
    Multiply { factor: Int },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Cancel { .. } => "cancel",
            Rule::Weaken { .. } => "weaken",
            Rule::PartialWeaken { .. } => "pweaken",
            Rule::Saturate => "saturate",
            Rule::Divide { .. } => "divide",
            Rule::Multiply { .. } => "multiply",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Cancel { .. } => 2,
            _ => 1,
        }
    }

    /// Applies the rule. For cancellation the recorded multipliers must be
    /// the LCM multipliers of the inputs.
    pub fn apply(&self, inputs: &[&Constraint]) -> Result<Normalized, RuleError> {
        if inputs.len() != self.arity() {
            return Err(RuleError::Arity {
                rule: self.name(),
                expected: self.arity(),
                got: inputs.len(),
            });
        }
        let c = inputs[0];
        match self {
            Rule::Cancel { pivot, mu, nu } => {
                let (m, n) = cancel_multipliers(c, inputs[1], *pivot)?;
                if &m != mu || &n != nu {
                    return Err(RuleError::MultiplierMismatch {
                        mu: mu.clone(),
                        nu: nu.clone(),
                    });
                }
                Ok(linear_combination(c, mu, inputs[1], nu))
            }
            Rule::Weaken { lit } => weaken(c, *lit),
            Rule::PartialWeaken { lit, amount } => partial_weaken(c, *lit, amount),
            Rule::Saturate => Ok(Normalized::Constraint(saturate(c))),
            Rule::Divide { divisor } => divide(c, divisor).map(Normalized::Constraint),
            Rule::Multiply { factor } => multiply(c, factor).map(Normalized::Constraint),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Cancel { pivot, mu, nu } => write!(f, "cancel {pivot} {mu} {nu}"),
            Rule::Weaken { lit } => write!(f, "weaken {lit}"),
            Rule::PartialWeaken { lit, amount } => write!(f, "pweaken {lit} {amount}"),
            Rule::Saturate => f.write_str("saturate"),
            Rule::Divide { divisor } => write!(f, "divide {divisor}"),
            Rule::Multiply { factor } => write!(f, "multiply {factor}"),
        }
    }
}

/// Where a rule input comes from inside one resolution step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Conflict,
    Reason,
    /// Output of an earlier step of the same outcome.
    Step(usize),
}

/// A recorded rule application. `R` names the inputs: [`Operand`] inside a
/// single resolution, trace ids in a full derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleStep<R = Operand> {
    pub rule: Rule,
    pub inputs: Vec<R>,
    pub output: Normalized,
}

impl<R> RuleStep<R> {
    /// Re-applies the rule and checks the output matches bit for bit.
    pub fn replay(&self, inputs: &[&Constraint]) -> Result<bool, RuleError> {
        Ok(self.rule.apply(inputs)? == self.output)
    }
}

/// Replays the steps of one resolution from its two inputs, returning the
/// output of the last step.
pub fn replay_steps(
    conflict: &Constraint,
    reason: &Constraint,
    steps: &[RuleStep],
) -> Result<Option<Normalized>, RuleError> {
    let mut outputs: Vec<&Normalized> = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let mut ins = Vec::with_capacity(step.inputs.len());
        for op in &step.inputs {
            let c = match op {
                Operand::Conflict => conflict,
                Operand::Reason => reason,
                Operand::Step(k) if *k < i => outputs[*k].constraint().ok_or_else(|| {
                    RuleError::Invariant(format!("step {i} uses non-constraint output of step {k}"))
                })?,
                Operand::Step(k) => {
                    return Err(RuleError::Invariant(format!("step {i} refers forward to {k}")))
                }
            };
            ins.push(c);
        }
        if !step.replay(&ins)? {
            return Err(RuleError::Invariant(format!("step {i} does not replay")));
        }
        outputs.push(&step.output);
    }
    Ok(outputs.last().map(|n| (*n).clone()))
}
