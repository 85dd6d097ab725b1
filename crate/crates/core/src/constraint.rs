//! Normalized pseudo-Boolean constraints `Σ wᵢ·lᵢ ≥ d`.

use std::fmt;
use std::str::FromStr;

use crate::assignment::Assignment;
use crate::int::Int;
use crate::lit::{Literal, Var};

/// A constraint `Σ wᵢ·lᵢ ≥ d` with every `wᵢ ≥ 1`, `d ≥ 1`, at most one
/// literal per variable and terms sorted by variable index.
///
/// A constraint with no terms is unsatisfiable; rule operations report it as
/// [`Normalized::False`] rather than storing it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    terms: Vec<(Literal, Int)>,
    degree: Int,
}

/// Result of building a constraint from an arbitrary linear sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Normalized {
    /// Satisfied by every assignment (degree ≤ 0).
    True,
    /// Satisfied by no assignment.
    False,
    Constraint(Constraint),
}

impl Normalized {
    pub fn constraint(&self) -> Option<&Constraint> {
        match self {
            Normalized::Constraint(c) => Some(c),
            _ => None,
        }
    }

    pub fn into_constraint(self) -> Option<Constraint> {
        match self {
            Normalized::Constraint(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Normalized::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Normalized::False)
    }
}

impl fmt::Display for Normalized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalized::True => f.write_str("TRUE"),
            Normalized::False => f.write_str("FALSE"),
            Normalized::Constraint(c) => fmt::Display::fmt(c, f),
        }
    }
}

impl FromStr for Normalized {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "TRUE" => Ok(Normalized::True),
            "FALSE" => Ok(Normalized::False),
            other => other.parse().map(Normalized::Constraint),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("weight of {0} must be positive")]
    NonPositiveWeight(Literal),
    #[error("variable {0} occurs more than once")]
    DuplicateVar(Var),
    #[error("degree must be at least 1")]
    NonPositiveDegree,
    #[error("malformed constraint text: {0}")]
    Syntax(String),
}

/// Relational operator of a raw linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Eq,
    Le,
}

impl Constraint {
    /// Builds a constraint that already satisfies the normal-form invariants.
    pub fn new(
        terms: impl IntoIterator<Item = (Literal, Int)>,
        degree: Int,
    ) -> Result<Constraint, ConstraintError> {
        let mut terms: Vec<_> = terms.into_iter().collect();
        if let Some((l, _)) = terms.iter().find(|(_, w)| !w.is_positive()) {
            return Err(ConstraintError::NonPositiveWeight(*l));
        }
        if !degree.is_positive() {
            return Err(ConstraintError::NonPositiveDegree);
        }
        terms.sort_by_key(|(l, _)| *l);
        if let Some(w) = terms.windows(2).find(|w| w[0].0.var() == w[1].0.var()) {
            return Err(ConstraintError::DuplicateVar(w[0].0.var()));
        }
        Ok(Constraint { terms, degree })
    }

    /// Sums terms with positive weights, possibly repeating literals or
    /// containing opposite literals, into normal form. Opposite literals with
    /// weights `w1 ≥ w2` leave `w1 - w2` on the heavier one and lower the degree
    /// by `w2`. Not saturated.
    pub fn from_sum(mut terms: Vec<(Literal, Int)>, mut degree: Int) -> Normalized {
        terms.sort_by_key(|(l, _)| *l);
        let mut out: Vec<(Literal, Int)> = Vec::with_capacity(terms.len());
        for (lit, w) in terms {
            debug_assert!(!w.is_negative());
            match out.last_mut() {
                Some((prev, pw)) if *prev == lit => *pw += &w,
                _ => out.push((lit, w)),
            }
        }
        // merge opposing pairs, which are now adjacent
        let mut merged: Vec<(Literal, Int)> = Vec::with_capacity(out.len());
        for (lit, w) in out {
            match merged.last_mut() {
                Some((prev, pw)) if prev.var() == lit.var() => {
                    if *pw >= w {
                        *pw -= &w;
                        degree -= &w;
                    } else {
                        degree -= &*pw;
                        *pw = &w - &*pw;
                        *prev = lit;
                    }
                }
                _ => merged.push((lit, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        Self::classify(merged, degree)
    }

    /// Wraps already-canonical terms, mapping degree ≤ 0 to `True` and an empty
    /// left side to `False`.
    pub(crate) fn classify(terms: Vec<(Literal, Int)>, degree: Int) -> Normalized {
        if !degree.is_positive() {
            Normalized::True
        } else if terms.is_empty() {
            Normalized::False
        } else {
            Normalized::Constraint(Constraint { terms, degree })
        }
    }

    pub(crate) fn from_parts_unchecked(terms: Vec<(Literal, Int)>, degree: Int) -> Constraint {
        debug_assert!(degree.is_positive());
        debug_assert!(terms.windows(2).all(|w| w[0].0.var() < w[1].0.var()));
        debug_assert!(terms.iter().all(|(_, w)| w.is_positive()));
        Constraint { terms, degree }
    }

    pub fn terms(&self) -> &[(Literal, Int)] {
        &self.terms
    }

    pub fn degree(&self) -> &Int {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.terms.iter().map(|(l, _)| *l)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|(l, _)| l.var())
    }

    fn position(&self, var: Var) -> Option<usize> {
        self.terms.binary_search_by_key(&var, |(l, _)| l.var()).ok()
    }

    /// Weight of `lit`, if `lit` itself (not its negation) occurs.
    pub fn weight(&self, lit: Literal) -> Option<&Int> {
        self.position(lit.var())
            .map(|i| &self.terms[i])
            .filter(|(l, _)| *l == lit)
            .map(|(_, w)| w)
    }

    /// The literal of `var` occurring in the constraint, with its weight.
    pub fn term_of(&self, var: Var) -> Option<(Literal, &Int)> {
        self.position(var).map(|i| (self.terms[i].0, &self.terms[i].1))
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.weight(lit).is_some()
    }

    pub fn max_weight(&self) -> Int {
        self.terms.iter().map(|(_, w)| w).max().cloned().unwrap_or_default()
    }

    pub fn weight_sum(&self) -> Int {
        self.terms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_clause(&self) -> bool {
        self.degree.is_one() && self.terms.iter().all(|(_, w)| w.is_one())
    }

    pub fn is_cardinality(&self) -> bool {
        self.terms.iter().all(|(_, w)| w.is_one())
    }

    pub fn is_saturated(&self) -> bool {
        self.terms.iter().all(|(_, w)| *w <= self.degree)
    }

    /// Bits needed for the largest of the weights and the degree.
    pub fn coeff_bits(&self) -> u64 {
        self.terms
            .iter()
            .map(|(_, w)| w.bits())
            .chain(std::iter::once(self.degree.bits()))
            .max()
            .unwrap_or(0)
    }

    /// Sum of the weights of non-falsified literals, minus the degree.
    pub fn slack(&self, rho: &impl Assignment) -> Int {
        let mut s = -&self.degree;
        for (l, w) in &self.terms {
            if !rho.is_falsified(*l) {
                s += w;
            }
        }
        s
    }

    pub fn is_conflicting(&self, rho: &impl Assignment) -> bool {
        self.slack(rho).is_negative()
    }

    /// Unassigned literals whose weight exceeds the slack. Errors if the
    /// constraint is already falsified.
    pub fn propagation_candidates(
        &self,
        rho: &impl Assignment,
    ) -> Result<Vec<Literal>, crate::rules::RuleError> {
        let s = self.slack(rho);
        if s.is_negative() {
            return Err(crate::rules::RuleError::Precondition(format!(
                "propagation_candidates on a falsified constraint (slack {s})"
            )));
        }
        Ok(self
            .terms
            .iter()
            .filter(|(l, w)| rho.is_unassigned(*l) && *w > s)
            .map(|(l, _)| *l)
            .collect())
    }

    /// Evaluates under a total assignment given as a predicate on literals.
    pub fn is_satisfied_by(&self, mut holds: impl FnMut(Literal) -> bool) -> bool {
        let lhs: Int = self
            .terms
            .iter()
            .filter(|(l, _)| holds(*l))
            .map(|(_, w)| w)
            .sum();
        lhs >= self.degree
    }
}

/// Brings `Σ rawᵢ·lᵢ (≥ | = | ≤) rhs` into normal form.
///
/// Negative weights are moved onto the negated literal, `≤` is flipped to `≥`,
/// and `=` yields one constraint per direction. Degree ≤ 0 gives `True`, and
/// a left side that cannot reach the degree gives `False`. The result is not
/// saturated; the solver saturates constraints when it stores them.
pub fn normalize(raw: &[(Int, Literal)], relation: Relation, rhs: &Int) -> Vec<Normalized> {
    match relation {
        Relation::Ge => vec![normalize_ge(raw.iter().cloned(), rhs.clone())],
        Relation::Le => vec![normalize_ge(
            raw.iter().map(|(w, l)| (-w, *l)),
            -rhs,
        )],
        Relation::Eq => vec![
            normalize_ge(raw.iter().cloned(), rhs.clone()),
            normalize_ge(raw.iter().map(|(w, l)| (-w, *l)), -rhs),
        ],
    }
}

fn normalize_ge(raw: impl Iterator<Item = (Int, Literal)>, rhs: Int) -> Normalized {
    let mut degree = rhs;
    let mut terms = Vec::new();
    for (w, l) in raw {
        if w.is_negative() {
            // w·l = w + |w|·¬l
            degree -= &w;
            terms.push((!l, -w));
        } else if w.is_positive() {
            terms.push((l, w));
        }
    }
    match Constraint::from_sum(terms, degree) {
        Normalized::Constraint(c) => {
            if c.weight_sum() < c.degree {
                Normalized::False
            } else {
                Normalized::Constraint(c)
            }
        }
        other => other,
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, w) in &self.terms {
            write!(f, "+{w} {l} ")?;
        }
        write!(f, ">= {}", self.degree)
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the `Display` form: `+w lit ... >= d` with positive weights and
/// literals `xK` / `~xK`.
impl FromStr for Constraint {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = |m: &str| ConstraintError::Syntax(format!("{m} in `{s}`"));
        let (lhs, rhs) = s.split_once(">=").ok_or_else(|| syntax("missing `>=`"))?;
        let degree: Int = rhs.trim().parse().map_err(|_| syntax("bad degree"))?;
        let tokens: Vec<&str> = lhs.split_whitespace().collect();
        if !tokens.len().is_multiple_of(2) {
            return Err(syntax("odd number of tokens"));
        }
        let mut terms = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks(2) {
            let w: Int = pair[0].parse().map_err(|_| syntax("bad weight"))?;
            let lit = parse_literal(pair[1]).ok_or_else(|| syntax("bad literal"))?;
            terms.push((lit, w));
        }
        Constraint::new(terms, degree)
    }
}

/// `xK` or `~xK` with `K ≥ 1`.
pub fn parse_literal(tok: &str) -> Option<Literal> {
    let (positive, rest) = match tok.strip_prefix('~') {
        Some(r) => (false, r),
        None => (true, tok),
    };
    let idx: u32 = rest.strip_prefix('x')?.parse().ok()?;
    (idx >= 1).then(|| Literal::new(Var::new(idx), positive))
}
