//! Instance families: pigeonhole formulas and seeded random constraints.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::Constraint;
use crate::int::Int;
use crate::lit::{Literal, Var};
use crate::opb::ParsedInstance;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator parameter: {0}")]
pub struct GenerateError(pub String);

/// Variable for "pigeon `p` sits in hole `h`", both 1-based.
pub fn php_var(holes: usize, p: usize, h: usize) -> Var {
    Var::new(((p - 1) * holes + h) as u32)
}

/// Each pigeon sits in some hole; each hole holds at most one pigeon, written
/// as `Σ_p ~x(p,h) >= pigeons − 1`.
pub fn php(pigeons: usize, holes: usize) -> Result<ParsedInstance, GenerateError> {
    if pigeons == 0 || holes == 0 {
        return Err(GenerateError("pigeons and holes must be positive".into()));
    }
    let mut constraints = Vec::with_capacity(pigeons + holes);
    for p in 1..=pigeons {
        let terms: Vec<_> = (1..=holes)
            .map(|h| (Literal::new(php_var(holes, p, h), true), Int::ONE))
            .collect();
        constraints.push(Constraint::new(terms, Int::ONE).expect("valid clause"));
    }
    if pigeons >= 2 {
        for h in 1..=holes {
            let terms: Vec<_> = (1..=pigeons)
                .map(|p| (Literal::new(php_var(holes, p, h), false), Int::ONE))
                .collect();
            constraints.push(Constraint::new(terms, Int::from(pigeons - 1)).expect("valid cardinality"));
        }
    }
    Ok(ParsedInstance {
        name: format!("php-{pigeons}-{holes}"),
        declared_vars: pigeons * holes,
        declared_constraints: constraints.len(),
        constraints,
        infeasible: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    pub vars: usize,
    pub constraints: usize,
    pub max_weight: u64,
    pub seed: u64,
}

/// `constraints` random constraints over `vars` variables. Each picks a
/// random length and variable subset, random polarities, weights uniform in
/// `[1, max_weight]` and a degree uniform in `[1, Σ weights]`, so no
/// constraint is trivially false.
pub fn random(params: RandomParams) -> Result<ParsedInstance, GenerateError> {
    let RandomParams { vars, constraints: m, max_weight, seed } = params;
    if vars == 0 || m == 0 || max_weight == 0 {
        return Err(GenerateError("vars, constraints and max-weight must be positive".into()));
    }
    if i64::try_from(max_weight).is_err() {
        return Err(GenerateError("max-weight does not fit in 63 bits".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let len = rng.gen_range(1..=vars);
        let mut chosen = sample(&mut rng, vars, len).into_vec();
        chosen.sort_unstable();
        let terms: Vec<(Literal, Int)> = chosen
            .into_iter()
            .map(|slot| {
                let lit = Literal::new(Var::from_slot(slot), rng.gen_bool(0.5));
                (lit, Int::from(rng.gen_range(1..=max_weight) as i64))
            })
            .collect();
        let sum: Int = terms.iter().map(|(_, w)| w).sum();
        let degree = match sum.to_i64() {
            Some(s) => Int::from(rng.gen_range(1..=s)),
            None => sum.div_ceil(&Int::from(2)),
        };
        out.push(Constraint::new(terms, degree).expect("valid random constraint"));
    }
    Ok(ParsedInstance {
        name: format!("random-{vars}-{m}-{max_weight}-{seed}"),
        declared_vars: vars,
        declared_constraints: m,
        constraints: out,
        infeasible: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Normalized;
    use crate::semantic::brute_force_model;

    #[test]
    fn php_shape() {
        let inst = php(3, 2).unwrap();
        assert_eq!(inst.constraints.len(), 5);
        assert_eq!(inst.num_vars(), 6);
        assert_eq!(inst.constraints[3].to_string(), "+1 ~x1 +1 ~x3 +1 ~x5 >= 2");
    }

    #[test]
    fn php_unsat_by_enumeration() {
        for n in 1..=4 {
            let inst = php(n + 1, n).unwrap();
            let cs: Vec<Normalized> = inst.constraints.iter().cloned().map(Normalized::Constraint).collect();
            assert_eq!(brute_force_model(&cs, inst.num_vars()).unwrap(), None, "n = {n}");
        }
    }

    #[test]
    fn random_is_reproducible_and_bounded() {
        let p = RandomParams { vars: 8, constraints: 12, max_weight: 10, seed: 7 };
        let a = random(p).unwrap();
        assert_eq!(a, random(p).unwrap());
        assert_ne!(a, random(RandomParams { seed: 8, ..p }).unwrap());
        for c in &a.constraints {
            assert!(c.terms().iter().all(|(_, w)| *w >= 1 && *w <= 10));
            assert!(c.degree() <= &c.weight_sum());
        }
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(php(0, 3).is_err());
        assert!(random(RandomParams { vars: 0, constraints: 1, max_weight: 1, seed: 0 }).is_err());
    }
}
