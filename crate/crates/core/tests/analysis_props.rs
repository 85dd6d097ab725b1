use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakpb::analysis::{
    reduce_genres, reduce_multiply_weaken, reduce_partial_rs, reduce_rs, resolve_step, weaken_ineffective,
};
use weakpb::rules::replay_steps;
use weakpb::sample::{triple, Triple};
use weakpb::semantic::constraints_imply;
use weakpb::{Int, Normalized, Preserve, Side, Strategy};

fn gen(seed: u64, vars: usize) -> Triple {
    triple(&mut ChaCha8Rng::seed_from_u64(seed), vars, 10)
}

fn dominates(strong: &weakpb::Constraint, weak: &weakpb::Constraint) -> bool {
    strong.degree() >= weak.degree()
        && weak.terms().iter().all(|(l, w)| strong.weight(*l).is_some_and(|s| s >= w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_strategy_stays_falsified_sound_and_replayable(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        for s in Strategy::ALL {
            let out = resolve_step(&t.conflict, &t.reason, t.pivot, &t.rho, s).unwrap();
            match &out.constraint {
                Normalized::Constraint(c) => prop_assert!(c.is_conflicting(&t.rho), "{s}: {c}"),
                Normalized::False => {}
                Normalized::True => prop_assert!(false, "{s}: tautology"),
            }
            let replayed = replay_steps(&t.conflict, &t.reason, &out.steps).unwrap();
            prop_assert_eq!(replayed.as_ref(), Some(&out.constraint));
            prop_assert!(constraints_imply(&[&t.conflict, &t.reason], &out.constraint).unwrap(), "{s}");
        }
    }

    #[test]
    fn weaken_ineffective_both_learns_clauses(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        let out = resolve_step(&t.conflict, &t.reason, t.pivot, &t.rho, Strategy::WeakenIneffective(Side::Both)).unwrap();
        if let Normalized::Constraint(c) = &out.constraint {
            prop_assert!(c.is_clause(), "{c}");
        }
    }

    #[test]
    fn division_reductions_leave_unit_pivot(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        for (c, lit) in [(&t.conflict, !t.pivot), (&t.reason, t.pivot)] {
            let (rs, _) = reduce_rs(c, lit, &t.rho).unwrap();
            let (prs, _) = reduce_partial_rs(c, lit, &t.rho).unwrap();
            prop_assert_eq!(rs.weight(lit), Some(&Int::ONE));
            prop_assert_eq!(prs.weight(lit), Some(&Int::ONE));
            prop_assert!(dominates(&prs, &rs), "{prs} vs {rs}");
        }
    }

    #[test]
    fn genres_reduction_makes_sum_negative(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        let (r, _) = reduce_genres(&t.conflict, &t.reason, t.pivot, &t.rho).unwrap();
        let (cw, rw) = (t.conflict.weight(!t.pivot).unwrap(), r.weight(t.pivot).unwrap());
        let l = cw.lcm(rw);
        let total = &l.div_floor(cw) * &t.conflict.slack(&t.rho) + &l.div_floor(rw) * &r.slack(&t.rho);
        prop_assert!(total.is_negative());
        // nothing to do when the pair is already safe
        let (again, steps) = reduce_genres(&t.conflict, &r, t.pivot, &t.rho).unwrap();
        prop_assert_eq!(again, r);
        prop_assert!(steps.is_empty());
    }

    #[test]
    fn multiply_weaken_hits_target(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        let cw = t.conflict.weight(!t.pivot).unwrap().clone();
        if let Some((r, mu, _)) = reduce_multiply_weaken(&t.reason, t.pivot, &cw, &t.rho).unwrap() {
            prop_assert_eq!(r.weight(t.pivot), Some(&(&mu * &cw)));
            let mut before = t.rho.clone();
            before.unassign(t.pivot.var());
            prop_assert!(r.propagation_candidates(&before).unwrap().contains(&t.pivot));
        }
    }

    #[test]
    fn weaken_ineffective_keeps_its_property(seed in any::<u64>(), vars in 2usize..=10) {
        let t = gen(seed, vars);
        let (c, _) = weaken_ineffective(&t.conflict, &t.rho, Preserve::Conflict { pivot: Some(!t.pivot) }).unwrap();
        prop_assert!(c.is_conflicting(&t.rho));
        prop_assert!(c.contains(!t.pivot));
        let mut before = t.rho.clone();
        before.unassign(t.pivot.var());
        let (r, _) = weaken_ineffective(&t.reason, &before, Preserve::Propagation { pivot: t.pivot }).unwrap();
        prop_assert!(r.propagation_candidates(&before).unwrap().contains(&t.pivot));
    }
}

#[test]
fn multiply_weaken_without_overshoot_only_scales() {
    let reason: weakpb::Constraint = "+1 ~x1 +1 ~x2 +1 ~x3 >= 2".parse().unwrap();
    let pivot: weakpb::Literal = weakpb::constraint::parse_literal("~x1").unwrap();
    let rho = weakpb::PartialAssignment::from_literals([weakpb::constraint::parse_literal("x2").unwrap()]);
    let (r, mu, steps) = reduce_multiply_weaken(&reason, pivot, &Int::from(3), &rho).unwrap().unwrap();
    assert_eq!(mu, Int::ONE);
    assert_eq!(r.to_string(), "+3 ~x1 +3 ~x2 +3 ~x3 >= 6");
    assert_eq!(steps.len(), 1);
}

#[test]
fn clause_minimal_for_conflict_is_unchanged() {
    let c: weakpb::Constraint = "+1 x1 +1 x2 >= 1".parse().unwrap();
    let rho = weakpb::PartialAssignment::from_literals(
        ["~x1", "~x2"].map(|s| weakpb::constraint::parse_literal(s).unwrap()),
    );
    let (w, steps) = weaken_ineffective(&c, &rho, Preserve::Conflict { pivot: None }).unwrap();
    assert_eq!(w, c);
    assert!(steps.is_empty());
}
