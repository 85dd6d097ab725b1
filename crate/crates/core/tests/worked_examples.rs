mod common;

use common::{lit, npb, pb, rho};
use weakpb::analysis::{
    reduce_genres, reduce_multiply_weaken, reduce_partial_rs, reduce_rs, resolve_step,
    weaken_ineffective,
};
use weakpb::{Int, Normalized, Preserve, Side, Strategy};

fn slack_example_rho() -> weakpb::PartialAssignment {
    rho("a=1 c=0 d=0 e=0 ~b=1")
}

#[test]
fn reason_slack_and_propagation() {
    let reason = pb("6~b + 6c + 4e + f + g + h >= 7");
    let before = rho("a=1 c=0 d=0 e=0");
    assert_eq!(reason.slack(&before), Int::from(2));
    assert_eq!(reason.propagation_candidates(&before).unwrap(), vec![lit("~b")]);
    assert_eq!(pb("5a + 4b + c + d >= 6").slack(&slack_example_rho()), Int::from(-1));
}

#[test]
fn generalized_resolution_step() {
    let conflict = pb("5a + 4b + c + d >= 6");
    let reason = pb("6~b + 6c + 4e + f + g + h >= 7");
    let r = slack_example_rho();
    let (reduced, _) = reduce_genres(&conflict, &reason, lit("~b"), &r).unwrap();
    assert_eq!(reduced, pb("5~b + 5c + 4e + f >= 5"));
    assert_eq!(reduced.slack(&r), Int::ONE);
    let out = resolve_step(&conflict, &reason, lit("~b"), &r, Strategy::GenRes).unwrap();
    assert_eq!(out.constraint, npb("25a + 25c + 16e + 5d + 4f >= 30"));
    assert_eq!(out.constraint.constraint().unwrap().slack(&r), Int::from(-1));
}

#[test]
fn division_step() {
    let conflict = pb("5a + 4b + c + d >= 6");
    let reason = pb("6~b + 6c + 4e + f + g + h >= 7");
    let r = slack_example_rho();
    assert_eq!(reduce_rs(&conflict, lit("b"), &r).unwrap().0, pb("b + c + d >= 1"));
    assert_eq!(reduce_rs(&reason, lit("~b"), &r).unwrap().0, pb("~b + c + e >= 1"));
    let out = resolve_step(&conflict, &reason, lit("~b"), &r, Strategy::Rs(Side::Both)).unwrap();
    assert_eq!(out.constraint, npb("c + d + e >= 1"));
}

#[test]
fn ineffective_literals() {
    let r = rho("a=0 c=0 f=0");
    let reason = pb("3~a + 3~b + c + d + e >= 6");
    assert_eq!(reason.slack(&r), Int::from(2));
    let (w, _) = weaken_ineffective(&reason, &r, Preserve::Propagation { pivot: lit("~b") }).unwrap();
    assert_eq!(w, pb("~b + c >= 1"));

    let after = rho("a=0 c=0 f=0 ~b=1");
    let conflict = pb("2a + b + c + f >= 2");
    let mode = Preserve::Conflict { pivot: Some(lit("b")) };
    let (w, _) = weaken_ineffective(&conflict, &after, mode).unwrap();
    assert_eq!(w, pb("a + b + f >= 1"));
}

#[test]
fn ineffective_one_side_vs_both() {
    let r = rho("a=0 c=0 f=0 ~b=1");
    let conflict = pb("2a + b + c + f >= 2");
    let reason = pb("3~a + 3~b + c + d + e >= 6");
    let both = resolve_step(&conflict, &reason, lit("~b"), &r, Strategy::WeakenIneffective(Side::Both)).unwrap();
    assert_eq!(both.constraint, npb("a + c + f >= 1"));
    let one = resolve_step(&conflict, &reason, lit("~b"), &r, Strategy::WeakenIneffective(Side::Conflict)).unwrap();
    assert_eq!(one.constraint, npb("3f + c + d + e >= 3"));
    let next = one.constraint.constraint().unwrap();
    let (w, _) = weaken_ineffective(next, &r, Preserve::Conflict { pivot: None }).unwrap();
    assert_eq!(w, pb("c + f >= 1"));
}

#[test]
fn partial_weakening_is_stronger() {
    let r = rho("a=1 b=0 c=0 d=0 e=0");
    let c = pb("8a + 7b + 7c + 2d + 2e + f >= 11");
    assert_eq!(reduce_partial_rs(&c, lit("b"), &r).unwrap().0, pb("a + b + c + d + e >= 2"));
    assert_eq!(reduce_rs(&c, lit("b"), &r).unwrap().0, pb("b + c + d + e >= 1"));
}

#[test]
fn multiply_and_weaken() {
    let r = rho("a=0 d=0 e=1 b=1");
    let reason = pb("5a + 5b + 3c + 2d + e >= 6");
    let conflict = pb("3~b + 2a + 2d + ~e >= 5");
    let (reduced, mu, _) = reduce_multiply_weaken(&reason, lit("b"), &Int::from(3), &r)
        .unwrap()
        .unwrap();
    assert_eq!(reduced, pb("3a + 3b + c + 2d >= 3"));
    assert_eq!(mu, Int::ONE);
    let out = resolve_step(&conflict, &reason, lit("b"), &r, Strategy::MultiplyWeaken).unwrap();
    assert_eq!(out.constraint, npb("5a + 4d + c + ~e >= 5"));
    assert!(!out.fallback);
}

#[test]
fn recorded_steps_replay() {
    let conflict = pb("5a + 4b + c + d >= 6");
    let reason = pb("6~b + 6c + 4e + f + g + h >= 7");
    let r = slack_example_rho();
    for s in Strategy::ALL {
        let out = resolve_step(&conflict, &reason, lit("~b"), &r, s).unwrap();
        let replayed = weakpb::rules::replay_steps(&conflict, &reason, &out.steps).unwrap();
        assert_eq!(replayed, Some(out.constraint.clone()), "{s}");
        assert!(!matches!(out.constraint, Normalized::True));
    }
}
