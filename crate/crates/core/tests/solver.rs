mod common;

use common::{lit, pb};
use weakpb::generate::{php, random, RandomParams};
use weakpb::opb::{parse_opb, ParsedInstance, Status};
use weakpb::semantic::{brute_force_model, constraints_imply};
use weakpb::solver::{assertion_level, backjump_level, is_assertive, solve, Analysis, Solver, SolverConfig};
use weakpb::trace::{verify_trace, TraceLine};
use weakpb::{Constraint, Normalized, Strategy};

fn config(strategy: Strategy) -> SolverConfig {
    SolverConfig {
        record_trace: true,
        check_invariants: true,
        ..SolverConfig::new(strategy)
    }
}

fn oracle(inst: &ParsedInstance) -> Status {
    let cs: Vec<Normalized> = inst.constraints.iter().cloned().map(Normalized::Constraint).collect();
    match brute_force_model(&cs, inst.num_vars()).unwrap() {
        Some(_) => Status::Sat,
        None => Status::Unsat,
    }
}

#[test]
fn php_3_2_unsat_everywhere_with_valid_traces() {
    let inst = php(3, 2).unwrap();
    for s in Strategy::ALL {
        let res = solve(&inst, config(s)).unwrap();
        assert_eq!(res.status, Status::Unsat, "{s}");
        let trace = res.trace.unwrap();
        let summary = verify_trace(&inst, &trace).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(summary.refuted, "{s}");
        assert_eq!(res.stats.conflictuality_violations, 0);
    }
}

#[test]
fn unit_instance_is_sat() {
    let inst = parse_opb("+1 x1 >= 1 ;\n").unwrap();
    let res = solve(&inst, SolverConfig::default()).unwrap();
    assert_eq!(res.status, Status::Sat);
    assert_eq!(res.model, Some(vec![true]));
}

#[test]
fn learned_constraints_are_implied_by_inputs() {
    let inst = php(4, 3).unwrap();
    let inputs: Vec<&Constraint> = inst.constraints.iter().collect();
    for s in Strategy::ALL {
        let res = solve(&inst, config(s)).unwrap();
        let trace = res.trace.unwrap();
        let mut outputs = std::collections::HashMap::new();
        for line in &trace.lines {
            match line {
                TraceLine::Input { id, constraint } | TraceLine::Step { id, output: constraint, .. } => {
                    outputs.insert(*id, constraint.clone());
                }
                TraceLine::Learned { id } => {
                    assert!(constraints_imply(&inputs, &outputs[id]).unwrap(), "{s}: {}", outputs[id]);
                }
                TraceLine::Refutation { .. } | TraceLine::Comment { .. } => {}
            }
        }
    }
}

#[test]
fn random_instances_match_enumeration() {
    for seed in 0..40 {
        let inst = random(RandomParams { vars: 6, constraints: 8, max_weight: 6, seed }).unwrap();
        let expected = oracle(&inst);
        for s in Strategy::ALL {
            let res = solve(&inst, config(s)).unwrap();
            assert_eq!(res.status, expected, "seed {seed}, {s}");
            if let Some(model) = &res.model {
                assert!(inst.is_model(model));
            }
            verify_trace(&inst, res.trace.as_ref().unwrap()).unwrap();
        }
    }
}

/// The reason is stored first so that falsifying `c` propagates `~b` before
/// the other constraint is visited.
fn slack_scenario(strategy: Strategy) -> Solver {
    let text = "+6 ~x2 +6 x3 +4 x5 +1 x6 +1 x7 +1 x8 >= 7 ;\n+5 x1 +4 x2 +1 x3 +1 x4 >= 6 ;\n";
    let inst = parse_opb(text).unwrap();
    let mut solver = Solver::new(&inst, SolverConfig::new(strategy)).unwrap();
    for l in ["a", "~d", "~e"] {
        assert_eq!(solver.assume(lit(l)).unwrap(), None);
    }
    solver
}

#[test]
fn slack_scenario_learns_at_the_level_of_e() {
    let mut solver = slack_scenario(Strategy::GenRes);
    let conflict = solver.assume(lit("~c")).unwrap().expect("conflict");
    assert_eq!(solver.engine().constraint(conflict), &pb("5a + 4b + c + d >= 6"));
    let learned = pb("25a + 25c + 16e + 5d + 4f >= 30");
    assert!(is_assertive(&learned, solver.trail(), 3));
    assert!(!is_assertive(&learned, solver.trail(), 2));
    assert_eq!(backjump_level(&learned, solver.trail()).unwrap(), 3);
    match solver.analyze_conflict(conflict).unwrap() {
        Analysis::Learn { constraint, level, .. } => {
            assert_eq!(constraint, learned);
            assert_eq!(level, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn slack_scenario_with_division() {
    let mut solver = slack_scenario(Strategy::Rs(weakpb::Side::Both));
    let conflict = solver.assume(lit("~c")).unwrap().expect("conflict");
    match solver.analyze_conflict(conflict).unwrap() {
        Analysis::Learn { constraint, level, .. } => {
            assert_eq!(constraint, pb("c + d + e >= 1"));
            assert_eq!(level, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn assertion_level_matches_direct_check() {
    let solver = slack_scenario(Strategy::GenRes);
    let trail = solver.trail();
    for c in ["a + c + f >= 1", "d + e + g >= 1", "d + e >= 1", "3d + e + g + h >= 3", "5a + 4d + c + ~e >= 5"] {
        let c = pb(c);
        let direct = (0..4).find(|&l| is_assertive(&c, trail, l));
        assert_eq!(assertion_level(&c, trail, 4), direct, "{c}");
    }
    assert_eq!(backjump_level(&pb("g >= 1"), trail).unwrap(), 0);
}

#[test]
fn identical_runs_are_identical() {
    let inst = php(6, 5).unwrap();
    for s in [Strategy::GenRes, Strategy::MultiplyWeaken] {
        let a = solve(&inst, config(s)).unwrap();
        let b = solve(&inst, config(s)).unwrap();
        let strip = |mut st: weakpb::solver::SolverStats| {
            st.seconds = 0.0;
            st
        };
        assert_eq!(strip(a.stats), strip(b.stats));
        assert_eq!(a.trace, b.trace);
    }
}

#[test]
fn conflict_budget_yields_unknown() {
    let inst = php(9, 8).unwrap();
    let cfg = SolverConfig {
        conflict_budget: Some(5),
        ..SolverConfig::new(Strategy::WeakenIneffective(weakpb::Side::Both))
    };
    let res = solve(&inst, cfg).unwrap();
    assert_eq!(res.status, Status::Unknown);
    assert!(res.model.is_none());
}
