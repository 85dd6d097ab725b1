//! Helpers for writing constraints over the letters `a..h` (= x1..x8), with
//! `~b` for a negated literal.

#![allow(dead_code)]

use weakpb::{Constraint, Int, Literal, Normalized, PartialAssignment, Var};

pub fn lit(s: &str) -> Literal {
    let (neg, name) = match s.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let ch = name.chars().next().expect("empty literal");
    assert!(name.len() == 1 && ('a'..='h').contains(&ch), "bad literal {s}");
    let var = Var::new(ch as u32 - 'a' as u32 + 1);
    Literal::new(var, !neg)
}

/// Parses `5a + 4b + c + ~d >= 6`.
pub fn pb(s: &str) -> Constraint {
    let (lhs, rhs) = s.split_once(">=").expect("missing >=");
    let degree: Int = rhs.trim().parse().expect("bad degree");
    let terms: Vec<_> = lhs
        .split('+')
        .map(|t| {
            let t = t.trim();
            let split = t.find(|c: char| !c.is_ascii_digit()).expect("bad term");
            let w = if split == 0 { Int::ONE } else { t[..split].parse().unwrap() };
            (lit(&t[split..]), w)
        })
        .collect();
    Constraint::new(terms, degree).expect("invalid constraint")
}

pub fn npb(s: &str) -> Normalized {
    Normalized::Constraint(pb(s))
}

/// Parses `a=1 c=0`.
pub fn rho(s: &str) -> PartialAssignment {
    let mut a = PartialAssignment::with_vars(8);
    for item in s.split_whitespace() {
        let (name, v) = item.split_once('=').expect("bad binding");
        let l = lit(name);
        a.assign(if v == "1" { l } else { !l });
    }
    a
}
