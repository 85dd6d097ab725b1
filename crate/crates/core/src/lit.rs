use std::fmt;
use std::ops::Not;

/// A propositional variable, indexed from 1 as in OPB files.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0.
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variable indices start at 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based position, for dense per-variable tables.
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_slot(slot: usize) -> Var {
        Var(slot as u32 + 1)
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation. Packed as `2 * var + negated`, so literals of
/// the same variable are adjacent and order follows the variable index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: Var, positive: bool) -> Literal {
        Literal(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    /// Dense index usable for per-literal tables (`0` and `1` for `x1`).
    pub fn code(self) -> usize {
        (self.0 - 2) as usize
    }

    /// DIMACS-style signed index.
    pub fn to_signed(self) -> i64 {
        let v = i64::from(self.var().index());
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_signed(v: i64) -> Literal {
        assert!(v != 0);
        Literal::new(Var::new(v.unsigned_abs() as u32), v > 0)
    }
}

impl Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `x3` or `~x3`, the notation used by OPB files for negated literals.
impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var().index())
        } else {
            write!(f, "~x{}", self.var().index())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display() {
        assert_eq!(Var::new(3).positive().to_string(), "x3");
        assert_eq!(Var::new(3).negative().to_string(), "~x3");
    }

    #[test]
    fn codes_are_dense() {
        assert_eq!(Var::new(1).positive().code(), 0);
        assert_eq!(Var::new(1).negative().code(), 1);
        assert_eq!(Var::new(2).positive().code(), 2);
    }

    proptest! {
        #[test]
        fn negation_is_involution(v in 1u32..100_000, pos in any::<bool>()) {
            let l = Literal::new(Var::new(v), pos);
            prop_assert_eq!(!!l, l);
            prop_assert_eq!((!l).var(), l.var());
            prop_assert_ne!((!l).is_positive(), l.is_positive());
            prop_assert_eq!(Literal::from_signed(l.to_signed()), l);
        }
    }
}
