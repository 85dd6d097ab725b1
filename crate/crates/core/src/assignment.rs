use crate::lit::{Literal, Var};

/// Read access to a (partial) truth assignment.
pub trait Assignment {
    /// `Some(true)` if `lit` is satisfied, `Some(false)` if falsified.
    fn value(&self, lit: Literal) -> Option<bool>;

    fn is_falsified(&self, lit: Literal) -> bool {
        self.value(lit) == Some(false)
    }

    fn is_satisfied(&self, lit: Literal) -> bool {
        self.value(lit) == Some(true)
    }

    fn is_unassigned(&self, lit: Literal) -> bool {
        self.value(lit).is_none()
    }
}

/// Dense per-variable assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(num_vars: usize) -> Self {
        PartialAssignment {
            values: vec![None; num_vars],
        }
    }

    /// Makes `lit` true, overwriting any previous value of its variable.
    pub fn assign(&mut self, lit: Literal) {
        let slot = lit.var().slot();
        if slot >= self.values.len() {
            self.values.resize(slot + 1, None);
        }
        self.values[slot] = Some(lit.is_positive());
    }

    pub fn unassign(&mut self, var: Var) {
        if let Some(v) = self.values.get_mut(var.slot()) {
            *v = None;
        }
    }

    pub fn var_value(&self, var: Var) -> Option<bool> {
        self.values.get(var.slot()).copied().flatten()
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Builds an assignment from the literals made true.
    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut a = Self::new();
        for l in lits {
            a.assign(l);
        }
        a
    }
}

impl Assignment for PartialAssignment {
    fn value(&self, lit: Literal) -> Option<bool> {
        self.var_value(lit.var())
            .map(|v| v == lit.is_positive())
    }
}

impl<A: Assignment + ?Sized> Assignment for &A {
    fn value(&self, lit: Literal) -> Option<bool> {
        (**self).value(lit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falsified_iff_negation_satisfied() {
        let x = Var::new(2);
        let mut rho = PartialAssignment::new();
        rho.assign(x.negative());
        assert!(rho.is_falsified(x.positive()));
        assert!(rho.is_satisfied(x.negative()));
        assert!(rho.is_unassigned(Var::new(1).positive()));
        rho.unassign(x);
        assert!(rho.is_unassigned(x.positive()));
    }
}
