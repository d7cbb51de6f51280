use std::collections::btree_map::{BTreeMap, Entry};
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::literal::{Literal, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MintermError {
    /// The inserted literal's complement was already present.
    #[error("variable {0} received both polarities")]
    Contradiction(Var),
    /// The minterm had contradicted earlier and must not be used any more.
    #[error("minterm already contradicted on variable {0}")]
    AlreadyContradicted(Var),
}

/// A conjunction of literals, i.e. a partial assignment.
///
/// Once a complementary pair has been inserted the minterm is marked
/// contradicted and every further mutation fails with
/// [`MintermError::AlreadyContradicted`].
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Minterm {
    assignments: BTreeMap<Var, bool>,
    contradiction: Option<Var>,
}

impl Minterm {
    pub fn new() -> Minterm {
        Minterm::default()
    }

    /// Builds a minterm from literals, failing on the first complementary pair.
    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Result<Minterm, MintermError> {
        let mut m = Minterm::new();
        for lit in lits {
            m.insert(lit)?;
        }
        Ok(m)
    }

    /// Records `lit`. Returns `Ok(true)` if it was new, `Ok(false)` if already present.
    pub fn insert(&mut self, lit: Literal) -> Result<bool, MintermError> {
        if let Some(var) = self.contradiction {
            return Err(MintermError::AlreadyContradicted(var));
        }
        match self.assignments.entry(lit.var()) {
            Entry::Vacant(slot) => {
                slot.insert(lit.is_positive());
                Ok(true)
            }
            Entry::Occupied(slot) if *slot.get() == lit.is_positive() => Ok(false),
            Entry::Occupied(_) => {
                self.contradiction = Some(lit.var());
                Err(MintermError::Contradiction(lit.var()))
            }
        }
    }

    /// Inserts every literal of `other`, stopping at the first contradiction.
    pub fn merge(&mut self, other: &Minterm) -> Result<(), MintermError> {
        for lit in other.literals() {
            self.insert(lit)?;
        }
        Ok(())
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.value(lit.var()) == Some(lit.is_positive())
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.assignments.get(&var).copied()
    }

    pub fn contains_var(&self, var: Var) -> bool {
        self.assignments.contains_key(&var)
    }

    /// The literal this minterm assigns to `var`, if any.
    pub fn literal_of(&self, var: Var) -> Option<Literal> {
        self.value(var).map(|pol| Literal::new(var, pol))
    }

    pub fn contradiction(&self) -> Option<Var> {
        self.contradiction
    }

    pub fn is_contradicted(&self) -> bool {
        self.contradiction.is_some()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Literals in ascending variable order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.assignments.iter().map(|(&v, &pol)| Literal::new(v, pol))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.assignments.keys().copied()
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().collect()
    }

    pub fn is_superset_of(&self, other: &Minterm) -> bool {
        other.literals().all(|l| self.contains(l))
    }

    /// Literals of `self` whose variable is not assigned by `other`.
    pub fn without_vars_of(&self, other: &Minterm) -> Minterm {
        Minterm {
            assignments: self
                .assignments
                .iter()
                .filter(|(v, _)| !other.contains_var(**v))
                .map(|(&v, &p)| (v, p))
                .collect(),
            contradiction: None,
        }
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.literals().map(Literal::to_dimacs).collect()
    }
}

impl fmt::Debug for Minterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut set = f.debug_set();
        set.entries(self.literals());
        if let Some(v) = self.contradiction {
            set.entry(&format_args!("<contradicted x{v}>"));
        }
        set.finish()
    }
}
