use std::fmt;

use thiserror::Error;

use crate::literal::{Literal, Var};

/// Clause index, 1-based in input order.
pub type ClauseId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("clause arity {0} outside 2..=3")]
    Arity(usize),
}

/// An exactly-1 disjunction of two or three literals.
///
/// Literals keep their input order. A freshly parsed clause may still be
/// "special" (a repeated or complementary literal); such clauses are removed
/// by [`crate::formula::convert_special`] before any reduction runs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Clause, ClauseError> {
        if !(2..=3).contains(&literals.len()) {
            return Err(ClauseError::Arity(literals.len()));
        }
        Ok(Clause { literals })
    }

    /// Builds a clause from DIMACS integers. Panics on zero or bad arity; test helper.
    pub fn from_dimacs(lits: &[i64]) -> Clause {
        let literals = lits
            .iter()
            .map(|&l| Literal::from_dimacs(l).expect("nonzero literal"))
            .collect();
        Clause::new(literals).expect("2 or 3 literals")
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals.contains(&lit)
    }

    pub fn contains_var(&self, var: Var) -> bool {
        self.literals.iter().any(|l| l.var() == var)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.literals.iter().map(|l| l.var())
    }

    /// Some literal appears together with its complement.
    pub fn has_complementary_pair(&self) -> bool {
        self.literals
            .iter()
            .any(|&l| self.literals.contains(&l.negate()))
    }

    /// Some literal appears more than once.
    pub fn has_duplicate(&self) -> bool {
        let l = &self.literals;
        (0..l.len()).any(|i| l[i + 1..].contains(&l[i]))
    }

    pub fn is_special(&self) -> bool {
        self.has_complementary_pair() || self.has_duplicate()
    }

    /// Literals sorted, for order-insensitive comparison.
    pub fn sorted_literals(&self) -> Vec<Literal> {
        let mut v = self.literals.clone();
        v.sort();
        v
    }

    pub fn same_literals(&self, other: &Clause) -> bool {
        self.len() == other.len() && self.sorted_literals() == other.sorted_literals()
    }

    pub(crate) fn without(&self, lit: Literal) -> Vec<Literal> {
        self.literals.iter().copied().filter(|&l| l != lit).collect()
    }

    /// Number of literals made true by `value`.
    pub fn true_count(&self, mut value: impl FnMut(Var) -> bool) -> usize {
        self.literals
            .iter()
            .filter(|l| l.eval(value(l.var())))
            .count()
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.literals.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " . ")?;
            }
            write!(f, "{l:?}")?;
        }
        write!(f, ")")
    }
}
