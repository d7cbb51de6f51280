//! Single-literal reduction: clause collapse, clause shrinkage, and their
//! combination over the occurrence sets of a literal and its complement.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::clause::{Clause, ClauseId};
use crate::formula::Formula;
use crate::literal::{Literal, Var};
use crate::minterm::{Minterm, MintermError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("literal {0:?} does not occur in the clause")]
    LiteralNotInClause(Literal),
}

/// `lit` true in `clause`: `lit` holds and every other literal is false.
pub fn collapse_clause(clause: &Clause, lit: Literal) -> Result<Minterm, ReductionError> {
    if !clause.contains(lit) {
        return Err(ReductionError::LiteralNotInClause(lit));
    }
    let mut m = Minterm::new();
    // A general clause has distinct variables, so this never contradicts.
    let _ = m.insert(lit);
    for &other in clause.literals() {
        if other != lit {
            let _ = m.insert(!other);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shrunk {
    TwoClause(Clause),
    /// The single remaining literal, which must be true.
    Unit(Literal),
}

/// `lit` false in `clause`: drop it from the clause.
pub fn shrink_clause(clause: &Clause, lit: Literal) -> Result<Shrunk, ReductionError> {
    if !clause.contains(lit) {
        return Err(ReductionError::LiteralNotInClause(lit));
    }
    let rest = clause.without(lit);
    match rest.as_slice() {
        [unit] => Ok(Shrunk::Unit(*unit)),
        _ => Ok(Shrunk::TwoClause(
            Clause::new(rest).expect("three-literal clause minus one"),
        )),
    }
}

/// Effect of asserting one literal on a formula, not yet applied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionResult {
    /// Literals forced by collapsed clauses and by units left after shrinking.
    pub collapse: Minterm,
    /// Surviving two-literal clauses, replacing the originals under the same id.
    pub shrunk: Vec<(ClauseId, Clause)>,
    /// Clauses deleted: collapsed ones and those shrunk to a unit.
    pub removed: BTreeSet<ClauseId>,
}

/// The reduction was interrupted by a complementary pair on `var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reduction by {literal:?} forces both polarities of x{var}")]
pub struct ReductionConflict {
    pub literal: Literal,
    pub var: Var,
}

/// Collapses every clause containing `lit` and shrinks every clause
/// containing `!lit`, in ascending clause id order, returning early on the
/// first complementary pair. Does not touch `formula`.
///
/// `steps` grows by the clause length for each collapse and by one for each
/// shrink.
pub fn reduce(
    formula: &Formula,
    lit: Literal,
    steps: &mut u64,
) -> Result<ReductionResult, ReductionConflict> {
    debug_assert!(formula
        .occurrences(lit)
        .is_disjoint(formula.occurrences(!lit)));
    let conflict = |e: MintermError| match e {
        MintermError::Contradiction(var) | MintermError::AlreadyContradicted(var) => {
            ReductionConflict { literal: lit, var }
        }
    };

    let mut result = ReductionResult::default();
    for &k in formula.occurrences(lit) {
        let clause = formula.clause(k).expect("index mirrors clauses");
        *steps += clause.len() as u64;
        let collapsed = collapse_clause(clause, lit).expect("occurrence index");
        result.collapse.merge(&collapsed).map_err(conflict)?;
        result.removed.insert(k);
    }
    for &k in formula.occurrences(!lit) {
        let clause = formula.clause(k).expect("index mirrors clauses");
        *steps += 1;
        match shrink_clause(clause, !lit).expect("occurrence index") {
            Shrunk::TwoClause(c) => result.shrunk.push((k, c)),
            Shrunk::Unit(u) => {
                result.collapse.insert(u).map_err(conflict)?;
                result.removed.insert(k);
            }
        }
    }
    Ok(result)
}

impl Formula {
    /// Applies a reduction delta. Shrunk clauses that duplicate an existing
    /// clause are dropped; their ids are returned.
    pub fn apply(&mut self, delta: &ReductionResult) -> Vec<ClauseId> {
        for &k in &delta.removed {
            self.remove_clause(k);
        }
        for (k, c) in &delta.shrunk {
            self.replace_clause(*k, c.clone())
                .expect("shrunk clause uses existing variables");
        }
        delta
            .shrunk
            .iter()
            .filter_map(|(k, _)| self.dedup_clause(*k))
            .collect()
    }
}
