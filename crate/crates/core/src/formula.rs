//! Clause sets with an occurrence index, and normalization of special formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause::{Clause, ClauseId};
use crate::literal::{Literal, Var};
use crate::minterm::{Minterm, MintermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable {var} outside 1..={num_vars}")]
    VarOutOfRange { var: Var, num_vars: u32 },
    #[error("clause id {0} already present")]
    DuplicateId(ClauseId),
}

static EMPTY: BTreeSet<ClauseId> = BTreeSet::new();

/// A conjunction of exactly-1 clauses over variables `1..=num_vars`.
///
/// The occurrence index maps each literal to the ids of the clauses that
/// contain it and is kept in sync by every mutating method.
#[derive(Clone, PartialEq, Eq)]
pub struct Formula {
    num_vars: u32,
    clauses: BTreeMap<ClauseId, Clause>,
    occ: Vec<BTreeSet<ClauseId>>,
}

impl Formula {
    pub fn new(num_vars: u32) -> Formula {
        Formula {
            num_vars,
            clauses: BTreeMap::new(),
            occ: vec![BTreeSet::new(); 2 * (num_vars as usize + 1)],
        }
    }

    /// Formula with clause ids `1..` in the given order.
    pub fn from_clauses<I>(num_vars: u32, clauses: I) -> Result<Formula, FormulaError>
    where
        I: IntoIterator<Item = Clause>,
    {
        let mut f = Formula::new(num_vars);
        for c in clauses {
            f.add_clause(c)?;
        }
        Ok(f)
    }

    /// Test helper: clauses as DIMACS integer slices.
    pub fn from_dimacs(num_vars: u32, clauses: &[&[i64]]) -> Formula {
        Formula::from_clauses(num_vars, clauses.iter().map(|c| Clause::from_dimacs(c)))
            .expect("variables in range")
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Appends a clause with the next free id.
    pub fn add_clause(&mut self, clause: Clause) -> Result<ClauseId, FormulaError> {
        let id = self.clauses.keys().next_back().map_or(1, |k| k + 1);
        self.insert_clause(id, clause)?;
        Ok(id)
    }

    pub fn insert_clause(&mut self, id: ClauseId, clause: Clause) -> Result<(), FormulaError> {
        if self.clauses.contains_key(&id) {
            return Err(FormulaError::DuplicateId(id));
        }
        if let Some(var) = clause.vars().find(|&v| v > self.num_vars) {
            return Err(FormulaError::VarOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        for &l in clause.literals() {
            self.occ[l.code()].insert(id);
        }
        self.clauses.insert(id, clause);
        Ok(())
    }

    pub fn remove_clause(&mut self, id: ClauseId) -> Option<Clause> {
        let clause = self.clauses.remove(&id)?;
        for &l in clause.literals() {
            self.occ[l.code()].remove(&id);
        }
        Some(clause)
    }

    /// Replaces the clause stored under `id`, keeping the id stable.
    pub fn replace_clause(&mut self, id: ClauseId, clause: Clause) -> Result<(), FormulaError> {
        self.remove_clause(id);
        self.insert_clause(id, clause)
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get(&id)
    }

    /// Clauses in ascending id order.
    pub fn clauses(&self) -> impl Iterator<Item = (ClauseId, &Clause)> + '_ {
        self.clauses.iter().map(|(&k, c)| (k, c))
    }

    /// Ids of clauses containing `lit`, ascending.
    pub fn occurrences(&self, lit: Literal) -> &BTreeSet<ClauseId> {
        self.occ.get(lit.code()).unwrap_or(&EMPTY)
    }

    pub fn mentions_var(&self, var: Var) -> bool {
        !self.occurrences(Literal::pos(var)).is_empty()
            || !self.occurrences(Literal::neg(var)).is_empty()
    }

    /// Variables occurring in some clause, ascending.
    pub fn vars(&self) -> BTreeSet<Var> {
        (1..=self.num_vars).filter(|&v| self.mentions_var(v)).collect()
    }

    /// No clause contains a complementary pair or a repeated literal.
    pub fn is_general(&self) -> bool {
        self.clauses.values().all(|c| !c.is_special())
    }

    /// Recomputes the occurrence index from the clauses.
    pub fn rebuild_index(&mut self) {
        for set in &mut self.occ {
            set.clear();
        }
        for (&id, c) in &self.clauses {
            for &l in c.literals() {
                self.occ[l.code()].insert(id);
            }
        }
    }

    /// The index lists exactly the clauses containing each literal.
    pub fn index_is_consistent(&self) -> bool {
        let mut fresh = self.clone();
        fresh.rebuild_index();
        fresh.occ == self.occ
    }

    /// If another clause has the same literal set as `id`, drops whichever has
    /// the larger id and returns it.
    pub fn dedup_clause(&mut self, id: ClauseId) -> Option<ClauseId> {
        let clause = self.clauses.get(&id)?;
        let first = clause.literals()[0];
        let twin = self
            .occurrences(first)
            .iter()
            .copied()
            .find(|&k| k != id && self.clauses[&k].same_literals(clause))?;
        let drop = twin.max(id);
        self.remove_clause(drop);
        Some(drop)
    }

    /// Clause contents as sorted literal lists, sorted; equality ignores ids
    /// and literal order.
    pub fn clause_sets(&self) -> Vec<Vec<Literal>> {
        let mut v: Vec<_> = self.clauses.values().map(Clause::sorted_literals).collect();
        v.sort();
        v
    }

    pub fn to_dimacs(&self) -> Vec<Vec<i64>> {
        self.clauses.values().map(Clause::to_dimacs).collect()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.clauses.iter()).finish()
    }
}

/// An input instance: header variable count, initial conjuncts and clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub formula: Formula,
    pub units: Vec<Literal>,
}

impl Instance {
    pub fn new(formula: Formula, units: Vec<Literal>) -> Instance {
        Instance { formula, units }
    }

    pub fn num_vars(&self) -> u32 {
        self.formula.num_vars()
    }

    /// The initial conjuncts as a minterm, or the first clashing variable.
    pub fn initial_minterm(&self) -> Result<Minterm, Var> {
        Minterm::from_literals(self.units.iter().copied()).map_err(|e| match e {
            MintermError::Contradiction(v) | MintermError::AlreadyContradicted(v) => v,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionKind {
    /// `(x . ~x)`: always exactly one true; dropped.
    Tautology,
    /// `(r . x . ~x)`: replaced by `~r`.
    Complementary,
    /// `(l . l . r)`: forces `~l` and `r`.
    Duplicate,
    /// Same literal set as an earlier clause.
    DuplicateClause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionStep {
    pub clause: ClauseId,
    pub kind: ConversionKind,
    pub forced: Vec<Literal>,
}

#[derive(Debug, Clone)]
pub struct Converted {
    pub formula: Formula,
    pub psi: Minterm,
    pub steps: Vec<ConversionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("conversion of clause {clause} forces contradictory values for variable {var}")]
pub struct ConversionUnsat {
    pub clause: ClauseId,
    pub var: Var,
    pub steps: Vec<ConversionStep>,
}

/// Rewrites every special clause into conjuncts and removes repeated clauses,
/// producing a general formula.
///
/// Exactly-1 truth tables give the rewrites: `(r . x . ~x)` forces `~r`,
/// `(x . ~x)` always holds, `(l . l . r)` forces `~l` and `r`, and `(l . l)`
/// or `(l . l . l)` can never have exactly one true literal.
pub fn convert_special(formula: &Formula, psi: &Minterm) -> Result<Converted, ConversionUnsat> {
    let mut out = formula.clone();
    let mut psi = psi.clone();
    let mut steps = Vec::new();

    let ids: Vec<ClauseId> = out.clauses().map(|(k, _)| k).collect();
    for id in ids {
        let clause = out.clause(id).expect("id from snapshot").clone();
        let lits = clause.literals();
        let step = if let Some(pair) = lits.iter().position(|&l| lits.contains(&l.negate())) {
            let x = lits[pair];
            let rest: Vec<Literal> = lits.iter().copied().filter(|&l| l != x && l != !x).collect();
            match rest.as_slice() {
                [] if lits.len() == 2 => ConversionStep {
                    clause: id,
                    kind: ConversionKind::Tautology,
                    forced: vec![],
                },
                // (x . x . ~x) or (x . ~x . ~x): the repeated one is the third literal.
                [] => {
                    let repeated = if lits.iter().filter(|&&l| l == x).count() == 2 { x } else { !x };
                    ConversionStep {
                        clause: id,
                        kind: ConversionKind::Complementary,
                        forced: vec![!repeated],
                    }
                }
                [r] => ConversionStep {
                    clause: id,
                    kind: ConversionKind::Complementary,
                    forced: vec![!*r],
                },
                _ => unreachable!("clause arity is at most 3"),
            }
        } else if clause.has_duplicate() {
            let dup = lits
                .iter()
                .copied()
                .find(|l| lits.iter().filter(|&m| m == l).count() > 1)
                .expect("has duplicate");
            let rest: Vec<Literal> = lits.iter().copied().filter(|&l| l != dup).collect();
            match rest.as_slice() {
                [r] => ConversionStep {
                    clause: id,
                    kind: ConversionKind::Duplicate,
                    forced: vec![!dup, *r],
                },
                // (l . l) or (l . l . l): zero or at least two true literals.
                _ => ConversionStep {
                    clause: id,
                    kind: ConversionKind::Duplicate,
                    forced: vec![dup, !dup],
                },
            }
        } else {
            continue;
        };

        out.remove_clause(id);
        for &lit in &step.forced {
            if let Err(MintermError::Contradiction(var) | MintermError::AlreadyContradicted(var)) =
                psi.insert(lit)
            {
                steps.push(step);
                return Err(ConversionUnsat { clause: id, var, steps });
            }
        }
        steps.push(step);
    }

    let ids: Vec<ClauseId> = out.clauses().map(|(k, _)| k).collect();
    for id in ids {
        if let Some(dropped) = out.dedup_clause(id) {
            steps.push(ConversionStep {
                clause: dropped,
                kind: ConversionKind::DuplicateClause,
                forced: vec![],
            });
        }
    }

    Ok(Converted {
        formula: out,
        psi,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(x: i64) -> Literal {
        Literal::from_dimacs(x).unwrap()
    }

    #[test]
    fn occurrence_index_small() {
        let f = Formula::from_dimacs(3, &[&[1, -3]]);
        assert_eq!(f.occurrences(lit(1)).iter().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(f.occurrences(lit(-3)).iter().copied().collect::<Vec<_>>(), vec![1]);
        assert!(f.occurrences(lit(3)).is_empty());
    }

    #[test]
    fn occurrence_index_illustrative_example() {
        let mut f = Formula::from_dimacs(3, &[&[1, -3], &[1, -2, 3], &[2, -3]]);
        f.rebuild_index();
        assert_eq!(f.occurrences(lit(1)).iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert!(f.index_is_consistent());
    }

    #[test]
    fn occurrence_index_empty() {
        let mut f = Formula::new(4);
        f.rebuild_index();
        for v in 1..=4 {
            assert!(!f.mentions_var(v));
        }
        assert!(f.occurrences(lit(9)).is_empty());
    }

    #[test]
    fn var_out_of_range() {
        let mut f = Formula::new(2);
        assert_eq!(
            f.add_clause(Clause::from_dimacs(&[1, 2, 3])),
            Err(FormulaError::VarOutOfRange { var: 3, num_vars: 2 })
        );
    }

    #[test]
    fn replace_keeps_index() {
        let mut f = Formula::from_dimacs(4, &[&[1, 2, 3], &[-1, 4]]);
        f.replace_clause(1, Clause::from_dimacs(&[2, 3])).unwrap();
        assert!(f.occurrences(lit(1)).is_empty());
        assert!(f.index_is_consistent());
    }

    #[test]
    fn dedup_keeps_lowest_id() {
        let mut f = Formula::from_dimacs(7, &[&[1, -2, 6], &[6, -7], &[-7, 6]]);
        assert_eq!(f.dedup_clause(2), Some(3));
        assert_eq!(f.len(), 2);
        assert!(f.clause(2).is_some());
        assert!(f.index_is_consistent());
    }

    #[test]
    fn convert_first_example() {
        // (x2 . ~x1) (x1 . ~x3 . x4) (x1 . ~x2 . x2)
        let f = Formula::from_dimacs(4, &[&[2, -1], &[1, -3, 4], &[1, -2, 2]]);
        let out = convert_special(&f, &Minterm::new()).unwrap();
        assert_eq!(out.psi.to_dimacs(), vec![-1]);
        assert_eq!(out.formula.to_dimacs(), vec![vec![2, -1], vec![1, -3, 4]]);
        assert!(out.formula.is_general());
    }

    #[test]
    fn convert_second_example_unsat() {
        // (x3 . ~x4 . x4) (~x3 . x2 . ~x2) (x2 . ~x1)
        let f = Formula::from_dimacs(4, &[&[3, -4, 4], &[-3, 2, -2], &[2, -1]]);
        let err = convert_special(&f, &Minterm::new()).unwrap_err();
        assert_eq!(err.var, 3);
        assert_eq!(err.clause, 2);
        assert_eq!(err.steps[0].forced, vec![lit(-3)]);
        assert_eq!(err.steps[1].forced, vec![lit(3)]);
    }

    #[test]
    fn convert_tautology_pair() {
        let f = Formula::from_dimacs(1, &[&[1, -1]]);
        let out = convert_special(&f, &Minterm::new()).unwrap();
        assert!(out.formula.is_empty());
        assert!(out.psi.is_empty());
    }

    #[test]
    fn convert_duplicates() {
        let f = Formula::from_dimacs(3, &[&[2, 2, -3]]);
        let out = convert_special(&f, &Minterm::new()).unwrap();
        assert_eq!(out.psi.to_dimacs(), vec![-2, -3]);
        assert!(out.formula.is_empty());

        let f = Formula::from_dimacs(3, &[&[2, 2]]);
        assert!(convert_special(&f, &Minterm::new()).is_err());
        let f = Formula::from_dimacs(3, &[&[-1, -1, -1]]);
        assert!(convert_special(&f, &Minterm::new()).is_err());
        // (x1 . x1 . ~x1): only x1 = false works.
        let f = Formula::from_dimacs(3, &[&[1, 1, -1]]);
        let out = convert_special(&f, &Minterm::new()).unwrap();
        assert_eq!(out.psi.to_dimacs(), vec![-1]);
    }

    #[test]
    fn convert_drops_repeated_clause() {
        let f = Formula::from_dimacs(3, &[&[1, 2, 3], &[3, 1, 2], &[1, -2]]);
        let out = convert_special(&f, &Minterm::new()).unwrap();
        assert_eq!(out.formula.len(), 2);
        assert_eq!(out.steps[0].kind, ConversionKind::DuplicateClause);
        assert_eq!(out.steps[0].clause, 2);
    }
}
