//! Exhaustive ground truth for small instances.
//!
//! Variables fixed by the conjuncts are not enumerated. The remaining
//! variables that occur in some clause are enumerated depth-first in
//! ascending index order with `false` before `true`, so models are visited
//! in lexicographic order and the first one found is the lowest. A clause is
//! checked as soon as its last enumerated variable is assigned. Header
//! variables that occur nowhere are reported separately and never folded
//! into `model_count`.

use thiserror::Error;

use crate::formula::Formula;
use crate::literal::{Assignment, Literal, Var};
use crate::minterm::Minterm;

pub const DEFAULT_CAP: u32 = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{vars} variables to enumerate exceed the oracle cap of {cap}")]
pub struct CapExceeded {
    pub vars: u32,
    pub cap: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub status: OracleStatus,
    /// Lowest model over all header variables; unconstrained ones are false.
    pub witness: Option<Assignment>,
    /// Models over clause and conjunct variables, when counting was requested.
    pub model_count: Option<u64>,
    /// Header variables occurring in neither clauses nor conjuncts.
    pub unconstrained_vars: u32,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        self.status == OracleStatus::Sat
    }

    /// Model count over all header variables.
    pub fn total_models(&self) -> Option<u128> {
        self.model_count
            .map(|c| u128::from(c) << self.unconstrained_vars)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Entailed,
    NotEntailed(Assignment),
    Vacuous,
}

/// Everything one enumeration pass learns about an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survey {
    pub num_vars: u32,
    pub model_count: u64,
    pub witness: Option<Assignment>,
    /// `always[v]` / `sometimes[v]`: `v` true in every / some model (index `v - 1`).
    always: Vec<bool>,
    sometimes: Vec<bool>,
    pub unconstrained_vars: u32,
}

impl Survey {
    pub fn is_sat(&self) -> bool {
        self.model_count > 0
    }

    /// The verdict with the model count filled in.
    pub fn verdict(&self) -> OracleVerdict {
        OracleVerdict {
            status: if self.is_sat() {
                OracleStatus::Sat
            } else {
                OracleStatus::Unsat
            },
            witness: self.witness.clone(),
            model_count: Some(self.model_count),
            unconstrained_vars: self.unconstrained_vars,
        }
    }

    /// `lit` holds in every model; vacuously true when there are none.
    pub fn entails(&self, lit: Literal) -> bool {
        if !self.is_sat() {
            return true;
        }
        let i = lit.var() as usize - 1;
        match (self.always.get(i), self.sometimes.get(i)) {
            (Some(&all), Some(&some)) => {
                if lit.is_positive() {
                    all
                } else {
                    !some
                }
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub cap: u32,
}

impl Default for Oracle {
    fn default() -> Oracle {
        Oracle { cap: DEFAULT_CAP }
    }
}

/// A clause at its check depth: true literals among fixed ones, free literals as (depth, positive).
type Check = (u32, Vec<(usize, bool)>);

struct Prepared {
    num_vars: u32,
    /// Enumerated variables, ascending.
    free: Vec<Var>,
    /// Values fixed by the conjuncts.
    fixed: Vec<Option<bool>>,
    /// Clauses grouped by the enumeration depth of their last free variable.
    checks: Vec<Vec<Check>>,
    consistent: bool,
    unconstrained: u32,
}

impl Oracle {
    pub fn new(cap: u32) -> Oracle {
        Oracle { cap }
    }

    fn prepare(&self, formula: &Formula, psi: &Minterm) -> Result<Prepared, CapExceeded> {
        let num_vars = formula
            .num_vars()
            .max(psi.vars().last().unwrap_or(0));
        let mut fixed = vec![None; num_vars as usize + 1];
        for lit in psi.literals() {
            fixed[lit.var() as usize] = Some(lit.is_positive());
        }
        let mut in_clause = vec![false; num_vars as usize + 1];
        for (_, c) in formula.clauses() {
            for v in c.vars() {
                in_clause[v as usize] = true;
            }
        }
        let free: Vec<Var> = (1..=num_vars)
            .filter(|&v| in_clause[v as usize] && fixed[v as usize].is_none())
            .collect();
        if free.len() as u32 > self.cap {
            return Err(CapExceeded {
                vars: free.len() as u32,
                cap: self.cap,
            });
        }
        let unconstrained = (1..=num_vars)
            .filter(|&v| !in_clause[v as usize] && fixed[v as usize].is_none())
            .count() as u32;
        let mut depth = vec![usize::MAX; num_vars as usize + 1];
        for (d, &v) in free.iter().enumerate() {
            depth[v as usize] = d;
        }

        let mut checks = vec![Vec::new(); free.len()];
        let mut consistent = !psi.is_contradicted();
        for (_, c) in formula.clauses() {
            let mut constant = 0u32;
            let mut lits = Vec::new();
            for &l in c.literals() {
                match fixed[l.var() as usize] {
                    Some(value) => constant += u32::from(l.eval(value)),
                    None => lits.push((depth[l.var() as usize], l.is_positive())),
                }
            }
            match lits.iter().map(|&(d, _)| d).max() {
                Some(last) => checks[last].push((constant, lits)),
                None => consistent &= constant == 1,
            }
        }
        Ok(Prepared {
            num_vars,
            free,
            fixed,
            checks,
            consistent,
            unconstrained,
        })
    }

    /// Counts models and collects the lowest witness and per-variable
    /// agreement across all models.
    pub fn survey(&self, formula: &Formula, psi: &Minterm) -> Result<Survey, CapExceeded> {
        let p = self.prepare(formula, psi)?;
        let n = p.num_vars as usize;
        let mut collector = Collector {
            count: 0,
            first: None,
            always: vec![true; p.free.len()],
            sometimes: vec![false; p.free.len()],
        };
        if p.consistent {
            let mut values = vec![false; p.free.len()];
            enumerate(&p.checks, &mut values, 0, &mut collector);
        }

        let mut always = vec![false; n];
        let mut sometimes = vec![false; n];
        for v in 1..=p.num_vars {
            if let Some(value) = p.fixed[v as usize] {
                always[v as usize - 1] = value;
                sometimes[v as usize - 1] = value;
            } else {
                // Unconstrained: both values occur.
                sometimes[v as usize - 1] = true;
            }
        }
        for (d, &v) in p.free.iter().enumerate() {
            always[v as usize - 1] = collector.always[d];
            sometimes[v as usize - 1] = collector.sometimes[d];
        }
        let witness = collector.first.map(|free_values| {
            let mut a = Assignment::all_false(p.num_vars);
            for v in 1..=p.num_vars {
                if let Some(value) = p.fixed[v as usize] {
                    a.set(v, value);
                }
            }
            for (d, &v) in p.free.iter().enumerate() {
                a.set(v, free_values[d]);
            }
            a
        });
        Ok(Survey {
            num_vars: p.num_vars,
            model_count: collector.count,
            witness,
            always,
            sometimes,
            unconstrained_vars: p.unconstrained,
        })
    }

    pub fn solve(&self, formula: &Formula, psi: &Minterm, count: bool) -> Result<OracleVerdict, CapExceeded> {
        let survey = self.survey(formula, psi)?;
        let mut verdict = survey.verdict();
        if !count {
            verdict.model_count = None;
        }
        Ok(verdict)
    }

    pub fn entails(&self, formula: &Formula, psi: &Minterm, lit: Literal) -> Result<Entailment, CapExceeded> {
        let survey = self.survey(formula, psi)?;
        if !survey.is_sat() {
            return Ok(Entailment::Vacuous);
        }
        if survey.entails(lit) {
            return Ok(Entailment::Entailed);
        }
        // The lowest model falsifying `lit`: conjoin its complement.
        let mut with = psi.clone();
        with.insert(!lit).expect("a conjunct is always entailed");
        let counter = self.survey(formula, &with)?;
        let model = counter.witness.expect("some model falsifies the literal");
        Ok(Entailment::NotEntailed(model))
    }
}

struct Collector {
    count: u64,
    first: Option<Vec<bool>>,
    always: Vec<bool>,
    sometimes: Vec<bool>,
}

fn enumerate(checks: &[Vec<Check>], values: &mut [bool], depth: usize, out: &mut Collector) {
    if depth == values.len() {
        out.count += 1;
        if out.first.is_none() {
            out.first = Some(values.to_vec());
        }
        for (d, &v) in values.iter().enumerate() {
            out.always[d] &= v;
            out.sometimes[d] |= v;
        }
        return;
    }
    for value in [false, true] {
        values[depth] = value;
        let ok = checks[depth].iter().all(|(constant, lits)| {
            let trues = lits.iter().filter(|&&(d, pos)| values[d] == pos).count() as u32;
            constant + trues == 1
        });
        if ok {
            enumerate(checks, values, depth + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(x: i64) -> Literal {
        Literal::from_dimacs(x).unwrap()
    }

    fn minterm(v: &[i64]) -> Minterm {
        Minterm::from_literals(v.iter().map(|&x| lit(x))).unwrap()
    }

    #[test]
    fn unsat_example() {
        let f = Formula::from_dimacs(4, &[&[1, -2, 3], &[-3, -4], &[-3, -2, 1]]);
        let v = Oracle::default().solve(&f, &Minterm::new(), true).unwrap();
        assert_eq!(v.status, OracleStatus::Unsat);
        assert_eq!(v.witness, None);
        assert_eq!(v.model_count, Some(0));
    }

    #[test]
    fn residual_count() {
        let f = Formula::from_dimacs(7, &[&[6, -7]]);
        let v = Oracle::default()
            .solve(&f, &minterm(&[-3, -4, -5]), true)
            .unwrap();
        assert!(v.is_sat());
        assert_eq!(v.model_count, Some(2));
        assert_eq!(v.unconstrained_vars, 2);
        // x6 = x7 = false is the lowest.
        assert_eq!(v.witness.unwrap().to_dimacs(), vec![-1, -2, -3, -4, -5, -6, -7]);
    }

    #[test]
    fn empty_formula() {
        let v = Oracle::default().solve(&Formula::new(0), &Minterm::new(), true).unwrap();
        assert!(v.is_sat());
        assert_eq!(v.model_count, Some(1));
        assert_eq!(v.witness.unwrap().num_vars(), 0);
    }

    #[test]
    fn raw_special_clauses() {
        let o = Oracle::default();
        let count = |f: &Formula| o.solve(f, &Minterm::new(), true).unwrap().model_count.unwrap();
        assert_eq!(count(&Formula::from_dimacs(1, &[&[1, -1]])), 2);
        assert_eq!(count(&Formula::from_dimacs(2, &[&[1, 1, 2]])), 1);
        assert_eq!(count(&Formula::from_dimacs(1, &[&[1, 1]])), 0);
        assert_eq!(count(&Formula::from_dimacs(1, &[&[1, 1, -1]])), 1);
    }

    #[test]
    fn entailment() {
        let o = Oracle::default();
        let f = Formula::from_dimacs(3, &[&[1, -3], &[1, -2, 3], &[2, -3]]);
        assert_eq!(o.entails(&f, &Minterm::new(), lit(-1)).unwrap(), Entailment::Entailed);

        let f = Formula::from_dimacs(3, &[&[1, 2, 3]]);
        match o.entails(&f, &Minterm::new(), lit(1)).unwrap() {
            Entailment::NotEntailed(m) => {
                assert_eq!(m.get(1), Some(false));
                assert_eq!(f.clause(1).unwrap().true_count(|v| m.get(v).unwrap()), 1);
            }
            other => panic!("{other:?}"),
        }

        let f = Formula::from_dimacs(4, &[&[1, -2, 3], &[-3, -4], &[-3, -2, 1]]);
        assert_eq!(o.entails(&f, &Minterm::new(), lit(2)).unwrap(), Entailment::Vacuous);
    }

    #[test]
    fn unconstrained_negative_countermodel() {
        let f = Formula::from_dimacs(3, &[&[1, 2]]);
        match Oracle::default().entails(&f, &Minterm::new(), lit(-3)).unwrap() {
            Entailment::NotEntailed(m) => assert_eq!(m.get(3), Some(true)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cap_counts_enumerated_vars() {
        let o = Oracle::new(2);
        let f = Formula::from_dimacs(40, &[&[1, 2, 3]]);
        assert_eq!(o.solve(&f, &Minterm::new(), false), Err(CapExceeded { vars: 3, cap: 2 }));
        assert!(o.solve(&f, &minterm(&[3]), false).is_ok());
    }
}
