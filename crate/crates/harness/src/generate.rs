use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use x3sat::{Clause, Formula, Instance, Literal};

/// Parameters of a random instance family.
///
/// Instance `i` of a family is drawn from ChaCha8 seeded with
/// `seed_from_u64(seed)` on stream `i`, so any instance can be regenerated
/// without the ones before it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n: u32,
    pub m: usize,
    /// Probability that a clause has two literals.
    pub two_clause_fraction: f64,
    /// Probability that a literal is positive.
    pub positive_bias: f64,
    /// Probability that a clause repeats a variable.
    pub special_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GenError {
    #[error("n must be at least 2, got {0}")]
    TooFewVars(u32),
    #[error("m must be at least 1")]
    NoClauses,
    #[error("{name} = {value} is outside [0, 1]")]
    Fraction { name: &'static str, value: f64 },
}

impl GenConfig {
    pub fn new(seed: u64, n: u32, m: usize) -> GenConfig {
        GenConfig {
            seed,
            n,
            m,
            two_clause_fraction: 0.2,
            positive_bias: 0.5,
            special_fraction: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n < 2 {
            return Err(GenError::TooFewVars(self.n));
        }
        if self.m < 1 {
            return Err(GenError::NoClauses);
        }
        for (name, value) in [
            ("two_clause_fraction", self.two_clause_fraction),
            ("positive_bias", self.positive_bias),
            ("special_fraction", self.special_fraction),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GenError::Fraction { name, value });
            }
        }
        Ok(())
    }
}

/// The first instance of the family.
pub fn gen_instance(cfg: &GenConfig) -> Instance {
    gen_instance_at(cfg, 0)
}

/// Instance `index` of the family. Panics on an invalid config.
pub fn gen_instance_at(cfg: &GenConfig, index: u64) -> Instance {
    cfg.validate().expect("valid generator config");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);

    let mut formula = Formula::new(cfg.n);
    for _ in 0..cfg.m {
        let arity = if rng.gen_bool(cfg.two_clause_fraction) { 2 } else { 3 };
        let arity = arity.min(cfg.n as usize);
        let mut vars: Vec<u32> = sample(&mut rng, cfg.n as usize, arity)
            .into_iter()
            .map(|i| i as u32 + 1)
            .collect();
        if rng.gen_bool(cfg.special_fraction) {
            let from = rng.gen_range(0..arity);
            let to = (from + 1 + rng.gen_range(0..arity - 1)) % arity;
            vars[to] = vars[from];
        }
        let lits = vars
            .into_iter()
            .map(|v| Literal::new(v, rng.gen_bool(cfg.positive_bias)))
            .collect();
        formula
            .add_clause(Clause::new(lits).expect("arity 2 or 3"))
            .expect("variables in range");
    }
    Instance::new(formula, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use x3sat::to_x3c;

    #[test]
    fn deterministic() {
        let cfg = GenConfig::new(1, 5, 3);
        assert_eq!(to_x3c(&gen_instance(&cfg)), to_x3c(&gen_instance(&cfg)));
        assert_ne!(to_x3c(&gen_instance_at(&cfg, 0)), to_x3c(&gen_instance_at(&cfg, 1)));
    }

    #[test]
    fn no_two_clauses() {
        let cfg = GenConfig {
            two_clause_fraction: 0.0,
            ..GenConfig::new(3, 8, 40)
        };
        let inst = gen_instance(&cfg);
        assert!(inst.formula.clauses().all(|(_, c)| c.len() == 3));
        assert!(inst.formula.is_general());
    }

    #[test]
    fn all_positive() {
        let cfg = GenConfig {
            positive_bias: 1.0,
            ..GenConfig::new(3, 8, 40)
        };
        let inst = gen_instance(&cfg);
        assert!(inst
            .formula
            .clauses()
            .all(|(_, c)| c.literals().iter().all(|l| l.is_positive())));
    }

    #[test]
    fn special_clauses_repeat_a_variable() {
        let cfg = GenConfig {
            special_fraction: 1.0,
            ..GenConfig::new(3, 6, 30)
        };
        let inst = gen_instance(&cfg);
        for (_, c) in inst.formula.clauses() {
            let mut vars: Vec<_> = c.vars().collect();
            vars.sort();
            vars.dedup();
            assert!(vars.len() < c.len());
        }
    }

    #[test]
    fn validation() {
        assert_eq!(GenConfig::new(0, 1, 3).validate(), Err(GenError::TooFewVars(1)));
        assert_eq!(GenConfig::new(0, 3, 0).validate(), Err(GenError::NoClauses));
        let bad = GenConfig {
            positive_bias: 1.5,
            ..GenConfig::new(0, 3, 3)
        };
        assert!(bad.validate().is_err());
    }
}
