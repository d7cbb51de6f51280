//! Scan-versus-oracle comparison of single instances and whole campaigns.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use x3sat::assignment::{cross_check, is_partition};
use x3sat::oracle::{CapExceeded, Oracle};
use x3sat::scan::{check_monotonicity, default_step_budget, TraceEvent};
use x3sat::{solve, to_x3c, Instance, Literal, SolveConfig, Status, Verdict};

use crate::generate::{gen_instance_at, GenConfig};

/// Outcome class of one run. Ordered by classification priority.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Class {
    StepBudgetExceeded,
    /// Scan reported unsatisfiable, the oracle found a model.
    SoundnessViolation,
    /// A grand-scope literal is not entailed by a satisfiable instance.
    EntailmentViolation,
    AgreeUnsat,
    /// Scan terminated, but the residual with its grand scope has no model.
    ClaimFalsifiedResidual,
    /// Scan terminated on a satisfiable residual, but no valid assignment was built.
    ClaimFalsifiedConstruction,
    AgreeSatVerified,
}

impl Class {
    pub const ALL: [Class; 7] = [
        Class::AgreeSatVerified,
        Class::AgreeUnsat,
        Class::SoundnessViolation,
        Class::ClaimFalsifiedResidual,
        Class::ClaimFalsifiedConstruction,
        Class::EntailmentViolation,
        Class::StepBudgetExceeded,
    ];

    /// A defect in this implementation rather than in the procedure.
    pub fn is_bug(self) -> bool {
        matches!(self, Class::SoundnessViolation | Class::EntailmentViolation)
    }

    pub fn is_falsification(self) -> bool {
        matches!(
            self,
            Class::ClaimFalsifiedResidual | Class::ClaimFalsifiedConstruction | Class::StepBudgetExceeded
        )
    }

    pub fn is_agreement(self) -> bool {
        matches!(self, Class::AgreeSatVerified | Class::AgreeUnsat)
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::AgreeSatVerified => "AGREE_SAT_VERIFIED",
            Class::AgreeUnsat => "AGREE_UNSAT",
            Class::SoundnessViolation => "SOUNDNESS_VIOLATION",
            Class::ClaimFalsifiedResidual => "CLAIM_FALSIFIED_RESIDUAL",
            Class::ClaimFalsifiedConstruction => "CLAIM_FALSIFIED_CONSTRUCTION",
            Class::EntailmentViolation => "ENTAILMENT_VIOLATION",
            Class::StepBudgetExceeded => "STEP_BUDGET_EXCEEDED",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub sat: bool,
    /// Models over clause and conjunct variables of the input.
    pub model_count: u64,
    /// Satisfiability of the terminated residual with its grand scope.
    pub residual_sat: Option<bool>,
}

/// Findings about claims that are recorded but do not decide the class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observations {
    /// Construction pieces not contained in their pick's full scope.
    pub conditional_scope_failures: usize,
    /// Runs where subtracting earlier pieces from full scopes gives other pieces.
    pub set_difference_disagreements: usize,
}

impl Observations {
    pub fn add(&mut self, other: &Observations) {
        self.conditional_scope_failures += other.conditional_scope_failures;
        self.set_difference_disagreements += other.set_difference_disagreements;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub index: u64,
    /// SHA-256 of the instance's x3c text, hex.
    pub digest: String,
    pub class: Class,
    pub status: Status,
    pub detail: Option<String>,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub steps: u64,
    pub step_budget: u64,
    pub generations: u64,
    pub oracle: OracleInfo,
    /// Failed checks of this implementation's own invariants.
    pub invariant_failures: Vec<String>,
    pub observations: Observations,
    pub trace: Vec<TraceEvent>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct DiffConfig {
    pub solve: SolveConfig,
    pub oracle: Oracle,
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn invariant_failures(sol: &x3sat::Solution) -> Vec<String> {
    let mut out = Vec::new();
    if let Err(l) = check_monotonicity(&sol.trace, &sol.initial_psi) {
        out.push(format!("monotonicity: removal of {l} not kept"));
    }
    let Some(t) = &sol.terminated else {
        return out;
    };
    if !t.phi_hat.index_is_consistent() {
        out.push("index: occurrence index out of sync".into());
    }
    if t.psi_hat.vars().any(|v| t.phi_hat.mentions_var(v)) {
        out.push("termination: grand scope overlaps residual".into());
    }
    let vars = t.phi_hat.vars();
    for &v in &vars {
        for l in [Literal::pos(v), Literal::neg(v)] {
            match t.scope_table.get(&l) {
                None => out.push(format!("termination: no scope for {l}")),
                Some(r) if !r.overlap().is_empty() => {
                    out.push(format!("disjointness: scope of {l} overlaps beyond"))
                }
                Some(_) => {}
            }
        }
    }
    let certificate = match &sol.verdict {
        Verdict::Sat(c) | Verdict::VerificationFailed { certificate: c, .. } => Some(c),
        _ => None,
    };
    if let Some(c) = certificate {
        if !is_partition(&c.pieces, &vars.iter().copied().collect::<BTreeSet<_>>()) {
            out.push("partition: pieces do not partition the residual variables".into());
        }
    }
    out
}

/// Solves `instance`, compares against the oracle and classifies.
pub fn run_instance(instance: &Instance, index: u64, config: &DiffConfig) -> Result<RunReport, CapExceeded> {
    let started = Instant::now();
    let text = to_x3c(instance);
    let sol = solve(instance, &config.solve);

    let raw_psi = instance.initial_minterm().ok();
    let survey = match &raw_psi {
        Some(psi) => Some(config.oracle.survey(&instance.formula, psi)?),
        None => None,
    };
    let sat = survey.as_ref().is_some_and(|s| s.is_sat());
    let mut oracle = OracleInfo {
        sat,
        model_count: survey.as_ref().map_or(0, |s| s.model_count),
        residual_sat: None,
    };

    let mut observations = Observations::default();
    let mut detail = None;
    let class = match &sol.verdict {
        Verdict::BudgetExceeded { budget } => {
            detail = Some(format!("exceeded {budget} steps"));
            Class::StepBudgetExceeded
        }
        Verdict::Unsat => {
            if sat {
                Class::SoundnessViolation
            } else {
                Class::AgreeUnsat
            }
        }
        verdict => {
            let t = sol.terminated.as_ref().expect("terminated verdict");
            let residual = config.oracle.survey(&t.phi_hat, &t.psi_hat)?;
            oracle.residual_sat = Some(residual.is_sat());
            if let Verdict::Sat(c) | Verdict::VerificationFailed { certificate: c, .. } = verdict {
                let check = cross_check(c, &t.scope_table);
                observations.conditional_scope_failures = check.entailment_failures;
                observations.set_difference_disagreements = usize::from(check.set_difference_disagrees);
            }
            let unentailed = survey
                .as_ref()
                .filter(|s| s.is_sat())
                .and_then(|s| t.psi_hat.literals().find(|&l| !s.entails(l)));
            if let Some(l) = unentailed {
                detail = Some(format!("{l} not entailed"));
                Class::EntailmentViolation
            } else if !residual.is_sat() {
                Class::ClaimFalsifiedResidual
            } else {
                match verdict {
                    Verdict::Sat(_) => Class::AgreeSatVerified,
                    Verdict::ConstructionFailed(e) => {
                        detail = Some(e.to_string());
                        Class::ClaimFalsifiedConstruction
                    }
                    Verdict::VerificationFailed { violation, .. } => {
                        detail = Some(violation.to_string());
                        Class::ClaimFalsifiedConstruction
                    }
                    _ => unreachable!("handled above"),
                }
            }
        }
    };

    Ok(RunReport {
        index,
        digest: digest(&text),
        class,
        status: sol.status(),
        detail,
        num_vars: instance.num_vars(),
        num_clauses: instance.formula.len(),
        steps: sol.steps,
        step_budget: config
            .solve
            .scan
            .step_budget
            .unwrap_or_else(|| default_step_budget(instance.num_vars(), instance.formula.len())),
        generations: sol.generations,
        oracle,
        invariant_failures: invariant_failures(&sol),
        observations,
        trace: sol.trace,
        elapsed: started.elapsed(),
    })
}

/// Reports of a campaign, in instance order.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub reports: Vec<RunReport>,
    /// Index and class of the first bug, after which the campaign stopped.
    pub aborted: Option<(u64, Class)>,
}

const CHUNK: u64 = 64;

/// Runs instances `0..count` of the family. Stops after the first
/// implementation bug; reports after it are dropped so the result does not
/// depend on scheduling.
pub fn differential_run(cfg: &GenConfig, count: u64, config: &DiffConfig) -> Result<Campaign, CapExceeded> {
    let mut reports = Vec::with_capacity(count as usize);
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let chunk: Vec<RunReport> = (start..end)
            .into_par_iter()
            .map(|i| run_instance(&gen_instance_at(cfg, i), i, config))
            .collect::<Result<_, _>>()?;
        for r in chunk {
            let bug = r.class.is_bug().then_some((r.index, r.class));
            reports.push(r);
            if bug.is_some() {
                return Ok(Campaign { reports, aborted: bug });
            }
        }
        start = end;
    }
    Ok(Campaign {
        reports,
        aborted: None,
    })
}

/// Runs given instances, numbered from zero. Does not stop on bugs.
pub fn differential_instances(instances: &[Instance], config: &DiffConfig) -> Result<Vec<RunReport>, CapExceeded> {
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| run_instance(inst, i as u64, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_campaign() {
        let c = differential_run(&GenConfig::new(1, 4, 4), 0, &DiffConfig::default()).unwrap();
        assert!(c.reports.is_empty());
        assert!(c.aborted.is_none());
    }

    #[test]
    fn class_names_match_serde() {
        for c in Class::ALL {
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
    }
}
