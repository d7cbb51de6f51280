//! End-to-end pipeline: conversion, scan, construction, verification.

use serde::{Deserialize, Serialize};

use crate::assignment::{construct_assignment, verify_assignment, AssignmentCertificate, ConstructionError, PickPolicy, Violation};
use crate::formula::{convert_special, Formula, Instance};
use crate::literal::Assignment;
use crate::minterm::Minterm;
use crate::scan::{scan, ScanConfig, ScanOutcome, ScanState, Terminated, TraceEvent};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    pub scan: ScanConfig,
    pub pick: PickPolicy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(AssignmentCertificate),
    Unsat,
    BudgetExceeded { budget: u64 },
    ConstructionFailed(ConstructionError),
    VerificationFailed {
        certificate: AssignmentCertificate,
        violation: Violation,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Sat,
    Unsat,
    /// Budget exhausted, or the scan terminated without a valid assignment.
    Unknown,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub verdict: Verdict,
    /// Present when the scan terminated.
    pub terminated: Option<Terminated>,
    /// Conjuncts of the input.
    pub initial_psi: Minterm,
    /// Grand scope and formula when the pipeline stopped.
    pub psi: Minterm,
    pub residual: Formula,
    pub steps: u64,
    pub generations: u64,
    pub trace: Vec<TraceEvent>,
}

impl Solution {
    pub fn status(&self) -> Status {
        match self.verdict {
            Verdict::Sat(_) => Status::Sat,
            Verdict::Unsat => Status::Unsat,
            _ => Status::Unknown,
        }
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match &self.verdict {
            Verdict::Sat(cert) => Some(&cert.total),
            _ => None,
        }
    }
}

pub fn solve(instance: &Instance, config: &SolveConfig) -> Solution {
    let early_unsat = |psi: Minterm, trace: Vec<TraceEvent>, initial_psi: Minterm| Solution {
        verdict: Verdict::Unsat,
        terminated: None,
        initial_psi,
        psi,
        residual: instance.formula.clone(),
        steps: 0,
        generations: 0,
        trace,
    };

    let initial_psi = match instance.initial_minterm() {
        Ok(m) => m,
        Err(var) => {
            let mut partial = Minterm::new();
            for &u in &instance.units {
                if partial.insert(u).is_err() {
                    break;
                }
            }
            let trace = vec![TraceEvent::Unsat {
                literal: None,
                generation: 0,
                reason: var,
            }];
            return early_unsat(partial.clone(), trace, partial);
        }
    };

    let converted = match convert_special(&instance.formula, &initial_psi) {
        Ok(c) => c,
        Err(e) => {
            let mut psi = initial_psi.clone();
            let mut trace = Vec::new();
            for s in e.steps {
                for &l in &s.forced {
                    let _ = psi.insert(l);
                }
                trace.push(TraceEvent::Converted {
                    clause: s.clause,
                    generation: 0,
                    reason: s.kind,
                    forced: s.forced,
                });
            }
            trace.push(TraceEvent::Unsat {
                literal: None,
                generation: 0,
                reason: e.var,
            });
            return early_unsat(psi, trace, initial_psi);
        }
    };

    let state = ScanState::from_converted(converted, instance.formula.len());
    let run = scan(state, &config.scan);
    let (verdict, terminated) = match run.outcome {
        ScanOutcome::Unsat(_) => (Verdict::Unsat, None),
        ScanOutcome::BudgetExceeded { budget } => (Verdict::BudgetExceeded { budget }, None),
        ScanOutcome::Terminated(t) => {
            let verdict = match construct_assignment(&t.phi_hat, &t.psi_hat, &config.pick) {
                Err(e) => Verdict::ConstructionFailed(e),
                Ok(certificate) => match verify_assignment(instance, &certificate.total) {
                    Ok(()) => Verdict::Sat(certificate),
                    Err(violation) => Verdict::VerificationFailed {
                        certificate,
                        violation,
                    },
                },
            };
            (verdict, Some(t))
        }
    };
    Solution {
        verdict,
        terminated,
        initial_psi,
        psi: run.psi,
        residual: run.formula,
        steps: run.steps,
        generations: run.generations,
        trace: run.trace,
    }
}

#[derive(Serialize)]
struct ResultJson {
    status: Status,
    assignment: Option<Vec<i64>>,
    psi_hat: Vec<i64>,
    residual_clauses: Vec<Vec<i64>>,
    steps: u64,
    generations: u64,
}

/// One-line JSON summary with a fixed key order.
pub fn emit_result(solution: &Solution) -> String {
    let json = ResultJson {
        status: solution.status(),
        assignment: solution.assignment().map(Assignment::to_dimacs),
        psi_hat: solution.psi.to_dimacs(),
        residual_clauses: solution.residual.to_dimacs(),
        steps: solution.steps,
        generations: solution.generations,
    };
    serde_json::to_string(&json).expect("plain data serializes")
}
