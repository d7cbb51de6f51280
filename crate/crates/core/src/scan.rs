//! The scope chain from a single literal, removal of incompatible literals
//! into the grand scope, and the scan fixpoint over every literal.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formula::{ConversionKind, Converted, Formula};
use crate::literal::{Literal, Var};
use crate::minterm::{Minterm, MintermError};
use crate::reduction::reduce;

/// Scope of a literal: everything its assertion forces, and the untouched rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeResult {
    pub scope: Minterm,
    pub beyond: Formula,
    /// Scope conjuncts whose reductions were applied, in processing order.
    pub reduced: Vec<Literal>,
}

impl ScopeResult {
    /// Variables of the scope that still occur beyond it. Empty on success.
    pub fn overlap(&self) -> BTreeSet<Var> {
        let beyond = self.beyond.vars();
        self.scope.vars().filter(|v| beyond.contains(v)).collect()
    }
}

/// Asserting the literal forces both polarities of `var`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScopeConflict {
    pub literal: Literal,
    pub var: Var,
}

/// Propagates `lit` through `formula` by repeated single-literal reductions
/// until every conjunct of the scope has been reduced.
pub fn scope(lit: Literal, formula: &Formula, steps: &mut u64) -> Result<ScopeResult, ScopeConflict> {
    let conflict = |e: MintermError| match e {
        MintermError::Contradiction(var) | MintermError::AlreadyContradicted(var) => {
            ScopeConflict { literal: lit, var }
        }
    };

    let mut scope = Minterm::new();
    scope.insert(lit).map_err(conflict)?;
    let mut beyond = formula.clone();
    let mut pending = VecDeque::from([lit]);
    let mut reduced = Vec::new();

    while let Some(e) = pending.pop_front() {
        let delta = reduce(&beyond, e, steps).map_err(|c| ScopeConflict {
            literal: lit,
            var: c.var,
        })?;
        for l in delta.collapse.literals() {
            if scope.insert(l).map_err(conflict)? {
                pending.push_back(l);
            }
        }
        beyond.apply(&delta);
        reduced.push(e);
    }

    Ok(ScopeResult {
        scope,
        beyond,
        reduced,
    })
}

/// Order in which the scan tests literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralOrder {
    /// Ascending variable, `x_i` before `~x_i`.
    #[default]
    PositiveFirst,
    /// Ascending variable, `~x_i` before `x_i`.
    NegativeFirst,
    /// A fresh ChaCha8 shuffle per pass, seeded once per scan.
    Random(u64),
}

impl fmt::Display for LiteralOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiteralOrder::PositiveFirst => write!(f, "pos-first"),
            LiteralOrder::NegativeFirst => write!(f, "neg-first"),
            LiteralOrder::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for LiteralOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<LiteralOrder, String> {
        match s {
            "pos-first" => Ok(LiteralOrder::PositiveFirst),
            "neg-first" => Ok(LiteralOrder::NegativeFirst),
            _ => s
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(LiteralOrder::Random)
                .ok_or_else(|| format!("unknown order {s:?}; expected pos-first, neg-first or random:SEED")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanConfig {
    pub order: LiteralOrder,
    /// Abort once the step counter exceeds this. `None` uses [`default_step_budget`].
    pub step_budget: Option<u64>,
}

/// `64 * n^3 * m` primitive steps.
pub fn default_step_budget(num_vars: u32, num_clauses: usize) -> u64 {
    let n = u64::from(num_vars);
    64u64
        .saturating_mul(n.saturating_pow(3))
        .saturating_mul(num_clauses as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemoveReason {
    /// The complement was already in the grand scope.
    Trivial,
    /// The literal's scope contradicted.
    Nontrivial,
}

/// One entry of the scan trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A special clause was rewritten before scanning.
    Converted {
        clause: u32,
        generation: u64,
        reason: ConversionKind,
        forced: Vec<Literal>,
    },
    /// Scope of `literal` forced both polarities of `var`.
    ScopeFailed {
        literal: Literal,
        generation: u64,
        reason: Var,
    },
    /// `literal` was found incompatible; its complement and `committed` joined
    /// the grand scope, producing generation `generation`.
    Removed {
        literal: Literal,
        generation: u64,
        reason: RemoveReason,
        committed: Vec<Literal>,
    },
    /// Removing `literal` made the grand scope contradict on `reason`.
    Unsat {
        literal: Option<Literal>,
        generation: u64,
        reason: Var,
    },
}

/// The formula being scanned together with its grand scope.
#[derive(Clone, Debug)]
pub struct ScanState {
    pub formula: Formula,
    pub psi: Minterm,
    pub generation: u64,
    pub steps: u64,
    pub trace: Vec<TraceEvent>,
    /// Clause count of the input, for the default step budget.
    pub input_clauses: usize,
}

impl ScanState {
    pub fn new(formula: Formula, psi: Minterm) -> ScanState {
        let input_clauses = formula.len();
        ScanState {
            formula,
            psi,
            generation: 0,
            steps: 0,
            trace: Vec::new(),
            input_clauses,
        }
    }

    /// State after conversion, with conversion steps recorded in the trace.
    pub fn from_converted(converted: Converted, input_clauses: usize) -> ScanState {
        let mut state = ScanState::new(converted.formula, converted.psi);
        state.input_clauses = input_clauses;
        state.trace = converted
            .steps
            .into_iter()
            .map(|s| TraceEvent::Converted {
                clause: s.clause,
                generation: 0,
                reason: s.kind,
                forced: s.forced,
            })
            .collect();
        state
    }

    /// Variables of the grand scope that still occur in the formula.
    pub fn overlap(&self) -> Vec<Var> {
        self.psi
            .vars()
            .filter(|&v| self.formula.mentions_var(v))
            .collect()
    }
}

/// Removal made the grand scope contradictory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unsat {
    pub literal: Option<Literal>,
    pub var: Var,
}

/// Commits `!lit` by reducing the formula with it and extending the grand scope.
pub fn remove(lit: Literal, reason: RemoveReason, state: &mut ScanState) -> Result<(), Unsat> {
    let necessary = !lit;
    let unsat = |state: &mut ScanState, var: Var| {
        state.trace.push(TraceEvent::Unsat {
            literal: Some(lit),
            generation: state.generation,
            reason: var,
        });
        Unsat {
            literal: Some(lit),
            var,
        }
    };

    let delta = match reduce(&state.formula, necessary, &mut state.steps) {
        Ok(d) => d,
        Err(c) => return Err(unsat(state, c.var)),
    };
    let mut committed = Vec::new();
    for l in std::iter::once(necessary).chain(delta.collapse.literals()) {
        match state.psi.insert(l) {
            Ok(true) => committed.push(l),
            Ok(false) => {}
            Err(MintermError::Contradiction(var) | MintermError::AlreadyContradicted(var)) => {
                return Err(unsat(state, var));
            }
        }
    }
    state.formula.apply(&delta);
    state.generation += 1;
    state.trace.push(TraceEvent::Removed {
        literal: lit,
        generation: state.generation,
        reason,
        committed,
    });
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Terminated {
    pub psi_hat: Minterm,
    pub phi_hat: Formula,
    /// Scopes from the final, removal-free pass, for both polarities of every
    /// variable of `phi_hat`.
    pub scope_table: BTreeMap<Literal, ScopeResult>,
}

#[derive(Clone, Debug)]
pub enum ScanOutcome {
    Terminated(Terminated),
    Unsat(Unsat),
    BudgetExceeded { budget: u64 },
}

#[derive(Clone, Debug)]
pub struct ScanRun {
    pub outcome: ScanOutcome,
    /// Grand scope and formula when the scan stopped.
    pub psi: Minterm,
    pub formula: Formula,
    pub steps: u64,
    pub generations: u64,
    pub trace: Vec<TraceEvent>,
}

impl ScanRun {
    pub fn terminated(&self) -> Option<&Terminated> {
        match &self.outcome {
            ScanOutcome::Terminated(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self.outcome, ScanOutcome::Unsat(_))
    }
}

/// Runs scan passes until one completes without removing a literal.
///
/// Each pass first removes trivially incompatible literals (complement in
/// the grand scope) until none remain, then computes the scope of every
/// literal in the configured order. The first contradicted scope triggers a
/// removal and a fresh pass.
pub fn scan(mut state: ScanState, config: &ScanConfig) -> ScanRun {
    let budget = config
        .step_budget
        .unwrap_or_else(|| default_step_budget(state.formula.num_vars(), state.input_clauses));
    let mut rng = match config.order {
        LiteralOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };

    let finish = |state: ScanState, outcome: ScanOutcome| ScanRun {
        outcome,
        psi: state.psi,
        formula: state.formula,
        steps: state.steps,
        generations: state.generation,
        trace: state.trace,
    };

    loop {
        while let Some(&var) = state.overlap().first() {
            let held = state.psi.literal_of(var).expect("overlap var is in psi");
            if let Err(u) = remove(!held, RemoveReason::Trivial, &mut state) {
                return finish(state, ScanOutcome::Unsat(u));
            }
            if state.steps > budget {
                return finish(state, ScanOutcome::BudgetExceeded { budget });
            }
        }

        let mut order: Vec<Literal> = state
            .formula
            .vars()
            .into_iter()
            .flat_map(|v| match config.order {
                LiteralOrder::NegativeFirst => [Literal::neg(v), Literal::pos(v)],
                _ => [Literal::pos(v), Literal::neg(v)],
            })
            .collect();
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }

        let mut table = BTreeMap::new();
        let mut failed = None;
        for lit in order {
            let result = scope(lit, &state.formula, &mut state.steps);
            if state.steps > budget {
                return finish(state, ScanOutcome::BudgetExceeded { budget });
            }
            match result {
                Ok(r) => {
                    table.insert(lit, r);
                }
                Err(c) => {
                    failed = Some(c);
                    break;
                }
            }
        }

        match failed {
            None => {
                let psi_hat = state.psi.clone();
                let phi_hat = state.formula.clone();
                return finish(
                    state,
                    ScanOutcome::Terminated(Terminated {
                        psi_hat,
                        phi_hat,
                        scope_table: table,
                    }),
                );
            }
            Some(c) => {
                state.trace.push(TraceEvent::ScopeFailed {
                    literal: c.literal,
                    generation: state.generation,
                    reason: c.var,
                });
                if let Err(u) = remove(c.literal, RemoveReason::Nontrivial, &mut state) {
                    return finish(state, ScanOutcome::Unsat(u));
                }
                if state.steps > budget {
                    return finish(state, ScanOutcome::BudgetExceeded { budget });
                }
            }
        }
    }
}

/// Replays the trace and checks that every removed literal's complement is
/// in the grand scope of every later generation, and that the grand scope
/// only grows. Returns the first offending removal.
pub fn check_monotonicity(trace: &[TraceEvent], initial_psi: &Minterm) -> Result<(), Literal> {
    let mut psi: BTreeSet<Literal> = initial_psi.literals().collect();
    let mut removed: Vec<Literal> = Vec::new();
    for event in trace {
        match event {
            TraceEvent::Converted { forced, .. } => psi.extend(forced.iter().copied()),
            TraceEvent::Removed {
                literal, committed, ..
            } => {
                let before = psi.len();
                psi.extend(committed.iter().copied());
                if psi.len() != before + committed.len() {
                    return Err(*literal);
                }
                removed.push(*literal);
                if let Some(&bad) = removed.iter().find(|l| !psi.contains(&!**l)) {
                    return Err(bad);
                }
            }
            _ => {}
        }
    }
    Ok(())
}
