//! Building a total assignment from successive disjoint scopes of the
//! terminated residual, and checking assignments against the raw instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clause::ClauseId;
use crate::formula::{Formula, Instance};
use crate::literal::{Assignment, Literal, Var};
use crate::minterm::Minterm;
use crate::scan::{scope, ScopeResult};

/// How the next literal is chosen among the remaining variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum PickPolicy {
    /// Lowest remaining variable, positive polarity.
    #[default]
    PositiveLowest,
    /// Lowest remaining variable, negative polarity.
    NegativeLowest,
    /// Uniform variable and polarity from a seeded ChaCha8 stream.
    Random(u64),
    /// The given literals in order, then `PositiveLowest`.
    Sequence(Vec<Literal>),
}

impl fmt::Display for PickPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PickPolicy::PositiveLowest => write!(f, "pos-lowest"),
            PickPolicy::NegativeLowest => write!(f, "neg-lowest"),
            PickPolicy::Random(seed) => write!(f, "random:{seed}"),
            PickPolicy::Sequence(picks) => {
                let picks: Vec<String> = picks.iter().map(ToString::to_string).collect();
                write!(f, "sequence:{}", picks.join(","))
            }
        }
    }
}

impl FromStr for PickPolicy {
    type Err = String;

    /// `pos-lowest`, `neg-lowest`, `random:SEED` or `sequence:L1,L2,...`.
    fn from_str(s: &str) -> Result<PickPolicy, String> {
        let bad = || format!("unknown pick policy {s:?}");
        match s {
            "pos-lowest" => Ok(PickPolicy::PositiveLowest),
            "neg-lowest" => Ok(PickPolicy::NegativeLowest),
            _ => {
                if let Some(seed) = s.strip_prefix("random:") {
                    return seed.parse().map(PickPolicy::Random).map_err(|_| bad());
                }
                let list = s.strip_prefix("sequence:").ok_or_else(bad)?;
                list.split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.trim().parse::<i64>().ok().and_then(Literal::from_dimacs).ok_or_else(bad))
                    .collect::<Result<Vec<_>, _>>()
                    .map(PickPolicy::Sequence)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub pick: Literal,
    pub scope: Minterm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentCertificate {
    pub pieces: Vec<Piece>,
    pub total: Assignment,
}

impl AssignmentCertificate {
    pub fn picks(&self) -> Vec<Literal> {
        self.pieces.iter().map(|p| p.pick).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("scope of {failing:?} contradicts on x{var} after picks {picks:?}")]
    ScopeConflict {
        picks: Vec<Literal>,
        failing: Literal,
        var: Var,
    },
    #[error("pick {pick:?} is not over a remaining variable")]
    InvalidPick { picks: Vec<Literal>, pick: Literal },
}

/// Repeatedly scopes a picked literal over what lies beyond the previous
/// scope until no variable remains. Variables of neither `psi_hat` nor any
/// piece are set false.
pub fn construct_assignment(
    phi_hat: &Formula,
    psi_hat: &Minterm,
    policy: &PickPolicy,
) -> Result<AssignmentCertificate, ConstructionError> {
    let mut rng = match policy {
        PickPolicy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut queue = match policy {
        PickPolicy::Sequence(picks) => picks.clone(),
        _ => Vec::new(),
    };
    queue.reverse();

    let mut phi = phi_hat.clone();
    let mut pieces: Vec<Piece> = Vec::new();
    let mut steps = 0u64;
    loop {
        let remaining = phi.vars();
        let Some(&lowest) = remaining.first() else {
            break;
        };
        let picks = || pieces.iter().map(|p| p.pick).collect::<Vec<_>>();
        let pick = if let Some(p) = queue.pop() {
            if !remaining.contains(&p.var()) {
                return Err(ConstructionError::InvalidPick { picks: picks(), pick: p });
            }
            p
        } else {
            match (policy, rng.as_mut()) {
                (PickPolicy::NegativeLowest, _) => Literal::neg(lowest),
                (PickPolicy::Random(_), Some(rng)) => {
                    let v = *remaining.iter().nth(rng.gen_range(0..remaining.len())).expect("in range");
                    Literal::new(v, rng.gen())
                }
                _ => Literal::pos(lowest),
            }
        };
        let ScopeResult { scope: s, beyond, .. } =
            scope(pick, &phi, &mut steps).map_err(|c| ConstructionError::ScopeConflict {
                picks: picks(),
                failing: pick,
                var: c.var,
            })?;
        pieces.push(Piece { pick, scope: s });
        phi = beyond;
    }

    let mut total = Assignment::all_false(phi_hat.num_vars());
    for lit in psi_hat
        .literals()
        .chain(pieces.iter().flat_map(|p| p.scope.literals()))
    {
        if lit.var() <= total.num_vars() {
            total.set(lit.var(), lit.is_positive());
        }
    }
    Ok(AssignmentCertificate { pieces, total })
}

/// Pieces are pairwise variable-disjoint and cover `vars` exactly.
pub fn is_partition(pieces: &[Piece], vars: &BTreeSet<Var>) -> bool {
    let mut seen = BTreeSet::new();
    for p in pieces {
        for v in p.scope.vars() {
            if !seen.insert(v) {
                return false;
            }
        }
    }
    &seen == vars
}

/// Pieces rebuilt from the full scopes by subtracting everything earlier.
pub fn set_difference_pieces(
    picks: &[Literal],
    table: &BTreeMap<Literal, ScopeResult>,
) -> Option<Vec<Minterm>> {
    let mut covered = Minterm::new();
    let mut out = Vec::new();
    for pick in picks {
        let full = &table.get(pick)?.scope;
        let piece = full.without_vars_of(&covered);
        covered.merge(&piece).ok()?;
        out.push(piece);
    }
    Some(out)
}

/// How the construction relates to the full scopes of the terminated pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossCheck {
    /// Pieces after the first whose pick's full scope does not contain them.
    pub entailment_failures: usize,
    /// The set-difference construction yields different pieces.
    pub set_difference_disagrees: bool,
}

pub fn cross_check(cert: &AssignmentCertificate, table: &BTreeMap<Literal, ScopeResult>) -> CrossCheck {
    let entailment_failures = cert
        .pieces
        .iter()
        .skip(1)
        .filter(|p| {
            table
                .get(&p.pick)
                .is_none_or(|full| !full.scope.is_superset_of(&p.scope))
        })
        .count();
    let expected: Vec<Minterm> = cert.pieces.iter().map(|p| p.scope.clone()).collect();
    let set_difference_disagrees = set_difference_pieces(&cert.picks(), table).as_ref() != Some(&expected);
    CrossCheck {
        entailment_failures,
        set_difference_disagrees,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("clause {id} has {true_count} true literals")]
    Clause { id: ClauseId, true_count: usize },
    #[error("conjunct {literal:?} is false")]
    Conjunct { literal: Literal },
    #[error("variable {var} is not assigned")]
    MissingVariable { var: Var },
}

/// Exactly one true literal per clause and every conjunct true.
pub fn verify_assignment(instance: &Instance, total: &Assignment) -> Result<(), Violation> {
    if total.num_vars() < instance.num_vars() {
        return Err(Violation::MissingVariable {
            var: total.num_vars() + 1,
        });
    }
    for &u in &instance.units {
        match total.satisfies(u) {
            None => return Err(Violation::MissingVariable { var: u.var() }),
            Some(false) => return Err(Violation::Conjunct { literal: u }),
            Some(true) => {}
        }
    }
    for (id, c) in instance.formula.clauses() {
        let true_count = c.true_count(|v| total.get(v).expect("header covers clause variables"));
        if true_count != 1 {
            return Err(Violation::Clause { id, true_count });
        }
    }
    Ok(())
}
