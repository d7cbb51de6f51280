use std::collections::BTreeMap;

use serde::Serialize;

use x3sat::to_x3c;

use crate::differential::{differential_run, Class, DiffConfig, Observations, RunReport};
use crate::generate::{gen_instance_at, GenConfig};
use crate::store::CounterexampleStore;
use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Aborted {
    pub n: u32,
    pub m: usize,
    pub index: u64,
    pub class: Class,
}

/// Deterministic campaign summary; contains no timings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub families: usize,
    pub runs: u64,
    pub histogram: BTreeMap<&'static str, u64>,
    pub invariant_failures: u64,
    pub observations: Observations,
    pub max_steps: u64,
    pub budget_exceeded: u64,
    pub stored: u64,
    pub store_ids: Vec<String>,
    pub aborted: Option<Aborted>,
}

impl Summary {
    pub fn count(&self, class: Class) -> u64 {
        self.histogram.get(class.name()).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

pub struct CampaignResult {
    pub summary: Summary,
    /// Reports with the index of their family in the input list.
    pub reports: Vec<(usize, RunReport)>,
}

/// Runs `count` instances of every family in order, storing every
/// counterexample. Stops at the first implementation bug.
pub fn run_campaign(
    families: &[GenConfig],
    count: u64,
    config: &DiffConfig,
    mut store: Option<&mut CounterexampleStore>,
) -> Result<CampaignResult, HarnessError> {
    let mut summary = Summary {
        families: families.len(),
        runs: 0,
        histogram: Class::ALL.iter().map(|c| (c.name(), 0)).collect(),
        invariant_failures: 0,
        observations: Observations::default(),
        max_steps: 0,
        budget_exceeded: 0,
        stored: 0,
        store_ids: Vec::new(),
        aborted: None,
    };
    let mut reports = Vec::new();

    for (f, cfg) in families.iter().enumerate() {
        cfg.validate()?;
        let campaign = differential_run(cfg, count, config)?;
        for r in &campaign.reports {
            summary.runs += 1;
            *summary.histogram.get_mut(r.class.name()).expect("all classes") += 1;
            summary.invariant_failures += r.invariant_failures.len() as u64;
            summary.observations.add(&r.observations);
            summary.max_steps = summary.max_steps.max(r.steps);
            summary.budget_exceeded += u64::from(r.steps > r.step_budget);
            if !r.class.is_agreement() {
                if let Some(store) = store.as_deref_mut() {
                    let text = to_x3c(&gen_instance_at(cfg, r.index));
                    let id = store.record(r, &text, Some(cfg), config)?;
                    summary.store_ids.push(id);
                    summary.stored += 1;
                }
            }
        }
        reports.extend(campaign.reports.into_iter().map(|r| (f, r)));
        if let Some((index, class)) = campaign.aborted {
            summary.aborted = Some(Aborted {
                n: cfg.n,
                m: cfg.m,
                index,
                class,
            });
            break;
        }
    }
    Ok(CampaignResult { summary, reports })
}
