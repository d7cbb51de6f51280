//! Append-only JSON-lines store of counterexamples, and replay.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use x3sat::oracle::Oracle;
use x3sat::scan::{ScanConfig, TraceEvent};
use x3sat::{parse_x3c, Instance, SolveConfig};

use crate::differential::{run_instance, Class, DiffConfig, RunReport};
use crate::generate::GenConfig;
use crate::HarnessError;

/// Environment variable naming the default store path.
pub const STORE_ENV: &str = "X3SAT_STORE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Bug,
    Falsification,
}

/// Solver and oracle settings, as text, so a run can be repeated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub order: String,
    pub step_budget: Option<u64>,
    pub pick: String,
    pub oracle_cap: u32,
}

impl Settings {
    pub fn of(config: &DiffConfig) -> Settings {
        Settings {
            order: config.solve.scan.order.to_string(),
            step_budget: config.solve.scan.step_budget,
            pick: config.solve.pick.to_string(),
            oracle_cap: config.oracle.cap,
        }
    }

    pub fn to_config(&self) -> Result<DiffConfig, HarnessError> {
        Ok(DiffConfig {
            solve: SolveConfig {
                scan: ScanConfig {
                    order: self.order.parse().map_err(HarnessError::Settings)?,
                    step_budget: self.step_budget,
                },
                pick: self.pick.parse().map_err(HarnessError::Settings)?,
            },
            oracle: Oracle::new(self.oracle_cap),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreEntry {
    pub id: String,
    pub severity: Severity,
    pub class: Class,
    pub detail: Option<String>,
    /// Generator family and index, absent for injected instances.
    pub config: Option<GenConfig>,
    pub index: u64,
    pub settings: Settings,
    pub digest: String,
    /// Full x3c text of the instance.
    pub instance: String,
    pub steps: u64,
    pub generations: u64,
    pub trace: Vec<TraceEvent>,
}

impl StoreEntry {
    pub fn parse_instance(&self) -> Result<Instance, HarnessError> {
        parse_x3c(&self.instance)
            .map(|d| d.to_instance())
            .map_err(|e| HarnessError::Instance {
                id: self.id.clone(),
                source: e,
            })
    }
}

pub struct CounterexampleStore {
    path: PathBuf,
    entries: u64,
}

impl CounterexampleStore {
    /// Opens or creates the store; existing entries are kept.
    pub fn open(path: impl AsRef<Path>) -> Result<CounterexampleStore, HarnessError> {
        let path = path.as_ref().to_path_buf();
        let entries = match fs::read_to_string(&path) {
            Ok(text) => text.lines().filter(|l| !l.trim().is_empty()).count() as u64,
            Err(e) if e.kind() == io::ErrorKind::NotFound => 0,
            Err(e) => return Err(HarnessError::io(&path, e)),
        };
        Ok(CounterexampleStore { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> u64 {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// Appends a record of `report` and returns its id. Agreement classes
    /// are not counterexamples and are rejected.
    pub fn record(
        &mut self,
        report: &RunReport,
        instance_text: &str,
        gen: Option<&GenConfig>,
        config: &DiffConfig,
    ) -> Result<String, HarnessError> {
        if report.class.is_agreement() {
            return Err(HarnessError::NotCounterexample(report.class));
        }
        let id = format!("cx-{:06}", self.entries + 1);
        let entry = StoreEntry {
            id: id.clone(),
            severity: if report.class.is_bug() {
                Severity::Bug
            } else {
                Severity::Falsification
            },
            class: report.class,
            detail: report.detail.clone(),
            config: gen.cloned(),
            index: report.index,
            settings: Settings::of(config),
            digest: report.digest.clone(),
            instance: instance_text.to_string(),
            steps: report.steps,
            generations: report.generations,
            trace: report.trace.clone(),
        };
        let mut line = serde_json::to_string(&entry).expect("entry serializes");
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| HarnessError::io(&self.path, e))?;
        file.write_all(line.as_bytes())
            .map_err(|e| HarnessError::io(&self.path, e))?;
        self.entries += 1;
        Ok(id)
    }

    pub fn entries(&self) -> Result<Vec<StoreEntry>, HarnessError> {
        if self.entries == 0 && !self.path.exists() {
            return Ok(Vec::new());
        }
        read_entries(&self.path)
    }

    pub fn get(&self, id: &str) -> Result<StoreEntry, HarnessError> {
        self.entries()?
            .into_iter()
            .find(|e| e.id == id)
            .ok_or_else(|| HarnessError::UnknownEntry(id.to_string()))
    }
}

pub fn read_entries(path: &Path) -> Result<Vec<StoreEntry>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| HarnessError::Json {
                path: path.to_path_buf(),
                line: i + 1,
                source: e,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub recorded: Class,
    pub report: RunReport,
}

impl Replay {
    pub fn reproduced(&self) -> bool {
        self.recorded == self.report.class
    }
}

/// Re-runs a stored instance with its recorded settings.
pub fn replay(entry: &StoreEntry) -> Result<Replay, HarnessError> {
    let instance = entry.parse_instance()?;
    let config = entry.settings.to_config()?;
    let report = run_instance(&instance, entry.index, &config)?;
    Ok(Replay {
        recorded: entry.class,
        report,
    })
}
