//! Seeded instance generation, differential runs of the scan against the
//! enumeration oracle, outcome classification, and a replayable
//! counterexample store.

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod campaign;
pub mod differential;
pub mod generate;
pub mod store;

pub use campaign::{run_campaign, CampaignResult, Summary};
pub use differential::{differential_instances, differential_run, run_instance, Class, DiffConfig, RunReport};
pub use generate::{gen_instance, gen_instance_at, GenConfig};
pub use store::{replay, CounterexampleStore, StoreEntry};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Cap(#[from] x3sat::oracle::CapExceeded),
    #[error(transparent)]
    Gen(#[from] generate::GenError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("entry {id}: {source}")]
    Instance {
        id: String,
        source: x3sat::x3c::ParseError,
    },
    #[error("no entry {0}")]
    UnknownEntry(String),
    #[error("bad settings: {0}")]
    Settings(String),
    #[error("{} is an agreement, not a counterexample", .0.name())]
    NotCounterexample(Class),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: io::Error) -> HarnessError {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
