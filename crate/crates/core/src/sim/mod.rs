//! Deterministic experiment engine.
//!
//! Every random choice flows from explicit seeds through ChaCha streams and
//! all collections iterate in key order, so a configuration always produces
//! the same metrics.

pub mod experiment;
pub mod latency;
pub mod memory;
pub mod synthetic;
pub mod workload;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use experiment::{run_experiment, ChurnSpec, ExperimentConfig, MetricsRow, RunOutput, TraceRecord};
pub use latency::{LatencyModel, LatencySampler};
pub use memory::memory_footprint;
pub use workload::{gen_workload, WorkloadKind, WorkloadSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Chord,
    Rvn,
    Fz,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Chord, Protocol::Rvn, Protocol::Fz];

    /// Row label in the pivot table.
    pub fn display_name(&self) -> &'static str {
        match self {
            Protocol::Chord => "Chord",
            Protocol::Rvn => "RVN Chord",
            Protocol::Fz => "FZ Chord",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Chord => "chord",
            Protocol::Rvn => "rvn",
            Protocol::Fz => "fz",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "chord" => Ok(Protocol::Chord),
            "rvn" => Ok(Protocol::Rvn),
            "fz" => Ok(Protocol::Fz),
            other => Err(Error::Config(format!("unknown protocol `{other}` (chord, rvn, fz)"))),
        }
    }
}
