use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::{Id, IdSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkloadKind {
    Uniform,
    Zipf,
    Sequential,
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkloadKind::Uniform => "uniform",
            WorkloadKind::Zipf => "zipf",
            WorkloadKind::Sequential => "sequential",
        })
    }
}

impl FromStr for WorkloadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WorkloadKind::Uniform),
            "zipf" => Ok(WorkloadKind::Zipf),
            "sequential" => Ok(WorkloadKind::Sequential),
            other => Err(Error::Config(format!("unknown workload `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    #[serde(default = "default_zipf_s")]
    pub zipf_s: f64,
    /// Arc width for sequential workloads; `None` means four average node
    /// spacings, resolved once the ring size is known.
    #[serde(default)]
    pub locality_window: Option<u64>,
    pub lookups: usize,
    pub seed: u64,
}

fn default_zipf_s() -> f64 {
    1.2
}

impl WorkloadSpec {
    pub fn new(kind: WorkloadKind, lookups: usize, seed: u64) -> Self {
        Self { kind, zipf_s: default_zipf_s(), locality_window: None, lookups, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lookups == 0 {
            return Err(Error::Config("a workload needs at least one lookup".into()));
        }
        if self.kind == WorkloadKind::Zipf && (self.zipf_s.is_nan() || self.zipf_s <= 0.0) {
            return Err(Error::Config(format!("zipf exponent must be positive, got {}", self.zipf_s)));
        }
        if self.locality_window == Some(0) {
            return Err(Error::Config("locality window must be positive".into()));
        }
        Ok(())
    }
}

/// Four average node spacings: `4 * 2^m / n`, at least one.
pub fn default_window(space: IdSpace, nodes: usize) -> u64 {
    (space.size() / nodes.max(1) as u64).saturating_mul(4).max(1)
}

/// How the key of one lookup is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyDraw {
    Fixed(Id),
    /// Clockwise offset from whichever node answered the previous lookup.
    AfterPreviousOwner(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LookupRequest {
    /// Reduced modulo the live node count when the lookup runs.
    pub origin_selector: u64,
    pub key: KeyDraw,
}

impl LookupRequest {
    pub fn resolve_key(&self, space: IdSpace, previous_owner: Option<Id>) -> Id {
        match (self.key, previous_owner) {
            (KeyDraw::Fixed(k), _) => k,
            (KeyDraw::AfterPreviousOwner(d), Some(owner)) => space.add(owner, d),
            (KeyDraw::AfterPreviousOwner(d), None) => space.wrap(d),
        }
    }
}

/// Deterministic request stream for `spec`.
pub fn gen_workload(spec: &WorkloadSpec, space: IdSpace) -> Result<Vec<LookupRequest>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = space.size();
    let mut requests = Vec::with_capacity(spec.lookups);
    match spec.kind {
        WorkloadKind::Uniform => {
            for _ in 0..spec.lookups {
                let origin_selector = rng.random();
                let key = KeyDraw::Fixed(Id(rng.random_range(0..n)));
                requests.push(LookupRequest { origin_selector, key });
            }
        }
        WorkloadKind::Zipf => {
            // rank r maps to key (a * (r - 1) + b) mod 2^m; odd a makes this a permutation.
            let a = rng.random::<u64>() | 1;
            let b = rng.random::<u64>();
            let zipf = Zipf::new(n as f64, spec.zipf_s)
                .map_err(|e| Error::Config(format!("zipf: {e}")))?;
            for _ in 0..spec.lookups {
                let origin_selector = rng.random();
                let rank = zipf.sample(&mut rng) as u64;
                let key = space.wrap(a.wrapping_mul(rank - 1).wrapping_add(b));
                requests.push(LookupRequest { origin_selector, key: KeyDraw::Fixed(key) });
            }
        }
        WorkloadKind::Sequential => {
            let window = spec.locality_window.ok_or_else(|| {
                Error::Config("sequential workload needs a resolved locality window".into())
            })?;
            for i in 0..spec.lookups {
                let origin_selector = rng.random();
                let key = if i == 0 {
                    KeyDraw::Fixed(Id(rng.random_range(0..n)))
                } else {
                    KeyDraw::AfterPreviousOwner(rng.random_range(0..=window.min(n - 1)))
                };
                requests.push(LookupRequest { origin_selector, key });
            }
        }
    }
    Ok(requests)
}

/// Key that rank `rank` (1-based) maps to for a given seed; exposed so
/// tests can check frequencies against the analytic law.
pub fn zipf_key_for_rank(seed: u64, space: IdSpace, rank: u64) -> Id {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.random::<u64>() | 1;
    let b = rng.random::<u64>();
    space.wrap(a.wrapping_mul(rank - 1).wrapping_add(b))
}
