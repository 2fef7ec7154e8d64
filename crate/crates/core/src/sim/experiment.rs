use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fz::{fz_lookup, partition, FzOverlay};
use crate::id::Id;
use crate::lookup::{find_successor, LookupResult};
use crate::ring::Ring;
use crate::rvn::{rvn_commit, rvn_lookup, RvnOptions};
use crate::sim::latency::{LatencyModel, LatencySampler};
use crate::sim::memory::memory_footprint;
use crate::sim::synthetic::synthetic_resources;
use crate::sim::workload::{default_window, gen_workload, WorkloadKind, WorkloadSpec};
use crate::sim::Protocol;

/// Poisson churn: `rate` expected join/leave events before each lookup.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChurnSpec {
    pub rate: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub workload: WorkloadSpec,
    pub latency: LatencyModel,
    pub latency_seed: u64,
    pub churn: ChurnSpec,
    pub rvn: RvnOptions,
    /// Seed for resources of nodes that join during churn.
    pub resource_seed: u64,
    pub record_trace: bool,
}

impl ExperimentConfig {
    /// All streams derived from one seed.
    pub fn seeded(protocol: Protocol, kind: WorkloadKind, lookups: usize, seed: u64) -> Self {
        Self {
            protocol,
            workload: WorkloadSpec::new(kind, lookups, seed),
            latency: LatencyModel::default(),
            latency_seed: seed ^ 0x6c61_7465_6e63_7900,
            churn: ChurnSpec { rate: 0.0, seed: seed ^ 0x6368_7572_6e00 },
            rvn: RvnOptions::default(),
            resource_seed: seed,
            record_trace: false,
        }
    }
}

/// Aggregates of one experiment. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub protocol: Protocol,
    pub nodes: usize,
    pub m: u32,
    pub workload: WorkloadKind,
    pub seed: u64,
    pub lookups: usize,
    pub avg_hops: f64,
    pub avg_messages: f64,
    pub avg_time_ms: f64,
    pub memory_bytes: u64,
    pub maintenance_messages: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub protocol: Protocol,
    pub origin: Id,
    pub key: Id,
    pub owner: Id,
    pub hops: u32,
    pub messages: u32,
    pub time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub row: MetricsRow,
    pub trace: Vec<TraceRecord>,
    /// Churn events applied, joins then leaves.
    pub churn_events: (usize, usize),
}

struct Engine<'a> {
    config: &'a ExperimentConfig,
    ring: Ring,
    overlay: Option<FzOverlay>,
    replication_messages: u64,
    churn_rng: ChaCha8Rng,
    joins: usize,
    leaves: usize,
}

impl Engine<'_> {
    fn rebuild_overlay(&mut self) -> Result<()> {
        if self.config.protocol == Protocol::Fz {
            self.overlay = Some(partition(&self.ring)?);
            // The rebuilt table is pushed to every other node.
            self.replication_messages += self.ring.len() as u64 - 1;
        }
        Ok(())
    }

    fn churn_event(&mut self) -> Result<()> {
        let space = self.ring.space();
        if self.churn_rng.random_bool(0.5) {
            if self.ring.len() as u64 == space.size() {
                return Ok(());
            }
            let id = loop {
                let candidate = Id(self.churn_rng.random_range(0..space.size()));
                if !self.ring.contains(candidate) {
                    break candidate;
                }
            };
            self.ring.join(id)?;
            self.ring.set_resources(id, synthetic_resources(self.config.resource_seed, id))?;
            self.joins += 1;
        } else {
            let ids: Vec<Id> = self.ring.ids().collect();
            let victim = ids[self.churn_rng.random_range(0..ids.len())];
            self.ring.leave(victim)?;
            self.leaves += 1;
        }
        self.rebuild_overlay()
    }

    fn lookup(&self, origin: Id, key: Id) -> Result<LookupResult> {
        match self.config.protocol {
            Protocol::Chord => find_successor(&self.ring, origin, key),
            Protocol::Rvn => rvn_lookup(&self.ring, origin, key, self.config.rvn),
            Protocol::Fz => fz_lookup(self.overlay.as_ref().expect("overlay built"), origin, key),
        }
    }
}

/// Runs the configured workload against `ring` and aggregates metrics.
///
/// FZ builds its overlay from the ring's resources, so every node needs a
/// resource set for that protocol.
pub fn run_experiment(config: &ExperimentConfig, ring: Ring) -> Result<RunOutput> {
    config.latency.validate()?;
    if !(config.churn.rate >= 0.0 && config.churn.rate.is_finite()) {
        return Err(Error::Config(format!("churn rate must be >= 0, got {}", config.churn.rate)));
    }
    let space = ring.space();
    let initial_nodes = ring.len();
    let mut workload = config.workload.clone();
    if workload.kind == WorkloadKind::Sequential && workload.locality_window.is_none() {
        workload.locality_window = Some(default_window(space, initial_nodes));
    }
    let requests = gen_workload(&workload, space)?;
    let poisson = if config.churn.rate > 0.0 {
        Some(Poisson::new(config.churn.rate).map_err(|e| Error::Config(format!("churn: {e}")))?)
    } else {
        None
    };

    let mut engine = Engine {
        config,
        ring,
        overlay: None,
        replication_messages: 0,
        churn_rng: ChaCha8Rng::seed_from_u64(config.churn.seed),
        joins: 0,
        leaves: 0,
    };
    if config.protocol == Protocol::Fz {
        engine.overlay = Some(partition(&engine.ring)?);
    }
    let mut latency = LatencySampler::new(config.latency, config.latency_seed);
    let mut trace = Vec::new();
    let (mut hops, mut messages, mut time) = (0u64, 0u64, 0.0f64);
    let mut previous_owner = None;

    for request in &requests {
        if let Some(poisson) = &poisson {
            let events = poisson.sample(&mut engine.churn_rng) as u64;
            for _ in 0..events {
                engine.churn_event()?;
            }
        }
        let ids: Vec<Id> = engine.ring.ids().collect();
        let origin = ids[(request.origin_selector % ids.len() as u64) as usize];
        let key = request.resolve_key(space, previous_owner);
        engine.ring.insert_key(key)?;

        let mut result = engine.lookup(origin, key)?;
        let expected = engine.ring.successor(key);
        if result.owner != expected {
            return Err(Error::Inconsistent(format!(
                "{} resolved key {key} to {} instead of {expected}",
                config.protocol, result.owner
            )));
        }
        result.elapsed_ms = latency.elapsed(&result.plan);
        if config.protocol == Protocol::Rvn {
            rvn_commit(&mut engine.ring, result.owner)?;
        }

        hops += u64::from(result.hops);
        messages += u64::from(result.messages);
        time += result.elapsed_ms;
        previous_owner = Some(result.owner);
        if config.record_trace {
            trace.push(TraceRecord {
                protocol: config.protocol,
                origin,
                key,
                owner: result.owner,
                hops: result.hops,
                messages: result.messages,
                time_ms: result.elapsed_ms,
            });
        }
    }

    let n = requests.len() as f64;
    let row = MetricsRow {
        protocol: config.protocol,
        nodes: initial_nodes,
        m: space.bits(),
        workload: workload.kind,
        seed: workload.seed,
        lookups: requests.len(),
        avg_hops: hops as f64 / n,
        avg_messages: messages as f64 / n,
        avg_time_ms: time / n,
        memory_bytes: memory_footprint(config.protocol, &engine.ring, engine.overlay.as_ref())?,
        maintenance_messages: engine.ring.maintenance_messages() + engine.replication_messages,
    };
    Ok(RunOutput { row, trace, churn_events: (engine.joins, engine.leaves) })
}
