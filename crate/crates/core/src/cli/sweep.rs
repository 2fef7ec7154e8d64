//! Parameter sweeps over node counts, protocols and seeds.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::IdSpace;
use crate::rvn::RvnOptions;
use crate::sim::synthetic::random_ring;
use crate::sim::{run_experiment, ExperimentConfig, LatencyModel, MetricsRow, Protocol, WorkloadKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub node_counts: Vec<usize>,
    pub protocols: Vec<Protocol>,
    pub m: u32,
    pub workload: WorkloadKind,
    pub zipf_s: f64,
    pub window: Option<u64>,
    pub lookups: usize,
    pub latency: LatencyModel,
    pub churn_rate: f64,
    pub seeds: Vec<u64>,
    pub rvn_modular_guard: bool,
    /// Worker threads; cells still come out in config order.
    pub parallelism: usize,
    pub csv: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            node_counts: vec![256, 512, 1024, 2048, 4096, 8192, 16384, 32768],
            protocols: Protocol::ALL.to_vec(),
            m: 16,
            workload: WorkloadKind::Sequential,
            zipf_s: 1.2,
            window: None,
            lookups: 10_000,
            latency: LatencyModel::default(),
            churn_rate: 0.0,
            seeds: vec![1],
            rvn_modular_guard: false,
            parallelism: 1,
            csv: None,
            table: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let space = IdSpace::new(self.m)?;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.node_counts.is_empty() || self.protocols.is_empty() || self.seeds.is_empty() {
            return bad("node_counts, protocols and seeds must be non-empty".into());
        }
        if let Some(&n) = self.node_counts.iter().find(|&&n| n == 0 || n as u64 > space.size()) {
            return bad(format!("node count {n} outside 1..={}", space.size()));
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1".into());
        }
        if self.lookups == 0 {
            return bad("lookups must be at least 1".into());
        }
        self.latency.validate()?;
        self.cells().first().map(|c| self.experiment(c).workload.validate()).transpose()?;
        Ok(())
    }

    /// Cells in output order: seed, then node count, then protocol.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &seed in &self.seeds {
            for &nodes in &self.node_counts {
                for &protocol in &self.protocols {
                    out.push(Cell { protocol, nodes, seed });
                }
            }
        }
        out
    }

    fn experiment(&self, cell: &Cell) -> ExperimentConfig {
        let mut config = ExperimentConfig::seeded(cell.protocol, self.workload, self.lookups, cell.seed);
        config.workload.zipf_s = self.zipf_s;
        config.workload.locality_window = self.window;
        config.latency = self.latency;
        config.churn.rate = self.churn_rate;
        config.rvn = RvnOptions { modular_guard: self.rvn_modular_guard };
        config
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub protocol: Protocol,
    pub nodes: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub cell: Cell,
    pub result: Result<MetricsRow>,
}

impl CellOutcome {
    /// The metrics row, or a row with NaN averages for a failed cell.
    pub fn row(&self, config: &SweepConfig) -> MetricsRow {
        match &self.result {
            Ok(row) => row.clone(),
            Err(_) => MetricsRow {
                protocol: self.cell.protocol,
                nodes: self.cell.nodes,
                m: config.m,
                workload: config.workload,
                seed: self.cell.seed,
                lookups: config.lookups,
                avg_hops: f64::NAN,
                avg_messages: f64::NAN,
                avg_time_ms: f64::NAN,
                memory_bytes: 0,
                maintenance_messages: 0,
            },
        }
    }
}

pub fn run_cell(config: &SweepConfig, cell: Cell) -> Result<MetricsRow> {
    let space = IdSpace::new(config.m)?;
    let ring = random_ring(space, cell.nodes, cell.seed)?;
    Ok(run_experiment(&config.experiment(&cell), ring)?.row)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<CellOutcome>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let cells = config.cells();
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| CellOutcome { cell, result: run_cell(config, cell) })
            .collect()
    }))
}
