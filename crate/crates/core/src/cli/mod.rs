//! The `chordsim` command line.

pub mod plot;
pub mod report;
pub mod resources;
pub mod sweep;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::id::IdSpace;
use crate::ring::Ring;
use crate::rvn::RvnOptions;
use crate::sim::synthetic::random_ring;
use crate::sim::{run_experiment, ExperimentConfig, LatencyModel, Protocol, WorkloadKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chordsim", version, about = "Chord, RVN Chord and FZ Chord lookup simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and append its metrics row to a CSV file.
    Simulate(SimulateArgs),
    /// Run a JSON-configured grid of experiments.
    Sweep(SweepArgs),
    /// Render one metric of a results CSV as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub protocol: Protocol,
    /// Ring size; taken from the resource file when omitted.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub m: u32,
    #[arg(long, default_value_t = WorkloadKind::Uniform)]
    pub workload: WorkloadKind,
    #[arg(long, default_value_t = 1.2)]
    pub zipf_s: f64,
    /// Sequential locality window; defaults to 4*2^m/N.
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub lookups: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Expected churn events before each lookup.
    #[arg(long, default_value_t = 0.0)]
    pub churn_rate: f64,
    /// `fixed:<ms>` or `uniform:<lo>,<hi>`.
    #[arg(long, default_value_t = LatencyModel::default())]
    pub latency: LatencyModel,
    /// Lines of `<node-id>,<kind>:<attribute>[;...]`; node ids define the ring.
    #[arg(long)]
    pub resources: Option<PathBuf>,
    /// Give nodes seeded synthetic resources (allows fz without --resources).
    #[arg(long, conflicts_with = "resources")]
    pub synthetic_resources: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-lookup CSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub rvn_modular_guard: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration.
    pub config: PathBuf,
    /// Results CSV; overrides `csv` in the config (default sweep.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pivot table file; overrides `table` in the config.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Results CSV.
    pub csv: PathBuf,
    /// One of avg_time_ms, avg_hops, avg_messages, memory_bytes, maintenance_messages.
    #[arg(long)]
    pub metric: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::InvalidBits(_)
            | Error::IdOutOfRange { .. }
            | Error::DuplicateId(_)
            | Error::EmptyRing
            | Error::AllResourceless => EXIT_USAGE,
            _ => EXIT_PARTIAL,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Plot(a) => plot(&a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn build_ring(args: &SimulateArgs, space: IdSpace) -> Result<Ring, Failure> {
    if let Some(path) = &args.resources {
        let inventory = resources::parse_resources(path)?;
        if inventory.is_empty() {
            return Err(usage(format!("{}: no nodes listed", path.display())));
        }
        if let Some(n) = args.nodes.filter(|&n| n != inventory.len()) {
            return Err(usage(format!("--nodes {n} disagrees with {} nodes in --resources", inventory.len())));
        }
        let mut ring = Ring::build(space, inventory.keys().copied(), [])?;
        for (id, set) in inventory {
            ring.set_resources(id, set)?;
        }
        return Ok(ring);
    }
    let n = args.nodes.ok_or_else(|| usage("--nodes is required without --resources"))?;
    if n == 0 || n as u64 > space.size() {
        return Err(usage(format!("--nodes {n} must be in 1..=2^{} = {}", space.bits(), space.size())));
    }
    if args.protocol == Protocol::Fz && !args.synthetic_resources {
        return Err(usage("--protocol fz needs --resources <path> (or --synthetic-resources)"));
    }
    Ok(random_ring(space, n, args.seed)?)
}

pub fn simulate(args: &SimulateArgs) -> Result<i32, Failure> {
    let space = IdSpace::new(args.m)?;
    let ring = build_ring(args, space)?;
    let mut config = ExperimentConfig::seeded(args.protocol, args.workload, args.lookups, args.seed);
    config.workload.zipf_s = args.zipf_s;
    config.workload.locality_window = args.window;
    config.workload.validate()?;
    config.latency = args.latency;
    config.churn.rate = args.churn_rate;
    config.rvn = RvnOptions { modular_guard: args.rvn_modular_guard };
    config.record_trace = args.trace.is_some();

    let out = run_experiment(&config, ring)?;
    let r = &out.row;
    println!(
        "{} nodes={} m={} workload={} seed={} lookups={} avg_hops={:.3} avg_messages={:.3} avg_time_ms={:.3} memory_bytes={} maintenance_messages={} joins={} leaves={}",
        r.protocol, r.nodes, r.m, r.workload, r.seed, r.lookups, r.avg_hops, r.avg_messages, r.avg_time_ms,
        r.memory_bytes, r.maintenance_messages, out.churn_events.0, out.churn_events.1
    );
    if let Some(path) = &args.out {
        report::append_csv(path, r)?;
    }
    if let Some(path) = &args.trace {
        report::write_trace(path, &out.trace)?;
    }
    Ok(EXIT_OK)
}

pub fn sweep(args: &SweepArgs) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| usage(format!("{}: {e}", args.config.display())))?;
    let mut config = sweep::SweepConfig::from_json(&text)?;
    if let Some(p) = args.parallelism {
        config.parallelism = p;
    }
    let outcomes = sweep::run_sweep(&config)?;
    let mut failed = 0;
    for o in &outcomes {
        if let Err(e) = &o.result {
            failed += 1;
            eprintln!("cell {} nodes={} seed={} failed: {e}", o.cell.protocol, o.cell.nodes, o.cell.seed);
        }
    }
    let rows: Vec<_> = outcomes.iter().map(|o| o.row(&config)).collect();
    let csv_path = args.out.clone().or(config.csv.clone()).unwrap_or_else(|| PathBuf::from("sweep.csv"));
    report::write_csv(&csv_path, &rows)?;
    let table = report::pivot_table(&rows);
    if let Some(path) = args.table.as_ref().or(config.table.as_ref()) {
        std::fs::write(path, &table).map_err(|e| Failure::from(Error::Config(format!("{}: {e}", path.display()))))?;
    }
    print!("{table}");
    Ok(if failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

pub fn plot(args: &PlotArgs) -> Result<i32, Failure> {
    let metric: plot::Metric = args.metric.parse()?;
    let rows = report::read_csv(&args.csv)?;
    let svg = plot::render_svg(&rows, metric)?;
    std::fs::write(&args.out, svg).map_err(|e| Failure::from(Error::Config(format!("{}: {e}", args.out.display()))))?;
    Ok(EXIT_OK)
}
