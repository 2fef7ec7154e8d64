//! CSV rows and the pivot text table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{MetricsRow, Protocol, TraceRecord};

pub const CSV_HEADER: &str =
    "protocol,nodes,m,workload,seed,lookups,avg_hops,avg_messages,avg_time_ms,memory_bytes,maintenance_messages";

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

pub fn rows_to_csv(rows: &[MetricsRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(format!("{CSV_HEADER}\n{}", String::from_utf8(body).expect("csv is utf-8")))
}

pub fn write_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows)?).map_err(|e| io_err(path, e))
}

/// Appends one row, writing the header first when the file is new or empty.
pub fn append_csv(path: &Path, row: &MetricsRow) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .read(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut existing = String::new();
    file.read_to_string(&mut existing).map_err(|e| io_err(path, e))?;
    let text = rows_to_csv(std::slice::from_ref(row))?;
    let text = if existing.is_empty() {
        text.as_str()
    } else {
        if existing.lines().next() != Some(CSV_HEADER) {
            return Err(io_err(path, "existing file has a different header"));
        }
        text.split_once('\n').map(|(_, body)| body).unwrap_or_default()
    };
    file.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<MetricsRow>> {
    if text.lines().next().map(str::trim_end) != Some(CSV_HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("expected header `{CSV_HEADER}`") });
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::Parse { line: i + 2, msg: e.to_string() }))
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    parse_csv(&std::fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for record in trace {
        w.serialize(record).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Mean of `metric` per (protocol, nodes), averaged over seeds. Rows with a
/// non-finite value are skipped.
pub fn aggregate(rows: &[MetricsRow], metric: impl Fn(&MetricsRow) -> f64) -> BTreeMap<(Protocol, usize), f64> {
    let mut acc: BTreeMap<(Protocol, usize), (f64, usize)> = BTreeMap::new();
    for row in rows {
        let v = metric(row);
        if v.is_finite() {
            let e = acc.entry((row.protocol, row.nodes)).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (sum, n))| (k, sum / n as f64)).collect()
}

type Block = (&'static str, fn(&MetricsRow) -> f64);

/// Text table with one block per metric, protocols as rows and node counts
/// as columns.
pub fn pivot_table(rows: &[MetricsRow]) -> String {
    let blocks: [Block; 4] = [
        ("Messages", |r| r.avg_messages),
        ("Hops", |r| r.avg_hops),
        ("Communication Time", |r| r.avg_time_ms),
        ("Memory Consumed", |r| r.memory_bytes as f64),
    ];
    let nodes: BTreeSet<usize> = rows.iter().map(|r| r.nodes).collect();
    let protocols: BTreeSet<Protocol> = rows.iter().map(|r| r.protocol).collect();
    let label_w = blocks.iter().map(|b| b.0.len()).chain([9]).max().unwrap_or(0);
    let mut out = String::new();
    for (title, metric) in blocks {
        let cells = aggregate(rows, metric);
        let formatted: BTreeMap<_, String> = cells.iter().map(|(k, v)| (*k, format!("{v:.1}"))).collect();
        let col_w = nodes
            .iter()
            .map(|n| n.to_string().len())
            .chain(formatted.values().map(String::len))
            .max()
            .unwrap_or(1);
        let _ = write!(out, "{title:<label_w$}");
        for n in &nodes {
            let _ = write!(out, "  {n:>col_w$}");
        }
        out.push('\n');
        for p in &protocols {
            let _ = write!(out, "{:<label_w$}", p.display_name());
            for n in &nodes {
                let cell = formatted.get(&(*p, *n)).map(String::as_str).unwrap_or("-");
                let _ = write!(out, "  {cell:>col_w$}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
