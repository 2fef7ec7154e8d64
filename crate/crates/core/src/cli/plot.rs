//! Self-contained SVG line charts of a metric against log2(N).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::cli::report::aggregate;
use crate::error::{Error, Result};
use crate::sim::{MetricsRow, Protocol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    AvgHops,
    AvgMessages,
    AvgTimeMs,
    MemoryBytes,
    MaintenanceMessages,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::AvgTimeMs,
        Metric::AvgHops,
        Metric::AvgMessages,
        Metric::MemoryBytes,
        Metric::MaintenanceMessages,
    ];

    pub fn column(&self) -> &'static str {
        match self {
            Metric::AvgHops => "avg_hops",
            Metric::AvgMessages => "avg_messages",
            Metric::AvgTimeMs => "avg_time_ms",
            Metric::MemoryBytes => "memory_bytes",
            Metric::MaintenanceMessages => "maintenance_messages",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Metric::AvgHops => "Number of Hops per Peer",
            Metric::AvgMessages => "Message per Peer",
            Metric::AvgTimeMs => "Average Communication Time",
            Metric::MemoryBytes => "Memory Consumed",
            Metric::MaintenanceMessages => "Maintenance Messages",
        }
    }

    pub fn value(&self, row: &MetricsRow) -> f64 {
        match self {
            Metric::AvgHops => row.avg_hops,
            Metric::AvgMessages => row.avg_messages,
            Metric::AvgTimeMs => row.avg_time_ms,
            Metric::MemoryBytes => row.memory_bytes as f64,
            Metric::MaintenanceMessages => row.maintenance_messages as f64,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL.into_iter().find(|m| m.column() == s).ok_or_else(|| {
            let valid: Vec<&str> = Metric::ALL.iter().map(Metric::column).collect();
            Error::Config(format!("unknown metric `{s}`; valid metrics: {}", valid.join(", ")))
        })
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn colour(p: Protocol) -> &'static str {
    match p {
        Protocol::Chord => "#1f77b4",
        Protocol::Rvn => "#d62728",
        Protocol::Fz => "#2ca02c",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(rows: &[MetricsRow], metric: Metric) -> Result<String> {
    let points = aggregate(rows, |r| metric.value(r));
    if points.is_empty() {
        return Err(Error::Config(format!("no finite `{metric}` values to plot")));
    }
    let mut series: BTreeMap<Protocol, Vec<(f64, f64)>> = BTreeMap::new();
    for (&(p, n), &v) in &points {
        series.entry(p).or_default().push(((n as f64).log2(), v));
    }
    let xs = points.keys().map(|&(_, n)| (n as f64).log2());
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x_lo, x_hi) = if x_hi > x_lo { (x_lo, x_hi) } else { (x_lo - 1.0, x_hi + 1.0) };
    let y_max = points.values().cloned().fold(0.0f64, f64::max);
    let y_hi = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(metric.title())
    );

    for i in 0..=5 {
        let v = y_hi * i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>",
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let mut ticks: Vec<f64> = points.keys().map(|&(_, n)| (n as f64).log2()).collect();
    ticks.dedup();
    for x in ticks {
        let px = sx(x);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.1}\" y1=\"{TOP}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#eee\"/>",
            TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            tick_label(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">log2(number of nodes)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.column()
    );

    for (i, (p, pts)) in series.iter().enumerate() {
        let c = colour(*p);
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-protocol="{p}" fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{c}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(p.display_name())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    if v.fract() == 0.0 || v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}
