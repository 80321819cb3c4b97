//! Summary table and line charts over per-packet metrics.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use evfilt_core::metrics::full_filter_spikes;
use evfilt_core::{pct_filtered, FilterKind, MetricSeries, SeriesMode};
use serde_json::{json, Value};

use crate::commands::Outcome;

struct Row {
    name: String,
    packets: usize,
    events: u64,
    caught: u64,
    filtered_pct: f64,
    mean_packet_pct: f64,
    spikes: usize,
    shares: Vec<Option<f64>>,
}

fn sequence_name(path: &Path) -> String {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    stem.strip_suffix(".metrics").unwrap_or(&stem).to_string()
}

fn summarize(path: &Path) -> Result<(Row, MetricSeries)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (series, filters) = MetricSeries::read_csv(BufReader::new(file), SeriesMode::Instantaneous)
        .with_context(|| format!("reading {}", path.display()))?;
    let totals = series.totals();
    let pcts = series.percentages();
    let mean_packet_pct = if pcts.is_empty() {
        0.0
    } else {
        pcts.iter().sum::<f64>() / pcts.len() as f64
    };
    let shares = FilterKind::ALL
        .iter()
        .map(|k| {
            filters.contains(k).then(|| match totals.received {
                0 => 0.0,
                n => 100.0 * totals.caught_by.get(*k) as f64 / n as f64,
            })
        })
        .collect();
    let row = Row {
        name: sequence_name(path),
        packets: series.packets.len(),
        events: totals.received,
        caught: totals.caught,
        filtered_pct: pct_filtered(totals.received, totals.caught)?,
        mean_packet_pct,
        spikes: full_filter_spikes(&series).len(),
        shares,
    };
    Ok((row, series))
}

fn markdown(rows: &[Row]) -> String {
    let mut out = String::from(
        "| Sequence | Packets | Events | Caught | % filtered | Mean packet % | 100% spikes |",
    );
    for k in FilterKind::ALL {
        write!(out, " {k} % |").unwrap();
    }
    out.push_str("\n|---|---:|---:|---:|---:|---:|---:|");
    out.push_str(&"---:|".repeat(FilterKind::ALL.len()));
    out.push('\n');
    for r in rows {
        write!(
            out,
            "| {} | {} | {} | {} | {:.2} | {:.2} | {} |",
            r.name, r.packets, r.events, r.caught, r.filtered_pct, r.mean_packet_pct, r.spikes
        )
        .unwrap();
        for s in &r.shares {
            match s {
                Some(p) => write!(out, " {p:.2} |").unwrap(),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}

fn csv_table(rows: &[Row]) -> String {
    let mut out =
        String::from("sequence,packets,events,caught,filtered_pct,mean_packet_pct,spikes_100");
    for k in FilterKind::ALL {
        write!(out, ",{}_pct", k.id()).unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{},{:.4},{:.4},{}",
            r.name, r.packets, r.events, r.caught, r.filtered_pct, r.mean_packet_pct, r.spikes
        )
        .unwrap();
        for s in &r.shares {
            match s {
                Some(p) => write!(out, ",{p:.4}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

const W: f64 = 720.0;
const H: f64 = 320.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 44.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Percent-filtered over time, y fixed to 0..100.
pub fn line_chart(title: &str, t_s: &[f64], pct: &[f64]) -> String {
    let span = t_s.last().copied().unwrap_or(0.0).max(1e-6);
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let x = |t: f64| LEFT + pw * t / span;
    let y = |p: f64| TOP + ph * (1.0 - p / 100.0);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        W / 2.0,
        escape(title)
    )
    .unwrap();
    for p in [0.0, 25.0, 50.0, 75.0, 100.0] {
        writeln!(
            s,
            r##"<line x1="{LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{p}</text>"##,
            W - RIGHT,
            LEFT - 6.0,
            y(p) + 4.0,
            y = y(p),
        )
        .unwrap();
    }
    for i in 0..=5 {
        let t = span * i as f64 / 5.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{t:.2}</text>"#,
            x(t),
            H - BOTTOM + 16.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">time (s)</text>"#,
        LEFT + pw / 2.0,
        H - 8.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">% filtered</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    let points: Vec<String> = t_s
        .iter()
        .zip(pct)
        .map(|(&t, &p)| format!("{:.2},{:.2}", x(t), y(p)))
        .collect();
    writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.2" points="{}"/>"##,
        points.join(" ")
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn report(metrics: &[PathBuf], out_dir: &Path) -> Result<Outcome> {
    let mut names = HashSet::new();
    for m in metrics {
        if !names.insert(sequence_name(m)) {
            bail!("two metrics files share the name {:?}", sequence_name(m));
        }
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    for path in metrics {
        let (row, series) = summarize(path)?;
        // Plot each packet at its window end so the first point is not at t = 0.
        let packet_us = series
            .packets
            .get(1)
            .map_or(0, |p| p.window_start_us - series.packets[0].window_start_us);
        let t_s: Vec<f64> = series
            .packets
            .iter()
            .map(|p| (p.window_start_us + packet_us) as f64 / 1e6)
            .collect();
        let cumulative =
            MetricSeries::from_instantaneous(series.packets.clone(), SeriesMode::Cumulative);
        for (kind, values) in [
            ("cumulative", cumulative.percentages()),
            ("instantaneous", series.percentages()),
        ] {
            let svg_path = out_dir.join(format!("{}.{kind}.svg", row.name));
            let title = format!("{}: {kind} % of filtered events", row.name);
            fs::write(&svg_path, line_chart(&title, &t_s, &values))
                .with_context(|| format!("writing {}", svg_path.display()))?;
            outputs.push(svg_path);
        }
        rows.push(row);
    }
    let table = markdown(&rows);
    let md_path = out_dir.join("summary.md");
    fs::write(&md_path, &table).with_context(|| format!("writing {}", md_path.display()))?;
    let csv_path = out_dir.join("summary.csv");
    fs::write(&csv_path, csv_table(&rows))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    outputs.extend([md_path, csv_path]);
    print!("{table}");
    let summary: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "sequence": r.name,
                "events": r.events,
                "filtered_pct": r.filtered_pct,
                "spikes_100": r.spikes,
            })
        })
        .collect();
    Ok(Outcome {
        outputs,
        summary: json!({ "sequences": summary }),
    })
}
