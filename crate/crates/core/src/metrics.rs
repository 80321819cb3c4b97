//! Percentage-filtered measures over event packets.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::event::EventPacket;
use crate::filter::{FilterKind, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("caught count {caught} exceeds received count {received}")]
    Accounting { received: u64, caught: u64 },
    #[error("verdict log has {verdicts} entries but packets hold {events} events")]
    Alignment { verdicts: usize, events: usize },
    #[error("metrics CSV line {line}: {message}")]
    Parse { line: u64, message: String },
}

/// `100 * caught / received`. A window that received nothing counts as fully
/// filtered.
pub fn pct_filtered(received: u64, caught: u64) -> Result<f64, MetricsError> {
    if caught > received {
        return Err(MetricsError::Accounting { received, caught });
    }
    if received == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * caught as f64 / received as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FilterCounts([u64; FilterKind::ALL.len()]);

impl FilterCounts {
    pub fn get(&self, kind: FilterKind) -> u64 {
        self.0[kind.index()]
    }

    pub fn add(&mut self, kind: FilterKind, n: u64) {
        self.0[kind.index()] += n;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    fn accumulate(&mut self, other: &FilterCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketMetrics {
    pub window_start_us: u64,
    pub received: u64,
    pub caught: u64,
    pub caught_by: FilterCounts,
}

impl PacketMetrics {
    pub fn new(window_start_us: u64) -> Self {
        PacketMetrics {
            window_start_us,
            received: 0,
            caught: 0,
            caught_by: FilterCounts::default(),
        }
    }

    pub fn record(&mut self, verdict: Verdict) {
        self.received += 1;
        if let Some(kind) = verdict.caught_by() {
            self.caught += 1;
            self.caught_by.add(kind, 1);
        }
    }

    pub fn pct(&self) -> f64 {
        pct_filtered(self.received, self.caught).expect("caught never exceeds received")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    Cumulative,
    Instantaneous,
}

/// One row per packet. In cumulative mode each row holds running totals up to
/// and including its packet.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub mode: SeriesMode,
    pub packets: Vec<PacketMetrics>,
}

impl MetricSeries {
    /// Series from per-packet counts.
    pub fn from_instantaneous(packets: Vec<PacketMetrics>, mode: SeriesMode) -> Self {
        let packets = match mode {
            SeriesMode::Instantaneous => packets,
            SeriesMode::Cumulative => {
                let mut running = PacketMetrics::new(0);
                packets
                    .into_iter()
                    .map(|p| {
                        running.received += p.received;
                        running.caught += p.caught;
                        running.caught_by.accumulate(&p.caught_by);
                        PacketMetrics {
                            window_start_us: p.window_start_us,
                            ..running.clone()
                        }
                    })
                    .collect()
            }
        };
        MetricSeries { mode, packets }
    }

    pub fn percentages(&self) -> Vec<f64> {
        self.packets.iter().map(PacketMetrics::pct).collect()
    }

    /// Whole-sequence totals.
    pub fn totals(&self) -> PacketMetrics {
        match self.mode {
            SeriesMode::Cumulative => self
                .packets
                .last()
                .cloned()
                .unwrap_or_else(|| PacketMetrics::new(0)),
            SeriesMode::Instantaneous => {
                let mut t = PacketMetrics::new(0);
                for p in &self.packets {
                    t.received += p.received;
                    t.caught += p.caught;
                    t.caught_by.accumulate(&p.caught_by);
                }
                t
            }
        }
    }

    /// Write `window_start_us,received,caught,pct,<filter>...` rows.
    pub fn write_csv<W: Write>(&self, filters: &[FilterKind], mut out: W) -> io::Result<()> {
        write!(out, "window_start_us,received,caught,pct")?;
        for f in filters {
            write!(out, ",{}", f.id())?;
        }
        writeln!(out)?;
        for p in &self.packets {
            write!(
                out,
                "{},{},{},{:.4}",
                p.window_start_us,
                p.received,
                p.caught,
                p.pct()
            )?;
            for f in filters {
                write!(out, ",{}", p.caught_by.get(*f))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl MetricSeries {
    /// Read rows written by [`MetricSeries::write_csv`], taking them to be in
    /// `mode`. Returns the series and the per-filter columns found.
    pub fn read_csv<R: Read>(
        inner: R,
        mode: SeriesMode,
    ) -> Result<(Self, Vec<FilterKind>), MetricsError> {
        let parse = |line: u64, message: String| MetricsError::Parse { line, message };
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(inner);
        let header = rdr.headers().map_err(|e| parse(1, e.to_string()))?.clone();
        const FIXED: [&str; 4] = ["window_start_us", "received", "caught", "pct"];
        if header.len() < FIXED.len() || header.iter().zip(FIXED).any(|(a, b)| a != b) {
            return Err(parse(
                1,
                format!("expected header starting {}", FIXED.join(",")),
            ));
        }
        let filters = header
            .iter()
            .skip(FIXED.len())
            .map(|h| h.parse::<FilterKind>().map_err(|e| parse(1, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut packets = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let line = i as u64 + 2;
            let row = row.map_err(|e| parse(line, e.to_string()))?;
            let int = |k: usize| {
                row.get(k)
                    .ok_or_else(|| parse(line, format!("missing column {}", k + 1)))?
                    .parse::<u64>()
                    .map_err(|e| parse(line, format!("column {}: {e}", k + 1)))
            };
            let mut p = PacketMetrics::new(int(0)?);
            p.received = int(1)?;
            p.caught = int(2)?;
            if p.caught > p.received {
                return Err(parse(line, "caught exceeds received".into()));
            }
            for (j, f) in filters.iter().enumerate() {
                p.caught_by.add(*f, int(FIXED.len() + j)?);
            }
            packets.push(p);
        }
        Ok((MetricSeries { mode, packets }, filters))
    }

    /// Per-packet counts, undoing the running totals of a cumulative series.
    pub fn to_instantaneous(&self) -> MetricSeries {
        let packets = match self.mode {
            SeriesMode::Instantaneous => self.packets.clone(),
            SeriesMode::Cumulative => {
                let mut prev = PacketMetrics::new(0);
                self.packets
                    .iter()
                    .map(|p| {
                        let mut d = PacketMetrics::new(p.window_start_us);
                        d.received = p.received - prev.received;
                        d.caught = p.caught - prev.caught;
                        for k in FilterKind::ALL {
                            d.caught_by
                                .add(k, p.caught_by.get(k) - prev.caught_by.get(k));
                        }
                        prev = p.clone();
                        d
                    })
                    .collect()
            }
        };
        MetricSeries {
            mode: SeriesMode::Instantaneous,
            packets,
        }
    }
}

/// Fold a verdict log over its packets.
pub fn build_series(
    verdicts: &[Verdict],
    packets: &[EventPacket],
    mode: SeriesMode,
) -> Result<MetricSeries, MetricsError> {
    let events: usize = packets.iter().map(EventPacket::len).sum();
    if events != verdicts.len() {
        return Err(MetricsError::Alignment {
            verdicts: verdicts.len(),
            events,
        });
    }
    let mut rest = verdicts;
    let per_packet = packets
        .iter()
        .map(|p| {
            let (mine, tail) = rest.split_at(p.len());
            rest = tail;
            let mut m = PacketMetrics::new(p.window_start);
            mine.iter().for_each(|v| m.record(*v));
            m
        })
        .collect();
    Ok(MetricSeries::from_instantaneous(per_packet, mode))
}

/// Maximal runs of consecutive packets at exactly 100 % filtered.
pub fn full_filter_spikes(series: &MetricSeries) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, p) in series.packets.iter().enumerate() {
        let full = p.caught == p.received;
        match (full, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(s..series.packets.len());
    }
    runs
}
