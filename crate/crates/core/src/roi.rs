//! Region-of-interest features at a fixed cadence.
//!
//! Per interval, rows and columns with at least `activity_threshold` events
//! are "active". Their extents define a rectangle that is widened into a
//! square about its midpoint. The feature is the square's centre, side and
//! the share of its pixels that saw any event.
//!
//! The square covers pixels `p` with `|p - c| <= (side - 1) / 2`. When the
//! shorter axis needs an odd amount of widening its bounds fall on half
//! pixels and it covers `side - 1` pixels on that axis; this keeps the
//! region exactly symmetric under horizontal mirroring.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventStream, SensorGeometry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoiError {
    #[error("no valid feature to normalize")]
    NoValidFeatures,
    #[error("interval must be positive")]
    ZeroInterval,
    #[error("activity threshold must be at least 1")]
    ZeroThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoiConfig {
    pub interval_us: u64,
    /// Events a row or column needs to count as active.
    pub activity_threshold: u32,
    /// Events an interval needs to yield a detection.
    pub min_events: usize,
}

impl Default for RoiConfig {
    fn default() -> Self {
        RoiConfig {
            interval_us: 30_000,
            activity_threshold: 3,
            min_events: 10,
        }
    }
}

impl RoiConfig {
    pub fn validate(&self) -> Result<(), RoiError> {
        if self.interval_us == 0 {
            return Err(RoiError::ZeroInterval);
        }
        if self.activity_threshold == 0 {
            return Err(RoiError::ZeroThreshold);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoiFeature {
    pub interval_start_us: u64,
    pub valid: bool,
    pub center_x: f64,
    pub center_y: f64,
    pub size: f64,
    pub active_pct: f64,
}

impl RoiFeature {
    fn invalid(interval_start_us: u64) -> Self {
        RoiFeature {
            interval_start_us,
            ..Default::default()
        }
    }

    /// Centre rounded to whole pixels, halves rounding up.
    pub fn rounded_center(&self) -> (i64, i64) {
        (self.center_x.round() as i64, self.center_y.round() as i64)
    }
}

/// Extent `[lo, hi]` of indices whose count meets the threshold.
fn active_extent(counts: &[u32], threshold: u32) -> Option<(usize, usize)> {
    let lo = counts.iter().position(|&c| c >= threshold)?;
    let hi = counts.iter().rposition(|&c| c >= threshold)?;
    Some((lo, hi))
}

/// Integer pixel range covered on one axis by a square of `side` centred
/// on the midpoint of `[lo, hi]`, clipped to `[0, len)`.
fn square_range(lo: usize, hi: usize, side: usize, len: usize) -> (usize, usize) {
    let twice_center = (lo + hi) as i64;
    let reach = side as i64 - 1;
    let start = (twice_center - reach + 1).div_euclid(2);
    let end = (twice_center + reach).div_euclid(2);
    (start.max(0) as usize, (end.min(len as i64 - 1)) as usize)
}

pub fn detect_roi(
    events: &[Event],
    g: SensorGeometry,
    cfg: &RoiConfig,
    interval_start_us: u64,
) -> RoiFeature {
    let events: Vec<&Event> = events.iter().filter(|e| g.contains(e.x, e.y)).collect();
    if events.is_empty() || events.len() < cfg.min_events {
        return RoiFeature::invalid(interval_start_us);
    }
    let (w, h) = (g.width as usize, g.height as usize);
    let mut cols = vec![0u32; w];
    let mut rows = vec![0u32; h];
    let mut seen = vec![false; w * h];
    for e in &events {
        cols[e.x as usize] += 1;
        rows[e.y as usize] += 1;
        seen[e.y as usize * w + e.x as usize] = true;
    }
    let (Some((x_lo, x_hi)), Some((y_lo, y_hi))) = (
        active_extent(&cols, cfg.activity_threshold),
        active_extent(&rows, cfg.activity_threshold),
    ) else {
        return RoiFeature::invalid(interval_start_us);
    };
    let side = (x_hi - x_lo + 1).max(y_hi - y_lo + 1);
    let (rx0, rx1) = square_range(x_lo, x_hi, side, w);
    let (ry0, ry1) = square_range(y_lo, y_hi, side, h);
    let area = (rx1 - rx0 + 1) * (ry1 - ry0 + 1);
    let active = (ry0..=ry1)
        .map(|y| {
            seen[y * w + rx0..=y * w + rx1]
                .iter()
                .filter(|&&s| s)
                .count()
        })
        .sum::<usize>();
    RoiFeature {
        interval_start_us,
        valid: true,
        center_x: (x_lo + x_hi) as f64 / 2.0,
        center_y: (y_lo + y_hi) as f64 / 2.0,
        size: side as f64,
        active_pct: 100.0 * active as f64 / area as f64,
    }
}

/// One feature per complete interval; incomplete trailing time is dropped.
pub fn extract_sequence(
    stream: &EventStream,
    cfg: &RoiConfig,
) -> Result<Vec<RoiFeature>, RoiError> {
    cfg.validate()?;
    let count = stream.duration_us() / cfg.interval_us;
    let mut events = stream.events.as_slice();
    Ok((0..count)
        .map(|k| {
            let start = k * cfg.interval_us;
            let first = events.partition_point(|e| e.ts < start);
            events = &events[first..];
            let n = events.partition_point(|e| e.ts < start + cfg.interval_us);
            let (mine, rest) = events.split_at(n);
            events = rest;
            detect_roi(mine, stream.geometry, cfg, start)
        })
        .collect())
}

/// Means subtracted by [`zero_center`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeans {
    pub valid_count: usize,
    pub center_x: f64,
    pub center_y: f64,
    pub size: f64,
    pub active_pct: f64,
}

/// Subtract the per-recording mean of each numeric field over valid features.
pub fn zero_center(seq: &[RoiFeature]) -> Result<(Vec<RoiFeature>, FeatureMeans), RoiError> {
    let valid: Vec<&RoiFeature> = seq.iter().filter(|f| f.valid).collect();
    if valid.is_empty() {
        return Err(RoiError::NoValidFeatures);
    }
    let n = valid.len() as f64;
    let mean = |f: fn(&RoiFeature) -> f64| valid.iter().map(|r| f(r)).sum::<f64>() / n;
    let means = FeatureMeans {
        valid_count: valid.len(),
        center_x: mean(|r| r.center_x),
        center_y: mean(|r| r.center_y),
        size: mean(|r| r.size),
        active_pct: mean(|r| r.active_pct),
    };
    let out = seq
        .iter()
        .map(|f| {
            if !f.valid {
                return *f;
            }
            RoiFeature {
                center_x: f.center_x - means.center_x,
                center_y: f.center_y - means.center_y,
                size: f.size - means.size,
                active_pct: f.active_pct - means.active_pct,
                ..*f
            }
        })
        .collect();
    Ok((out, means))
}

/// Horizontal flip of valid features.
pub fn mirror_sequence(seq: &[RoiFeature], g: SensorGeometry) -> Vec<RoiFeature> {
    let far = (g.width - 1) as f64;
    seq.iter()
        .map(|f| {
            if f.valid {
                RoiFeature {
                    center_x: far - f.center_x,
                    ..*f
                }
            } else {
                *f
            }
        })
        .collect()
}

pub fn write_features_csv<W: Write>(seq: &[RoiFeature], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "interval_start_us,valid,center_x,center_y,size,active_pct"
    )?;
    for f in seq {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            f.interval_start_us, f.valid as u8, f.center_x, f.center_y, f.size, f.active_pct
        )?;
    }
    Ok(())
}
