//! Ground-truth-labelled synthetic event streams.
//!
//! Signal events come from a per-pixel contrast model: each pixel remembers
//! the log intensity at its last event and fires ON (OFF) whenever the
//! current log intensity rises (falls) past that memory by `theta_on`
//! (`theta_off`). The scene is an analytic intensity field of soft-edged
//! objects moving along piecewise-linear keyframe paths, stepped in time and
//! evaluated only near the objects. Crossing times are interpolated linearly
//! inside each step.
//!
//! Noise processes are independent Poisson sources, each drawing from its own
//! ChaCha stream of the scene seed so that enabling one process never
//! perturbs another.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventStream, Polarity, SensorGeometry};
use crate::filter::Verdict;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid scene script: {0}")]
    Script(String),
    #[error(
        "trajectory keyframe ({x}, {y}) at {t_us} us lies outside the {width}x{height} sensor"
    )]
    OutsideGeometry {
        t_us: u64,
        x: f64,
        y: f64,
        width: u16,
        height: u16,
    },
    #[error("{labels} labelled events but {verdicts} verdicts")]
    Alignment { labels: usize, verdicts: usize },
    #[error("scene script parse error: {0}")]
    Parse(String),
}

/// Ground-truth origin of an event. Sorting order is the tie-break order of
/// the merged stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "SIGNAL")]
    Signal,
    #[serde(rename = "NOISE_BA")]
    NoiseBa,
    #[serde(rename = "NOISE_HOT")]
    NoiseHot,
    #[serde(rename = "NOISE_BURST")]
    NoiseBurst,
    #[serde(rename = "NOISE_SHADOW")]
    NoiseShadow,
}

impl Label {
    pub const ALL: [Label; 5] = [
        Label::Signal,
        Label::NoiseBa,
        Label::NoiseHot,
        Label::NoiseBurst,
        Label::NoiseShadow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Signal => "SIGNAL",
            Label::NoiseBa => "NOISE_BA",
            Label::NoiseHot => "NOISE_HOT",
            Label::NoiseBurst => "NOISE_BURST",
            Label::NoiseShadow => "NOISE_SHADOW",
        }
    }

    pub fn is_noise(self) -> bool {
        self != Label::Signal
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| SynthError::Parse(format!("unknown label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledEvent {
    pub event: Event,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContrastModel {
    pub theta_on: f64,
    pub theta_off: f64,
    /// Dead time after each event during which the pixel does not fire.
    pub refractory_us: u64,
}

impl Default for ContrastModel {
    fn default() -> Self {
        ContrastModel {
            theta_on: 0.25,
            theta_off: 0.25,
            refractory_us: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Round blob of `radius` pixels.
    Disk { radius: f64 },
    /// Vertical band spanning the sensor height, `half_width` pixels either
    /// side of its centre line.
    Bar { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t_us: u64,
    pub x: f64,
    pub y: f64,
}

/// A soft-edged object of constant intensity moving through keyframes.
/// Before the first and after the last keyframe it rests in place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub shape: Shape,
    /// Width of the logistic edge profile, pixels.
    #[serde(default = "default_edge_width")]
    pub edge_width: f64,
    pub intensity: f64,
    pub keyframes: Vec<Keyframe>,
}

fn default_edge_width() -> f64 {
    1.0
}

impl ObjectSpec {
    pub fn position(&self, t_us: f64) -> (f64, f64) {
        let kf = &self.keyframes;
        let first = kf[0];
        if t_us <= first.t_us as f64 {
            return (first.x, first.y);
        }
        for pair in kf.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if t_us <= b.t_us as f64 {
                let span = (b.t_us - a.t_us) as f64;
                if span == 0.0 {
                    return (b.x, b.y);
                }
                let f = (t_us - a.t_us as f64) / span;
                return (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y));
            }
        }
        let last = kf[kf.len() - 1];
        (last.x, last.y)
    }

    pub fn is_moving(&self, t_us: f64) -> bool {
        self.keyframes.windows(2).any(|p| {
            (p[0].t_us as f64) < t_us
                && t_us <= p[1].t_us as f64
                && (p[0].x != p[1].x || p[0].y != p[1].y)
        })
    }

    fn extent(&self) -> f64 {
        let core = match self.shape {
            Shape::Disk { radius } => radius,
            Shape::Bar { half_width } => half_width,
        };
        core + 9.0 * self.edge_width
    }

    /// Fraction of the object's intensity present at pixel `(px, py)`.
    #[inline]
    fn coverage(&self, cx: f64, cy: f64, px: f64, py: f64) -> f64 {
        let (dist, core) = match self.shape {
            Shape::Disk { radius } => (((px - cx).powi(2) + (py - cy).powi(2)).sqrt(), radius),
            Shape::Bar { half_width } => ((px - cx).abs(), half_width),
        };
        1.0 / (1.0 + (-(core - dist) / self.edge_width).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HotPixel {
    pub x: u16,
    pub y: u16,
    pub rate_hz: f64,
}

/// Same-polarity events scattered over a disk trailing the first object,
/// emitted while it moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowSpec {
    pub offset_x: f64,
    pub offset_y: f64,
    pub radius: f64,
    pub rate_hz_per_pixel: f64,
    #[serde(default = "default_shadow_polarity")]
    pub polarity: u8,
}

fn default_shadow_polarity() -> u8 {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub ba_rate_hz_per_pixel: f64,
    pub hot_pixels: Vec<HotPixel>,
    pub initial_burst_count: u64,
    /// Length of the start-up window receiving the burst.
    pub initial_burst_us: u64,
    pub shadow: Option<ShadowSpec>,
    pub rng_seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            ba_rate_hz_per_pixel: 0.1,
            hot_pixels: Vec::new(),
            initial_burst_count: 0,
            initial_burst_us: 2_000,
            shadow: None,
            rng_seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            ba_rate_hz_per_pixel: 0.0,
            ..NoiseSpec::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneScript {
    #[serde(default = "default_width")]
    pub width: u16,
    #[serde(default = "default_height")]
    pub height: u16,
    pub duration_us: u64,
    /// Simulation time step for the contrast model.
    #[serde(default = "default_step")]
    pub step_us: u64,
    /// Static background intensity, arbitrary linear units.
    #[serde(default = "default_background")]
    pub background: f64,
    #[serde(default)]
    pub contrast: ContrastModel,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub noise: NoiseSpec,
}

fn default_width() -> u16 {
    240
}
fn default_height() -> u16 {
    180
}
fn default_step() -> u64 {
    250
}
fn default_background() -> f64 {
    1.0
}

impl SceneScript {
    pub fn empty(geometry: SensorGeometry, duration_us: u64) -> Self {
        SceneScript {
            width: geometry.width,
            height: geometry.height,
            duration_us,
            step_us: default_step(),
            background: default_background(),
            contrast: ContrastModel::default(),
            objects: Vec::new(),
            noise: NoiseSpec::none(),
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        SensorGeometry {
            width: self.width,
            height: self.height,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        let s: SceneScript = toml::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene scripts always serialize")
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Script(m.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("sensor geometry must be non-empty");
        }
        if self.duration_us == 0 || self.step_us == 0 {
            return bad("duration_us and step_us must be positive");
        }
        if !(self.background > 0.0) {
            return bad("background intensity must be positive");
        }
        let c = &self.contrast;
        if !(c.theta_on > 0.0 && c.theta_off > 0.0) {
            return bad("contrast thresholds must be positive");
        }
        let n = &self.noise;
        if !(n.ba_rate_hz_per_pixel >= 0.0) || n.hot_pixels.iter().any(|h| !(h.rate_hz >= 0.0)) {
            return bad("noise rates must be non-negative");
        }
        if let Some(h) = n
            .hot_pixels
            .iter()
            .find(|h| !self.geometry().contains(h.x, h.y))
        {
            return Err(SynthError::Script(format!(
                "hot pixel ({}, {}) outside the sensor",
                h.x, h.y
            )));
        }
        if let Some(sh) = &n.shadow {
            if !(sh.rate_hz_per_pixel >= 0.0 && sh.radius > 0.0) || sh.polarity > 1 {
                return bad("shadow needs radius > 0, rate >= 0 and polarity 0 or 1");
            }
            if self.objects.is_empty() {
                return bad("shadow requires an object to follow");
            }
        }
        for obj in &self.objects {
            if !(obj.intensity > 0.0 && obj.edge_width > 0.0) {
                return bad("object intensity and edge width must be positive");
            }
            match obj.shape {
                Shape::Disk { radius } if !(radius > 0.0) => {
                    return bad("disk radius must be positive")
                }
                Shape::Bar { half_width } if !(half_width > 0.0) => {
                    return bad("bar half width must be positive")
                }
                _ => {}
            }
            if obj.keyframes.is_empty() {
                return bad("object needs at least one keyframe");
            }
            if obj.keyframes.windows(2).any(|p| p[1].t_us < p[0].t_us) {
                return bad("keyframes must be in time order");
            }
            for k in &obj.keyframes {
                let inside = k.x >= 0.0
                    && k.y >= 0.0
                    && k.x <= (self.width - 1) as f64
                    && k.y <= (self.height - 1) as f64;
                if !inside {
                    return Err(SynthError::OutsideGeometry {
                        t_us: k.t_us,
                        x: k.x,
                        y: k.y,
                        width: self.width,
                        height: self.height,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Per-process RNG: one ChaCha stream per noise source.
fn process_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_polarity(rng: &mut ChaCha8Rng) -> Polarity {
    if rng.random::<bool>() {
        Polarity::On
    } else {
        Polarity::Off
    }
}

/// Timestamps are drawn from `[1, duration)` so none collides with the
/// empty-map value 0.
fn random_ts(rng: &mut ChaCha8Rng, end: u64) -> u64 {
    if end <= 2 {
        1
    } else {
        rng.random_range(1..end)
    }
}

/// Uncorrelated per-pixel Poisson noise over the whole sensor.
pub fn background_noise(script: &SceneScript) -> Vec<LabeledEvent> {
    let rate = script.noise.ba_rate_hz_per_pixel;
    let g = script.geometry();
    let mean = rate * g.pixel_count() as f64 * script.duration_us as f64 * 1e-6;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let mut rng = process_rng(script.noise.rng_seed, 1);
    let count = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;
    (0..count)
        .map(|_| LabeledEvent {
            event: Event::new(
                rng.random_range(0..g.width),
                rng.random_range(0..g.height),
                random_ts(&mut rng, script.duration_us),
                random_polarity(&mut rng),
            ),
            label: Label::NoiseBa,
        })
        .collect()
}

/// Fixed pixels firing as Poisson processes.
pub fn hot_pixel_noise(script: &SceneScript) -> Vec<LabeledEvent> {
    let mut out = Vec::new();
    for (i, hp) in script.noise.hot_pixels.iter().enumerate() {
        if !(hp.rate_hz > 0.0) {
            continue;
        }
        let mut rng = process_rng(script.noise.rng_seed, 16 + i as u64);
        let gap = Exp::new(hp.rate_hz * 1e-6).expect("positive rate");
        let mut t = 1.0 + gap.sample(&mut rng);
        while t < script.duration_us as f64 {
            out.push(LabeledEvent {
                event: Event::new(hp.x, hp.y, t as u64, random_polarity(&mut rng)),
                label: Label::NoiseHot,
            });
            t += gap.sample(&mut rng);
        }
    }
    out
}

/// Random events packed into the first `initial_burst_us`.
pub fn burst_noise(script: &SceneScript) -> Vec<LabeledEvent> {
    let g = script.geometry();
    let mut rng = process_rng(script.noise.rng_seed, 2);
    let end = script
        .noise
        .initial_burst_us
        .clamp(2, script.duration_us.max(2));
    (0..script.noise.initial_burst_count)
        .map(|_| LabeledEvent {
            event: Event::new(
                rng.random_range(0..g.width),
                rng.random_range(0..g.height),
                random_ts(&mut rng, end),
                random_polarity(&mut rng),
            ),
            label: Label::NoiseBurst,
        })
        .collect()
}

/// Same-polarity events over a disk trailing the first object while it moves.
pub fn shadow_noise(script: &SceneScript) -> Vec<LabeledEvent> {
    let (Some(sh), Some(obj)) = (script.noise.shadow, script.objects.first()) else {
        return Vec::new();
    };
    let area = std::f64::consts::PI * sh.radius * sh.radius;
    let rate = sh.rate_hz_per_pixel * area;
    if !(rate > 0.0) {
        return Vec::new();
    }
    let g = script.geometry();
    let pol = Polarity::try_from(sh.polarity).unwrap_or(Polarity::Off);
    let mut rng = process_rng(script.noise.rng_seed, 3);
    let gap = Exp::new(rate * 1e-6).expect("positive rate");
    let mut out = Vec::new();
    let mut t = 1.0 + gap.sample(&mut rng);
    while t < script.duration_us as f64 {
        // Uniform point in the disk.
        let r = sh.radius * rng.random::<f64>().sqrt();
        let a = std::f64::consts::TAU * rng.random::<f64>();
        if obj.is_moving(t) {
            let (cx, cy) = obj.position(t);
            let px = (cx + sh.offset_x + r * a.cos()).round();
            let py = (cy + sh.offset_y + r * a.sin()).round();
            if px >= 0.0 && py >= 0.0 && px < g.width as f64 && py < g.height as f64 {
                out.push(LabeledEvent {
                    event: Event::new(px as u16, py as u16, t as u64, pol),
                    label: Label::NoiseShadow,
                });
            }
        }
        t += gap.sample(&mut rng);
    }
    out
}

struct PixelModel {
    /// Log intensity seen at the previous step.
    level: Vec<f64>,
    /// Log intensity memorized at the last event.
    reference: Vec<f64>,
    last_event: Vec<Option<f64>>,
}

fn log_intensity(script: &SceneScript, positions: &[(f64, f64)], px: f64, py: f64) -> f64 {
    let mut i = script.background;
    for (obj, &(cx, cy)) in script.objects.iter().zip(positions) {
        i += (obj.intensity - script.background) * obj.coverage(cx, cy, px, py);
    }
    i.max(1e-9).ln()
}

/// Contrast-threshold events produced by the moving objects.
pub fn signal_events(script: &SceneScript) -> Vec<LabeledEvent> {
    if script.objects.is_empty() {
        return Vec::new();
    }
    let g = script.geometry();
    let (w, h) = (g.width as usize, g.height as usize);
    let positions_at =
        |t: f64| -> Vec<(f64, f64)> { script.objects.iter().map(|o| o.position(t)).collect() };
    let start = positions_at(0.0);
    let mut model = PixelModel {
        level: Vec::with_capacity(w * h),
        reference: Vec::with_capacity(w * h),
        last_event: vec![None; w * h],
    };
    for y in 0..h {
        for x in 0..w {
            let l = log_intensity(script, &start, x as f64, y as f64);
            model.level.push(l);
            model.reference.push(l);
        }
    }
    let c = script.contrast;
    let refractory = c.refractory_us as f64;
    let mut out = Vec::new();
    let mut t0 = 0u64;
    let mut prev = start;
    while t0 < script.duration_us {
        let t1 = (t0 + script.step_us).min(script.duration_us);
        let now = positions_at(t1 as f64);
        if now == prev {
            t0 = t1;
            continue;
        }
        let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (obj, (&a, &b)) in script.objects.iter().zip(prev.iter().zip(&now)) {
            if a == b {
                continue;
            }
            let reach = obj.extent();
            x_lo = x_lo.min(a.0.min(b.0) - reach);
            x_hi = x_hi.max(a.0.max(b.0) + reach);
            match obj.shape {
                Shape::Disk { .. } => {
                    y_lo = y_lo.min(a.1.min(b.1) - reach);
                    y_hi = y_hi.max(a.1.max(b.1) + reach);
                }
                Shape::Bar { .. } => {
                    y_lo = 0.0;
                    y_hi = (h - 1) as f64;
                }
            }
        }
        let xr = (x_lo.floor().max(0.0) as usize)..=(x_hi.ceil().min((w - 1) as f64) as usize);
        let yr = (y_lo.floor().max(0.0) as usize)..=(y_hi.ceil().min((h - 1) as f64) as usize);
        let (ft0, ft1) = (t0 as f64, t1 as f64);
        for y in yr {
            for x in xr.clone() {
                let p = y * w + x;
                let l0 = model.level[p];
                let l1 = log_intensity(script, &now, x as f64, y as f64);
                model.level[p] = l1;
                loop {
                    let (pol, target) = if l1 - model.reference[p] >= c.theta_on {
                        (Polarity::On, model.reference[p] + c.theta_on)
                    } else if model.reference[p] - l1 >= c.theta_off {
                        (Polarity::Off, model.reference[p] - c.theta_off)
                    } else {
                        break;
                    };
                    let frac = if l1 != l0 {
                        ((target - l0) / (l1 - l0)).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    let mut tc = ft0 + frac * (ft1 - ft0);
                    if let Some(last) = model.last_event[p] {
                        tc = tc.max(last + refractory);
                    }
                    if tc > ft1 {
                        break;
                    }
                    model.reference[p] = target;
                    model.last_event[p] = Some(tc);
                    out.push(LabeledEvent {
                        event: Event::new(x as u16, y as u16, (tc.round() as u64).max(1), pol),
                        label: Label::Signal,
                    });
                }
            }
        }
        prev = now;
        t0 = t1;
    }
    out
}

/// Sort key of the merged stream: time, then label, then position.
fn merge_key(le: &LabeledEvent) -> (u64, Label, u16, u16, u8) {
    (
        le.event.ts,
        le.label,
        le.event.x,
        le.event.y,
        le.event.pol.as_u8(),
    )
}

/// Render every process and merge them in timestamp order.
pub fn render_scene(script: &SceneScript) -> Result<Vec<LabeledEvent>, SynthError> {
    script.validate()?;
    let mut all = signal_events(script);
    all.extend(background_noise(script));
    all.extend(hot_pixel_noise(script));
    all.extend(burst_noise(script));
    all.extend(shadow_noise(script));
    all.sort_by_key(merge_key);
    Ok(all)
}

/// Strip labels into a plain stream.
pub fn to_stream(script: &SceneScript, labeled: &[LabeledEvent]) -> EventStream {
    EventStream::new(
        script.geometry(),
        "synthetic",
        labeled.iter().map(|le| le.event).collect(),
    )
    .with_duration(script.duration_us)
}

/// Confusion counts with signal as the positive class and "passed the
/// filter" as the positive prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_neg: u64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision()?, self.recall()?);
        (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
    }

    /// Share of noise events the filter caught.
    pub fn noise_removal(&self) -> Option<f64> {
        ratio(self.true_neg, self.true_neg + self.false_pos)
    }

    pub fn scores(&self) -> FilterScores {
        let undefined = self.f1().is_none();
        FilterScores {
            precision: self.precision().unwrap_or(0.0),
            recall: self.recall().unwrap_or(0.0),
            f1: self.f1().unwrap_or(0.0),
            undefined,
        }
    }
}

/// Precision, recall and F1, with undefined ratios reported as 0 and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub undefined: bool,
}

pub fn score_labels(labels: &[Label], verdicts: &[Verdict]) -> Result<ConfusionCounts, SynthError> {
    if labels.len() != verdicts.len() {
        return Err(SynthError::Alignment {
            labels: labels.len(),
            verdicts: verdicts.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (label, v) in labels.iter().zip(verdicts) {
        match (label.is_noise(), v.passed()) {
            (false, true) => c.true_pos += 1,
            (true, true) => c.false_pos += 1,
            (false, false) => c.false_neg += 1,
            (true, false) => c.true_neg += 1,
        }
    }
    Ok(c)
}

pub fn score_filter(
    labeled: &[LabeledEvent],
    verdicts: &[Verdict],
) -> Result<ConfusionCounts, SynthError> {
    let labels: Vec<Label> = labeled.iter().map(|l| l.label).collect();
    score_labels(&labels, verdicts)
}
