//! Subsampled-map noise filters.
//!
//! The sensor is divided into `s x s` pixel groups with `s = 2^n`; an event's
//! group is found by shifting its coordinates right by `n`. Each group keeps
//! the timestamp and coordinates of the most recent event that landed in it
//! (passed or caught). Five predicates read that memory:
//!
//! | filter               | event is caught when                        |
//! |----------------------|---------------------------------------------|
//! | first event          | `S(X,Y) == 0`                               |
//! | background activity  | `ts - S(X,Y) >= dt_ba`                      |
//! | hot pixel            | `C(X,Y) == (x, y)` (strict: either matches) |
//! | refractory           | `S(X,Y) > 0 && ts - S(X,Y) <= dt_refr`      |
//! | polarity             | no opposite-polarity group in the 3x3       |
//! |                      | neighbourhood within `dt_pol`               |
//!
//! Because the memory is written unconditionally after every event, the map
//! contents seen by event `k` depend only on events `0..k`, never on earlier
//! verdicts. Filter order therefore only changes which filter gets credited
//! with a catch, not whether an event is caught.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventError, EventStream, Polarity, SensorGeometry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("subsampling rate {0} is not a power of two >= 2")]
    NotPowerOfTwo(u32),
    #[error("support times must satisfy dt_refr < dt_ba < dt_pol (got {refr} / {ba} / {pol} us)")]
    SupportOrder { refr: u64, ba: u64, pol: u64 },
    #[error("filter `{0}` listed twice")]
    DuplicateFilter(FilterKind),
    #[error("unknown filter `{0}`")]
    UnknownFilter(String),
    #[error("{0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("filter state ({state}) does not match configuration ({config})")]
    StateMismatch { state: String, config: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    FirstEvent,
    BackgroundActivity,
    HotPixel,
    Refractory,
    Polarity,
}

impl FilterKind {
    pub const ALL: [FilterKind; 5] = [
        FilterKind::FirstEvent,
        FilterKind::BackgroundActivity,
        FilterKind::HotPixel,
        FilterKind::Refractory,
        FilterKind::Polarity,
    ];

    /// Default application order: cheap single-cell predicates first,
    /// background activity last.
    pub const DEFAULT_ORDER: [FilterKind; 4] = [
        FilterKind::FirstEvent,
        FilterKind::Refractory,
        FilterKind::HotPixel,
        FilterKind::BackgroundActivity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FilterKind::FirstEvent => "first_event",
            FilterKind::BackgroundActivity => "background_activity",
            FilterKind::HotPixel => "hot_pixel",
            FilterKind::Refractory => "refractory",
            FilterKind::Polarity => "polarity",
        }
    }

    /// Dense index, stable across releases.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FilterKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FilterKind::ALL
            .into_iter()
            .find(|k| k.id() == s.trim())
            .ok_or_else(|| ConfigError::UnknownFilter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FilterConfigRepr", into = "FilterConfigRepr")]
pub struct FilterConfig {
    shift: u32,
    pub dt_ba_us: u64,
    pub dt_refr_us: u64,
    pub dt_pol_us: u64,
    pub order: Vec<FilterKind>,
    /// Literal conjunction form of the hot-pixel test: catch when either
    /// coordinate matches the group's previous event.
    pub strict_hotpixel: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            shift: 2,
            dt_ba_us: 1_500,
            dt_refr_us: 10,
            dt_pol_us: 5_000,
            order: FilterKind::DEFAULT_ORDER.to_vec(),
            strict_hotpixel: false,
        }
    }
}

impl FilterConfig {
    /// Default configuration at subsampling rate `s`.
    pub fn with_subsampling(s: u32) -> Result<Self, ConfigError> {
        let mut cfg = FilterConfig::default();
        cfg.set_subsampling(s)?;
        Ok(cfg)
    }

    pub fn set_subsampling(&mut self, s: u32) -> Result<(), ConfigError> {
        if s < 2 || !s.is_power_of_two() {
            return Err(ConfigError::NotPowerOfTwo(s));
        }
        self.shift = s.trailing_zeros();
        Ok(())
    }

    /// Subsampling rate `s = 2^n`.
    pub fn subsampling(&self) -> u32 {
        1 << self.shift
    }

    /// Shift amount `n`.
    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn uses(&self, kind: FilterKind) -> bool {
        self.order.contains(&kind)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.shift == 0 || self.shift > 15 {
            return Err(ConfigError::NotPowerOfTwo(
                1u32.checked_shl(self.shift).unwrap_or(0),
            ));
        }
        if !(self.dt_refr_us < self.dt_ba_us && self.dt_ba_us < self.dt_pol_us) {
            return Err(ConfigError::SupportOrder {
                refr: self.dt_refr_us,
                ba: self.dt_ba_us,
                pol: self.dt_pol_us,
            });
        }
        for (i, k) in self.order.iter().enumerate() {
            if self.order[..i].contains(k) {
                return Err(ConfigError::DuplicateFilter(*k));
            }
        }
        Ok(())
    }
}

/// Unvalidated file form of [`FilterConfig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct FilterConfigRepr {
    s: u32,
    dt_ba_us: u64,
    dt_refr_us: u64,
    dt_pol_us: u64,
    order: Vec<FilterKind>,
    strict_hotpixel: bool,
}

impl Default for FilterConfigRepr {
    fn default() -> Self {
        FilterConfig::default().into()
    }
}

impl From<FilterConfig> for FilterConfigRepr {
    fn from(c: FilterConfig) -> Self {
        FilterConfigRepr {
            s: c.subsampling(),
            dt_ba_us: c.dt_ba_us,
            dt_refr_us: c.dt_refr_us,
            dt_pol_us: c.dt_pol_us,
            order: c.order,
            strict_hotpixel: c.strict_hotpixel,
        }
    }
}

impl TryFrom<FilterConfigRepr> for FilterConfig {
    type Error = ConfigError;

    fn try_from(r: FilterConfigRepr) -> Result<Self, Self::Error> {
        let mut cfg = FilterConfig {
            shift: 0,
            dt_ba_us: r.dt_ba_us,
            dt_refr_us: r.dt_refr_us,
            dt_pol_us: r.dt_pol_us,
            order: r.order,
            strict_hotpixel: r.strict_hotpixel,
        };
        cfg.set_subsampling(r.s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of running an event through the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Caught(FilterKind),
}

impl Verdict {
    #[inline]
    pub fn passed(self) -> bool {
        matches!(self, Verdict::Pass)
    }

    #[inline]
    pub fn caught_by(self) -> Option<FilterKind> {
        match self {
            Verdict::Pass => None,
            Verdict::Caught(k) => Some(k),
        }
    }

    #[inline]
    fn from_catch(caught: bool, kind: FilterKind) -> Self {
        if caught {
            Verdict::Caught(kind)
        } else {
            Verdict::Pass
        }
    }
}

/// Map an event's pixel coordinates to its subsampled group.
#[inline]
pub fn subsample_coords(x: u16, y: u16, n: u32) -> (u16, u16) {
    (x >> n, y >> n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    ts: u64,
    x: u16,
    y: u16,
}

/// Mutable filter memory: the subsampled timestamp map, the coordinate map
/// and, when the polarity filter is used, one timestamp map per polarity.
#[derive(Debug, Clone)]
pub struct FilterState {
    geometry: SensorGeometry,
    shift: u32,
    cols: usize,
    rows: usize,
    cells: Vec<Cell>,
    polarity_ts: Option<Vec<[u64; 2]>>,
}

impl FilterState {
    pub fn new(geometry: SensorGeometry, cfg: &FilterConfig) -> Self {
        let s = cfg.subsampling() as usize;
        let cols = (geometry.width as usize).div_ceil(s);
        let rows = (geometry.height as usize).div_ceil(s);
        // (W, H) is never a valid pixel, so no first event self-correlates.
        let empty = Cell {
            ts: 0,
            x: geometry.width,
            y: geometry.height,
        };
        FilterState {
            geometry,
            shift: cfg.shift,
            cols,
            rows,
            cells: vec![empty; cols * rows],
            polarity_ts: cfg
                .uses(FilterKind::Polarity)
                .then(|| vec![[0u64; 2]; cols * rows]),
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    /// Group grid dimensions `(ceil(W/s), ceil(H/s))`.
    pub fn dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    #[inline]
    fn index_of(&self, e: &Event) -> usize {
        let (gx, gy) = subsample_coords(e.x, e.y, self.shift);
        gy as usize * self.cols + gx as usize
    }

    /// `S(X, Y)`; 0 means no event yet.
    pub fn last_ts(&self, gx: usize, gy: usize) -> u64 {
        self.cells[gy * self.cols + gx].ts
    }

    /// `C(X, Y)`; `(W, H)` until the group receives its first event.
    pub fn last_coords(&self, gx: usize, gy: usize) -> (u16, u16) {
        let c = self.cells[gy * self.cols + gx];
        (c.x, c.y)
    }

    /// `S(X, Y, pol)`, when polarity maps are allocated.
    pub fn last_ts_for(&self, gx: usize, gy: usize, pol: Polarity) -> Option<u64> {
        self.polarity_ts
            .as_ref()
            .map(|m| m[gy * self.cols + gx][pol.index()])
    }

    fn matches(&self, cfg: &FilterConfig) -> bool {
        self.shift == cfg.shift && (self.polarity_ts.is_some() || !cfg.uses(FilterKind::Polarity))
    }

    #[inline]
    fn record(&mut self, idx: usize, e: &Event) {
        self.cells[idx] = Cell {
            ts: e.ts,
            x: e.x,
            y: e.y,
        };
        if let Some(m) = self.polarity_ts.as_mut() {
            m[idx][e.pol.index()] = e.ts;
        }
    }

    #[inline]
    fn polarity_supported(&self, e: &Event, dt_pol: u64) -> bool {
        let Some(maps) = self.polarity_ts.as_ref() else {
            return false;
        };
        let (gx, gy) = subsample_coords(e.x, e.y, self.shift);
        let (gx, gy) = (gx as usize, gy as usize);
        let opposite = e.pol.opposite().index();
        let x_lo = gx.saturating_sub(1);
        let x_hi = (gx + 1).min(self.cols - 1);
        let y_lo = gy.saturating_sub(1);
        let y_hi = (gy + 1).min(self.rows - 1);
        (y_lo..=y_hi).any(|ny| {
            (x_lo..=x_hi).any(|nx| {
                let t = maps[ny * self.cols + nx][opposite];
                t > 0 && e.ts.saturating_sub(t) <= dt_pol
            })
        })
    }
}

#[inline]
fn first_event_catches(cell: &Cell) -> bool {
    cell.ts == 0
}

#[inline]
fn background_catches(cell: &Cell, ts: u64, dt_ba: u64) -> bool {
    ts.saturating_sub(cell.ts) >= dt_ba
}

#[inline]
fn hot_pixel_catches(cell: &Cell, e: &Event, strict: bool) -> bool {
    if strict {
        cell.x == e.x || cell.y == e.y
    } else {
        cell.x == e.x && cell.y == e.y
    }
}

#[inline]
fn refractory_catches(cell: &Cell, ts: u64, dt_refr: u64) -> bool {
    cell.ts > 0 && ts.saturating_sub(cell.ts) <= dt_refr
}

/// Passes iff the event's group already holds a timestamp.
pub fn first_event_filter(e: &Event, state: &FilterState) -> Verdict {
    let cell = &state.cells[state.index_of(e)];
    Verdict::from_catch(first_event_catches(cell), FilterKind::FirstEvent)
}

/// Passes iff the group's last event is younger than `dt_ba`.
pub fn background_activity_filter(e: &Event, state: &FilterState, dt_ba: u64) -> Verdict {
    let cell = &state.cells[state.index_of(e)];
    Verdict::from_catch(
        background_catches(cell, e.ts, dt_ba),
        FilterKind::BackgroundActivity,
    )
}

/// Rejects self-correlation: the group's previous event came from this pixel.
pub fn hot_pixel_filter(e: &Event, state: &FilterState, strict: bool) -> Verdict {
    let cell = &state.cells[state.index_of(e)];
    Verdict::from_catch(hot_pixel_catches(cell, e, strict), FilterKind::HotPixel)
}

/// Catches events arriving within `dt_refr` of the group's last event.
pub fn refractory_filter(e: &Event, state: &FilterState, dt_refr: u64) -> Verdict {
    let cell = &state.cells[state.index_of(e)];
    Verdict::from_catch(
        refractory_catches(cell, e.ts, dt_refr),
        FilterKind::Refractory,
    )
}

/// Passes iff some group in the clipped 3x3 neighbourhood saw an event of the
/// opposite polarity within `dt_pol`. Without polarity maps every event is
/// caught.
pub fn polarity_filter(e: &Event, state: &FilterState, dt_pol: u64) -> Verdict {
    Verdict::from_catch(!state.polarity_supported(e, dt_pol), FilterKind::Polarity)
}

#[inline]
fn evaluate(e: &Event, idx: usize, state: &FilterState, cfg: &FilterConfig) -> Verdict {
    let cell = &state.cells[idx];
    for &kind in &cfg.order {
        let caught = match kind {
            FilterKind::FirstEvent => first_event_catches(cell),
            FilterKind::Refractory => refractory_catches(cell, e.ts, cfg.dt_refr_us),
            FilterKind::HotPixel => hot_pixel_catches(cell, e, cfg.strict_hotpixel),
            FilterKind::BackgroundActivity => background_catches(cell, e.ts, cfg.dt_ba_us),
            FilterKind::Polarity => !state.polarity_supported(e, cfg.dt_pol_us),
        };
        if caught {
            return Verdict::Caught(kind);
        }
    }
    Verdict::Pass
}

/// Run `e` through the enabled filters in order, stopping at the first catch,
/// then record it in the maps regardless of the outcome.
pub fn apply_pipeline(
    e: &Event,
    state: &mut FilterState,
    cfg: &FilterConfig,
) -> Result<Verdict, FilterError> {
    if !state.matches(cfg) {
        return Err(FilterError::StateMismatch {
            state: format!(
                "s={}, polarity maps={}",
                1u32 << state.shift,
                state.polarity_ts.is_some()
            ),
            config: format!("s={}, order={:?}", cfg.subsampling(), cfg.order),
        });
    }
    state.geometry.check(e)?;
    let idx = state.index_of(e);
    let verdict = evaluate(e, idx, state, cfg);
    state.record(idx, e);
    Ok(verdict)
}

/// A validated configuration bound to its state.
#[derive(Debug, Clone)]
pub struct FilterPipeline {
    cfg: FilterConfig,
    state: FilterState,
}

impl FilterPipeline {
    pub fn new(geometry: SensorGeometry, cfg: FilterConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let state = FilterState::new(geometry, &cfg);
        Ok(FilterPipeline { cfg, state })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.cfg
    }

    pub fn state(&self) -> &FilterState {
        &self.state
    }

    #[inline]
    pub fn process(&mut self, e: &Event) -> Result<Verdict, EventError> {
        self.state.geometry.check(e)?;
        let idx = self.state.index_of(e);
        let verdict = evaluate(e, idx, &self.state, &self.cfg);
        self.state.record(idx, e);
        Ok(verdict)
    }

    /// Verdicts for a slice of events, appended to `out`.
    pub fn process_all(
        &mut self,
        events: &[Event],
        out: &mut Vec<Verdict>,
    ) -> Result<(), EventError> {
        out.reserve(events.len());
        for e in events {
            out.push(self.process(e)?);
        }
        Ok(())
    }
}

/// Filter a whole stream from fresh state. Returns the passed events and one
/// verdict per input event.
pub fn filter_stream(
    stream: &EventStream,
    cfg: &FilterConfig,
) -> Result<(EventStream, Vec<Verdict>), FilterError> {
    let mut pipeline = FilterPipeline::new(stream.geometry, cfg.clone())?;
    let mut verdicts = Vec::with_capacity(stream.len());
    pipeline.process_all(&stream.events, &mut verdicts)?;
    let events = stream
        .events
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.passed())
        .map(|(e, _)| *e)
        .collect();
    let filtered = EventStream {
        geometry: stream.geometry,
        source: format!("{} (filtered)", stream.source),
        events,
        duration_us: Some(stream.duration_us()),
    };
    Ok((filtered, verdicts))
}

#[cfg(test)]
mod tests {
    use super::*;

    const G16: SensorGeometry = SensorGeometry {
        width: 16,
        height: 16,
    };

    fn on(x: u16, y: u16, ts: u64) -> Event {
        Event::new(x, y, ts, Polarity::On)
    }

    fn off(x: u16, y: u16, ts: u64) -> Event {
        Event::new(x, y, ts, Polarity::Off)
    }

    fn state_with(cfg: &FilterConfig, history: &[Event]) -> FilterState {
        let mut st = FilterState::new(SensorGeometry::DAVIS240, cfg);
        let empty = FilterConfig {
            order: vec![],
            ..cfg.clone()
        };
        for e in history {
            apply_pipeline(e, &mut st, &empty).unwrap();
        }
        st
    }

    #[test]
    fn shift_examples() {
        assert_eq!(subsample_coords(0, 0, 2), (0, 0));
        assert_eq!(subsample_coords(239, 179, 2), (59, 44));
    }

    #[test]
    fn map_dimensions_use_ceiling() {
        let cfg = FilterConfig::with_subsampling(4).unwrap();
        let st = FilterState::new(SensorGeometry::new(10, 7).unwrap(), &cfg);
        assert_eq!(st.dims(), (3, 2));
        let st = FilterState::new(SensorGeometry::DAVIS240, &cfg);
        assert_eq!(st.dims(), (60, 45));
    }

    #[test]
    fn first_event_rule() {
        let cfg = FilterConfig::default();
        let st = state_with(&cfg, &[]);
        assert_eq!(
            first_event_filter(&on(3, 3, 100), &st),
            Verdict::Caught(FilterKind::FirstEvent)
        );
        let st = state_with(&cfg, &[on(0, 0, 100)]);
        assert_eq!(first_event_filter(&on(3, 3, 9_000_000), &st), Verdict::Pass);
    }

    #[test]
    fn background_activity_boundaries() {
        let cfg = FilterConfig::default();
        let st = state_with(&cfg, &[on(8, 8, 4_000)]);
        assert_eq!(
            background_activity_filter(&on(9, 9, 5_000), &st, 1_500),
            Verdict::Pass
        );
        assert_eq!(
            background_activity_filter(&on(9, 9, 10_000), &st, 1_500),
            Verdict::Caught(FilterKind::BackgroundActivity)
        );
        assert_eq!(
            background_activity_filter(&on(9, 9, 5_500), &st, 1_500),
            Verdict::Caught(FilterKind::BackgroundActivity)
        );
        assert_eq!(
            background_activity_filter(&on(9, 9, 5_499), &st, 1_500),
            Verdict::Pass
        );
    }

    #[test]
    fn hot_pixel_modes() {
        let cfg = FilterConfig::default();
        let st = state_with(&cfg, &[on(5, 7, 10)]);
        let hot = Verdict::Caught(FilterKind::HotPixel);
        assert_eq!(hot_pixel_filter(&on(5, 7, 20), &st, false), hot);
        assert_eq!(hot_pixel_filter(&on(5, 7, 20), &st, true), hot);
        assert_eq!(hot_pixel_filter(&on(5, 4, 20), &st, false), Verdict::Pass);
        assert_eq!(hot_pixel_filter(&on(5, 4, 20), &st, true), hot);
        assert_eq!(hot_pixel_filter(&on(6, 4, 20), &st, true), Verdict::Pass);
        // Fresh group: sentinel coordinates never match, including pixel (0, 0).
        let st = state_with(&cfg, &[]);
        assert_eq!(hot_pixel_filter(&on(0, 0, 20), &st, false), Verdict::Pass);
        assert_eq!(hot_pixel_filter(&on(0, 0, 20), &st, true), Verdict::Pass);
    }

    #[test]
    fn refractory_boundaries() {
        let cfg = FilterConfig::default();
        let st = state_with(&cfg, &[on(1, 1, 1_000)]);
        let refr = Verdict::Caught(FilterKind::Refractory);
        assert_eq!(refractory_filter(&on(2, 2, 1_005), &st, 10), refr);
        assert_eq!(refractory_filter(&on(2, 2, 1_010), &st, 10), refr);
        assert_eq!(refractory_filter(&on(2, 2, 1_011), &st, 10), Verdict::Pass);
        let st = state_with(&cfg, &[]);
        assert_eq!(refractory_filter(&on(2, 2, 3), &st, 10), Verdict::Pass);
    }

    #[test]
    fn polarity_neighbourhood() {
        let cfg = FilterConfig {
            order: vec![FilterKind::Polarity],
            ..FilterConfig::with_subsampling(4).unwrap()
        };
        // OFF event in the group to the right, 2 ms earlier.
        let st = state_with(&cfg, &[off(44, 40, 8_000)]);
        assert_eq!(
            polarity_filter(&on(40, 40, 10_000), &st, 5_000),
            Verdict::Pass
        );
        // Only ON history around: shadow-like.
        let st = state_with(&cfg, &[on(44, 40, 8_000), on(40, 44, 9_000)]);
        assert_eq!(
            polarity_filter(&on(40, 40, 10_000), &st, 5_000),
            Verdict::Caught(FilterKind::Polarity)
        );
        // Two groups away is outside the neighbourhood.
        let st = state_with(&cfg, &[off(48, 40, 9_000)]);
        assert_eq!(
            polarity_filter(&on(40, 40, 10_000), &st, 5_000),
            Verdict::Caught(FilterKind::Polarity)
        );
        // Corner groups clip to the sensor.
        let st = state_with(&cfg, &[off(4, 4, 9_000)]);
        assert_eq!(
            polarity_filter(&on(0, 0, 10_000), &st, 5_000),
            Verdict::Pass
        );
        let st = state_with(&cfg, &[off(235, 175, 9_000)]);
        assert_eq!(
            polarity_filter(&on(239, 179, 10_000), &st, 5_000),
            Verdict::Pass
        );
        assert_eq!(st.last_ts_for(58, 43, Polarity::Off), Some(9_000));
    }

    #[test]
    fn caught_events_still_update_state() {
        let cfg = FilterConfig::default();
        let mut st = FilterState::new(G16, &cfg);
        let first = apply_pipeline(&on(1, 1, 100), &mut st, &cfg).unwrap();
        assert_eq!(first, Verdict::Caught(FilterKind::FirstEvent));
        assert_eq!(st.last_ts(0, 0), 100);
        assert_eq!(st.last_coords(0, 0), (1, 1));
        let second = apply_pipeline(&on(2, 1, 200), &mut st, &cfg).unwrap();
        assert_eq!(second, Verdict::Pass);
    }

    #[test]
    fn empty_pipeline_passes_and_records() {
        let cfg = FilterConfig {
            order: vec![],
            ..FilterConfig::default()
        };
        let mut st = FilterState::new(G16, &cfg);
        for (i, e) in [on(1, 1, 5), on(1, 1, 6), on(15, 15, 7)].iter().enumerate() {
            assert_eq!(
                apply_pipeline(e, &mut st, &cfg).unwrap(),
                Verdict::Pass,
                "{i}"
            );
        }
        assert_eq!(st.last_ts(3, 3), 7);
        assert_eq!(st.last_coords(3, 3), (15, 15));
    }

    #[test]
    fn pipeline_errors() {
        let cfg = FilterConfig::default();
        let mut st = FilterState::new(G16, &cfg);
        assert!(matches!(
            apply_pipeline(&on(16, 0, 5), &mut st, &cfg),
            Err(FilterError::Event(EventError::OutOfBounds { .. }))
        ));
        let s8 = FilterConfig::with_subsampling(8).unwrap();
        assert!(matches!(
            apply_pipeline(&on(1, 0, 5), &mut st, &s8),
            Err(FilterError::StateMismatch { .. })
        ));
        let pol = FilterConfig {
            order: vec![FilterKind::Polarity],
            ..FilterConfig::default()
        };
        assert!(matches!(
            apply_pipeline(&on(1, 0, 5), &mut st, &pol),
            Err(FilterError::StateMismatch { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            FilterConfig::with_subsampling(3),
            Err(ConfigError::NotPowerOfTwo(3))
        );
        assert_eq!(
            FilterConfig::with_subsampling(1),
            Err(ConfigError::NotPowerOfTwo(1))
        );
        assert_eq!(
            FilterConfig::with_subsampling(0),
            Err(ConfigError::NotPowerOfTwo(0))
        );
        let cfg = FilterConfig::with_subsampling(8).unwrap();
        assert_eq!((cfg.subsampling(), cfg.shift()), (8, 3));
        let bad = FilterConfig {
            dt_refr_us: 2_000,
            ..FilterConfig::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(ConfigError::SupportOrder { .. })
        ));
        let dup = FilterConfig {
            order: vec![FilterKind::HotPixel, FilterKind::HotPixel],
            ..FilterConfig::default()
        };
        assert_eq!(
            dup.validate(),
            Err(ConfigError::DuplicateFilter(FilterKind::HotPixel))
        );
        assert_eq!("hot_pixel".parse::<FilterKind>(), Ok(FilterKind::HotPixel));
        assert!("hot".parse::<FilterKind>().is_err());
    }

    #[test]
    fn filter_stream_keeps_passed_in_order() {
        let events = vec![on(0, 0, 1), on(1, 0, 100), on(1, 0, 105), on(2, 0, 400)];
        let stream = EventStream::new(G16, "t", events.clone());
        let (out, verdicts) = filter_stream(&stream, &FilterConfig::default()).unwrap();
        assert_eq!(
            verdicts,
            [
                Verdict::Caught(FilterKind::FirstEvent),
                Verdict::Pass,
                Verdict::Caught(FilterKind::Refractory),
                Verdict::Pass
            ]
        );
        assert_eq!(out.events, [events[1], events[3]]);
    }
}
