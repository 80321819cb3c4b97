//! Event data model, sensor geometry and packetization.
//!
//! Streams are ordered by timestamp. Every reader funnels its raw timestamps
//! through [`TimestampGuard`], which widens them to 64 bits, absorbs small
//! backward jitter and rejects anything larger.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest backward timestamp step absorbed as hardware jitter.
pub const JITTER_TOLERANCE_US: u64 = 1_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("event {index}: timestamp {ts} us is {back} us before its predecessor")]
    Ordering { index: usize, ts: u64, back: u64 },
    #[error("event ({x}, {y}) outside {width}x{height} sensor")]
    OutOfBounds {
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("invalid polarity {0}; expected 0 or 1")]
    Polarity(u8),
    #[error("invalid sensor geometry {width}x{height}")]
    Geometry { width: u16, height: u16 },
    #[error("packet window must be positive")]
    ZeroWindow,
}

/// Sign of the brightness change. `On` is 1 and `Off` is 0, both on the wire
/// and in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Polarity {
    Off = 0,
    On = 1,
}

impl Polarity {
    #[inline]
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::Off => Polarity::On,
            Polarity::On => Polarity::Off,
        }
    }
}

impl TryFrom<u8> for Polarity {
    type Error = EventError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(Polarity::Off),
            1 => Ok(Polarity::On),
            other => Err(EventError::Polarity(other)),
        }
    }
}

/// A single address-event: pixel column, pixel row, timestamp in
/// microseconds and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub ts: u64,
    pub x: u16,
    pub y: u16,
    pub pol: Polarity,
}

impl Event {
    #[inline]
    pub const fn new(x: u16, y: u16, ts: u64, pol: Polarity) -> Self {
        Event { ts, x, y, pol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorGeometry {
    pub width: u16,
    pub height: u16,
}

impl Default for SensorGeometry {
    /// DAVIS 240C resolution.
    fn default() -> Self {
        SensorGeometry::DAVIS240
    }
}

impl SensorGeometry {
    pub const DAVIS240: SensorGeometry = SensorGeometry {
        width: 240,
        height: 180,
    };

    pub fn new(width: u16, height: u16) -> Result<Self, EventError> {
        if width == 0 || height == 0 {
            return Err(EventError::Geometry { width, height });
        }
        Ok(SensorGeometry { width, height })
    }

    #[inline]
    pub fn contains(&self, x: u16, y: u16) -> bool {
        x < self.width && y < self.height
    }

    #[inline]
    pub fn check(&self, e: &Event) -> Result<(), EventError> {
        if self.contains(e.x, e.y) {
            Ok(())
        } else {
            Err(EventError::OutOfBounds {
                x: e.x,
                y: e.y,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Horizontal flip: `(W - 1 - x, y, ts, pol)`.
pub fn mirror_event(e: Event, g: SensorGeometry) -> Result<Event, EventError> {
    g.check(&e)?;
    Ok(Event {
        x: g.width - 1 - e.x,
        ..e
    })
}

/// Widens raw timestamps and enforces ordering at ingest.
///
/// Raw 32-bit counters that jump backwards by more than half their range are
/// treated as a wrap and extended by 2^32. Other backward steps up to
/// [`JITTER_TOLERANCE_US`] are clamped to the previous timestamp; larger ones
/// are ordering errors.
#[derive(Debug, Clone, Default)]
pub struct TimestampGuard {
    last_raw: Option<u64>,
    epoch: u64,
    last: u64,
    index: usize,
}

impl TimestampGuard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accept a raw 32-bit hardware timestamp, unwrapping counter overflow.
    pub fn accept_u32(&mut self, raw: u32) -> Result<u64, EventError> {
        let raw = raw as u64;
        if let Some(prev) = self.last_raw {
            if raw < prev && prev - raw > (1u64 << 31) {
                self.epoch += 1u64 << 32;
            }
        }
        self.last_raw = Some(raw);
        self.accept(self.epoch + raw)
    }

    /// Accept an already 64-bit timestamp.
    pub fn accept(&mut self, ts: u64) -> Result<u64, EventError> {
        let index = self.index;
        self.index += 1;
        if index == 0 || ts >= self.last {
            self.last = ts;
            return Ok(ts);
        }
        let back = self.last - ts;
        if back > JITTER_TOLERANCE_US {
            return Err(EventError::Ordering { index, ts, back });
        }
        Ok(self.last)
    }
}

/// Events grouped into one fixed time window `[window_start, window_end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPacket {
    pub window_start: u64,
    pub window_end: u64,
    pub events: Vec<Event>,
}

impl EventPacket {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// An in-memory, timestamp-ordered event sequence with its sensor geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub geometry: SensorGeometry,
    pub source: String,
    pub events: Vec<Event>,
    /// Scripted recording length. When absent the stream is taken to end one
    /// microsecond after its last event.
    pub duration_us: Option<u64>,
}

impl EventStream {
    pub fn new(geometry: SensorGeometry, source: impl Into<String>, events: Vec<Event>) -> Self {
        EventStream {
            geometry,
            source: source.into(),
            events,
            duration_us: None,
        }
    }

    pub fn with_duration(mut self, duration_us: u64) -> Self {
        self.duration_us = Some(duration_us);
        self
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn duration_us(&self) -> u64 {
        let natural = self.events.last().map_or(0, |e| e.ts + 1);
        self.duration_us.map_or(natural, |d| d.max(natural))
    }

    /// Check geometry and ordering of every event, clamping jitter in place.
    pub fn validate(&mut self) -> Result<(), EventError> {
        let mut guard = TimestampGuard::new();
        for e in &mut self.events {
            self.geometry.check(e)?;
            e.ts = guard.accept(e.ts)?;
        }
        Ok(())
    }

    /// Shift timestamps so the first event sits at 1 us.
    ///
    /// A stored timestamp of 0 means "empty" to the subsampled map, so a
    /// genuine event at t = 0 would be misread by the first-event rule.
    pub fn rebase_to_one(&mut self) {
        let Some(first) = self.events.first().map(|e| e.ts) else {
            return;
        };
        if first == 1 {
            return;
        }
        for e in &mut self.events {
            e.ts = e.ts - first + 1;
        }
        if let Some(d) = self.duration_us.as_mut() {
            *d = d.saturating_sub(first) + 1;
        }
    }

    pub fn mirrored(&self) -> Result<EventStream, EventError> {
        let events = self
            .events
            .iter()
            .map(|&e| mirror_event(e, self.geometry))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EventStream {
            events,
            source: format!("{} (mirrored)", self.source),
            ..self.clone()
        })
    }
}

/// Split `events` into consecutive windows of `window_us`, starting at t = 0.
///
/// Empty windows are kept. Windows run up to `end_us` (or the last event's
/// window when that is later).
pub fn packetize_events(
    events: &[Event],
    window_us: u64,
    end_us: u64,
) -> Result<Vec<EventPacket>, EventError> {
    if window_us == 0 {
        return Err(EventError::ZeroWindow);
    }
    let natural = events.last().map_or(0, |e| e.ts + 1);
    let end = end_us.max(natural);
    let count = end.div_ceil(window_us) as usize;
    let mut packets: Vec<EventPacket> = (0..count as u64)
        .map(|k| EventPacket {
            window_start: k * window_us,
            window_end: (k + 1) * window_us,
            events: Vec::new(),
        })
        .collect();
    let mut prev = 0u64;
    for (index, e) in events.iter().enumerate() {
        if e.ts < prev {
            return Err(EventError::Ordering {
                index,
                ts: e.ts,
                back: prev - e.ts,
            });
        }
        prev = e.ts;
        packets[(e.ts / window_us) as usize].events.push(*e);
    }
    Ok(packets)
}

/// Packetize a whole stream over its duration.
pub fn packetize(stream: &EventStream, window_us: u64) -> Result<Vec<EventPacket>, EventError> {
    packetize_events(&stream.events, window_us, stream.duration_us())
}
