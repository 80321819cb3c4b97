//! Temporal Binary Representation frames.
//!
//! Time is cut into bins of `bin_us`. Each bin yields a binary presence map;
//! eight consecutive maps are packed bit-wise into one byte per pixel. The
//! packed frame is then cropped to 227 columns and zero-padded to 227 rows,
//! the input size of common ImageNet-era CNN backbones.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventStream, SensorGeometry};

pub const BITS_PER_FRAME: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TbrError {
    #[error("expected {BITS_PER_FRAME} binary maps, got {0}")]
    MapCount(usize),
    #[error("binary map is {got:?}, expected {expected:?}")]
    MapGeometry {
        expected: (u16, u16),
        got: (u16, u16),
    },
    #[error("bin duration must be positive")]
    ZeroBin,
    #[error("crop {crop:?} larger than padded size {pad:?}")]
    Geometry { crop: (u16, u16), pad: (u16, u16) },
}

/// Which bit holds the earliest bin of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitOrder {
    #[default]
    Msb,
    Lsb,
}

impl BitOrder {
    /// Bit position of bin `j` (0 = earliest).
    #[inline]
    pub fn bit_of(self, bin: usize) -> u8 {
        match self {
            BitOrder::Msb => (BITS_PER_FRAME - 1 - bin) as u8,
            BitOrder::Lsb => bin as u8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TbrConfig {
    pub bin_us: u64,
    pub bit_order: BitOrder,
    /// Kept region, anchored at the top-left pixel.
    pub crop_width: u16,
    pub crop_height: u16,
    pub pad_width: u16,
    pub pad_height: u16,
    /// Emit the trailing incomplete frame with its missing bins cleared.
    pub zero_fill_partial: bool,
}

impl Default for TbrConfig {
    fn default() -> Self {
        TbrConfig {
            // 8 bins span 33.3 ms, one 30 fps frame.
            bin_us: 4_166,
            bit_order: BitOrder::Msb,
            crop_width: 227,
            crop_height: 180,
            pad_width: 227,
            pad_height: 227,
            zero_fill_partial: false,
        }
    }
}

impl TbrConfig {
    pub fn frame_us(&self) -> u64 {
        self.bin_us * BITS_PER_FRAME as u64
    }

    pub fn validate(&self) -> Result<(), TbrError> {
        if self.bin_us == 0 {
            return Err(TbrError::ZeroBin);
        }
        if self.crop_width > self.pad_width || self.crop_height > self.pad_height {
            return Err(TbrError::Geometry {
                crop: (self.crop_width, self.crop_height),
                pad: (self.pad_width, self.pad_height),
            });
        }
        Ok(())
    }
}

/// Per-pixel event presence over one bin, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    pub width: u16,
    pub height: u16,
    bits: Vec<bool>,
}

impl BinaryMap {
    pub fn empty(g: SensorGeometry) -> Self {
        BinaryMap {
            width: g.width,
            height: g.height,
            bits: vec![false; g.pixel_count()],
        }
    }

    #[inline]
    pub fn get(&self, x: u16, y: u16) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u16, y: u16) {
        self.bits[y as usize * self.width as usize + x as usize] = true;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Presence map of `events`; polarity and multiplicity are ignored.
/// Events outside the geometry are skipped.
pub fn binary_bin(events: &[Event], g: SensorGeometry) -> BinaryMap {
    let mut map = BinaryMap::empty(g);
    for e in events.iter().filter(|e| g.contains(e.x, e.y)) {
        map.set(e.x, e.y);
    }
    map
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TbrFrame {
    pub index: usize,
    pub frame_start_us: u64,
    pub width: u16,
    pub height: u16,
    pub pixels: Vec<u8>,
}

impl TbrFrame {
    #[inline]
    pub fn pixel(&self, x: u16, y: u16) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn nonzero(&self) -> usize {
        self.pixels.iter().filter(|&&p| p != 0).count()
    }

    /// Whether bin `bin` of this frame saw an event at `(x, y)`.
    pub fn bin_active(&self, x: u16, y: u16, bin: usize, order: BitOrder) -> bool {
        self.pixel(x, y) >> order.bit_of(bin) & 1 == 1
    }

    /// Every active `(x, y, bin)` triple, row-major then by bin.
    pub fn decode(&self, order: BitOrder) -> Vec<(u16, u16, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.pixel(x, y) == 0 {
                    continue;
                }
                out.extend(
                    (0..BITS_PER_FRAME)
                        .filter(|&b| self.bin_active(x, y, b, order))
                        .map(|b| (x, y, b)),
                );
            }
        }
        out
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    pub fn file_name(&self) -> String {
        format!("frame_{:06}_{}.pgm", self.index, self.frame_start_us)
    }
}

/// Pack eight maps (earliest first) into a cropped, padded frame.
pub fn pack_frame(
    maps: &[BinaryMap],
    cfg: &TbrConfig,
    index: usize,
    frame_start_us: u64,
) -> Result<TbrFrame, TbrError> {
    cfg.validate()?;
    if maps.len() != BITS_PER_FRAME {
        return Err(TbrError::MapCount(maps.len()));
    }
    let (w, h) = (maps[0].width, maps[0].height);
    if let Some(m) = maps.iter().find(|m| (m.width, m.height) != (w, h)) {
        return Err(TbrError::MapGeometry {
            expected: (w, h),
            got: (m.width, m.height),
        });
    }
    let (pw, ph) = (cfg.pad_width as usize, cfg.pad_height as usize);
    let keep_w = cfg.crop_width.min(w);
    let keep_h = cfg.crop_height.min(h);
    let mut pixels = vec![0u8; pw * ph];
    for y in 0..keep_h {
        for x in 0..keep_w {
            let mut byte = 0u8;
            for (bin, map) in maps.iter().enumerate() {
                if map.get(x, y) {
                    byte |= 1 << cfg.bit_order.bit_of(bin);
                }
            }
            pixels[y as usize * pw + x as usize] = byte;
        }
    }
    Ok(TbrFrame {
        index,
        frame_start_us,
        width: cfg.pad_width,
        height: cfg.pad_height,
        pixels,
    })
}

/// Encode a stream into frames; frame `k` covers `[k*8*bin, (k+1)*8*bin)`.
///
/// The trailing incomplete frame is dropped unless `zero_fill_partial` is set.
pub fn encode_stream(stream: &EventStream, cfg: &TbrConfig) -> Result<Vec<TbrFrame>, TbrError> {
    cfg.validate()?;
    let frame_us = cfg.frame_us();
    let duration = stream.duration_us();
    let complete = (duration / frame_us) as usize;
    let frames = if cfg.zero_fill_partial && !duration.is_multiple_of(frame_us) {
        complete + 1
    } else {
        complete
    };
    let g = stream.geometry;
    let mut out = Vec::with_capacity(frames);
    let mut events = stream.events.as_slice();
    for k in 0..frames {
        let start = k as u64 * frame_us;
        let maps: Vec<BinaryMap> = (0..BITS_PER_FRAME as u64)
            .map(|b| {
                let end = start + (b + 1) * cfg.bin_us;
                let split = events.partition_point(|e| e.ts < end);
                let (bin, rest) = events.split_at(split);
                events = rest;
                binary_bin(bin, g)
            })
            .collect();
        out.push(pack_frame(&maps, cfg, k, start)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Polarity;

    const G: SensorGeometry = SensorGeometry::DAVIS240;

    fn maps_with(pattern: [bool; 8]) -> Vec<BinaryMap> {
        pattern
            .iter()
            .map(|&on| {
                let mut m = BinaryMap::empty(G);
                if on {
                    m.set(3, 4);
                }
                m
            })
            .collect()
    }

    #[test]
    fn presence_not_count() {
        assert_eq!(binary_bin(&[], G).count_ones(), 0);
        let five: Vec<_> = (0..5).map(|t| Event::new(7, 9, t, Polarity::On)).collect();
        let m = binary_bin(&five, G);
        assert!(m.get(7, 9));
        assert_eq!(m.count_ones(), 1);
        let both = [
            Event::new(1, 1, 0, Polarity::On),
            Event::new(1, 1, 1, Polarity::Off),
        ];
        assert_eq!(binary_bin(&both, G).count_ones(), 1);
    }

    #[test]
    fn byte_place_values() {
        let cfg = TbrConfig::default();
        let earliest = maps_with([true, false, false, false, false, false, false, false]);
        assert_eq!(pack_frame(&earliest, &cfg, 0, 0).unwrap().pixel(3, 4), 128);
        let lsb = TbrConfig {
            bit_order: BitOrder::Lsb,
            ..cfg.clone()
        };
        assert_eq!(pack_frame(&earliest, &lsb, 0, 0).unwrap().pixel(3, 4), 1);
        assert_eq!(
            pack_frame(&maps_with([true; 8]), &cfg, 0, 0)
                .unwrap()
                .pixel(3, 4),
            255
        );
        assert_eq!(
            pack_frame(&maps_with([false; 8]), &cfg, 0, 0)
                .unwrap()
                .pixel(3, 4),
            0
        );
        let mixed = maps_with([false, true, false, true, false, false, false, true]);
        assert_eq!(
            pack_frame(&mixed, &cfg, 0, 0).unwrap().pixel(3, 4),
            0b0101_0001
        );
    }

    #[test]
    fn crop_and_pad_geometry() {
        let cfg = TbrConfig::default();
        let mut m = BinaryMap::empty(G);
        m.set(226, 179);
        m.set(227, 10);
        m.set(239, 0);
        let maps = vec![m; 8];
        let f = pack_frame(&maps, &cfg, 0, 0).unwrap();
        assert_eq!((f.width, f.height), (227, 227));
        assert_eq!(f.pixels.len(), 227 * 227);
        assert_eq!(f.pixel(226, 179), 255);
        assert_eq!(f.nonzero(), 1);
        assert!((180..227).all(|y| (0..227).all(|x| f.pixel(x, y) == 0)));
    }

    #[test]
    fn wrong_map_count() {
        let cfg = TbrConfig::default();
        let maps = vec![BinaryMap::empty(G); 7];
        assert_eq!(pack_frame(&maps, &cfg, 0, 0), Err(TbrError::MapCount(7)));
    }

    #[test]
    fn one_second_is_thirty_frames() {
        let events = vec![Event::new(5, 5, 500_000, Polarity::On)];
        let s = EventStream::new(G, "t", events).with_duration(1_000_000);
        let frames = encode_stream(&s, &TbrConfig::default()).unwrap();
        assert_eq!(frames.len(), 30);
        assert_eq!(frames.iter().map(TbrFrame::nonzero).sum::<usize>(), 1);
        let zf = TbrConfig {
            zero_fill_partial: true,
            ..TbrConfig::default()
        };
        assert_eq!(encode_stream(&s, &zf).unwrap().len(), 31);
    }

    #[test]
    fn pgm_header() {
        let f = pack_frame(&maps_with([true; 8]), &TbrConfig::default(), 3, 99_984).unwrap();
        let mut buf = Vec::new();
        f.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n227 227\n255\n"));
        assert_eq!(buf.len(), 15 + 227 * 227);
        assert_eq!(f.file_name(), "frame_000003_99984.pgm");
    }
}
