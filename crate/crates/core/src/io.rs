//! Event file formats.
//!
//! # AEDAT 2.0
//!
//! A text header of lines starting with `#` (the first is `#!AER-DAT2.0`),
//! terminated by CRLF or LF, followed by 8-byte big-endian records:
//! a 32-bit address word then a 32-bit microsecond timestamp. DAVIS240
//! polarity-event addresses decode as:
//!
//! | bits   | field                               |
//! |--------|-------------------------------------|
//! | 10     | external/special event flag (skip)  |
//! | 11     | polarity, 1 = ON                    |
//! | 12..22 | x                                   |
//! | 22..31 | y                                   |
//! | 31     | APS/IMU sample flag (skip)          |
//!
//! One ON event at (x=1, y=2), t=100 us is the record
//! `00 80 18 00 00 00 00 64`.
//!
//! # CSV
//!
//! `ts_us,x,y,pol` with one header row and an optional trailing `label`
//! column for synthetic ground truth.

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

use crate::event::{Event, EventError, EventStream, Polarity, SensorGeometry, TimestampGuard};
use crate::synth::{Label, LabeledEvent};

pub const AEDAT2_MAGIC: &str = "#!AER-DAT2.0";

/// DAVIS240 address-word layout.
pub mod davis240 {
    pub const SPECIAL_BIT: u32 = 1 << 10;
    pub const POL_SHIFT: u32 = 11;
    pub const X_SHIFT: u32 = 12;
    pub const X_MASK: u32 = 0x3FF;
    pub const Y_SHIFT: u32 = 22;
    pub const Y_MASK: u32 = 0x1FF;
    pub const APS_BIT: u32 = 1 << 31;
    pub const WIDTH: u16 = 240;
    pub const HEIGHT: u16 = 180;
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an AEDAT 2.0 file: first line is {0:?}")]
    BadMagic(String),
    #[error("truncated record at byte offset {offset}: {len} of 8 bytes")]
    Truncated { offset: u64, len: usize },
    #[error("record at byte offset {offset}: {source}")]
    Record { offset: u64, source: EventError },
    #[error("timestamp {0} us does not fit the 32-bit AEDAT field")]
    TimestampRange(u64),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Event(#[from] EventError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AedatHeader {
    pub version: String,
    pub comments: Vec<String>,
}

impl AedatHeader {
    /// The declared source, from a `# Source:`-style comment when present.
    pub fn source(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let c = c.trim_start_matches('#').trim();
            c.strip_prefix("Source:")
                .or_else(|| c.strip_prefix("AEChip:"))
                .map(str::trim)
        })
    }
}

pub fn encode_davis240_address(e: &Event) -> u32 {
    use davis240::*;
    ((e.y as u32 & Y_MASK) << Y_SHIFT)
        | ((e.x as u32 & X_MASK) << X_SHIFT)
        | ((e.pol.as_u8() as u32) << POL_SHIFT)
}

/// `None` for non-polarity records.
pub fn decode_davis240_address(addr: u32) -> Option<(u16, u16, Polarity)> {
    use davis240::*;
    if addr & (SPECIAL_BIT | APS_BIT) != 0 {
        return None;
    }
    let x = ((addr >> X_SHIFT) & X_MASK) as u16;
    let y = ((addr >> Y_SHIFT) & Y_MASK) as u16;
    let pol = if (addr >> POL_SHIFT) & 1 == 1 {
        Polarity::On
    } else {
        Polarity::Off
    };
    Some((x, y, pol))
}

/// A record with y in 140..144 also begins with `#`. Its second byte is
/// `(y & 3) << 6 | x >> 4` with `x >> 4 < 15`, which no text header line
/// (`# ...`, `#!...`, `#<...`) can produce.
fn starts_header_line(buf: &[u8]) -> bool {
    match buf {
        [b'#', second, ..] => *second >= 0x20 && (second & 0x3F) >= 15,
        [b'#'] => true,
        _ => false,
    }
}

/// Streaming AEDAT 2.0 reader yielding DAVIS240 polarity events.
pub struct AedatReader<R> {
    inner: R,
    header: AedatHeader,
    offset: u64,
    guard: TimestampGuard,
    lenient: bool,
    skipped: u64,
    done: bool,
}

impl<R: BufRead> AedatReader<R> {
    /// Parse the header. With `lenient`, out-of-range records are skipped
    /// instead of failing the read.
    pub fn new(mut inner: R, lenient: bool) -> Result<Self, FormatError> {
        let mut header = AedatHeader::default();
        let mut offset = 0u64;
        let mut line = Vec::new();
        loop {
            let buf = inner.fill_buf()?;
            if !starts_header_line(buf) {
                break;
            }
            line.clear();
            offset += inner.read_until(b'\n', &mut line)? as u64;
            let text = String::from_utf8_lossy(&line)
                .trim_end_matches(['\r', '\n'])
                .to_string();
            if header.version.is_empty() {
                header.version = text;
            } else {
                header.comments.push(text);
            }
        }
        if header.version != AEDAT2_MAGIC {
            return Err(FormatError::BadMagic(header.version));
        }
        Ok(AedatReader {
            inner,
            header,
            offset,
            guard: TimestampGuard::new(),
            lenient,
            skipped: 0,
            done: false,
        })
    }

    pub fn header(&self) -> &AedatHeader {
        &self.header
    }

    /// Records dropped so far (special, APS/IMU, or out of range when lenient).
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    fn next_record(&mut self) -> Result<Option<Event>, FormatError> {
        let geometry = SensorGeometry::DAVIS240;
        loop {
            let mut rec = [0u8; 8];
            let mut len = 0;
            while len < 8 {
                match self.inner.read(&mut rec[len..]) {
                    Ok(0) => break,
                    Ok(n) => len += n,
                    Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                    Err(e) => return Err(e.into()),
                }
            }
            let offset = self.offset;
            if len == 0 {
                return Ok(None);
            }
            if len < 8 {
                return Err(FormatError::Truncated { offset, len });
            }
            self.offset += 8;
            let addr = u32::from_be_bytes([rec[0], rec[1], rec[2], rec[3]]);
            let raw_ts = u32::from_be_bytes([rec[4], rec[5], rec[6], rec[7]]);
            let Some((x, y, pol)) = decode_davis240_address(addr) else {
                self.skipped += 1;
                continue;
            };
            let e = Event::new(x, y, 0, pol);
            if let Err(source) = geometry.check(&e) {
                if self.lenient {
                    self.skipped += 1;
                    continue;
                }
                return Err(FormatError::Record { offset, source });
            }
            let ts = self
                .guard
                .accept_u32(raw_ts)
                .map_err(|source| FormatError::Record { offset, source })?;
            return Ok(Some(Event { ts, ..e }));
        }
    }
}

impl<R: BufRead> Iterator for AedatReader<R> {
    type Item = Result<Event, FormatError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_record() {
            Ok(Some(e)) => Some(Ok(e)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

pub fn read_aedat2(bytes: &[u8], lenient: bool) -> Result<EventStream, FormatError> {
    let reader = AedatReader::new(bytes, lenient)?;
    let source = reader.header().source().unwrap_or("aedat2").to_string();
    let events = reader.collect::<Result<Vec<_>, _>>()?;
    Ok(EventStream::new(SensorGeometry::DAVIS240, source, events))
}

pub fn write_aedat2<W: Write>(stream: &EventStream, mut out: W) -> Result<(), FormatError> {
    write!(out, "{AEDAT2_MAGIC}\r\n")?;
    write!(out, "# This is a raw AE data file - do not edit\r\n")?;
    write!(
        out,
        "# Data format is int32 address, int32 timestamp (8 bytes total)\r\n"
    )?;
    write!(
        out,
        "# Source: {}\r\n",
        stream.source.replace(['\r', '\n'], " ")
    )?;
    let g = SensorGeometry::DAVIS240;
    let mut buf = Vec::with_capacity(8 * 4096);
    for e in &stream.events {
        g.check(e)?;
        let ts = u32::try_from(e.ts).map_err(|_| FormatError::TimestampRange(e.ts))?;
        buf.extend_from_slice(&encode_davis240_address(e).to_be_bytes());
        buf.extend_from_slice(&ts.to_be_bytes());
        if buf.len() >= 8 * 4096 {
            out.write_all(&buf)?;
            buf.clear();
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Streaming CSV reader. Yields events with their label when the file has a
/// `label` column.
pub struct CsvEventReader<R: Read> {
    records: csv::StringRecordsIntoIter<R>,
    has_label: bool,
    geometry: SensorGeometry,
    guard: TimestampGuard,
    line: u64,
}

impl<R: Read> CsvEventReader<R> {
    pub fn new(inner: R, geometry: SensorGeometry) -> Result<Self, FormatError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(inner);
        let headers = rdr.headers().map_err(|e| parse_error(1, e))?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        let has_label = match cols.as_slice() {
            ["ts_us", "x", "y", "pol"] => false,
            ["ts_us", "x", "y", "pol", "label"] => true,
            _ => {
                return Err(FormatError::Parse {
                    line: 1,
                    message: format!("unexpected header {:?}", cols.join(",")),
                })
            }
        };
        Ok(CsvEventReader {
            records: rdr.into_records(),
            has_label,
            geometry,
            guard: TimestampGuard::new(),
            line: 1,
        })
    }

    pub fn has_label(&self) -> bool {
        self.has_label
    }

    fn parse(&mut self, rec: &csv::StringRecord) -> Result<LabeledEvent, FormatError> {
        let line = rec.position().map_or(self.line, |p| p.line());
        let field = |i: usize, name: &str| -> Result<&str, FormatError> {
            rec.get(i).ok_or_else(|| FormatError::Parse {
                line,
                message: format!("missing {name}"),
            })
        };
        let num = |i: usize, name: &str| -> Result<u64, FormatError> {
            field(i, name)?
                .parse::<u64>()
                .map_err(|e| FormatError::Parse {
                    line,
                    message: format!("{name}: {e}"),
                })
        };
        let ts = num(0, "ts_us")?;
        let small = |v: u64, name: &str| {
            u16::try_from(v).map_err(|_| FormatError::Parse {
                line,
                message: format!("{name} {v} out of range"),
            })
        };
        let x = small(num(1, "x")?, "x")?;
        let y = small(num(2, "y")?, "y")?;
        let pol_raw = num(3, "pol")?;
        let pol = u8::try_from(pol_raw)
            .ok()
            .and_then(|p| Polarity::try_from(p).ok())
            .ok_or_else(|| FormatError::Parse {
                line,
                message: format!("pol must be 0 or 1, got {pol_raw}"),
            })?;
        let label = if self.has_label {
            let raw = field(4, "label")?;
            raw.parse::<Label>().map_err(|_| FormatError::Parse {
                line,
                message: format!("unknown label {raw:?}"),
            })?
        } else {
            Label::Signal
        };
        let e = Event::new(x, y, ts, pol);
        self.geometry
            .check(&e)
            .map_err(|source| FormatError::Parse {
                line,
                message: source.to_string(),
            })?;
        let ts = self.guard.accept(ts).map_err(|source| FormatError::Parse {
            line,
            message: source.to_string(),
        })?;
        Ok(LabeledEvent {
            event: Event { ts, ..e },
            label,
        })
    }
}

fn parse_error(line: u64, e: csv::Error) -> FormatError {
    let line = e.position().map_or(line, |p| p.line());
    FormatError::Parse {
        line,
        message: e.to_string(),
    }
}

impl<R: Read> Iterator for CsvEventReader<R> {
    type Item = Result<LabeledEvent, FormatError>;

    fn next(&mut self) -> Option<Self::Item> {
        let rec = match self.records.next()? {
            Ok(r) => r,
            Err(e) => return Some(Err(parse_error(self.line + 1, e))),
        };
        self.line += 1;
        Some(self.parse(&rec))
    }
}

/// Read a CSV event file; labels are returned when the file carries them.
pub fn read_csv<R: Read>(
    inner: R,
    geometry: SensorGeometry,
) -> Result<(EventStream, Option<Vec<Label>>), FormatError> {
    let reader = CsvEventReader::new(inner, geometry)?;
    let has_label = reader.has_label();
    let rows = reader.collect::<Result<Vec<_>, _>>()?;
    let labels = has_label.then(|| rows.iter().map(|r| r.label).collect());
    let events = rows.into_iter().map(|r| r.event).collect();
    Ok((EventStream::new(geometry, "csv", events), labels))
}

pub fn write_csv<W: Write>(events: &[Event], out: W) -> Result<(), FormatError> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "ts_us,x,y,pol")?;
    for e in events {
        writeln!(w, "{},{},{},{}", e.ts, e.x, e.y, e.pol.as_u8())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labeled_csv<W: Write>(events: &[LabeledEvent], out: W) -> Result<(), FormatError> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "ts_us,x,y,pol,label")?;
    for le in events {
        let e = le.event;
        writeln!(w, "{},{},{},{},{}", e.ts, e.x, e.y, e.pol.as_u8(), le.label)?;
    }
    w.flush()?;
    Ok(())
}
