use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use evfilt_core::io::{read_csv, AedatReader};
use evfilt_core::{EventStream, Label, SensorGeometry};

pub struct Recording {
    pub stream: EventStream,
    pub labels: Option<Vec<Label>>,
    /// AEDAT records dropped while reading.
    pub skipped: u64,
}

enum Format {
    Aedat,
    Csv,
}

fn format_of(path: &Path) -> Result<Format> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("aedat" | "aedat2" | "dat") => Ok(Format::Aedat),
        Some("csv") => Ok(Format::Csv),
        _ => bail!(
            "{}: unknown input format (expected .aedat, .aedat2, .dat or .csv)",
            path.display()
        ),
    }
}

/// Read, validate and rebase a recording so its first event sits at 1 us.
/// `sensor` applies to CSV inputs; AEDAT files are always DAVIS240.
pub fn read_recording(path: &Path, sensor: SensorGeometry, lenient: bool) -> Result<Recording> {
    let format = format_of(path)?;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let reader = BufReader::with_capacity(1 << 16, file);
    let mut rec = match format {
        Format::Aedat => {
            let mut aedat = AedatReader::new(reader, lenient)
                .with_context(|| format!("reading {}", path.display()))?;
            let source = aedat
                .header()
                .source()
                .map(str::to_string)
                .unwrap_or_else(|| path.display().to_string());
            let events = aedat
                .by_ref()
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("reading {}", path.display()))?;
            Recording {
                stream: EventStream::new(SensorGeometry::DAVIS240, source, events),
                labels: None,
                skipped: aedat.skipped(),
            }
        }
        Format::Csv => {
            let (mut stream, labels) =
                read_csv(reader, sensor).with_context(|| format!("reading {}", path.display()))?;
            stream.source = path.display().to_string();
            Recording {
                stream,
                labels,
                skipped: 0,
            }
        }
    };
    rec.stream
        .validate()
        .with_context(|| format!("validating {}", path.display()))?;
    rec.stream.rebase_to_one();
    Ok(rec)
}
