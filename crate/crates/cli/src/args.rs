use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use evfilt_core::{FilterKind, SensorGeometry, ToolConfig};

#[derive(Debug, Parser)]
#[command(
    name = "evfilt",
    version,
    about = "Denoise event-camera recordings and turn them into learning inputs",
    long_about = "Denoise event-camera recordings with subsampled timestamp-map filters, \
                  measure how much each packet loses, and export TBR frames or ROI features.\n\n\
                  Inputs ending in .aedat, .aedat2 or .dat are read as AEDAT 2.0 (DAVIS240); \
                  .csv inputs use the header ts_us,x,y,pol with an optional label column. \
                  Timestamps are shifted so every stream starts at 1 us.\n\n\
                  Every run writes a JSON manifest that `evfilt replay` can re-execute."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic scene script to a labelled CSV stream.
    Synth(SynthArgs),
    /// Run the filter pipeline; write filtered events, verdicts and packet metrics.
    Filter(FilterArgs),
    /// Encode a stream into 8-bit Temporal Binary Representation frames.
    Tbr(TbrArgs),
    /// Extract region-of-interest features at a fixed cadence.
    Roi(RoiArgs),
    /// Summarize metrics CSVs as a table and SVG charts.
    Report(ReportArgs),
    /// Re-run a recorded manifest and verify its outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene script (TOML).
    pub script: PathBuf,
    /// Labelled CSV output.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Override the script's noise seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Skip AEDAT records outside the sensor instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Sensor size for CSV inputs, as WIDTHxHEIGHT.
    #[arg(long, default_value = "240x180", value_parser = parse_geometry)]
    pub sensor: SensorGeometry,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input recordings.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short = 'O', long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Files processed in parallel (default: available cores).
    #[arg(short, long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct TbrArgs {
    pub input: PathBuf,
    #[arg(short = 'O', long)]
    pub out_dir: PathBuf,
    /// Run the filter pipeline before encoding.
    #[arg(long)]
    pub prefilter: bool,
    /// Also write each frame as PNG.
    #[arg(long)]
    pub png: bool,
    #[command(flatten)]
    pub input_opts: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct RoiArgs {
    pub input: PathBuf,
    /// Feature CSV; the centred, means and mirrored variants are written beside it.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Run the filter pipeline before extraction.
    #[arg(long)]
    pub prefilter: bool,
    /// Also write the horizontally mirrored sequence.
    #[arg(long)]
    pub mirror: bool,
    #[command(flatten)]
    pub input_opts: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Per-packet metrics CSVs written by `evfilt filter`.
    #[arg(required = true)]
    pub metrics: Vec<PathBuf>,
    #[arg(short = 'O', long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Configuration file plus per-key overrides. Flags win over the file, the
/// file wins over built-in defaults.
#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// TOML configuration file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Subsampling rate (power of two, at least 2).
    #[arg(short, long)]
    pub s: Option<u32>,
    /// Background-activity support time.
    #[arg(long, value_name = "US")]
    pub dt_ba_us: Option<u64>,
    /// Refractory support time.
    #[arg(long, value_name = "US")]
    pub dt_refr_us: Option<u64>,
    /// Polarity support time.
    #[arg(long, value_name = "US")]
    pub dt_pol_us: Option<u64>,
    /// Enabled filters in evaluation order, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub filters: Option<Vec<FilterKind>>,
    /// Catch hot-pixel events when either coordinate repeats.
    #[arg(long)]
    pub strict_hotpixel: bool,
    /// Packet length for instantaneous metrics.
    #[arg(long, value_name = "US")]
    pub packet_us: Option<u64>,
    /// TBR bin length.
    #[arg(long, value_name = "US")]
    pub bin_us: Option<u64>,
    /// Keep the trailing partial TBR frame, zero-filling missing bins.
    #[arg(long)]
    pub zero_fill_partial: bool,
    /// ROI interval length.
    #[arg(long, value_name = "US")]
    pub interval_us: Option<u64>,
    /// Events a ROI row or column needs to count as active.
    #[arg(long, value_name = "N")]
    pub activity_threshold: Option<u32>,
    /// Events a ROI interval needs to yield a detection.
    #[arg(long, value_name = "N")]
    pub min_events: Option<usize>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ToolConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                ToolConfig::from_toml(&text)
                    .with_context(|| format!("in config {}", path.display()))?
            }
            None => ToolConfig::default(),
        };
        if let Some(s) = self.s {
            cfg.filter.set_subsampling(s)?;
        }
        if let Some(v) = self.dt_ba_us {
            cfg.filter.dt_ba_us = v;
        }
        if let Some(v) = self.dt_refr_us {
            cfg.filter.dt_refr_us = v;
        }
        if let Some(v) = self.dt_pol_us {
            cfg.filter.dt_pol_us = v;
        }
        if let Some(order) = &self.filters {
            cfg.filter.order = order.clone();
        }
        cfg.filter.strict_hotpixel |= self.strict_hotpixel;
        if let Some(v) = self.packet_us {
            cfg.packet_us = v;
        }
        if let Some(v) = self.bin_us {
            cfg.tbr.bin_us = v;
        }
        cfg.tbr.zero_fill_partial |= self.zero_fill_partial;
        if let Some(v) = self.interval_us {
            cfg.roi.interval_us = v;
        }
        if let Some(v) = self.activity_threshold {
            cfg.roi.activity_threshold = v;
        }
        if let Some(v) = self.min_events {
            cfg.roi.min_events = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_geometry(s: &str) -> Result<SensorGeometry, String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    SensorGeometry::new(w, h).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = std::env::temp_dir().join(format!("evfilt-args-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        fs::write(
            &path,
            "packet_us = 5000\n[filter]\ns = 2\ndt_ba_us = 2000\n",
        )
        .unwrap();
        let args = ConfigArgs {
            config: Some(path),
            dt_ba_us: Some(1_200),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.packet_us, 5_000);
        assert_eq!(cfg.filter.subsampling(), 2);
        assert_eq!(cfg.filter.dt_ba_us, 1_200);
        assert_eq!(cfg.filter.dt_refr_us, 10);
        fs::remove_dir_all(dir).unwrap();

        let bad = ConfigArgs {
            s: Some(3),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn geometry_flag() {
        assert_eq!(
            parse_geometry("16x12").unwrap(),
            SensorGeometry::new(16, 12).unwrap()
        );
        assert!(parse_geometry("16").is_err());
        assert!(parse_geometry("0x4").is_err());
    }
}
