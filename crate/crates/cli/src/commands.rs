use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use evfilt_core::io::{write_csv, write_labeled_csv};
use evfilt_core::metrics::full_filter_spikes;
use evfilt_core::roi::{extract_sequence, mirror_sequence, write_features_csv, zero_center};
use evfilt_core::synth::{render_scene, score_labels};
use evfilt_core::tbr::encode_stream;
use evfilt_core::{
    build_series, filter_stream, packetize, pct_filtered, EventStream, FilterKind, LabeledEvent,
    RoiFeature, SceneScript, SensorGeometry, SeriesMode, ToolConfig, Verdict,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ingest::read_recording;
use crate::manifest::sibling;

pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::with_capacity(1 << 16, file))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn geometry(sensor: [u16; 2]) -> Result<SensorGeometry> {
    Ok(SensorGeometry::new(sensor[0], sensor[1])?)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .unwrap_or_default()
        .to_string_lossy()
        .into_owned()
}

pub fn synth(script_path: &Path, output: &Path, seed: Option<u64>) -> Result<Outcome> {
    let text = fs::read_to_string(script_path)
        .with_context(|| format!("reading {}", script_path.display()))?;
    let mut script =
        SceneScript::from_toml(&text).with_context(|| format!("in {}", script_path.display()))?;
    if let Some(seed) = seed {
        script.noise.rng_seed = seed;
    }
    let events = render_scene(&script)?;
    let mut w = create(output)?;
    write_labeled_csv(&events, &mut w)?;
    finish(w, output)?;

    let mut by_label = BTreeMap::new();
    for e in &events {
        *by_label.entry(e.label.as_str()).or_insert(0u64) += 1;
    }
    println!("{}: {} events", output.display(), events.len());
    Ok(Outcome {
        outputs: vec![output.to_path_buf()],
        summary: json!({
            "events": events.len(),
            "duration_us": script.duration_us,
            "seed": script.noise.rng_seed,
            "labels": by_label,
        }),
    })
}

fn write_verdicts(path: &Path, stream: &EventStream, verdicts: &[Verdict]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "ts_us,x,y,pol,verdict")?;
    for (e, v) in stream.events.iter().zip(verdicts) {
        let tag = v.caught_by().map_or("pass", FilterKind::id);
        writeln!(w, "{},{},{},{},{tag}", e.ts, e.x, e.y, e.pol.as_u8())?;
    }
    finish(w, path)
}

fn filter_one(
    input: &Path,
    out_dir: &Path,
    cfg: &ToolConfig,
    sensor: SensorGeometry,
    lenient: bool,
) -> Result<(Vec<PathBuf>, Value)> {
    let rec = read_recording(input, sensor, lenient)?;
    let (kept, verdicts) = filter_stream(&rec.stream, &cfg.filter)?;
    let name = stem(input);

    let filtered = out_dir.join(format!("{name}.filtered.csv"));
    let mut w = create(&filtered)?;
    match &rec.labels {
        Some(labels) => {
            let passed: Vec<LabeledEvent> = rec
                .stream
                .events
                .iter()
                .zip(labels)
                .zip(&verdicts)
                .filter(|(_, v)| v.passed())
                .map(|((&event, &label), _)| LabeledEvent { event, label })
                .collect();
            write_labeled_csv(&passed, &mut w)?;
        }
        None => write_csv(&kept.events, &mut w)?,
    }
    finish(w, &filtered)?;

    let verdict_path = out_dir.join(format!("{name}.verdicts.csv"));
    write_verdicts(&verdict_path, &rec.stream, &verdicts)?;

    let packets = packetize(&rec.stream, cfg.packet_us)?;
    let series = build_series(&verdicts, &packets, SeriesMode::Instantaneous)?;
    let metrics_path = out_dir.join(format!("{name}.metrics.csv"));
    let mut w = create(&metrics_path)?;
    series.write_csv(&cfg.filter.order, &mut w)?;
    finish(w, &metrics_path)?;

    let totals = series.totals();
    let pct = pct_filtered(totals.received, totals.caught)?;
    let caught_by: BTreeMap<&str, u64> = cfg
        .filter
        .order
        .iter()
        .map(|k| (k.id(), totals.caught_by.get(*k)))
        .collect();
    let mut summary = json!({
        "input": input,
        "events": rec.stream.len(),
        "passed": kept.len(),
        "caught": totals.caught,
        "pct_filtered": pct,
        "caught_by": caught_by,
        "packets": series.packets.len(),
        "full_filter_runs": full_filter_spikes(&series).len(),
        "skipped_records": rec.skipped,
    });
    if let Some(labels) = &rec.labels {
        let counts = score_labels(labels, &verdicts)?;
        summary["confusion"] = serde_json::to_value(counts)?;
        summary["scores"] = serde_json::to_value(counts.scores())?;
        summary["noise_removed"] = json!(counts.noise_removal());
        summary["signal_retained"] = json!(counts.recall());
    }
    println!(
        "{}: {} events, {:.2}% filtered, {} kept",
        input.display(),
        rec.stream.len(),
        pct,
        kept.len()
    );
    Ok((vec![filtered, verdict_path, metrics_path], summary))
}

pub fn filter(
    inputs: &[PathBuf],
    out_dir: &Path,
    cfg: &ToolConfig,
    sensor: [u16; 2],
    lenient: bool,
    jobs: Option<usize>,
) -> Result<Outcome> {
    let mut seen = HashSet::new();
    for input in inputs {
        if !seen.insert(stem(input)) {
            bail!(
                "two inputs share the name {:?}; their outputs would collide",
                stem(input)
            );
        }
    }
    let sensor = geometry(sensor)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?;
    let results: Vec<Result<(Vec<PathBuf>, Value)>> = pool.install(|| {
        inputs
            .par_iter()
            .map(|input| filter_one(input, out_dir, cfg, sensor, lenient))
            .collect()
    });
    let mut outputs = Vec::new();
    let mut runs = Vec::new();
    for r in results {
        let (files, summary) = r?;
        outputs.extend(files);
        runs.push(summary);
    }
    Ok(Outcome {
        outputs,
        summary: json!({ "subsampling": cfg.filter.subsampling(), "runs": runs }),
    })
}

fn prepare(
    input: &Path,
    cfg: &ToolConfig,
    sensor: [u16; 2],
    lenient: bool,
    prefilter: bool,
) -> Result<EventStream> {
    let rec = read_recording(input, geometry(sensor)?, lenient)?;
    Ok(if prefilter {
        filter_stream(&rec.stream, &cfg.filter)?.0
    } else {
        rec.stream
    })
}

pub fn tbr(
    input: &Path,
    out_dir: &Path,
    cfg: &ToolConfig,
    sensor: [u16; 2],
    lenient: bool,
    prefilter: bool,
    png: bool,
) -> Result<Outcome> {
    let stream = prepare(input, cfg, sensor, lenient, prefilter)?;
    let frames = encode_stream(&stream, &cfg.tbr)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut outputs = Vec::with_capacity(frames.len() * 2 + 1);
    let index_path = out_dir.join("manifest.csv");
    let mut index = create(&index_path)?;
    writeln!(index, "index,start_us,nonzero,file")?;
    for frame in &frames {
        let name = frame.file_name();
        let path = out_dir.join(&name);
        let mut w = create(&path)?;
        frame.write_pgm(&mut w)?;
        finish(w, &path)?;
        outputs.push(path.clone());
        if png {
            let image = image::GrayImage::from_raw(
                frame.width as u32,
                frame.height as u32,
                frame.pixels.clone(),
            )
            .expect("frame buffer matches its dimensions");
            let png_path = path.with_extension("png");
            image
                .save_with_format(&png_path, image::ImageFormat::Png)
                .with_context(|| format!("writing {}", png_path.display()))?;
            outputs.push(png_path);
        }
        writeln!(
            index,
            "{},{},{},{name}",
            frame.index,
            frame.frame_start_us,
            frame.nonzero()
        )?;
    }
    finish(index, &index_path)?;
    outputs.push(index_path);
    println!(
        "{}: {} frames in {}",
        input.display(),
        frames.len(),
        out_dir.display()
    );
    Ok(Outcome {
        outputs,
        summary: json!({
            "events": stream.len(),
            "frames": frames.len(),
            "frame_us": cfg.tbr.frame_us(),
            "duration_us": stream.duration_us(),
            "prefiltered": prefilter,
        }),
    })
}

fn write_features(path: &Path, seq: &[RoiFeature]) -> Result<()> {
    let mut w = create(path)?;
    write_features_csv(seq, &mut w)?;
    finish(w, path)
}

/// Write the centred variant and its means sidecar; `None` when the sequence
/// has no valid feature to centre on.
fn write_centered(
    base: &Path,
    seq: &[RoiFeature],
    outputs: &mut Vec<PathBuf>,
) -> Result<Option<Value>> {
    let Ok((centered, means)) = zero_center(seq) else {
        eprintln!(
            "warning: {} has no valid features; skipping zero-centring",
            base.display()
        );
        return Ok(None);
    };
    let path = sibling(base, "centered.csv");
    write_features(&path, &centered)?;
    let means_path = sibling(base, "means.toml");
    fs::write(&means_path, toml::to_string(&means)?)
        .with_context(|| format!("writing {}", means_path.display()))?;
    outputs.extend([path, means_path]);
    Ok(Some(serde_json::to_value(means)?))
}

#[allow(clippy::too_many_arguments)]
pub fn roi(
    input: &Path,
    output: &Path,
    cfg: &ToolConfig,
    sensor: [u16; 2],
    lenient: bool,
    prefilter: bool,
    mirror: bool,
) -> Result<Outcome> {
    let stream = prepare(input, cfg, sensor, lenient, prefilter)?;
    let seq = extract_sequence(&stream, &cfg.roi)?;
    write_features(output, &seq)?;
    let mut outputs = vec![output.to_path_buf()];
    let means = write_centered(output, &seq, &mut outputs)?;
    let mut summary = json!({
        "events": stream.len(),
        "features": seq.len(),
        "valid": seq.iter().filter(|f| f.valid).count(),
        "means": means,
        "prefiltered": prefilter,
    });
    if mirror {
        let mirrored = mirror_sequence(&seq, stream.geometry);
        let path = sibling(output, "mirrored.csv");
        write_features(&path, &mirrored)?;
        outputs.push(path.clone());
        summary["mirrored_means"] = json!(write_centered(&path, &mirrored, &mut outputs)?);
    }
    println!(
        "{}: {} features ({} valid)",
        output.display(),
        seq.len(),
        summary["valid"]
    );
    Ok(Outcome { outputs, summary })
}
