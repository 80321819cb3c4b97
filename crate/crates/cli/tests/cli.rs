use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use evfilt_core::io::write_aedat2;
use evfilt_core::{Event, EventStream, Polarity, SensorGeometry};
use serde_json::Value;
use tempfile::TempDir;

fn evfilt(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evfilt"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = evfilt(args, cwd);
    assert!(
        out.status.success(),
        "evfilt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// A short labelled scene, rendered once per test directory.
fn small_scene(dir: &Path) -> PathBuf {
    let script = fs::read_to_string(data("blob_scene.toml"))
        .unwrap()
        .replace("duration_us = 1000000", "duration_us = 300000");
    fs::write(dir.join("scene.toml"), script).unwrap();
    ok(&["synth", "scene.toml", "-o", "scene.csv"], dir);
    dir.join("scene.csv")
}

/// CSV carries no duration: the rebased stream ends one tick after its last event.
fn csv_duration(path: &Path) -> u64 {
    let text = fs::read_to_string(path).unwrap();
    let ts: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    ts.last().unwrap() - ts[0] + 2
}

#[test]
fn synth_then_filter_writes_outputs_and_scores() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    let labelled = fs::read_to_string(dir.join("scene.csv")).unwrap();
    assert!(labelled.starts_with("ts_us,x,y,pol,label\n"));

    ok(&["filter", "scene.csv", "-O", "out"], dir);
    for f in [
        "scene.filtered.csv",
        "scene.verdicts.csv",
        "scene.metrics.csv",
        "filter.manifest.json",
    ] {
        assert!(dir.join("out").join(f).is_file(), "{f} missing");
    }
    let manifest = json(&dir.join("out/filter.manifest.json"));
    let run = &manifest["summary"]["runs"][0];
    let events = run["events"].as_u64().unwrap();
    assert_eq!(
        run["caught"].as_u64().unwrap() + run["passed"].as_u64().unwrap(),
        events
    );
    assert!(run["signal_retained"].as_f64().unwrap() > 0.5);
    assert!(run["noise_removed"].as_f64().unwrap() > 0.5);

    let verdicts = fs::read_to_string(dir.join("out/scene.verdicts.csv")).unwrap();
    assert_eq!(verdicts.lines().count() as u64, events + 1);
    let passes = verdicts.lines().filter(|l| l.ends_with(",pass")).count();
    let filtered = fs::read_to_string(dir.join("out/scene.filtered.csv")).unwrap();
    assert_eq!(filtered.lines().count(), passes + 1);

    let metrics = fs::read_to_string(dir.join("out/scene.metrics.csv")).unwrap();
    let packets = csv_duration(&dir.join("scene.csv")).div_ceil(10_000);
    assert_eq!(metrics.lines().count() as u64, packets + 1);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let missing = evfilt(&["filter", "missing.csv"], dir);
    assert_eq!(missing.status.code(), Some(2));

    fs::write(dir.join("e.csv"), "ts_us,x,y,pol\n1,2,3,1\n").unwrap();
    let bad_s = evfilt(&["filter", "e.csv", "-s", "3"], dir);
    assert_eq!(bad_s.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_s.stderr).contains("power of two"));

    fs::write(dir.join("bad.toml"), "[filter]\ndt_refr_us = 5000\n").unwrap();
    let bad_cfg = evfilt(&["filter", "e.csv", "--config", "bad.toml"], dir);
    assert_eq!(bad_cfg.status.code(), Some(2));

    let no_cfg = evfilt(&["filter", "e.csv", "--config", "nope.toml"], dir);
    assert_eq!(no_cfg.status.code(), Some(2));

    fs::write(dir.join("e.txt"), "").unwrap();
    let unknown = evfilt(&["filter", "e.txt"], dir);
    assert_eq!(unknown.status.code(), Some(1));

    fs::write(dir.join("pol.csv"), "ts_us,x,y,pol\n1,2,3,2\n").unwrap();
    let bad_row = evfilt(&["filter", "pol.csv"], dir);
    assert_eq!(bad_row.status.code(), Some(1));
}

#[test]
fn flags_beat_config_file() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("e.csv"), "ts_us,x,y,pol\n1,2,3,1\n5,2,3,0\n").unwrap();
    fs::write(
        dir.join("c.toml"),
        "packet_us = 2000\n[filter]\ns = 2\ndt_ba_us = 1000\n",
    )
    .unwrap();
    ok(
        &[
            "filter", "e.csv", "--config", "c.toml", "-s", "8", "-O", "o",
        ],
        dir,
    );
    let cfg = &json(&dir.join("o/filter.manifest.json"))["config"];
    assert_eq!(cfg["filter"]["s"], 8);
    assert_eq!(cfg["filter"]["dt_ba_us"], 1000);
    assert_eq!(cfg["filter"]["dt_refr_us"], 10);
    assert_eq!(cfg["packet_us"], 2000);
}

#[test]
fn replay_reproduces_and_detects_divergence() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    ok(&["filter", "scene.csv", "-O", "out", "-s", "2"], dir);
    let manifest = dir.join("out/filter.manifest.json");
    let before = fs::read(&manifest).unwrap();
    let metrics_before = fs::read(dir.join("out/scene.metrics.csv")).unwrap();

    fs::write(dir.join("out/scene.metrics.csv"), "clobbered").unwrap();
    let out = ok(&["replay", "out/filter.manifest.json"], dir);
    assert!(out.contains("replay reproduced 3 outputs"));
    assert_eq!(
        fs::read(dir.join("out/scene.metrics.csv")).unwrap(),
        metrics_before
    );
    assert_eq!(fs::read(&manifest).unwrap(), before);

    let mut m: Value = serde_json::from_slice(&before).unwrap();
    m["outputs"][0]["sha256"] = Value::String("0".repeat(64));
    fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();
    let diverged = evfilt(&["replay", "out/filter.manifest.json"], dir);
    assert_eq!(diverged.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&diverged.stderr).contains("diverged"));
}

#[test]
fn synth_replay_is_bit_exact() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    let first = fs::read(dir.join("scene.csv")).unwrap();
    ok(&["replay", "scene.manifest.json"], dir);
    assert_eq!(fs::read(dir.join("scene.csv")).unwrap(), first);
}

#[test]
fn parallel_runs_match_serial_runs() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    let scene = fs::read_to_string(dir.join("scene.csv")).unwrap();
    fs::write(dir.join("copy.csv"), &scene).unwrap();
    ok(
        &[
            "filter",
            "scene.csv",
            "copy.csv",
            "-O",
            "serial",
            "--jobs",
            "1",
        ],
        dir,
    );
    ok(
        &[
            "filter",
            "scene.csv",
            "copy.csv",
            "-O",
            "parallel",
            "--jobs",
            "4",
        ],
        dir,
    );
    for f in [
        "scene.verdicts.csv",
        "copy.metrics.csv",
        "copy.filtered.csv",
    ] {
        assert_eq!(
            fs::read(dir.join("serial").join(f)).unwrap(),
            fs::read(dir.join("parallel").join(f)).unwrap(),
            "{f}"
        );
    }
    let dup = evfilt(&["filter", "scene.csv", "sub/scene.csv"], dir);
    assert!(!dup.status.success());
}

#[test]
fn aedat_input_is_rebased() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let g = SensorGeometry::DAVIS240;
    let events = vec![
        Event::new(10, 10, 5_000, Polarity::On),
        Event::new(11, 10, 5_400, Polarity::Off),
        Event::new(200, 170, 9_000, Polarity::On),
    ];
    let mut bytes = Vec::new();
    write_aedat2(&EventStream::new(g, "test rig", events), &mut bytes).unwrap();
    fs::write(dir.join("rec.aedat"), bytes).unwrap();
    ok(
        &["filter", "rec.aedat", "-O", "o", "--filters", "refractory"],
        dir,
    );
    let filtered = fs::read_to_string(dir.join("o/rec.filtered.csv")).unwrap();
    assert_eq!(
        filtered,
        "ts_us,x,y,pol\n1,10,10,1\n401,11,10,0\n4001,200,170,1\n"
    );
}

#[test]
fn tbr_frames_and_index() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    ok(
        &["tbr", "scene.csv", "-O", "frames", "--prefilter", "--png"],
        dir,
    );
    let index = fs::read_to_string(dir.join("frames/manifest.csv")).unwrap();
    let rows: Vec<&str> = index.lines().skip(1).collect();
    assert_eq!(
        rows.len() as u64,
        csv_duration(&dir.join("scene.csv")) / 33_328
    );
    for row in rows {
        let file = row.rsplit(',').next().unwrap();
        let pgm = fs::read(dir.join("frames").join(file)).unwrap();
        let header = b"P5\n227 227\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 227 * 227);
        assert!(pgm[header.len() + 180 * 227..].iter().all(|&p| p == 0));
        assert!(dir
            .join("frames")
            .join(file)
            .with_extension("png")
            .is_file());
    }
}

#[test]
fn roi_variants_are_written() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    ok(
        &[
            "roi",
            "scene.csv",
            "-o",
            "roi/feat.csv",
            "--prefilter",
            "--mirror",
        ],
        dir,
    );
    for f in [
        "feat.csv",
        "feat.centered.csv",
        "feat.means.toml",
        "feat.mirrored.csv",
        "feat.mirrored.centered.csv",
        "feat.manifest.json",
    ] {
        assert!(dir.join("roi").join(f).is_file(), "{f} missing");
    }
    let duration = csv_duration(&dir.join("scene.csv"));
    let feat = fs::read_to_string(dir.join("roi/feat.csv")).unwrap();
    assert_eq!(feat.lines().count() as u64, duration / 30_000 + 1);
    let centered = fs::read_to_string(dir.join("roi/feat.centered.csv")).unwrap();
    let mut sum = 0.0;
    let mut n = 0;
    for line in centered.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[1] == "1" {
            sum += cols[2].parse::<f64>().unwrap();
            n += 1;
        }
    }
    assert!(n > 0 && (sum / n as f64).abs() < 1e-9);
    let means = fs::read_to_string(dir.join("roi/feat.means.toml")).unwrap();
    assert!(means.contains("center_x"));
}

#[test]
fn report_summarizes_metrics() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_scene(dir);
    ok(&["filter", "scene.csv", "-O", "s4"], dir);
    ok(&["filter", "scene.csv", "-O", "s2", "-s", "2"], dir);
    fs::rename(
        dir.join("s2/scene.metrics.csv"),
        dir.join("s2/scene_s2.metrics.csv"),
    )
    .unwrap();
    let table = ok(
        &[
            "report",
            "s4/scene.metrics.csv",
            "s2/scene_s2.metrics.csv",
            "-O",
            "rep",
        ],
        dir,
    );
    assert!(table.contains("| scene |") && table.contains("| scene_s2 |"));
    let csv = fs::read_to_string(dir.join("rep/summary.csv")).unwrap();
    let pct = |name: &str| -> f64 {
        let row = csv
            .lines()
            .find(|l| l.starts_with(&format!("{name},")))
            .unwrap();
        row.split(',').nth(4).unwrap().parse().unwrap()
    };
    assert!(pct("scene_s2") > pct("scene"));
    for f in [
        "scene.cumulative.svg",
        "scene.instantaneous.svg",
        "scene_s2.cumulative.svg",
    ] {
        let svg = fs::read_to_string(dir.join("rep").join(f)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}
