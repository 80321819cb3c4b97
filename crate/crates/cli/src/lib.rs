//! The `evfilt` command-line tool.

pub mod args;
pub mod commands;
pub mod ingest;
pub mod manifest;
pub mod report;

use std::io;

use anyhow::{bail, Result};
use evfilt_core::io::FormatError;
use evfilt_core::synth::SynthError;
use evfilt_core::{ConfigError, FilterError, ToolConfig};

use args::{Cli, Command, InputArgs};
use commands::Outcome;
use manifest::{Invocation, RunManifest};

/// Exit status for usage problems: missing files and invalid configuration.
pub const EXIT_USAGE: u8 = 2;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|e| {
        if let Some(io) = e.downcast_ref::<io::Error>() {
            return io.kind() == io::ErrorKind::NotFound;
        }
        if let Some(FormatError::Io(io)) = e.downcast_ref::<FormatError>() {
            return io.kind() == io::ErrorKind::NotFound;
        }
        e.is::<ConfigError>()
            || matches!(
                e.downcast_ref::<FilterError>(),
                Some(FilterError::Config(_))
            )
            || matches!(
                e.downcast_ref::<SynthError>(),
                Some(
                    SynthError::Parse(_)
                        | SynthError::Script(_)
                        | SynthError::OutsideGeometry { .. }
                )
            )
    });
    if usage {
        EXIT_USAGE
    } else {
        1
    }
}

fn sensor(input: &InputArgs) -> [u16; 2] {
    [input.sensor.width, input.sensor.height]
}

/// Run a resolved invocation.
pub fn execute(inv: &Invocation, cfg: Option<&ToolConfig>, jobs: Option<usize>) -> Result<Outcome> {
    let need = || cfg.ok_or_else(|| anyhow::anyhow!("manifest has no configuration"));
    match inv {
        Invocation::Synth {
            script,
            output,
            seed,
        } => commands::synth(script, output, *seed),
        Invocation::Filter {
            inputs,
            out_dir,
            lenient,
            sensor,
        } => commands::filter(inputs, out_dir, need()?, *sensor, *lenient, jobs),
        Invocation::Tbr {
            input,
            out_dir,
            prefilter,
            png,
            lenient,
            sensor,
        } => commands::tbr(input, out_dir, need()?, *sensor, *lenient, *prefilter, *png),
        Invocation::Roi {
            input,
            output,
            prefilter,
            mirror,
            lenient,
            sensor,
        } => commands::roi(
            input,
            output,
            need()?,
            *sensor,
            *lenient,
            *prefilter,
            *mirror,
        ),
        Invocation::Report { metrics, out_dir } => report::report(metrics, out_dir),
    }
}

fn record(inv: Invocation, cfg: Option<ToolConfig>, outcome: Outcome) -> Result<RunManifest> {
    let path = inv.manifest_path();
    let manifest = RunManifest::new(inv, cfg, &outcome.outputs, outcome.summary)?;
    manifest.write(&path)?;
    eprintln!("manifest: {}", path.display());
    Ok(manifest)
}

fn replay(path: &std::path::Path) -> Result<()> {
    let old = RunManifest::read(path)?;
    if old.tool != manifest::TOOL {
        bail!("{} was not written by {}", path.display(), manifest::TOOL);
    }
    let current = RunManifest::new(old.invocation.clone(), None, &[], serde_json::Value::Null)?;
    for (was, now) in old.inputs.iter().zip(&current.inputs) {
        if was != now {
            eprintln!(
                "warning: input {} changed since the recorded run",
                was.path.display()
            );
        }
    }
    let outcome = execute(&old.invocation, old.config.as_ref(), None)?;
    let new = record(old.invocation.clone(), old.config.clone(), outcome)?;
    let differing: Vec<String> = old
        .outputs
        .iter()
        .filter(|o| !new.outputs.contains(o))
        .map(|o| o.path.display().to_string())
        .collect();
    if !differing.is_empty() || old.outputs.len() != new.outputs.len() {
        bail!(
            "replay diverged: {} of {} outputs differ ({})",
            differing.len().max(1),
            old.outputs.len(),
            differing.join(", ")
        );
    }
    println!("replay reproduced {} outputs", new.outputs.len());
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let (inv, cfg, jobs) = match cli.command {
        Command::Replay(a) => return replay(&a.manifest),
        Command::Synth(a) => (
            Invocation::Synth {
                script: a.script,
                output: a.output,
                seed: a.seed,
            },
            None,
            None,
        ),
        Command::Filter(a) => (
            Invocation::Filter {
                sensor: sensor(&a.input),
                inputs: a.inputs,
                out_dir: a.out_dir,
                lenient: a.input.lenient,
            },
            Some(a.config.resolve()?),
            a.jobs,
        ),
        Command::Tbr(a) => (
            Invocation::Tbr {
                sensor: sensor(&a.input_opts),
                input: a.input,
                out_dir: a.out_dir,
                prefilter: a.prefilter,
                png: a.png,
                lenient: a.input_opts.lenient,
            },
            Some(a.config.resolve()?),
            None,
        ),
        Command::Roi(a) => (
            Invocation::Roi {
                sensor: sensor(&a.input_opts),
                input: a.input,
                output: a.output,
                prefilter: a.prefilter,
                mirror: a.mirror,
                lenient: a.input_opts.lenient,
            },
            Some(a.config.resolve()?),
            None,
        ),
        Command::Report(a) => (
            Invocation::Report {
                metrics: a.metrics,
                out_dir: a.out_dir,
            },
            None,
            None,
        ),
    };
    let outcome = execute(&inv, cfg.as_ref(), jobs)?;
    record(inv, cfg, outcome)?;
    Ok(())
}
