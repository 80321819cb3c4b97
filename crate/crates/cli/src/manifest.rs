//! Run manifests: what was run, on what, with which configuration, and a
//! digest of every file it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use evfilt_core::ToolConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "evfilt";

/// A fully resolved command. Replaying it with the recorded configuration
/// reproduces the recorded outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Invocation {
    Synth {
        script: PathBuf,
        output: PathBuf,
        seed: Option<u64>,
    },
    Filter {
        inputs: Vec<PathBuf>,
        out_dir: PathBuf,
        lenient: bool,
        sensor: [u16; 2],
    },
    Tbr {
        input: PathBuf,
        out_dir: PathBuf,
        prefilter: bool,
        png: bool,
        lenient: bool,
        sensor: [u16; 2],
    },
    Roi {
        input: PathBuf,
        output: PathBuf,
        prefilter: bool,
        mirror: bool,
        lenient: bool,
        sensor: [u16; 2],
    },
    Report {
        metrics: Vec<PathBuf>,
        out_dir: PathBuf,
    },
}

impl Invocation {
    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Invocation::Synth { script, .. } => vec![script.clone()],
            Invocation::Filter { inputs, .. } => inputs.clone(),
            Invocation::Tbr { input, .. } | Invocation::Roi { input, .. } => vec![input.clone()],
            Invocation::Report { metrics, .. } => metrics.clone(),
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Invocation::Synth { output, .. } | Invocation::Roi { output, .. } => {
                sibling(output, "manifest.json")
            }
            Invocation::Filter { out_dir, .. } => out_dir.join("filter.manifest.json"),
            Invocation::Tbr { out_dir, .. } => out_dir.join("tbr.manifest.json"),
            Invocation::Report { out_dir, .. } => out_dir.join("report.manifest.json"),
        }
    }
}

/// `dir/stem.suffix` for `dir/stem.ext`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
        let mut hex = String::with_capacity(64);
        for b in Sha256::digest(&data) {
            write!(hex, "{b:02x}").unwrap();
        }
        Ok(FileDigest {
            path: path.to_path_buf(),
            bytes: data.len() as u64,
            sha256: hex,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub invocation: Invocation,
    /// Resolved configuration; absent for commands that take none.
    pub config: Option<ToolConfig>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new(
        invocation: Invocation,
        config: Option<ToolConfig>,
        outputs: &[PathBuf],
        summary: serde_json::Value,
    ) -> Result<Self> {
        let inputs = invocation
            .inputs()
            .iter()
            .map(|p| FileDigest::of(p))
            .collect::<Result<_>>()?;
        let outputs = outputs
            .iter()
            .map(|p| FileDigest::of(p))
            .collect::<Result<_>>()?;
        Ok(RunManifest {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            invocation,
            config,
            inputs,
            outputs,
            summary,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}
