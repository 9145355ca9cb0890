//! Cartesian parameter sweeps, run in parallel and stored by config hash.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::recipes::RunKind;
use crate::run::{run, write_csv};
use crate::CliError;

/// `key=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, rest) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("sweep axis '{s}' must look like key=v1,v2")))?;
        let values: Vec<String> = rest
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(CliError::Config(format!("sweep axis '{key}' has no values")));
        }
        Ok(Axis {
            key: key.trim().to_string(),
            values,
        })
    }
}

/// Every combination of the axis values applied on top of `base`.
pub fn expand(base: &RunConfig, axes: &[Axis]) -> Result<Vec<RunConfig>, CliError> {
    let mut configs = vec![base.clone()];
    for axis in axes {
        let mut next = Vec::with_capacity(configs.len() * axis.values.len());
        for cfg in &configs {
            for v in &axis.values {
                let mut c = cfg.clone();
                c.set(&axis.key, v)?;
                next.push(c);
            }
        }
        configs = next;
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

pub fn config_hash(kind: RunKind, cfg: &RunConfig) -> String {
    let digest = Sha256::digest(format!("{};{}", kind.name(), cfg.canonical()).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub hash: String,
    pub path: PathBuf,
    pub config: String,
}

/// Runs every configuration and writes `<hash>.csv` plus `index.csv` into
/// `dir`.
pub fn run_sweep(kind: RunKind, configs: &[RunConfig], dir: &Path) -> Result<Vec<SweepEntry>, CliError> {
    std::fs::create_dir_all(dir)?;
    let entries = configs
        .par_iter()
        .map(|cfg| {
            let hash = config_hash(kind, cfg);
            let path = dir.join(format!("{hash}.csv"));
            let out = run(kind, cfg)?;
            write_csv(&out.table, BufWriter::new(File::create(&path)?))?;
            Ok(SweepEntry {
                hash,
                path,
                config: cfg.canonical(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut index = csv::Writer::from_path(dir.join("index.csv"))?;
    index.write_record(["hash", "kind", "file", "config"])?;
    for e in &entries {
        let file = e
            .path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        index.write_record([e.hash.as_str(), kind.name(), file.as_str(), e.config.as_str()])?;
    }
    index.flush()?;
    Ok(entries)
}
