//! Config resolution: CLI flags override TOML config values override
//! built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Cli, Failure};

/// Default master seed when neither flag nor config supplies one. A fixed
/// constant, never wall-clock, so bare invocations are reproducible.
pub const DEFAULT_MASTER_SEED: u64 = 20240101;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub replications: Option<usize>,
    pub designs: Option<usize>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    pub replications: Option<usize>,
    pub designs: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, Failure> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

pub fn resolve(cli: &Cli, file: FileConfig) -> RunManifest {
    RunManifest {
        master_seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_MASTER_SEED),
        out_dir: cli
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("out")),
        threads: cli.threads.or(file.threads),
        replications: cli.replications.or(file.replications),
        designs: cli.designs.or(file.designs),
    }
}
