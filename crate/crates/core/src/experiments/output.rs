//! Metadata files written next to every set of experiment outputs.

use std::path::Path;

use serde::Serialize;

use super::config::{Problem, RunConfig};
use crate::error::{Error, Result};
use crate::initdata::KhCoefficients;

pub const METADATA_FILE: &str = "metadata.toml";

/// Caveats recorded with every output so that the CSVs read unambiguously.
pub const NOTES: [&str; 4] = [
    "matrix L1 norms in R1, R2, R are entrywise absolute sums (xx + 2|xy| + yy) per cell times h^2",
    "E2 is evaluated at the averaged entropy S~ (not at S of the averaged state)",
    "the limiting Young measure is not computable; distances are between ensembles of N and N+1 members",
    "entropy is S = rho ln(p / rho^gamma) without the c_v factor",
];

#[derive(Serialize)]
struct Metadata<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    notes: &'a [&'a str],
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    kh_coefficients: Option<KhCoefficients>,
    results: &'a T,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes `metadata.toml` holding the full configuration, the drawn KH
/// coefficients, the crate version and a command-specific results table.
pub fn write_metadata<T: Serialize>(dir: &Path, command: &str, cfg: &RunConfig, results: &T) -> Result<()> {
    let kh_coefficients = match cfg.problem {
        Problem::Kh => Some(cfg.kh().coefficients()?),
        Problem::Uniform => None,
    };
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        notes: &NOTES,
        config: cfg,
        kh_coefficients,
        results,
    };
    let text = toml::to_string(&meta).map_err(|e| Error::Config(format!("metadata: {e}")))?;
    std::fs::write(dir.join(METADATA_FILE), text)?;
    Ok(())
}

/// Reads back the configuration stored in a metadata file.
pub fn config_from_metadata(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let cfg = table
        .get("config")
        .cloned()
        .ok_or_else(|| Error::Config(format!("{} has no [config] table", path.display())))?;
    let cfg: RunConfig = cfg
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
