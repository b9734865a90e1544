//! Subcommand implementations.

pub mod bootstrap;
pub mod export;
pub mod fit;
pub mod permute;
pub mod predict;
pub mod r2;
pub mod simulate;

use std::path::{Path, PathBuf};

use hwfr::tuning::{SelectionRule, TuningGrid};
use hwfr::GridDims;

use crate::error::{CliError, Result};
use crate::formats;

/// Runs the same generic body for a 1D or 3D dataset.
macro_rules! with_dataset {
    ($loaded:expr, |$ds:ident| $body:expr) => {
        match $loaded {
            $crate::formats::LoadedDataset::OneD($ds) => $body,
            $crate::formats::LoadedDataset::ThreeD($ds) => $body,
        }
    };
}
pub(crate) use with_dataset;

/// Creates the output directory and returns it as a path.
pub(crate) fn prepare_out(out: &str) -> Result<PathBuf> {
    let path = PathBuf::from(out);
    formats::ensure_dir(&path)?;
    Ok(path)
}

/// Explicit levels, or every admissible level of the grid.
pub(crate) fn resolve_levels(explicit: Option<Vec<usize>>, dims: GridDims) -> Result<Vec<usize>> {
    match explicit {
        Some(levels) if levels.is_empty() => {
            Err(CliError::config("--levels must name at least one level"))
        }
        Some(levels) => Ok(levels),
        None => {
            let max = dims.max_level();
            if max == 0 {
                return Err(CliError::config(
                    "grid too small to decompose; no admissible levels",
                ));
            }
            Ok((1..=max).collect())
        }
    }
}

/// A tuning grid over `levels`, with one shared explicit penalty grid or
/// data-derived defaults.
pub(crate) fn build_grid(levels: &[usize], lambdas: Option<&Vec<f64>>) -> Result<TuningGrid> {
    let grid = match lambdas {
        Some(ls) => TuningGrid::with_lambdas(levels.to_vec(), vec![ls.clone(); levels.len()])?,
        None => TuningGrid::new(levels.to_vec())?,
    };
    Ok(grid)
}

/// Parses a data-driven selection rule (`cv`, `aic`, `bic`).
pub(crate) fn parse_rule(tune: &str, k: usize) -> Result<SelectionRule> {
    match tune {
        "cv" => {
            if k < 2 {
                return Err(CliError::config(format!("--k must be at least 2, got {k}")));
            }
            Ok(SelectionRule::CrossValidation { k })
        }
        "aic" => Ok(SelectionRule::Aic),
        "bic" => Ok(SelectionRule::Bic),
        other => Err(CliError::config(format!(
            "--tune must be one of [\"cv\", \"aic\", \"bic\"], got {other:?}"
        ))),
    }
}

/// Writes a boolean mask as a volume of 0/1 values on the given grid shape.
pub(crate) fn write_mask(path: &Path, dims: GridDims, mask: &[bool]) -> Result<()> {
    let values: Vec<f64> = mask.iter().map(|m| f64::from(u8::from(*m))).collect();
    formats::write_volume(path, formats::storage_dims(dims), &values)
}
