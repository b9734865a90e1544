//! Configuration plumbing shared by all subcommands.
//!
//! Precedence: command-line flags > JSON config file (`--config`) > the
//! `HWFR_THREADS` environment variable (threads only) > built-in defaults.
//! Every run writes the fully-resolved configuration it executed with to
//! `<out>/resolved_config.json`; rerunning a command with
//! `--config <that file>` reproduces the run byte for byte.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{CliError, Result};

/// Fallback merging: every `None` field is filled from another instance
/// (command-line flags keep priority over config-file values).
pub trait MergeOr {
    fn merge_or(self, fallback: Self) -> Self;
}

/// Implements [`MergeOr`] over the listed `Option` fields.
macro_rules! merge_params {
    ($ty:ty { $($field:ident),+ $(,)? }) => {
        impl $crate::config::MergeOr for $ty {
            fn merge_or(mut self, fallback: Self) -> Self {
                $( if self.$field.is_none() { self.$field = fallback.$field; } )+
                self
            }
        }
    };
}
pub(crate) use merge_params;

/// Loads a JSON config file for `command`. A `"command"` key, if present
/// (resolved configs always carry one), must match; it is stripped before
/// the typed parse so parameter structs can reject unknown keys.
pub fn load_config_file<T: DeserializeOwned>(path: &Path, command: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("config {}: invalid JSON: {e}", path.display())))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::config(format!("config {} must be a JSON object", path.display())))?;
    if let Some(cmd) = obj.remove("command") {
        if cmd.as_str() != Some(command) {
            return Err(CliError::config(format!(
                "config {} was resolved for command {:?}, not {command:?}",
                path.display(),
                cmd.as_str().unwrap_or("?"),
            )));
        }
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
}

/// Loads and merges the optional config file into CLI params.
pub fn merge_config<T>(cli: T, config: Option<&Path>, command: &str) -> Result<T>
where
    T: DeserializeOwned + MergeOr,
{
    match config {
        Some(path) => Ok(cli.merge_or(load_config_file(path, command)?)),
        None => Ok(cli),
    }
}

/// Unwraps a parameter that has no default, naming the flag that sets it.
pub fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::config(format!("--{flag} is required")))
}

/// Rejects a parameter that does not apply in the current mode.
pub fn forbid<T>(value: &Option<T>, flag: &str, why: &str) -> Result<()> {
    if value.is_some() {
        Err(CliError::config(format!("--{flag} does not apply {why}")))
    } else {
        Ok(())
    }
}

/// Resolves the worker thread count: explicit value, else `HWFR_THREADS`,
/// else 0 (automatic).
pub fn resolve_threads(explicit: Option<usize>) -> Result<usize> {
    if let Some(t) = explicit {
        return Ok(t);
    }
    match std::env::var("HWFR_THREADS") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::config(format!("HWFR_THREADS must be a nonnegative integer, got {s:?}"))
        }),
        Err(_) => Ok(0),
    }
}

/// Caps the global worker pool. 0 keeps the library default. Results are
/// independent of this value; it only bounds parallel fan-out.
pub fn init_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot configure {threads} threads: {e}")))
}

/// Validates that a string flag is one of the allowed spellings.
pub fn one_of(name: &str, value: String, allowed: &[&str]) -> Result<String> {
    if allowed.contains(&value.as_str()) {
        Ok(value)
    } else {
        Err(CliError::config(format!(
            "--{name} must be one of {allowed:?}, got {value:?}"
        )))
    }
}
