//! TOML defaults for command-line flags.
//!
//! Top-level keys apply to every subcommand that has a flag of that name; a
//! `[subcommand]` table overrides them for one subcommand. Keys are flag
//! names with `-` or `_`. Anything given on the command line wins.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};

use crate::error::{Error, Result};

fn load(path: &Path) -> Result<toml::Table> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))?;
    body.parse::<toml::Table>()
        .map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))
}

/// Flags for `subcommand` taken from the config file, skipping those the
/// command line already set.
pub fn config_args(path: &Path, cmd: &Command, subcommand: &str, given: &ArgMatches) -> Result<Vec<OsString>> {
    let table = load(path)?;
    let mut merged: Vec<(String, toml::Value)> = Vec::new();
    for (k, v) in &table {
        if !v.is_table() {
            merged.push((k.clone(), v.clone()));
        }
    }
    if let Some(section) = table.get(subcommand) {
        let section = section
            .as_table()
            .ok_or_else(|| Error::Usage(format!("config: [{subcommand}] must be a table")))?;
        for (k, v) in section {
            merged.retain(|(key, _)| key.replace('_', "-") != k.replace('_', "-"));
            merged.push((k.clone(), v.clone()));
        }
    }

    let sub = cmd
        .find_subcommand(subcommand)
        .ok_or_else(|| Error::Usage(format!("unknown subcommand {subcommand}")))?;
    let in_section = table.get(subcommand).and_then(|s| s.as_table());
    let mut out = Vec::new();
    for (key, value) in merged {
        let long = key.replace('_', "-");
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(long.as_str())) else {
            // Top-level keys may target other subcommands.
            if in_section.is_some_and(|s| s.contains_key(&key)) {
                return Err(Error::Usage(format!("config: {subcommand} has no flag --{long}")));
            }
            continue;
        };
        let id = arg.get_id().as_str();
        if given.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let is_switch = matches!(arg.get_action(), ArgAction::SetTrue);
        match value {
            toml::Value::Boolean(b) if is_switch => {
                if b {
                    out.push(format!("--{long}").into());
                }
            }
            toml::Value::String(s) => out.push(format!("--{long}={s}").into()),
            toml::Value::Integer(i) => out.push(format!("--{long}={i}").into()),
            toml::Value::Float(f) => out.push(format!("--{long}={f}").into()),
            toml::Value::Boolean(b) => out.push(format!("--{long}={b}").into()),
            other => {
                return Err(Error::Usage(format!(
                    "config: --{long} needs a string, number or boolean, got {}",
                    other.type_str()
                )))
            }
        }
    }
    Ok(out)
}
