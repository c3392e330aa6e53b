//! `key = value` config files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Keys are case-insensitive and `-`/`_` are interchangeable, so `t-max`
//! and `t_max` name the same parameter. Values may be quoted. Anything set
//! on the command line wins over the file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;

use super::{Args, CliError};

pub const KEYS: &[&str] = &[
    "mode", "check_mode", "initial", "omega0", "omega", "omega1", "g", "delta", "n", "nbar", "t_max", "steps", "format",
    "output", "plot", "tolerance",
];

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key `{key}`", i + 1)));
        }
        let value = value.trim().trim_matches('"').to_string();
        if value.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty value for `{key}`", i + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::Config(format!("config line {}: `{key}` set twice", i + 1)));
        }
    }
    Ok(map)
}

fn value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| CliError::Config(format!("config key `{key}`: cannot parse `{raw}`: {e}")))
}

fn enum_value<T: ValueEnum>(key: &str, raw: &str) -> Result<T, CliError> {
    T::from_str(raw, true).map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))
}

/// Fills every field of `args` that is still unset from the parsed file.
pub fn apply_file(args: &mut Args, map: &BTreeMap<String, String>) -> Result<(), CliError> {
    for (key, raw) in map {
        match key.as_str() {
            "mode" if args.mode.is_none() => args.mode = Some(enum_value(key, raw)?),
            "check_mode" if args.check_mode.is_none() => args.check_mode = Some(enum_value(key, raw)?),
            "format" if args.format.is_none() => args.format = Some(enum_value(key, raw)?),
            "initial" if args.initial.is_none() => args.initial = Some(raw.clone()),
            "omega0" if args.omega0.is_none() => args.omega0 = Some(value(key, raw)?),
            "omega" if args.omega.is_none() => args.omega = Some(value(key, raw)?),
            "omega1" if args.omega1.is_none() => args.omega1 = Some(value(key, raw)?),
            "g" if args.g.is_none() => args.g = Some(value(key, raw)?),
            "delta" if args.delta.is_none() => args.delta = Some(value(key, raw)?),
            "n" if args.n.is_none() => args.n = Some(value(key, raw)?),
            "nbar" if args.nbar.is_none() => args.nbar = Some(value(key, raw)?),
            "t_max" if args.t_max.is_none() => args.t_max = Some(value(key, raw)?),
            "steps" if args.steps.is_none() => args.steps = Some(value(key, raw)?),
            "tolerance" if args.tolerance.is_none() => args.tolerance = Some(value(key, raw)?),
            "output" if args.output.is_none() => args.output = Some(PathBuf::from(raw)),
            "plot" if args.plot.is_none() => args.plot = Some(PathBuf::from(raw)),
            _ => {}
        }
    }
    Ok(())
}
