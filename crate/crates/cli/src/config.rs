//! Expansion of a TOML run file into ordinary command-line flags.
//!
//! Keys are the long flag names (`record_every` and `record-every` both work) plus an
//! optional `command`. Values become `--key value` pairs placed right after the
//! subcommand, unless the same flag is already on the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;
use toml::Value;

use crate::args::Cli;
use crate::error::CliError;

const GLOBAL_WITH_VALUE: &[&str] = &["--config", "--threads"];

fn config_path(raw: &[OsString]) -> Option<OsString> {
    let mut it = raw.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Index of the subcommand token, skipping the values of global options.
fn subcommand_position(raw: &[OsString], names: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < raw.len() {
        let s = raw[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if names.iter().any(|n| *n == s) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn scalar_text(key: &str, v: &Value) -> Result<String, CliError> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        _ => return Err(CliError::Usage(format!("config key '{key}' must be a string or a number"))),
    })
}

fn on_command_line(raw: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    raw.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&eq)
    })
}

pub fn expand(raw: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&raw) else {
        return Ok(raw);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;

    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let from_file = match table.get("command") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(CliError::Usage("config key 'command' must be a string".into())),
        None => None,
    };
    let mut raw = raw;
    let pos = match (subcommand_position(&raw, &names), from_file) {
        (Some(p), Some(c)) if raw[p].to_string_lossy() != c.as_str() => {
            return Err(CliError::Usage(format!(
                "config is for '{c}' but the command line asks for '{}'",
                raw[p].to_string_lossy()
            )))
        }
        (Some(p), _) => p,
        (None, Some(c)) => {
            if !names.contains(&c) {
                return Err(CliError::Usage(format!("unknown command '{c}' in config")));
            }
            raw.push(c.into());
            raw.len() - 1
        }
        (None, None) => return Err(CliError::Usage("no subcommand given on the command line or in the config".into())),
    };
    let sub_name = raw[pos].to_string_lossy().to_string();
    let sub = cmd.find_subcommand(&sub_name).expect("known subcommand");
    let known: Vec<(String, bool)> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(|l| (l.to_string(), matches!(a.get_action(), clap::ArgAction::SetTrue))))
        .collect();

    let mut extra: Vec<OsString> = Vec::new();
    let mut global: Vec<OsString> = Vec::new();
    for (key, value) in &table {
        if key == "command" {
            continue;
        }
        let long = key.replace('_', "-");
        let flag = format!("--{long}");
        if long == "config" {
            return Err(CliError::Usage("a config file cannot name another config".into()));
        }
        if long == "threads" {
            if !on_command_line(&raw, &flag) {
                global.push(flag.into());
                global.push(scalar_text(key, value)?.into());
            }
            continue;
        }
        let Some((_, is_switch)) = known.iter().find(|(l, _)| *l == long) else {
            return Err(CliError::Usage(format!("unknown config key '{key}' for {sub_name}")));
        };
        if on_command_line(&raw, &flag) {
            continue;
        }
        match value {
            Value::Boolean(b) if *is_switch => {
                if *b {
                    extra.push(flag.into());
                }
            }
            Value::Array(items) => {
                for item in items {
                    extra.push(flag.clone().into());
                    extra.push(scalar_text(key, item)?.into());
                }
            }
            other => {
                if *is_switch {
                    return Err(CliError::Usage(format!("config key '{key}' must be true or false")));
                }
                extra.push(flag.into());
                extra.push(scalar_text(key, other)?.into());
            }
        }
    }
    let mut out: Vec<OsString> = raw[..pos].to_vec();
    out.extend(global);
    out.push(raw[pos].clone());
    out.extend(extra);
    out.extend(raw[pos + 1..].iter().cloned());
    Ok(out)
}
