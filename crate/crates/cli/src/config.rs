//! `key = value` config files.
//!
//! Entries are spliced in as `--key value` right after the subcommand, before
//! the user's own flags. Every subcommand lets a later occurrence of a flag
//! override an earlier one, so command-line flags win.

use std::ffi::OsString;
use std::path::PathBuf;

use crate::commands::CliError;

/// Flags that take no value; `true` adds them, `false` leaves them out.
const SWITCHES: &[&str] = &["fresh"];

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() || key == "config" {
            return Err(format!("line {}: invalid key `{key}`", lineno + 1));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

pub fn expand_config_file(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    if argv.len() < 2 {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::MissingFile(path.clone()),
        _ => CliError::Usage(format!("cannot read {}: {e}", path.display())),
    })?;
    let entries = parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                other => return Err(CliError::Usage(format!("{key} must be true or false, got `{other}`"))),
            }
        } else {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        }
    }
    let mut out = argv[..2].to_vec();
    out.extend(injected);
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}
