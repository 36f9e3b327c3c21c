//! `key=value` config files, merged into the argument list before parsing.
//!
//! Each key becomes a long flag inserted right after the subcommand, so
//! the flag parser validates it like any other argument. Keys already
//! given on the command line are skipped, which lets flags override the
//! file. `true` turns a key into a bare switch and `false` drops it.

use std::ffi::OsString;
use std::path::PathBuf;

use crate::error::CliError;

/// Parsed `(key, value)` pairs; keys use `-` as the word separator.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value", n + 1));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key.starts_with('-') {
            return Err(format!("line {}: bad key {:?}", n + 1, k.trim()));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Result<Option<(usize, PathBuf)>, CliError> {
    for (i, a) in args.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = args.get(i + 1).ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            return Ok(Some((i, PathBuf::from(p))));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some((i, PathBuf::from(p))));
        }
    }
    Ok(None)
}

pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some((at, path)) = config_path(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let pairs = parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;

    let given = |key: &str| {
        let flag = format!("--{key}");
        let with_value = format!("--{key}=");
        args.iter().skip(1).any(|a| {
            let s = a.to_string_lossy();
            s == flag || s.starts_with(&with_value)
        })
    };
    let mut extra = Vec::new();
    for (k, v) in pairs {
        if k == "config" || given(&k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => extra.push(OsString::from(format!("--{k}={v}"))),
        }
    }

    // the subcommand is the first bare word that is not the config path
    let config_value = if args[at].to_string_lossy() == "--config" { Some(at + 1) } else { None };
    let sub = (1..args.len()).find(|&i| Some(i) != config_value && !args[i].to_string_lossy().starts_with('-'));
    let insert_at = sub.map_or(args.len(), |i| i + 1);
    let mut out = args;
    out.splice(insert_at..insert_at, extra);
    Ok(out)
}
