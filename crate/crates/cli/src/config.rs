//! `--config` files: flat `key=value` lines spliced into the argument list
//! ahead of the command-line flags, so flags win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use valdist_core::Error;

const GLOBAL_KEYS: [&str; 3] = ["threads", "format", "out-dir"];
const VALUE_FLAGS: [&str; 4] = ["--threads", "--format", "--out-dir", "--config"];

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("config line {}: expected key=value, got '{line}'", i + 1)));
        };
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("config line {}: empty key", i + 1)));
        }
        let key = if key == "X" || key == "Y" { key.to_string() } else { key.replace('_', "-") };
        if key == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn to_flags(entries: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (k, v) in entries {
        match v.as_str() {
            "true" => out.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => out.push(OsString::from(format!("--{k}={v}"))),
        }
    }
    out
}

/// Index just past the subcommand tokens (`mdensity`, `empirical torus`, …).
fn subcommand_end(args: &[OsString]) -> usize {
    let mut i = 1;
    let mut found = 0;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s.starts_with('-') {
            if VALUE_FLAGS.contains(&s.as_ref()) {
                i += 1;
            }
            if found > 0 {
                return i.min(args.len());
            }
        } else if found == 0 {
            found = 1;
            if s != "empirical" {
                return i + 1;
            }
        } else {
            return i + 1;
        }
        i += 1;
    }
    args.len()
}

/// Expands `--config <path>` into explicit flags.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = read(&path)?;
    let entries = parse_config(&text)?;
    let (global, local): (Vec<_>, Vec<_>) = entries.into_iter().partition(|(k, _)| GLOBAL_KEYS.contains(&k.as_str()));
    let at = subcommand_end(&args);
    let mut out = Vec::with_capacity(args.len() + global.len() + local.len());
    out.push(args[0].clone());
    out.extend(to_flags(&global));
    out.extend(args[1..at].iter().cloned());
    out.extend(to_flags(&local));
    out.extend(args[at..].iter().cloned());
    Ok(out)
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("config file {}: {e}", path.display()))))
}
