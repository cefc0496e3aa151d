//! `--config FILE` support: `key = value` lines become `--key value` flags
//! inserted ahead of the command-line flags, so explicit flags win.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use super::Cli;
use crate::error::{Error, Result};

/// Expands any `--config FILE` in `args` into flags for the subcommand.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            config = strs.get(i + 1).cloned();
            break;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
            break;
        }
    }
    let Some(config) = config else { return Ok(args) };
    let mut sub_pos = None;
    let mut j = 1;
    while j < strs.len() {
        match strs[j].as_str() {
            "--config" => j += 2,
            a if a.starts_with('-') => j += 1,
            _ => {
                sub_pos = Some(j);
                break;
            }
        }
    }
    let Some(sub_pos) = sub_pos else { return Ok(args) };

    let path = Path::new(&config);
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cmd = Cli::command();
    let sub = cmd
        .find_subcommand(&strs[sub_pos])
        .ok_or_else(|| Error::InvalidConfig(format!("unknown command {:?}", strs[sub_pos])))?;

    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim().replace('_', "-"), v.trim().to_string()))
            .ok_or_else(|| Error::InvalidConfig(format!("{config}:{}: expected key = value", n + 1)))?;
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| Error::InvalidConfig(format!("{config}:{}: unknown key {key:?}", n + 1)))?;
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}"));
            extra.push(value);
        } else if value == "true" {
            extra.push(format!("--{key}"));
        } else if value != "false" {
            return Err(Error::InvalidConfig(format!("{config}:{}: {key} expects true or false", n + 1)));
        }
    }

    let mut out: Vec<OsString> = args[..=sub_pos].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}
