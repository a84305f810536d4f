//! `key = value` configuration files.
//!
//! Each key names a long flag (`beta-min = 2`, `digits = 60`). Keys already
//! present on the command line are left alone; the rest are appended as
//! `--key value` before clap sees the arguments.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;
use crate::error::CliError;

pub fn parse(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected `key = value`", origin.display(), n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Usage(format!("{}:{}: empty key or value", origin.display(), n + 1)));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

fn long_flags(cmd: &clap::Command) -> BTreeSet<String> {
    cmd.get_arguments().filter_map(|a| a.get_long()).map(str::to_string).collect()
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = arg.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn on_command_line(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    argv.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// Merges the file named by `--config` (if any) into `argv`.
///
/// Keys meant for other subcommands are skipped so one file can serve
/// several; a key no subcommand accepts is an error.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<String>, CliError> {
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into_string().map_err(|a| CliError::Usage(format!("argument is not valid UTF-8: {a:?}"))))
        .collect::<Result<_, _>>()?;
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let entries = parse(&text, path)?;

    let root = Cli::command();
    let global = long_flags(&root);
    let active = root
        .get_subcommands()
        .find(|sc| argv.iter().skip(1).any(|a| a == sc.get_name()))
        .map(long_flags)
        .unwrap_or_default();
    let known_anywhere: BTreeSet<String> = root.get_subcommands().flat_map(long_flags).chain(global.iter().cloned()).collect();

    let mut out = argv.clone();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::Usage(format!("{}: a config file cannot name another config file", path.display())));
        }
        if !known_anywhere.contains(&key) {
            return Err(CliError::Usage(format!("{}: unknown key `{key}`", path.display())));
        }
        if (global.contains(&key) || active.contains(&key)) && !on_command_line(&argv, &key) {
            out.push(format!("--{key}"));
            out.push(value);
        }
    }
    Ok(out)
}
