//! `--config FILE` support: a flat JSON object, or a previously written
//! manifest, whose entries become flags placed right after the subcommand.
//! Later flags override earlier ones, so anything typed explicitly wins.

use std::ffi::OsString;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, Result};

fn config_path(args: &[OsString]) -> Result<Option<OsString>> {
    let mut found = None;
    let mut it = args.iter().skip(2);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            let v = it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            found = Some(v.clone());
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(OsString::from(v));
        }
    }
    Ok(found)
}

pub fn load_object(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Usage(format!("{}: config must be a JSON object", path.display()))),
    }
}

/// Flags for one config entry. `null` and `false` contribute nothing; arrays
/// are joined with commas.
fn to_flags(key: &str, v: &Value) -> Result<Vec<OsString>> {
    let flag = OsString::from(format!("--{key}"));
    let scalar = |v: &Value| -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            Value::Bool(b) => Ok(b.to_string()),
            _ => Err(CliError::Usage(format!("config key {key:?}: unsupported value {v}"))),
        }
    };
    Ok(match v {
        Value::Null | Value::Bool(false) => vec![],
        Value::Bool(true) => vec![flag],
        Value::Array(xs) => {
            let parts = xs.iter().map(scalar).collect::<Result<Vec<_>>>()?;
            vec![flag, parts.join(",").into()]
        }
        other => vec![flag, scalar(other)?.into()],
    })
}

/// Returns `args` with the config file's entries spliced in after the
/// subcommand name. A manifest contributes its `params` and must name the
/// same command.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    if args.len() < 2 {
        return Ok(args);
    }
    let Some(path) = config_path(&args)? else { return Ok(args) };
    let path = Path::new(&path);
    let mut obj = load_object(path)?;
    if let (Some(Value::String(cmd)), Some(Value::Object(params))) = (obj.get("command"), obj.get("params")) {
        let sub = args[1].to_string_lossy();
        if *cmd != sub {
            return Err(CliError::Usage(format!(
                "{} is a manifest for `{cmd}`, not `{sub}`",
                path.display()
            )));
        }
        obj = params.clone();
    }
    let mut injected = Vec::new();
    for (k, v) in &obj {
        if k == "config" {
            continue;
        }
        injected.extend(to_flags(k, v)?);
    }
    let mut out = Vec::with_capacity(args.len() + injected.len());
    out.extend_from_slice(&args[..2]);
    out.extend(injected);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}
