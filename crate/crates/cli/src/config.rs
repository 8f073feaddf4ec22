use serde_json::Value;
use std::ffi::OsString;

fn flag_present(args: &[OsString], flag: &str) -> bool {
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag || a.starts_with(&format!("{flag}="))
    })
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Appends flags from a JSON object config for every key not given explicitly.
///
/// Keys are flag names without the leading dashes; `true` adds a bare switch,
/// arrays are joined with commas.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path} is not valid JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path} must be a JSON object"));
    };
    let mut out = args.clone();
    for (key, v) in map {
        let flag = format!("--{key}");
        if key == "config" || flag_present(&args, &flag) {
            continue;
        }
        let scalar = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                out.push(flag.into());
                out.push(items.iter().map(scalar).collect::<Vec<_>>().join(",").into());
            }
            other => {
                out.push(flag.into());
                out.push(scalar(&other).into());
            }
        }
    }
    Ok(out)
}
