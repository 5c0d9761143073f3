//! Flat `key = value` config files and parameter-list parsing.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "SENSORNET_CONFIG";

pub const KNOWN_KEYS: &[&str] = &[
    "strategy",
    "n",
    "k",
    "theta",
    "p",
    "probe",
    "format",
    "out",
    "seed",
    "restarts",
    "preset",
    "tolerance",
    "degrees",
    "objective",
];

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Parse(String),
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("config line {}: expected 'key = value'", lineno + 1))?;
        let key = key.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key '{key}'", lineno + 1));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(ConfigError::Parse)
}

/// A number, or a multiple of pi such as `pi/8`, `-pi/4`, `3*pi/8`, `2pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let lower = t.to_ascii_lowercase();
    let Some(idx) = lower.find("pi") else {
        return Err(format!("'{t}' is not a number"));
    };
    let (head, tail) = (lower[..idx].trim_end_matches('*').trim(), lower[idx + 2..].trim());
    let factor = match head {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("'{t}' is not a number"))?,
    };
    let divisor = match tail.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"))?,
        None if tail.is_empty() => 1.0,
        None => return Err(format!("'{t}' is not a number")),
    };
    Ok(factor * PI / divisor)
}

/// Comma-separated items, each a number or an inclusive `start:stop:count`
/// range.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(parse_number(single)?),
            [start, stop, count] => {
                let (a, b) = (parse_number(start)?, parse_number(stop)?);
                let n: usize = count.trim().parse().map_err(|_| format!("bad range count in '{item}'"))?;
                match n {
                    0 => return Err(format!("range '{item}' has zero points")),
                    1 => out.push(a),
                    _ => {
                        out.extend((0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }))
                    }
                }
            }
            _ => return Err(format!("'{item}' is neither a number nor start:stop:count")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Like [`parse_list`] but every value must be a nonnegative integer.
pub fn parse_int_list(s: &str) -> Result<Vec<usize>, String> {
    parse_list(s)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
                Ok(x as usize)
            } else {
                Err(format!("'{x}' is not a nonnegative integer"))
            }
        })
        .collect()
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}
