//! Text input: `key = value` config files and comma-separated value lists.

use std::collections::BTreeMap;

use crate::assembly::SlipLength;
use crate::{Error, Result};

/// Ordered `key = value` pairs. Blank lines and `#` comments are ignored;
/// a later duplicate key overrides an earlier one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

pub fn parse_config_str(text: &str) -> Result<ConfigFile> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(c) => &raw[..c],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(err("empty key"));
        }
        if !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(err("key may only contain letters, digits, `_` and `-`"));
        }
        if value.is_empty() {
            return Err(err("empty value"));
        }
        entries.insert(key.replace('-', "_"), value.to_string());
    }
    Ok(ConfigFile { entries })
}

fn parse_items<T>(text: &str, what: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let out: Vec<T> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            item(s).ok_or_else(|| Error::InvalidConfig(format!("invalid {what} `{s}`")))
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::InvalidConfig(format!("empty {what} list")));
    }
    Ok(out)
}

/// Positive finite reals.
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    parse_items(text, "number", |s| s.parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0))
}

/// Slip lengths; `inf` (any case, optionally signed `+`) is infinite.
pub fn parse_eps_list(text: &str) -> Result<Vec<SlipLength>> {
    parse_items(text, "slip length", parse_slip_length)
}

pub fn parse_slip_length(s: &str) -> Option<SlipLength> {
    let t = s.strip_prefix('+').unwrap_or(s);
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Some(SlipLength::INFINITE);
    }
    let v: f64 = t.parse().ok()?;
    if !v.is_finite() {
        return None;
    }
    SlipLength::new(v).ok()
}

/// Mesh sizes (elements per side), at least 1.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    parse_items(text, "mesh size", |s| s.parse::<usize>().ok().filter(|&n| n > 0))
}

pub fn parse_zeta(text: &str) -> Result<f64> {
    match text.trim() {
        "1" | "+1" | "1.0" | "+1.0" => Ok(1.0),
        "-1" | "-1.0" => Ok(-1.0),
        other => Err(Error::InvalidConfig(format!("adjoint flag must be +1 or -1, got `{other}`"))),
    }
}
