//! Per-experiment parameter schemas and their resolution from config-file
//! and command-line sources.

use std::collections::BTreeMap;

use pathlab::format::sig;
use serde_json::Value as Json;

use crate::expr;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Numeric expression.
    Real,
    /// Numeric expression or an inclusive `start:stop:step` range.
    Grid,
    /// Non-negative integer; `1e6` is accepted.
    Count,
    /// `auto` or a positive integer.
    Truncation,
    Choice(&'static [&'static str]),
    /// File path; absent unless given.
    Path,
}

#[derive(Debug, Clone, Copy)]
pub struct Spec {
    pub name: &'static str,
    pub kind: Kind,
    /// `None` makes the parameter optional for [`Kind::Path`] and required
    /// otherwise.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Grid(Grid),
    Count(u64),
    Truncation(Option<u32>),
    Choice(&'static str),
    Path(Option<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: Option<f64>,
    pub points: Vec<f64>,
}

impl Grid {
    fn single(x: f64) -> Self {
        Self {
            start: x,
            stop: x,
            step: None,
            points: vec![x],
        }
    }

    fn range(start: f64, stop: f64, step: f64) -> Result<Self, String> {
        if step.is_nan() || step <= 0.0 {
            return Err(format!("grid step must be positive, got {step}"));
        }
        // the stop point counts when within rounding of the last step
        let span = (stop - start) / step;
        if span < -1e-9 {
            return Err(format!("empty grid: stop {stop} is below start {start}"));
        }
        let count = (span + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(format!("grid has {count} points"));
        }
        Ok(Self {
            start,
            stop,
            step: Some(step),
            points: (0..count).map(|k| start + step * k as f64).collect(),
        })
    }

    fn echo(&self) -> String {
        match self.step {
            None => sig(self.start),
            Some(step) => format!("{}:{}:{}", sig(self.start), sig(self.stop), sig(step)),
        }
    }
}

impl Value {
    pub fn echo(&self) -> String {
        match self {
            Value::Real(x) => sig(*x),
            Value::Grid(g) => g.echo(),
            Value::Count(n) => n.to_string(),
            Value::Truncation(None) => "auto".into(),
            Value::Truncation(Some(n)) => n.to_string(),
            Value::Choice(c) => (*c).into(),
            Value::Path(None) => "none".into(),
            Value::Path(Some(p)) => p.clone(),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Real(x) => crate::output::real_json(*x),
            Value::Grid(g) if g.step.is_none() => crate::output::real_json(g.start),
            Value::Count(n) => Json::from(*n),
            Value::Truncation(Some(n)) => Json::from(*n),
            Value::Path(None) => Json::Null,
            other => Json::String(other.echo()),
        }
    }
}

fn parse(spec: &Spec, raw: &str) -> Result<Value, String> {
    let raw = raw.trim();
    match spec.kind {
        Kind::Real => expr::eval(raw).map(Value::Real),
        Kind::Grid => {
            let parts: Vec<&str> = raw.split(':').collect();
            match parts.as_slice() {
                [x] => expr::eval(x).map(|x| Value::Grid(Grid::single(x))),
                [start, stop, step] => {
                    Grid::range(expr::eval(start)?, expr::eval(stop)?, expr::eval(step)?)
                        .map(Value::Grid)
                }
                _ => Err(format!("`{raw}` is neither a value nor start:stop:step")),
            }
        }
        Kind::Count => count(raw).map(Value::Count),
        Kind::Truncation if raw == "auto" => Ok(Value::Truncation(None)),
        Kind::Truncation => match count(raw)? {
            0 => Err("truncation must be positive or `auto`".into()),
            n => u32::try_from(n)
                .map(|n| Value::Truncation(Some(n)))
                .map_err(|_| format!("truncation {n} is too large")),
        },
        Kind::Choice(options) => options
            .iter()
            .find(|o| **o == raw)
            .map(|o| Value::Choice(o))
            .ok_or_else(|| format!("`{raw}` is not one of {}", options.join(", "))),
        Kind::Path if raw.is_empty() => Err("empty path".into()),
        Kind::Path => Ok(Value::Path(Some(raw.to_string()))),
    }
}

fn count(raw: &str) -> Result<u64, String> {
    if let Ok(n) = raw.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = raw
        .parse()
        .map_err(|_| format!("`{raw}` is not a non-negative integer"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(format!("`{raw}` is not a non-negative integer"))
    }
}

/// Parameters in schema order, every one resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    values: Vec<(&'static str, Value)>,
}

impl Resolved {
    /// Later sources win: defaults, then `file`, then `flags`. Unknown names
    /// are rejected in both sources.
    pub fn new(
        schema: &[Spec],
        file: &BTreeMap<String, String>,
        flags: &[(String, String)],
    ) -> Result<Self, CliError> {
        let known = |name: &str| schema.iter().any(|s| s.name == name);
        let names = || schema.iter().map(|s| s.name).collect::<Vec<_>>().join(", ");
        for name in file.keys().chain(flags.iter().map(|(n, _)| n)) {
            if !known(name) {
                return Err(CliError::Usage(format!(
                    "unknown parameter `{name}`; expected one of: {}",
                    names()
                )));
            }
        }
        let mut values = Vec::with_capacity(schema.len());
        for spec in schema {
            let raw = flags
                .iter()
                .rev()
                .find(|(n, _)| n == spec.name)
                .map(|(_, v)| v.as_str())
                .or_else(|| file.get(spec.name).map(String::as_str))
                .or(spec.default);
            let value = match raw {
                Some(raw) => parse(spec, raw)
                    .map_err(|e| CliError::Usage(format!("parameter `{}`: {e}", spec.name)))?,
                None if spec.kind == Kind::Path => Value::Path(None),
                None => {
                    return Err(CliError::Usage(format!(
                        "parameter `{}` is required",
                        spec.name
                    )))
                }
            };
            values.push((spec.name, value));
        }
        Ok(Self { values })
    }

    pub fn iter(&self) -> impl Iterator<Item = &(&'static str, Value)> {
        self.values.iter()
    }

    fn get(&self, name: &str) -> &Value {
        &self
            .values
            .iter()
            .find(|(n, _)| *n == name)
            .unwrap_or_else(|| panic!("`{name}` is not in the schema"))
            .1
    }

    pub fn real(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Real(x) => *x,
            other => panic!("`{name}` is {other:?}"),
        }
    }

    pub fn grid(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Value::Grid(g) => &g.points,
            other => panic!("`{name}` is {other:?}"),
        }
    }

    pub fn count(&self, name: &str) -> u64 {
        match self.get(name) {
            Value::Count(n) => *n,
            other => panic!("`{name}` is {other:?}"),
        }
    }

    pub fn truncation(&self, name: &str) -> Option<u32> {
        match self.get(name) {
            Value::Truncation(n) => *n,
            other => panic!("`{name}` is {other:?}"),
        }
    }

    pub fn choice(&self, name: &str) -> &'static str {
        match self.get(name) {
            Value::Choice(c) => c,
            other => panic!("`{name}` is {other:?}"),
        }
    }

    pub fn path(&self, name: &str) -> Option<&str> {
        match self.get(name) {
            Value::Path(p) => p.as_deref(),
            other => panic!("`{name}` is {other:?}"),
        }
    }
}

/// Splits `name=value`.
pub fn split_flag(flag: &str) -> Result<(String, String), CliError> {
    flag.split_once('=')
        .map(|(n, v)| (n.trim().to_string(), v.to_string()))
        .filter(|(n, _)| !n.is_empty())
        .ok_or_else(|| CliError::Usage(format!("`{flag}` is not of the form name=value")))
}
