//! Parameter schemas, typed values and per-task parameter sets.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::TaskError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            // shortest representation that parses back to the same bits
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// An optional real, written as `undefined` when absent.
impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or_else(|| Value::Text("undefined".into()), Value::Float)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Non-negative integer.
    Int,
    Float,
    Bool,
    Text,
}

impl ParamKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Float => "float",
            ParamKind::Bool => "bool",
            ParamKind::Text => "text",
        }
    }

    pub fn parse(&self, raw: &str) -> Result<Value, String> {
        let raw = raw.trim();
        match self {
            ParamKind::Int => raw
                .parse::<u32>()
                .map(|v| Value::Int(v.into()))
                .map_err(|_| format!("{raw:?} is not a non-negative integer")),
            ParamKind::Float => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Value::Float(v)),
                _ => Err(format!("{raw:?} is not a finite number")),
            },
            ParamKind::Bool => match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(Value::Bool(true)),
                "false" | "no" | "0" | "off" => Ok(Value::Bool(false)),
                _ => Err(format!("{raw:?} is not a boolean")),
            },
            ParamKind::Text if raw.is_empty() => Err("empty value".into()),
            ParamKind::Text => Ok(Value::Text(raw.to_string())),
        }
    }
}

/// Parameters the pipeline can fill in from the column itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutoParam {
    /// First minimum of the self-AMI curve.
    Tau,
    /// FNN dimension at the task's tau.
    Dim,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamDefault {
    Value(Value),
    Auto(AutoParam),
    /// Left out unless given; the algorithm picks its own behaviour.
    Optional,
    /// Must be given on the command line.
    Required,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamDefault,
    pub help: &'static str,
}

impl ParamSpec {
    pub fn new(name: &'static str, kind: ParamKind, default: ParamDefault, help: &'static str) -> Self {
        Self { name, kind, default, help }
    }

    pub fn int(name: &'static str, default: usize, help: &'static str) -> Self {
        Self::new(name, ParamKind::Int, ParamDefault::Value(default.into()), help)
    }

    pub fn float(name: &'static str, default: f64, help: &'static str) -> Self {
        Self::new(name, ParamKind::Float, ParamDefault::Value(default.into()), help)
    }

    pub fn boolean(name: &'static str, default: bool, help: &'static str) -> Self {
        Self::new(name, ParamKind::Bool, ParamDefault::Value(default.into()), help)
    }

    pub fn text(name: &'static str, default: &str, help: &'static str) -> Self {
        Self::new(name, ParamKind::Text, ParamDefault::Value(default.into()), help)
    }

    pub fn optional(name: &'static str, kind: ParamKind, help: &'static str) -> Self {
        Self::new(name, kind, ParamDefault::Optional, help)
    }

    pub fn auto(name: &'static str, what: AutoParam, help: &'static str) -> Self {
        Self::new(name, ParamKind::Int, ParamDefault::Auto(what), help)
    }

    pub fn default_label(&self) -> String {
        match &self.default {
            ParamDefault::Value(v) => v.to_string(),
            ParamDefault::Auto(_) => "auto".into(),
            ParamDefault::Optional => "unset".into(),
            ParamDefault::Required => "required".into(),
        }
    }
}

/// Concrete parameters of one task, sorted by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet(BTreeMap<String, Value>);

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: Value) {
        self.0.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn missing(key: &str) -> TaskError {
        TaskError::new("InvalidParameter", format!("parameter {key} is not set"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, TaskError> {
        self.opt_usize(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, TaskError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Int(v)) if *v >= 0 => Ok(Some(*v as usize)),
            Some(v) => Err(TaskError::new("InvalidParameter", format!("{key}={v} is not a count"))),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, TaskError> {
        self.opt_f64(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, TaskError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Int(v)) => Ok(Some(*v as f64)),
            Some(v) => Err(TaskError::new("InvalidParameter", format!("{key}={v} is not a number"))),
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool, TaskError> {
        match self.get(key) {
            Some(Value::Bool(v)) => Ok(*v),
            Some(v) => Err(TaskError::new("InvalidParameter", format!("{key}={v} is not a boolean"))),
            None => Err(Self::missing(key)),
        }
    }

    pub fn text(&self, key: &str) -> Result<&str, TaskError> {
        self.opt_text(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn opt_text(&self, key: &str) -> Result<Option<&str>, TaskError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Text(v)) => Ok(Some(v)),
            Some(v) => Err(TaskError::new("InvalidParameter", format!("{key}={v} is not text"))),
        }
    }
}

impl FromIterator<(String, Value)> for ParamSet {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_by_kind() {
        assert_eq!(ParamKind::Int.parse(" 7 "), Ok(Value::Int(7)));
        assert!(ParamKind::Int.parse("-1").is_err());
        assert_eq!(ParamKind::Float.parse("0.25"), Ok(Value::Float(0.25)));
        assert!(ParamKind::Float.parse("nan").is_err());
        assert_eq!(ParamKind::Bool.parse("Off"), Ok(Value::Bool(false)));
        assert!(ParamKind::Text.parse("  ").is_err());
    }

    #[test]
    fn floats_round_trip_through_display() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            let s = Value::Float(v).to_string();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn ints_read_as_floats() {
        let mut p = ParamSet::new();
        p.insert("r", Value::Int(2));
        assert_eq!(p.f64("r").unwrap(), 2.0);
        assert!(p.bool("r").is_err());
        assert!(p.usize("missing").is_err());
    }
}
