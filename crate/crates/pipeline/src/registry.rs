//! Algorithm registry. Anything implementing [`Algorithm`] can be registered
//! and is then addressable from a batch and the command line by name.

use gaitnl_core::rqa::RecurrencePlot;
use gaitnl_core::{Dataset, NanPolicy, TimeSeries};

use crate::error::{BatchError, TaskError};
use crate::params::{ParamDefault, ParamSet, ParamSpec, Value};

/// What an algorithm sees of its task.
pub struct TaskInput<'a> {
    pub series: &'a TimeSeries,
    /// The file the column came from, for algorithms that pair columns.
    pub dataset: &'a Dataset,
    pub nan_policy: NanPolicy,
    /// Whether plot artifacts will be written; skip building them otherwise.
    pub want_artifacts: bool,
}

/// A curve for an SVG chart and its CSV twin. Every entry in `series` has
/// one value per `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<Option<f64>>)>,
    /// Plot both axes on log10 scales.
    pub log_log: bool,
    /// Straight line `y = slope·x + intercept` in plotted coordinates over `[from, to]` of x.
    pub fit: Option<FitLine>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug)]
pub enum Artifact {
    Curve(Curve),
    Recurrence(RecurrencePlot),
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<(String, Value)>,
    /// Bytes held by the task's data structures at their peak.
    pub peak_bytes: u64,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn new(peak_bytes: u64) -> Self {
        Self { peak_bytes, ..Self::default() }
    }

    pub fn output(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.outputs.push((key.into(), value.into()));
        self
    }

    pub fn artifact(mut self, a: Artifact) -> Self {
        self.artifacts.push(a);
        self
    }
}

pub trait Algorithm: Send + Sync {
    fn name(&self) -> &str;

    fn description(&self) -> &str {
        ""
    }

    fn schema(&self) -> Vec<ParamSpec>;

    /// Bytes the task would need for a series of `len` samples, checked
    /// against the batch memory budget before [`Algorithm::run`].
    fn estimate_bytes(&self, _len: usize, _params: &ParamSet) -> Option<u64> {
        None
    }

    fn run(&self, input: &TaskInput<'_>, params: &ParamSet) -> Result<Outcome, TaskError>;
}

#[derive(Default)]
pub struct Registry {
    entries: Vec<Box<dyn Algorithm>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding every built-in algorithm.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        for a in crate::algorithms::builtins() {
            r.register(a).expect("built-in names are unique");
        }
        r
    }

    pub fn register(&mut self, algorithm: Box<dyn Algorithm>) -> Result<(), BatchError> {
        if self.get(algorithm.name()).is_some() {
            return Err(BatchError::DuplicateAlgorithmName(algorithm.name().to_string()));
        }
        self.entries.push(algorithm);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Algorithm> {
        self.entries.iter().find(|a| a.name() == name).map(|a| a.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|a| a.name())
    }

    /// Algorithms selected by `all`: those runnable without extra parameters.
    pub fn runnable_by_default(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|a| !a.schema().iter().any(|s| s.default == ParamDefault::Required))
            .map(|a| a.name())
            .collect()
    }

    /// Human-readable listing of every algorithm and its parameters.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for a in &self.entries {
            out.push_str(a.name());
            if !a.description().is_empty() {
                out.push_str("  ");
                out.push_str(a.description());
            }
            out.push('\n');
            for s in a.schema() {
                out.push_str(&format!(
                    "    {:<16} {:<5} default={:<10} {}\n",
                    s.name,
                    s.kind.as_str(),
                    s.default_label(),
                    s.help
                ));
            }
        }
        out
    }
}
