//! Filling in task parameters: explicit overrides, fixed defaults, and the
//! tau ← AMI, dim ← FNN chain computed once per column.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use gaitnl_core::statespace::{fnn, self_ami, FnnParams, DEFAULT_AMI_BINS};

use crate::algorithms::auto_max_lag;
use crate::error::TaskError;
use crate::params::{AutoParam, ParamDefault, ParamSet, ParamSpec, Value};

type Cached = Result<usize, TaskError>;

/// Auto-resolved embedding parameters of one column. Each value is computed
/// by whichever task asks first and read by every later one.
#[derive(Default)]
pub struct ColumnCache {
    tau: OnceLock<Cached>,
    dims: Mutex<HashMap<usize, Arc<OnceLock<Cached>>>>,
}

fn failed(param: &str, cause: TaskError) -> TaskError {
    TaskError::new("AutoResolutionFailed", format!("{param}: {} ({})", cause.message, cause.kind))
}

impl ColumnCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Lag of the first minimum of the self-AMI curve.
    pub fn tau(&self, x: &[f64]) -> Cached {
        self.tau
            .get_or_init(|| {
                let c = self_ami(x, auto_max_lag(x.len()), DEFAULT_AMI_BINS).map_err(|e| failed("tau", e.into()))?;
                if c.selected_lag == 0 {
                    return Err(failed("tau", TaskError::new("DegenerateSeries", "AMI selected lag 0")));
                }
                Ok(c.selected_lag)
            })
            .clone()
    }

    /// FNN-selected dimension at lag `tau`.
    pub fn dim(&self, x: &[f64], tau: usize) -> Cached {
        let cell = {
            let mut dims = self.dims.lock().unwrap_or_else(|e| e.into_inner());
            Arc::clone(dims.entry(tau).or_default())
        };
        cell.get_or_init(|| {
            let c = fnn(x, tau, FnnParams::default()).map_err(|e| failed("dim", e.into()))?;
            if !c.converged {
                return Err(failed(
                    "dim",
                    TaskError::new("NoConvergence", format!("false fraction never fell below 1% up to dimension {}", c.dims.len())),
                ));
            }
            Ok(c.selected_dim)
        })
        .clone()
    }
}

/// Concrete parameters for one task. Overrides must already be parsed
/// against `schema`; `Required` entries must be present in them.
pub fn resolve_parameters(
    schema: &[ParamSpec],
    overrides: &BTreeMap<String, Value>,
    x: &[f64],
    cache: &ColumnCache,
) -> Result<ParamSet, TaskError> {
    let mut set = ParamSet::new();
    let mut autos = Vec::new();
    for spec in schema {
        if let Some(v) = overrides.get(spec.name) {
            set.insert(spec.name, v.clone());
            continue;
        }
        match &spec.default {
            ParamDefault::Value(v) => set.insert(spec.name, v.clone()),
            ParamDefault::Auto(a) => autos.push((spec.name, *a)),
            ParamDefault::Optional => {}
            ParamDefault::Required => {
                return Err(TaskError::new("InvalidParameter", format!("{} is required", spec.name)));
            }
        }
    }
    // tau first: dim depends on whichever tau the task ends up with
    autos.sort_by_key(|(_, a)| *a == AutoParam::Dim);
    for (name, a) in autos {
        let v = match a {
            AutoParam::Tau => cache.tau(x)?,
            AutoParam::Dim => {
                let tau = match set.opt_usize("tau")? {
                    Some(t) => t,
                    None => cache.tau(x)?,
                };
                cache.dim(x, tau)?
            }
        };
        set.insert(name, v.into());
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamKind;

    fn schema() -> Vec<ParamSpec> {
        vec![
            ParamSpec::auto("tau", AutoParam::Tau, ""),
            ParamSpec::auto("dim", AutoParam::Dim, ""),
            ParamSpec::int("m", 2, ""),
            ParamSpec::optional("radius", ParamKind::Float, ""),
        ]
    }

    fn sine(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 * 0.21).sin() + 0.3 * (i as f64 * 0.057).cos()).collect()
    }

    #[test]
    fn overrides_win_and_optional_stays_unset() {
        let x = sine(2000);
        let cache = ColumnCache::new();
        let mut o = BTreeMap::new();
        o.insert("tau".to_string(), Value::Int(7));
        o.insert("m".to_string(), Value::Int(3));
        let p = resolve_parameters(&schema(), &o, &x, &cache).unwrap();
        assert_eq!(p.usize("tau").unwrap(), 7);
        assert_eq!(p.usize("m").unwrap(), 3);
        assert!(p.get("radius").is_none());
        // dim resolved at the overridden lag
        assert_eq!(p.usize("dim").unwrap(), cache.dim(&x, 7).unwrap());
    }

    #[test]
    fn constant_column_fails_tau() {
        let x = vec![1.5; 500];
        let err = resolve_parameters(&schema(), &BTreeMap::new(), &x, &ColumnCache::new()).unwrap_err();
        assert_eq!(err.kind, "AutoResolutionFailed");
        assert!(err.message.starts_with("tau:") && err.message.contains("DegenerateSeries"), "{}", err.message);
    }

    #[test]
    fn required_without_override_is_an_error() {
        let s = vec![ParamSpec::new("with", ParamKind::Text, ParamDefault::Required, "")];
        assert!(resolve_parameters(&s, &BTreeMap::new(), &[1.0, 2.0], &ColumnCache::new()).is_err());
    }
}
