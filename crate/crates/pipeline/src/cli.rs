//! The `analyze` command line.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::Parser;
use gaitnl_core::NanPolicy;

use crate::batch::{default_memory_budget, default_workers, run_batch, AlgorithmSpec, BatchJob, BatchSummary};
use crate::error::BatchError;
use crate::registry::Registry;
use crate::report::TaskStatus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_TASK_FAILED: i32 = 1;
pub const EXIT_BATCH_ERROR: i32 = 2;

/// Run nonlinear time-series algorithms over every attribute column of
/// every dataset.
#[derive(Debug, Parser)]
#[command(name = "analyze", version)]
pub struct Args {
    /// CSV or Parquet files to analyse.
    #[arg(long, num_args = 1.., required_unless_present = "list_algorithms")]
    pub data: Vec<PathBuf>,

    /// Text file with one attribute (column) name per line.
    #[arg(long, required_unless_present = "list_algorithms")]
    pub attributes: Option<PathBuf>,

    /// Comma-separated algorithm names, or `all`.
    #[arg(long, value_delimiter = ',', required_unless_present = "list_algorithms")]
    pub algorithms: Vec<String>,

    /// Parameter override, e.g. `rqa.radius=0.5`. Repeatable.
    #[arg(long = "param", value_name = "ALGO.KEY=VALUE")]
    pub params: Vec<String>,

    /// Worker threads [default: available cores].
    #[arg(long, env = "GAITNL_WORKERS")]
    pub workers: Option<NonZeroUsize>,

    /// Memory budget per task in bytes [default: 75% of system memory].
    #[arg(long, value_name = "BYTES")]
    pub memory_budget: Option<u64>,

    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,

    /// Write SVG/CSV/PGM plot artifacts under <out>/plots.
    #[arg(long)]
    pub plots: bool,

    /// Print the registered algorithms with their parameters and exit.
    #[arg(long)]
    pub list_algorithms: bool,

    /// Trim leading and trailing NaN cells instead of rejecting the column.
    #[arg(long)]
    pub drop_leading_trailing_nan: bool,
}

fn parse_override(raw: &str) -> Result<(String, String, String), BatchError> {
    let bad = || BatchError::InvalidJob(format!("--param {raw:?} is not ALGO.KEY=VALUE"));
    let (lhs, value) = raw.split_once('=').ok_or_else(bad)?;
    let (algo, key) = lhs.split_once('.').ok_or_else(bad)?;
    if algo.is_empty() || key.is_empty() {
        return Err(bad());
    }
    Ok((algo.trim().to_string(), key.trim().to_string(), value.to_string()))
}

/// Turn parsed arguments into a job.
pub fn build_job(args: &Args, registry: &Registry) -> Result<BatchJob, BatchError> {
    let mut names: Vec<String> = Vec::new();
    for n in args.algorithms.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if n.eq_ignore_ascii_case("all") {
            names.extend(registry.runnable_by_default().into_iter().map(String::from));
        } else {
            names.push(n.to_string());
        }
    }
    let mut seen = std::collections::HashSet::new();
    names.retain(|n| seen.insert(n.clone()));
    let mut specs: Vec<AlgorithmSpec> = names.into_iter().map(AlgorithmSpec::new).collect();
    for raw in &args.params {
        let (algo, key, value) = parse_override(raw)?;
        match specs.iter_mut().find(|s| s.name == algo) {
            Some(s) => {
                s.overrides.insert(key, value);
            }
            None if registry.get(&algo).is_none() => return Err(BatchError::UnknownAlgorithm(algo)),
            None => {
                return Err(BatchError::InvalidJob(format!("--param {raw:?} names an algorithm that is not selected")))
            }
        }
    }
    Ok(BatchJob {
        dataset_paths: args.data.clone(),
        attribute_list_path: args.attributes.clone().unwrap_or_default(),
        algorithms: specs,
        workers: args.workers.map_or_else(default_workers, NonZeroUsize::get),
        memory_budget_bytes: args.memory_budget.unwrap_or_else(default_memory_budget),
        output_dir: args.out.clone(),
        emit_plots: args.plots,
        nan_policy: if args.drop_leading_trailing_nan { NanPolicy::TrimEdges } else { NanPolicy::Reject },
    })
}

fn print_summary(s: &BatchSummary, err: &mut impl Write, out: &mut impl Write) {
    for r in &s.results {
        match &r.status {
            TaskStatus::Ok => {}
            TaskStatus::Skipped { reason, detail } => {
                let _ = writeln!(err, "warning: skipped {} {} {}: {reason}: {detail}", r.file, r.column, r.algorithm);
            }
            TaskStatus::Failed { reason, detail } => {
                let _ = writeln!(err, "error: failed {} {} {}: {reason}: {detail}", r.file, r.column, r.algorithm);
            }
        }
    }
    let _ = writeln!(
        out,
        "{} ok, {} skipped, {} failed; {} artifacts",
        s.tasks_ok,
        s.tasks_skipped,
        s.tasks_failed,
        s.artifact_paths.len()
    );
    for p in &s.report_paths {
        let _ = writeln!(out, "wrote {}", p.display());
    }
}

/// Parse `args`, run the batch and return the process exit code: 0 when
/// every task is Ok or Skipped, 1 when any task failed, 2 when the batch
/// itself could not run.
pub fn main_with_args<I, T>(args: I, registry: &Registry) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BATCH_ERROR } else { EXIT_OK };
        }
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    if args.list_algorithms {
        let _ = write!(out, "{}", registry.describe());
        return EXIT_OK;
    }
    let result = build_job(&args, registry).and_then(|job| run_batch(&job, registry));
    match result {
        Ok(summary) => {
            print_summary(&summary, &mut err, &mut out);
            if summary.tasks_failed > 0 {
                EXIT_TASK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_BATCH_ERROR
        }
    }
}
