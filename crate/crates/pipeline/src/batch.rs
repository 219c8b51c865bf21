//! Batch execution: files × attributes × algorithms, run on a worker pool,
//! with results written in task order by a single writer.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use gaitnl_core::series::{column_series, read_attribute_list};
use gaitnl_core::{load_dataset, Dataset, NanPolicy, TimeSeries};

use crate::error::{BatchError, TaskError};
use crate::params::{ParamDefault, Value};
use crate::plots::{artifact_stem, write_artifacts};
use crate::registry::{Algorithm, Outcome, Registry, TaskInput};
use crate::report::{render_resource_report, resource_rows, TaskResult, TaskStatus, SUMMARY_HEADER};
use crate::resolve::{resolve_parameters, ColumnCache};

/// One algorithm of a batch with its raw `key=value` overrides; anything not
/// overridden takes the schema default or is resolved automatically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmSpec {
    pub name: String,
    pub overrides: BTreeMap<String, String>,
}

impl AlgorithmSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), overrides: BTreeMap::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.overrides.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Debug, Clone)]
pub struct BatchJob {
    pub dataset_paths: Vec<PathBuf>,
    pub attribute_list_path: PathBuf,
    pub algorithms: Vec<AlgorithmSpec>,
    pub workers: usize,
    pub memory_budget_bytes: u64,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
    pub nan_policy: NanPolicy,
}

impl BatchJob {
    /// A job with default workers and memory budget.
    pub fn new(
        dataset_paths: Vec<PathBuf>,
        attribute_list_path: impl Into<PathBuf>,
        algorithms: Vec<AlgorithmSpec>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            dataset_paths,
            attribute_list_path: attribute_list_path.into(),
            algorithms,
            workers: default_workers(),
            memory_budget_bytes: default_memory_budget(),
            output_dir: output_dir.into(),
            emit_plots: false,
            nan_policy: NanPolicy::Reject,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// 75% of physical memory, or 8 GiB when it cannot be read.
pub fn default_memory_budget() -> u64 {
    fs::read_to_string("/proc/meminfo")
        .ok()
        .and_then(|s| parse_mem_total(&s))
        .map_or(8 << 30, |total| total / 4 * 3)
}

fn parse_mem_total(meminfo: &str) -> Option<u64> {
    let line = meminfo.lines().find(|l| l.starts_with("MemTotal:"))?;
    let mut parts = line.split_whitespace().skip(1);
    let kib: u64 = parts.next()?.parse().ok()?;
    Some(kib * 1024)
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub tasks_ok: usize,
    pub tasks_skipped: usize,
    pub tasks_failed: usize,
    /// Result files, summary and resource report.
    pub report_paths: Vec<PathBuf>,
    pub artifact_paths: Vec<PathBuf>,
    /// Every task in task order.
    pub results: Vec<TaskResult>,
}

struct Prepared<'r> {
    algorithm: &'r dyn Algorithm,
    overrides: BTreeMap<String, Value>,
}

fn prepare<'r>(job: &BatchJob, registry: &'r Registry) -> Result<Vec<Prepared<'r>>, BatchError> {
    if job.algorithms.is_empty() {
        return Err(BatchError::InvalidJob("no algorithms selected".into()));
    }
    if job.dataset_paths.is_empty() {
        return Err(BatchError::InvalidJob("no dataset paths".into()));
    }
    if job.workers == 0 {
        return Err(BatchError::InvalidJob("workers must be at least 1".into()));
    }
    if job.memory_budget_bytes == 0 {
        return Err(BatchError::InvalidJob("memory budget must be positive".into()));
    }
    let mut seen = HashSet::new();
    job.algorithms
        .iter()
        .map(|spec| {
            let algorithm = registry
                .get(&spec.name)
                .ok_or_else(|| BatchError::UnknownAlgorithm(spec.name.clone()))?;
            if !seen.insert(spec.name.as_str()) {
                return Err(BatchError::InvalidJob(format!("algorithm {:?} selected twice", spec.name)));
            }
            let schema = algorithm.schema();
            let invalid = |reason: String| BatchError::InvalidParameter { algorithm: spec.name.clone(), reason };
            let mut overrides = BTreeMap::new();
            for (k, raw) in &spec.overrides {
                let s = schema
                    .iter()
                    .find(|s| s.name == k)
                    .ok_or_else(|| invalid(format!("unknown parameter {k:?}")))?;
                let v = s.kind.parse(raw).map_err(|e| invalid(format!("{k}: {e}")))?;
                overrides.insert(k.clone(), v);
            }
            if let Some(s) = schema
                .iter()
                .find(|s| s.default == ParamDefault::Required && !overrides.contains_key(s.name))
            {
                return Err(invalid(format!("parameter {} is required", s.name)));
            }
            Ok(Prepared { algorithm, overrides })
        })
        .collect()
}

fn unwritable(path: &Path, e: impl ToString) -> BatchError {
    BatchError::OutputDirUnwritable { path: path.to_path_buf(), reason: e.to_string() }
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn stem_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file_label(path))
}

struct Source {
    label: String,
    stem: String,
    dataset: Result<Dataset, TaskError>,
    columns: Vec<(Result<TimeSeries, TaskError>, ColumnCache)>,
}

struct Task {
    file: usize,
    column: usize,
    algorithm: usize,
}

struct Ctx<'a> {
    job: &'a BatchJob,
    attributes: &'a [String],
    algorithms: &'a [Prepared<'a>],
    sources: &'a [Source],
    plot_dir: Option<&'a Path>,
}

struct Finished {
    result: TaskResult,
    artifacts: Vec<PathBuf>,
}

fn skipped(e: TaskError) -> TaskStatus {
    TaskStatus::Skipped { reason: e.kind, detail: e.message }
}

/// Errors that mean the task should not run rather than that it went wrong.
fn is_skip(e: &TaskError) -> bool {
    matches!(e.kind.as_str(), "MemoryBudgetExceeded" | "AutoResolutionFailed")
}

type Params = Vec<(String, Value)>;

/// Resolve, budget-check and run one task. Failures carry the parameters
/// resolved so far.
fn attempt(
    ctx: &Ctx<'_>,
    prepared: &Prepared<'_>,
    series: &TimeSeries,
    dataset: &Dataset,
    cache: &ColumnCache,
) -> Result<(Outcome, Params, f64), (TaskError, Option<Params>)> {
    let algorithm = prepared.algorithm;
    let params = resolve_parameters(&algorithm.schema(), &prepared.overrides, series.samples(), cache)
        .map_err(|e| (e, None))?;
    let recorded: Params = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    if let Some(need) = algorithm.estimate_bytes(series.len(), &params) {
        if need > ctx.job.memory_budget_bytes {
            let e = TaskError::new(
                "MemoryBudgetExceeded",
                format!("needs ~{need} bytes, budget is {}", ctx.job.memory_budget_bytes),
            );
            return Err((e, Some(recorded)));
        }
    }
    let input = TaskInput {
        series,
        dataset,
        nan_policy: ctx.job.nan_policy,
        want_artifacts: ctx.plot_dir.is_some(),
    };
    let start = Instant::now();
    let out = algorithm.run(&input, &params);
    let elapsed = start.elapsed().as_secs_f64();
    match out {
        Ok(o) => Ok((o, recorded, elapsed)),
        Err(e) => Err((e, Some(recorded))),
    }
}

fn run_task(ctx: &Ctx<'_>, task: &Task) -> Finished {
    let source = &ctx.sources[task.file];
    let prepared = &ctx.algorithms[task.algorithm];
    let mut result = TaskResult {
        file: source.label.clone(),
        column: ctx.attributes[task.column].clone(),
        algorithm: prepared.algorithm.name().to_string(),
        parameters: prepared.overrides.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        outputs: Vec::new(),
        status: TaskStatus::Ok,
        wall_time_s: 0.0,
        peak_memory_bytes: 0,
    };
    let mut artifacts = Vec::new();
    let (series, cache) = match (&source.dataset, &source.columns[task.column]) {
        (Err(e), _) | (_, (Err(e), _)) => {
            result.status = skipped(e.clone());
            return Finished { result, artifacts };
        }
        (Ok(_), (Ok(s), c)) => (s, c),
    };
    let dataset = source.dataset.as_ref().expect("checked above");

    let outcome = catch_unwind(AssertUnwindSafe(|| attempt(ctx, prepared, series, dataset, cache)));
    match outcome {
        Ok(Ok((o, params, elapsed))) => {
            result.parameters = params;
            result.wall_time_s = elapsed;
            result.peak_memory_bytes = o.peak_bytes;
            result.outputs = o.outputs;
            if let (Some(dir), false) = (ctx.plot_dir, o.artifacts.is_empty()) {
                let stem = artifact_stem(&source.stem, &result.column, &result.algorithm);
                match write_artifacts(dir, &stem, &o.artifacts) {
                    Ok(paths) => artifacts = paths,
                    Err(e) => result.outputs.push(("plot_error".into(), format!("PlotWriteFailed: {e}").into())),
                }
            }
        }
        Ok(Err((e, params))) => {
            if let Some(p) = params {
                result.parameters = p;
            }
            result.status = if is_skip(&e) {
                skipped(e)
            } else {
                TaskStatus::Failed { reason: e.kind, detail: e.message }
            };
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            result.status = TaskStatus::Failed { reason: "Panic".into(), detail: msg };
        }
    }
    Finished { result, artifacts }
}

struct Writers {
    results: Vec<BufWriter<File>>,
    summary: csv::Writer<File>,
}

/// Run a batch. Per-task problems end up in the task records; only problems
/// with the batch as a whole are returned as errors.
pub fn run_batch(job: &BatchJob, registry: &Registry) -> Result<BatchSummary, BatchError> {
    let algorithms = prepare(job, registry)?;
    let attributes = read_attribute_list(&job.attribute_list_path).map_err(|source| BatchError::AttributeList {
        path: job.attribute_list_path.clone(),
        source,
    })?;
    let attributes = attributes.names().to_vec();

    let out = &job.output_dir;
    fs::create_dir_all(out).map_err(|e| unwritable(out, e))?;
    let plot_dir = job.emit_plots.then(|| out.join("plots"));
    if let Some(d) = &plot_dir {
        fs::create_dir_all(d).map_err(|e| unwritable(d, e))?;
    }
    let mut report_paths = Vec::new();
    let mut writers = Writers {
        results: Vec::new(),
        summary: {
            let p = out.join("results_summary.csv");
            let w = csv::Writer::from_path(&p).map_err(|e| unwritable(out, e))?;
            report_paths.push(p);
            w
        },
    };
    for a in &algorithms {
        let p = out.join(format!("{}_results.txt", a.algorithm.name()));
        writers.results.push(BufWriter::new(File::create(&p).map_err(|e| unwritable(out, e))?));
        report_paths.push(p);
    }
    writers.summary.write_record(SUMMARY_HEADER).map_err(|e| unwritable(out, e))?;

    let sources: Vec<Source> = job
        .dataset_paths
        .iter()
        .map(|path| {
            let dataset = load_dataset(path).map_err(TaskError::from);
            let columns = attributes
                .iter()
                .map(|name| {
                    let s = match &dataset {
                        Ok(d) => column_series(d, name, job.nan_policy).map_err(TaskError::from),
                        Err(e) => Err(e.clone()),
                    };
                    (s, ColumnCache::new())
                })
                .collect();
            Source { label: file_label(path), stem: stem_label(path), dataset, columns }
        })
        .collect();

    let mut tasks = Vec::new();
    for file in 0..sources.len() {
        for column in 0..attributes.len() {
            for algorithm in 0..algorithms.len() {
                tasks.push(Task { file, column, algorithm });
            }
        }
    }

    let ctx = Ctx {
        job,
        attributes: &attributes,
        algorithms: &algorithms,
        sources: &sources,
        plot_dir: plot_dir.as_deref(),
    };
    let next = AtomicUsize::new(0);
    let workers = job.workers.min(tasks.len()).max(1);
    let mut results: Vec<TaskResult> = Vec::with_capacity(tasks.len());
    let mut artifact_paths = Vec::new();
    let mut write_error = None;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Finished)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (ctx, tasks, next) = (&ctx, &tasks, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                if tx.send((i, run_task(ctx, task))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // completions arrive in any order; emit strictly by task index
        let mut pending = BTreeMap::new();
        for (i, done) in rx {
            pending.insert(i, done);
            while let Some(done) = pending.remove(&results.len()) {
                let algo = tasks[results.len()].algorithm;
                if write_error.is_none() {
                    let r = &done.result;
                    let w = writeln!(writers.results[algo], "{}", r.record_line())
                        .map_err(|e| e.to_string())
                        .and_then(|_| writers.summary.write_record(r.summary_row()).map_err(|e| e.to_string()));
                    write_error = w.err();
                }
                artifact_paths.extend(done.artifacts);
                results.push(done.result);
            }
        }
    });
    if let Some(e) = write_error {
        return Err(unwritable(out, e));
    }
    for w in &mut writers.results {
        w.flush().map_err(|e| unwritable(out, e))?;
    }
    writers.summary.flush().map_err(|e| unwritable(out, e))?;

    let names: Vec<String> = algorithms.iter().map(|a| a.algorithm.name().to_string()).collect();
    let report = out.join("resource_report.txt");
    fs::write(&report, render_resource_report(&resource_rows(&names, &results))).map_err(|e| unwritable(out, e))?;
    report_paths.push(report);

    let summary = BatchSummary {
        tasks_ok: results.iter().filter(|r| r.status.is_ok()).count(),
        tasks_skipped: results.iter().filter(|r| r.status.is_skipped()).count(),
        tasks_failed: results.iter().filter(|r| r.status.is_failed()).count(),
        report_paths,
        artifact_paths,
        results,
    };
    if summary.tasks_ok + summary.tasks_failed == 0 {
        return Err(BatchError::NoRunnableTasks);
    }
    Ok(summary)
}
