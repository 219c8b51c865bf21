//! Result records, the summary table and the resource report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::params::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskStatus {
    Ok,
    Skipped { reason: String, detail: String },
    Failed { reason: String, detail: String },
}

impl TaskStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskStatus::Ok => "ok",
            TaskStatus::Skipped { .. } => "skipped",
            TaskStatus::Failed { .. } => "failed",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            TaskStatus::Ok => None,
            TaskStatus::Skipped { reason, .. } | TaskStatus::Failed { reason, .. } => Some(reason),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, TaskStatus::Ok)
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, TaskStatus::Skipped { .. })
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, TaskStatus::Failed { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskResult {
    pub file: String,
    pub column: String,
    pub algorithm: String,
    pub parameters: Vec<(String, Value)>,
    pub outputs: Vec<(String, Value)>,
    pub status: TaskStatus,
    /// Time spent inside the algorithm call; 0 for tasks that never ran.
    pub wall_time_s: f64,
    pub peak_memory_bytes: u64,
}

/// Quote a value when it would otherwise break the `key=value` layout.
pub fn quote(v: &str) -> String {
    if v.is_empty() || v.chars().any(|c| c.is_whitespace() || c == '"' || c == '=' || c.is_control()) {
        format!("{v:?}")
    } else {
        v.to_string()
    }
}

impl TaskResult {
    /// One line of `<algorithm>_results.txt`. Timing is left out so files are
    /// reproducible.
    pub fn record_line(&self) -> String {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in &self.parameters {
            kv.insert(format!("param.{k}"), v.to_string());
        }
        for (k, v) in &self.outputs {
            kv.insert(k.clone(), v.to_string());
        }
        if let TaskStatus::Skipped { reason, detail } | TaskStatus::Failed { reason, detail } = &self.status {
            kv.insert("reason".into(), reason.clone());
            kv.insert("detail".into(), detail.clone());
        }
        let mut line = format!(
            "file={} column={} status={}",
            quote(&self.file),
            quote(&self.column),
            self.status.as_str()
        );
        for (k, v) in kv {
            let _ = write!(line, " {}={}", quote(&k), quote(&v));
        }
        line
    }

    pub fn summary_row(&self) -> Vec<String> {
        let join = |kv: &[(String, Value)]| kv.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        vec![
            self.file.clone(),
            self.column.clone(),
            self.algorithm.clone(),
            self.status.as_str().into(),
            self.status.reason().unwrap_or("").into(),
            format!("{:.6}", self.wall_time_s),
            self.peak_memory_bytes.to_string(),
            join(&self.parameters),
            join(&self.outputs),
        ]
    }
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "file",
    "column",
    "algorithm",
    "status",
    "reason",
    "wall_time_s",
    "peak_memory_bytes",
    "parameters",
    "outputs",
];

/// Per-algorithm aggregate over tasks that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceRow {
    pub algorithm: String,
    pub tasks: usize,
    pub ok: usize,
    pub skipped: usize,
    pub failed: usize,
    pub mean_wall_time_s: f64,
    pub mean_peak_memory_bytes: f64,
    pub max_peak_memory_bytes: u64,
}

/// Aggregate in the order the algorithms are given.
pub fn resource_rows(algorithms: &[String], results: &[TaskResult]) -> Vec<ResourceRow> {
    algorithms
        .iter()
        .map(|a| {
            let mine: Vec<&TaskResult> = results.iter().filter(|r| &r.algorithm == a).collect();
            let ok: Vec<&&TaskResult> = mine.iter().filter(|r| r.status.is_ok()).collect();
            let n = ok.len().max(1) as f64;
            ResourceRow {
                algorithm: a.clone(),
                tasks: mine.len(),
                ok: ok.len(),
                skipped: mine.iter().filter(|r| r.status.is_skipped()).count(),
                failed: mine.iter().filter(|r| r.status.is_failed()).count(),
                mean_wall_time_s: ok.iter().map(|r| r.wall_time_s).sum::<f64>() / n,
                mean_peak_memory_bytes: ok.iter().map(|r| r.peak_memory_bytes as f64).sum::<f64>() / n,
                max_peak_memory_bytes: ok.iter().map(|r| r.peak_memory_bytes).max().unwrap_or(0),
            }
        })
        .collect()
}

fn human_bytes(b: f64) -> String {
    const UNITS: [&str; 5] = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut v = b;
    let mut u = 0;
    while v >= 1024.0 && u + 1 < UNITS.len() {
        v /= 1024.0;
        u += 1;
    }
    if u == 0 { format!("{v:.0} {}", UNITS[0]) } else { format!("{v:.2} {}", UNITS[u]) }
}

pub fn render_resource_report(rows: &[ResourceRow]) -> String {
    let mut s = String::from("# Mean over completed tasks; wall time covers the algorithm call only.\n");
    let _ = writeln!(
        s,
        "{:<14} {:>6} {:>6} {:>8} {:>7} {:>16} {:>16} {:>16}",
        "algorithm", "tasks", "ok", "skipped", "failed", "mean_wall_s", "mean_peak_mem", "max_peak_mem"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:>6} {:>6} {:>8} {:>7} {:>16.6} {:>16} {:>16}",
            r.algorithm,
            r.tasks,
            r.ok,
            r.skipped,
            r.failed,
            r.mean_wall_time_s,
            human_bytes(r.mean_peak_memory_bytes),
            human_bytes(r.max_peak_memory_bytes as f64)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(status: TaskStatus) -> TaskResult {
        TaskResult {
            file: "walk 1.csv".into(),
            column: "knee".into(),
            algorithm: "dfa".into(),
            parameters: vec![("order".into(), Value::Int(1))],
            outputs: vec![("alpha".into(), Value::Float(0.75)), ("boxes".into(), Value::Int(16))],
            status,
            wall_time_s: 0.5,
            peak_memory_bytes: 2048,
        }
    }

    #[test]
    fn record_keys_are_sorted_after_prefix() {
        let line = result(TaskStatus::Ok).record_line();
        assert_eq!(line, r#"file="walk 1.csv" column=knee status=ok alpha=0.75 boxes=16 param.order=1"#);
    }

    #[test]
    fn skipped_records_carry_reason() {
        let r = result(TaskStatus::Skipped { reason: "NonNumericColumn".into(), detail: "column \"x\" is text".into() });
        let line = r.record_line();
        assert!(line.contains("status=skipped"));
        assert!(line.contains(r#"detail="column \"x\" is text""#));
        assert!(line.ends_with("reason=NonNumericColumn"));
    }

    #[test]
    fn resource_means_ignore_unfinished_tasks() {
        let mut rs = vec![result(TaskStatus::Ok), result(TaskStatus::Ok)];
        rs[1].peak_memory_bytes = 4096;
        rs[1].wall_time_s = 1.5;
        rs.push(result(TaskStatus::Failed { reason: "X".into(), detail: String::new() }));
        let rows = resource_rows(&["dfa".to_string()], &rs);
        assert_eq!((rows[0].tasks, rows[0].ok, rows[0].failed), (3, 2, 1));
        assert_eq!(rows[0].mean_wall_time_s, 1.0);
        assert_eq!(rows[0].mean_peak_memory_bytes, 3072.0);
        assert_eq!(rows[0].max_peak_memory_bytes, 4096);
        assert!(render_resource_report(&rows).contains("3.00 KiB"));
    }
}
