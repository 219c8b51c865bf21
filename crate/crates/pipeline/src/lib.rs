//! Batch orchestration for the gaitnl estimators: expand files × columns ×
//! algorithms into tasks, run them on a worker pool and write result files,
//! plot artifacts and a resource report.

pub mod algorithms;
pub mod batch;
pub mod cli;
pub mod error;
pub mod params;
pub mod plots;
pub mod registry;
pub mod report;
pub mod resolve;

pub use batch::{run_batch, AlgorithmSpec, BatchJob, BatchSummary};
pub use error::{BatchError, TaskError};
pub use params::{ParamKind, ParamSet, ParamSpec, Value};
pub use registry::{Algorithm, Outcome, Registry, TaskInput};
pub use report::{TaskResult, TaskStatus};
