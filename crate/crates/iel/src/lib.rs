//! Experiment runner for `iel-core`: JSON configurations, a rayon executor,
//! report files and the `iel` command-line tool.

pub mod config;
pub mod distinguish;
pub mod exec;
pub mod report;
pub mod runner;

pub use config::{ConfigError, Experiment, ExperimentConfig, SystemConfig, Task};
pub use distinguish::{distinguish, Verdict};
pub use exec::Parallel;
pub use report::{emit_plot_data, RunReport, TaskReport, TaskResult, TaskStatus};
pub use runner::{run, write_outputs};

/// Reads a matrix file: a JSON array of integer rows.
pub fn read_matrix(path: &std::path::Path) -> Result<iel_core::SquareMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_matrix(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_matrix(text: &str) -> Result<iel_core::SquareMatrix, String> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    iel_core::SquareMatrix::from_int_rows(&rows).map_err(|e| e.to_string())
}
