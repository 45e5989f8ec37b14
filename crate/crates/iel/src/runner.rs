//! Executes the tasks of an experiment and writes its outputs.

use std::path::Path;
use std::time::Instant;

use iel_core::estimators::{
    check_entropy_identity, estimate_fat_baker_inverse_entropy, estimate_folding_entropy, estimate_forward_entropy,
    estimate_inverse_entropy, estimate_lyapunov_spectrum, Provenance,
};
use iel_core::exact::{closed_forms, rigidity_pair};
use iel_core::{with_system, Executor, System};

use crate::config::{Experiment, Task};
use crate::report::{emit_plot_data, summary, RunReport, TaskReport, TaskResult, TaskStatus};

fn run_task<E: Executor>(exp: &Experiment, task: Task, exec: &E) -> iel_core::Result<(TaskResult, Provenance)> {
    let cfg = &exp.config.estimator;
    let tag = exp.measure;
    let est = Provenance::Estimated;
    Ok(match task {
        Task::Exact => (TaskResult::Exact(closed_forms(&exp.system)?), Provenance::Exact),
        Task::RigidityPair => (TaskResult::Rigidity(rigidity_pair(&exp.spec)?), Provenance::Exact),
        Task::Forward => (TaskResult::Entropy(with_system!(&exp.system, s => estimate_forward_entropy(s, tag, cfg, exec))?), est),
        Task::Inverse => (TaskResult::Entropy(with_system!(&exp.system, s => estimate_inverse_entropy(s, tag, cfg, exec))?), est),
        Task::Folding => {
            let r = with_system!(&exp.system, s => estimate_folding_entropy(s, tag, cfg, exec))?;
            let prov = if r.method == "closed form" { Provenance::Exact } else { est };
            (TaskResult::Entropy(r), prov)
        }
        Task::Lyapunov => {
            let exponents = with_system!(&exp.system, s => estimate_lyapunov_spectrum(s, cfg, exec))?;
            (TaskResult::Lyapunov { exponents }, est)
        }
        Task::Identity => (TaskResult::Identity(with_system!(&exp.system, s => check_entropy_identity(s, tag, cfg, exec))?), est),
        Task::Dimension => match &exp.system {
            System::Baker(b) => (TaskResult::Dimension(estimate_fat_baker_inverse_entropy(b.beta(), cfg, exec)?), est),
            other => return Err(iel_core::Error::Unsupported(other.kind_name())),
        },
    })
}

/// Runs every task in order. A failing task is recorded and the rest still run.
pub fn run<E: Executor>(exp: &Experiment, exec: &E) -> RunReport {
    let mut tasks = Vec::with_capacity(exp.config.tasks.len());
    for &task in &exp.config.tasks {
        let start = Instant::now();
        let outcome = run_task(exp, task, exec);
        let wall_clock_s = start.elapsed().as_secs_f64();
        tasks.push(match outcome {
            Ok((result, provenance)) => {
                let unresolved = matches!(&result, TaskResult::Entropy(r) if !r.is_resolved())
                    || matches!(&result, TaskResult::Dimension(r) if !r.direct.is_resolved());
                TaskReport {
                    task,
                    status: if unresolved { TaskStatus::Failed } else { TaskStatus::Ok },
                    provenance,
                    wall_clock_s,
                    error: unresolved.then(|| iel_core::Error::InsufficientResolution.to_string()),
                    result: Some(result),
                }
            }
            Err(e) => TaskReport {
                task,
                status: TaskStatus::Failed,
                provenance: Provenance::Estimated,
                wall_clock_s,
                error: Some(e.to_string()),
                result: None,
            },
        });
    }
    RunReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: exp.config.name.clone(),
        seed: exp.config.estimator.seed,
        config: exp.config.clone(),
        tasks,
    }
}

/// Writes report.json, curves.csv and summary.txt into `dir`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    let file = std::fs::File::create(dir.join("curves.csv"))?;
    emit_plot_data(report, std::io::BufWriter::new(file)).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("summary.txt"), summary(report))?;
    Ok(())
}
