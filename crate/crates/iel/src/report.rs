//! Run reports and their file formats.

use std::fmt::Write as _;

use iel_core::estimators::{EntropyReport, FatBakerReport, InvariantReport, Provenance};
use iel_core::exact::{InvariantPair, InverseEntropy, RigidityPair};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Task};

/// Header of `curves.csv`.
pub const CURVE_HEADER: [&str; 8] = ["task", "eps", "n", "hits", "trials", "neg_log_phat", "slope", "stderr"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub tasks: Vec<TaskReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: Task,
    pub status: TaskStatus,
    pub provenance: Provenance,
    pub wall_clock_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TaskResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskResult {
    Exact(InvariantPair),
    Entropy(EntropyReport),
    Lyapunov { exponents: Vec<f64> },
    Identity(InvariantReport),
    Dimension(FatBakerReport),
    Rigidity(RigidityPair),
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.tasks.iter().any(|t| t.status == TaskStatus::Failed)
    }

    /// Entropy reports with decay curves, labelled for `curves.csv`.
    pub fn curves(&self) -> Vec<(String, &EntropyReport)> {
        let mut out = Vec::new();
        for t in &self.tasks {
            match &t.result {
                Some(TaskResult::Entropy(r)) if !r.curve.is_empty() => out.push((t.task.name().to_string(), r)),
                Some(TaskResult::Identity(ir)) => {
                    for r in ir.reports.iter().filter(|r| !r.curve.is_empty()) {
                        out.push((format!("identity:{}", r.quantity), r));
                    }
                }
                Some(TaskResult::Dimension(fb)) => out.push((t.task.name().to_string(), &fb.direct)),
                _ => {}
            }
        }
        out
    }
}

/// `x` with 9 significant digits, formatted like C's `%.9g`.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the decay curves as CSV, one row per (task, eps, n).
pub fn emit_plot_data<W: std::io::Write>(report: &RunReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for (task, r) in report.curves() {
        for p in &r.curve {
            let slope = r.per_radius.iter().find(|s| s.eps == p.eps).and_then(|s| s.slope);
            w.write_record([
                task.clone(),
                fmt_g9(p.eps),
                p.n.to_string(),
                p.hits.to_string(),
                p.trials.to_string(),
                p.neg_log_phat.map(fmt_g9).unwrap_or_default(),
                slope.map(|s| fmt_g9(s.slope)).unwrap_or_default(),
                slope.map(|s| fmt_g9(s.stderr)).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn pm(v: f64, s: f64) -> String {
    format!("{v:.6} +/- {s:.6}")
}

/// Human-readable summary.
pub fn summary(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment {} (seed {}, {} {})", report.experiment, report.seed, report.tool, report.version);
    for t in &report.tasks {
        let prov = match t.provenance {
            Provenance::Exact => "exact",
            Provenance::Estimated => "estimated",
        };
        let _ = write!(s, "{:<14} ", t.task.name());
        if let Some(e) = &t.error {
            let _ = writeln!(s, "FAILED: {e}");
            continue;
        }
        match &t.result {
            Some(TaskResult::Exact(p)) => {
                let _ = writeln!(
                    s,
                    "forward {:.10} inverse {:.10} folding {:.10} [{prov}]",
                    p.forward_entropy, p.inverse_entropy, p.folding_entropy
                );
            }
            Some(TaskResult::Entropy(r)) => match r.value() {
                Ok((v, e)) => {
                    let eps = r.selected_eps.map(|x| format!(" at eps {x}")).unwrap_or_default();
                    let _ = writeln!(s, "{} {}{eps} [{prov}]", r.quantity, pm(v, e));
                }
                Err(e) => {
                    let _ = writeln!(s, "{}: {e}", r.quantity);
                }
            },
            Some(TaskResult::Lyapunov { exponents }) => {
                let l: Vec<String> = exponents.iter().map(|v| format!("{v:.8}")).collect();
                let _ = writeln!(s, "exponents [{}] [{prov}]", l.join(", "));
            }
            Some(TaskResult::Identity(r)) => {
                let _ = writeln!(
                    s,
                    "h {} | h- {} | F {} | residual {:.6} (tolerance {:.6}) {} [{prov}]",
                    pm(r.forward.value, r.forward.stderr),
                    pm(r.inverse.value, r.inverse.stderr),
                    pm(r.folding.value, r.folding.stderr),
                    r.residual,
                    r.tolerance,
                    if r.passed { "PASS" } else { "FAIL" }
                );
            }
            Some(TaskResult::Dimension(r)) => {
                let direct = r.direct.value().map(|(v, e)| pm(v, e)).unwrap_or_else(|e| e.to_string());
                let _ = writeln!(
                    s,
                    "delta {} | |log beta|*delta {} | direct {direct} | overlap {:.6} [{prov}]",
                    pm(r.dimension.estimate.slope, r.dimension.estimate.stderr),
                    pm(r.via_dimension.value, r.via_dimension.stderr),
                    r.overlap_number
                );
            }
            Some(TaskResult::Rigidity(p)) => {
                let inv = match p.inverse {
                    InverseEntropy::Exact(v) => format!("{v:.10}"),
                    InverseEntropy::Bounds { lower, upper } => format!("[{lower:.10}, {upper:.10}]"),
                };
                let _ = writeln!(s, "forward {:.10} inverse {inv} [{prov}]", p.forward);
            }
            None => {
                let _ = writeln!(s);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        // reference strings from printf("%.9g")
        let cases = [
            (0.5347999999, "0.5348"),
            (1.0, "1"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (std::f64::consts::PI, "3.14159265"),
            (0.1, "0.1"),
            (200000.0, "200000"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g9(x), want, "{x}");
        }
    }
}
