use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    estimate_folding_entropy, estimate_forward_entropy, estimate_inverse_entropy, estimate_lyapunov_spectrum,
    EntropyReport, EstimatorConfig, Executor,
};
use crate::error::Result;
use crate::systems::{Endomorphism, ReferenceMeasure};

/// Slack added to every statistical comparison.
const SLACK: f64 = 0.05;

/// Where a number came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Provenance {
    Exact,
    Estimated,
}

/// A value with its standard error and provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quantity {
    pub value: f64,
    pub stderr: f64,
    pub provenance: Provenance,
}

impl Quantity {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, provenance: Provenance::Exact }
    }

    pub fn estimated(value: f64, stderr: f64) -> Self {
        Self { value, stderr, provenance: Provenance::Estimated }
    }

    fn from_report(r: &EntropyReport) -> Result<Self> {
        let (v, s) = r.value()?;
        Ok(if r.method == "closed form" { Self::exact(v) } else { Self::estimated(v, s) })
    }
}

/// Outcome of checking h = h⁻ + F on one system.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvariantReport {
    pub system: String,
    pub forward: Quantity,
    pub inverse: Quantity,
    pub folding: Quantity,
    /// ĥ - (ĥ⁻ + F̂).
    pub residual: f64,
    /// Combined standard error of the three estimates.
    pub sigma: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// ĥ⁻ ≥ -2σ⁻ and ĥ⁻ ≤ ĥ - F̂ + tolerance.
    pub chain_ok: bool,
    /// Estimated Lyapunov spectrum, for smooth systems.
    pub lyapunov: Option<Vec<f64>>,
    /// -Σ of the negative exponents.
    pub lyapunov_bound: Option<f64>,
    /// ĥ⁻ ≤ bound + 2σ⁻ + slack.
    pub lyapunov_ok: Option<bool>,
    pub reports: Vec<EntropyReport>,
    pub notes: Vec<String>,
}

/// Runs the forward, inverse and folding estimators and checks the entropy
/// identity, the ordering chain and, for smooth systems, the Lyapunov bound.
pub fn check_entropy_identity<S: Endomorphism, E: Executor>(
    sys: &S,
    tag: ReferenceMeasure,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<InvariantReport> {
    let fwd = estimate_forward_entropy(sys, tag, cfg, exec)?;
    let inv = estimate_inverse_entropy(sys, tag, cfg, exec)?;
    let fold = estimate_folding_entropy(sys, tag, cfg, exec)?;
    let forward = Quantity::from_report(&fwd)?;
    let inverse = Quantity::from_report(&inv)?;
    let folding = Quantity::from_report(&fold)?;

    let residual = forward.value - (inverse.value + folding.value);
    let sigma = libm::sqrt(
        forward.stderr * forward.stderr + inverse.stderr * inverse.stderr + folding.stderr * folding.stderr,
    );
    let tolerance = 2.0 * sigma + SLACK;
    let passed = residual.abs() <= tolerance;
    let chain_ok = inverse.value >= -2.0 * inverse.stderr && inverse.value <= forward.value - folding.value + tolerance;

    let mut notes = Vec::new();
    let (lyapunov, lyapunov_bound, lyapunov_ok) = match estimate_lyapunov_spectrum(sys, cfg, exec) {
        Ok(l) => {
            let bound = -l.iter().filter(|&&v| v < 0.0).sum::<f64>();
            let ok = inverse.value <= bound + 2.0 * inverse.stderr + SLACK;
            (Some(l), Some(bound), Some(ok))
        }
        Err(e) => {
            notes.push(format!("Lyapunov bound skipped: {e}"));
            (None, None, None)
        }
    };
    notes.push(format!("residual {residual:.6} against tolerance {tolerance:.6}"));
    Ok(InvariantReport {
        system: sys.kind_name().into(),
        forward,
        inverse,
        folding,
        residual,
        sigma,
        tolerance,
        passed,
        chain_ok,
        lyapunov,
        lyapunov_bound,
        lyapunov_ok,
        reports: alloc::vec![fwd, inv, fold],
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Sequential;
    use crate::systems::ExpandingCircle;

    #[test]
    fn expanding_circle_identity() {
        let s = ExpandingCircle::new(3).unwrap();
        let cfg = EstimatorConfig {
            anchors: 4,
            samples_per_ball: 20_000,
            radii: alloc::vec![0.1],
            depths: (1..=5).collect(),
            burn_in: 100,
            orbit_steps: Some(1000),
            ..Default::default()
        };
        let r = check_entropy_identity(&s, ReferenceMeasure::Haar, &cfg, &Sequential).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.folding.value - 3f64.ln()).abs() < 1e-12);
        assert!(r.inverse.value.abs() < 0.05);
        assert!(r.lyapunov_ok == Some(true));
    }

    #[test]
    fn provenance_from_method() {
        let r = EntropyReport::point("folding_entropy", "closed form", 1.0, 0.0, 0, Vec::new());
        assert_eq!(Quantity::from_report(&r).unwrap().provenance, Provenance::Exact);
    }
}
