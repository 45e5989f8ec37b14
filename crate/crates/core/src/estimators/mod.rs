//! Monte-Carlo estimators of entropy-type quantities.
//!
//! All randomness comes from [`RngStream`]s derived from `EstimatorConfig::seed`
//! by fixed labels, and every parallel map collects its results in index
//! order, so a report depends only on the configuration and never on how
//! many workers ran it.

mod balls;
mod dimension;
mod folding;
mod identity;
mod lyapunov;

use alloc::vec::Vec;

pub use balls::{
    estimate_ball_measure, estimate_forward_entropy, estimate_inverse_entropy, BallMeasureEstimate, CurvePoint,
    EntropyReport, RadiusSlope,
};
pub use dimension::{
    estimate_fat_baker_inverse_entropy, estimate_pointwise_dimension, pisot_polynomial, Agreement, DimensionReport,
    FatBakerReport,
};
pub use folding::estimate_folding_entropy;
pub use identity::{check_entropy_identity, InvariantReport, Provenance, Quantity};
pub use lyapunov::estimate_lyapunov_spectrum;

use crate::error::{invalid, Result};
use crate::numerics::RngStream;

/// Runs independent, indexed jobs and returns their results in index order.
pub trait Executor: Sync {
    fn map_collect<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every job on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_collect<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

/// Stream labels, one per estimator, so that estimators never share draws.
pub(crate) mod label {
    pub const INVERSE: u64 = 0x1001;
    pub const FORWARD: u64 = 0x1002;
    pub const FOLDING: u64 = 0x1003;
    pub const LYAPUNOV: u64 = 0x1004;
    pub const DIMENSION: u64 = 0x1005;
    pub const BAKER_DIRECT: u64 = 0x1006;
    pub const ANCHORS: u64 = 0xA;
    pub const SAMPLES: u64 = 0xB;
    pub const CENTRES: u64 = 0xC;
}

pub(crate) fn task_stream(seed: u64, task: u64) -> RngStream {
    RngStream::new(seed, task)
}

/// Settings shared by every estimator.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    /// Ball radii, strictly descending.
    pub radii: Vec<f64>,
    /// Ball depths n, strictly increasing.
    pub depths: Vec<usize>,
    /// Number of sampled prehistories (or orbit seeds, or centres / 8).
    pub anchors: usize,
    pub samples_per_ball: u64,
    pub burn_in: usize,
    pub seed: u64,
    /// Balls with fewer hits are skipped.
    pub min_hits: u64,
    /// Orbit length for Birkhoff and Lyapunov averages; defaults to
    /// 1000 × the largest depth.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub orbit_steps: Option<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            radii: alloc::vec![0.2, 0.1, 0.05],
            depths: (2..=12).collect(),
            anchors: 32,
            samples_per_ball: 200_000,
            burn_in: 10_000,
            seed: 0x1e1_5eed,
            min_hits: 10,
            orbit_steps: None,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(invalid("radii", "at least one radius is required"));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(invalid("radii", "every radius must be positive and finite"));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("radii", "radii must be strictly descending"));
        }
        if self.depths.is_empty() {
            return Err(invalid("depths", "at least one depth is required"));
        }
        if self.depths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("depths", "depths must be strictly increasing"));
        }
        if self.anchors == 0 {
            return Err(invalid("anchors", "must be at least 1"));
        }
        if self.samples_per_ball == 0 {
            return Err(invalid("samples_per_ball", "must be at least 1"));
        }
        if self.min_hits < 5 {
            return Err(invalid("min_hits", "must be at least 5"));
        }
        if self.orbit_steps == Some(0) {
            return Err(invalid("orbit_steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn max_depth(&self) -> usize {
        self.depths.last().copied().unwrap_or(0)
    }

    pub fn orbit_len(&self) -> usize {
        self.orbit_steps.unwrap_or(self.max_depth().max(1) * 1000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = EstimatorConfig::default();
        c.validate().unwrap();
        assert_eq!(c.depths.len(), 11);
        assert_eq!(c.orbit_len(), 12_000);
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = EstimatorConfig { radii: alloc::vec![0.05, 0.1], ..Default::default() };
        let e = c.validate().unwrap_err();
        assert!(alloc::format!("{e}").contains("radii"));
        c.radii = alloc::vec![0.1];
        c.min_hits = 4;
        assert!(alloc::format!("{}", c.validate().unwrap_err()).contains("min_hits"));
        c.min_hits = 10;
        c.depths = alloc::vec![3, 3];
        assert!(alloc::format!("{}", c.validate().unwrap_err()).contains("depths"));
    }

    #[test]
    fn sequential_keeps_order() {
        assert_eq!(Sequential.map_collect(5, |i| i * i), alloc::vec![0, 1, 4, 9, 16]);
    }
}
