//! Non-invertible maps with full preimage enumeration and reference measures.

mod baker;
mod circle;
mod shift;
mod toral;
mod trig;
mod tsujii;

use alloc::vec::Vec;
use core::fmt::Debug;

pub use baker::{sample_convolution, FatBaker};
pub use circle::ExpandingCircle;
pub use shift::{FullShift, Word, MAX_WORD};
pub use toral::{ToralLinear, TorusPoint, MAX_TORUS_DIM};
pub use trig::{TrigPolynomial, MAX_MODES};
pub use tsujii::Tsujii;

use crate::error::{Error, Result};
use crate::numerics::{RngStream, SquareMatrix};
use crate::prehistory::{sample_backward, Prehistory};

/// Invariant measure a system is studied with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReferenceMeasure {
    /// Lebesgue measure on a torus or circle.
    Haar,
    /// Product measure on a one-sided shift (weights live in the system).
    Bernoulli,
    /// The physical measure of a fat baker map or Tsujii skew product.
    Srb,
}

impl ReferenceMeasure {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::Bernoulli => "bernoulli",
            Self::Srb => "srb",
        }
    }
}

/// Distance used for ball membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    /// Max over coordinates of the circle distance.
    #[cfg_attr(feature = "serde", serde(rename = "torus-sup"))]
    TorusSup,
    /// Euclidean length of the vector of circle distances.
    #[cfg_attr(feature = "serde", serde(rename = "torus-euclidean"))]
    TorusEuclidean,
    /// max(|Δx|, |Δy|); a periodic base coordinate uses circle distance.
    #[cfg_attr(feature = "serde", serde(rename = "product-sup"))]
    ProductSup,
    /// 2^-k where k is the first index at which two words differ.
    #[cfg_attr(feature = "serde", serde(rename = "shift-2^-k"))]
    ShiftDyadic,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TorusSup => "torus-sup",
            Self::TorusEuclidean => "torus-euclidean",
            Self::ProductSup => "product-sup",
            Self::ShiftDyadic => "shift-2^-k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "torus-sup" => Some(Self::TorusSup),
            "torus-euclidean" => Some(Self::TorusEuclidean),
            "product-sup" => Some(Self::ProductSup),
            "shift-2^-k" | "shift" => Some(Self::ShiftDyadic),
            _ => None,
        }
    }
}

/// Circle distance between two numbers, each taken mod 1.
#[inline]
pub(crate) fn circle_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b).abs();
    d -= libm::floor(d);
    d.min(1.0 - d)
}

/// Fractional part, always in [0, 1).
#[inline]
pub(crate) fn frac(v: f64) -> f64 {
    let f = v - libm::floor(v);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// A non-invertible map together with its reference measure.
pub trait Endomorphism: Sync {
    type Point: Clone + PartialEq + Debug + Send + Sync;

    fn kind_name(&self) -> &'static str;
    fn metric(&self) -> Metric;
    /// Ambient dimension (number of Lyapunov exponents).
    fn dim(&self) -> usize;

    fn apply(&self, x: &Self::Point) -> Self::Point;

    /// Clears `out` and fills it with every preimage of `x`, lexicographically.
    fn preimages_into(&self, x: &Self::Point, out: &mut Vec<Self::Point>);

    fn preimages(&self, x: &Self::Point) -> Vec<Self::Point> {
        let mut out = Vec::new();
        self.preimages_into(x, &mut out);
        out
    }

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    /// Supremum of `distance` over the phase space.
    fn diameter(&self) -> f64;

    fn reference_measure(&self) -> ReferenceMeasure;

    fn check_measure(&self, tag: ReferenceMeasure) -> Result<()> {
        if tag == self.reference_measure() {
            Ok(())
        } else {
            Err(Error::MeasureMismatch { measure: tag.name(), system: self.kind_name() })
        }
    }

    /// Jacobian of the reference measure at `x`, when it has a closed form.
    fn jacobian(&self, x: &Self::Point) -> Option<f64>;

    /// Jacobian of `tag` at `x`; `Ok(None)` when no closed form exists.
    fn measure_jacobian(&self, tag: ReferenceMeasure, x: &Self::Point) -> Result<Option<f64>> {
        self.check_measure(tag)?;
        Ok(self.jacobian(x))
    }

    /// Folding entropy known in closed form without a pointwise Jacobian.
    fn exact_folding(&self) -> Option<f64> {
        None
    }

    fn differential(&self, x: &Self::Point) -> Result<SquareMatrix>;

    fn sample_reference(&self, rng: &mut RngStream) -> Self::Point;

    /// Relative probabilities of stepping back to each of `preimages`.
    /// Defaults to `1/J` where the Jacobian is known and uniform otherwise.
    fn backward_weights(&self, preimages: &[Self::Point], weights: &mut Vec<f64>) {
        weights.clear();
        weights.extend(preimages.iter().map(|w| self.jacobian(w).map_or(1.0, |j| 1.0 / j)));
    }

    /// A prehistory of the given depth distributed as the natural-extension
    /// lift of the reference measure.
    fn sample_anchor(&self, depth: usize, rng: &mut RngStream) -> Prehistory<Self::Point>
    where
        Self: Sized,
    {
        let x0 = self.sample_reference(rng);
        sample_backward(self, x0, depth, rng)
    }

    /// Whether `sample_anchor` samples the lift exactly (up to float truncation).
    fn anchor_is_exact(&self) -> bool {
        true
    }

    /// Calls `visit` on `len` consecutive points of a forward orbit whose
    /// first point is distributed as the reference measure.
    fn forward_orbit(&self, len: usize, rng: &mut RngStream, visit: &mut dyn FnMut(&Self::Point))
    where
        Self: Sized,
    {
        if len == 0 {
            return;
        }
        let anchor = self.sample_anchor(len - 1, rng);
        for p in anchor.points().iter().rev() {
            visit(p);
        }
    }
}

/// Parameters of one of the five supported families.
#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    ToralLinear { matrix: SquareMatrix },
    ExpandingCircle { degree: u32 },
    FullShift { probabilities: Vec<f64>, depth: usize },
    FatBaker { beta: f64 },
    Tsujii { l: u32, lambda: f64, f: TrigPolynomial },
}

/// A system description: family parameters plus an optional metric override.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub metric: Option<Metric>,
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Self {
        Self { kind, metric: None }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = Some(metric);
        self
    }

    pub fn build(&self) -> Result<System> {
        Ok(match &self.kind {
            SystemKind::ToralLinear { matrix } => System::Toral(ToralLinear::with_metric(matrix, self.metric)?),
            SystemKind::ExpandingCircle { degree } => {
                System::Circle(ExpandingCircle::with_metric(*degree, self.metric)?)
            }
            SystemKind::FullShift { probabilities, depth } => {
                System::Shift(FullShift::with_metric(probabilities, *depth, self.metric)?)
            }
            SystemKind::FatBaker { beta } => System::Baker(FatBaker::with_metric(*beta, self.metric)?),
            SystemKind::Tsujii { l, lambda, f } => System::Tsujii(Tsujii::with_metric(*l, *lambda, f.clone(), self.metric)?),
        })
    }
}

/// A constructed system of any family.
#[derive(Clone, Debug)]
pub enum System {
    Toral(ToralLinear),
    Circle(ExpandingCircle),
    Shift(FullShift),
    Baker(FatBaker),
    Tsujii(Tsujii),
}

/// Runs `$body` with `$s` bound to the concrete system inside a [`System`].
#[macro_export]
macro_rules! with_system {
    ($sys:expr, $s:ident => $body:expr) => {
        match $sys {
            $crate::systems::System::Toral($s) => $body,
            $crate::systems::System::Circle($s) => $body,
            $crate::systems::System::Shift($s) => $body,
            $crate::systems::System::Baker($s) => $body,
            $crate::systems::System::Tsujii($s) => $body,
        }
    };
}

impl System {
    pub fn kind_name(&self) -> &'static str {
        with_system!(self, s => s.kind_name())
    }

    pub fn reference_measure(&self) -> ReferenceMeasure {
        with_system!(self, s => s.reference_measure())
    }

    pub fn metric(&self) -> Metric {
        with_system!(self, s => s.metric())
    }
}

pub(crate) fn check_metric(kind: &'static str, metric: Metric, allowed: &[Metric]) -> Result<Metric> {
    if allowed.contains(&metric) {
        Ok(metric)
    } else {
        Err(crate::error::invalid("metric", alloc::format!("{} is not available for {kind}", metric.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(0.3, 0.3), 0.0);
        assert!((circle_dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn frac_range() {
        assert_eq!(frac(2.0), 0.0);
        assert_eq!(frac(-1e-20), 0.0);
        assert!((frac(-0.25) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::TorusSup, Metric::TorusEuclidean, Metric::ProductSup, Metric::ShiftDyadic] {
            assert_eq!(Metric::parse(m.name()), Some(m));
        }
    }
}
