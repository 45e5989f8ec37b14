use alloc::vec::Vec;

use super::{check_metric, circle_dist, frac, Endomorphism, Metric, ReferenceMeasure};
use crate::error::{invalid, Result};
use crate::numerics::{RngStream, SquareMatrix};

/// x ↦ d·x mod 1.
#[derive(Clone, Debug)]
pub struct ExpandingCircle {
    degree: u32,
    metric: Metric,
}

impl ExpandingCircle {
    pub fn new(degree: u32) -> Result<Self> {
        Self::with_metric(degree, None)
    }

    pub fn with_metric(degree: u32, metric: Option<Metric>) -> Result<Self> {
        if !(2..=1 << 16).contains(&degree) {
            return Err(invalid("degree", "must be an integer in 2..=65536"));
        }
        let metric = check_metric(
            "expanding_circle",
            metric.unwrap_or(Metric::TorusSup),
            &[Metric::TorusSup, Metric::TorusEuclidean],
        )?;
        Ok(Self { degree, metric })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Orbit of a uniform point under x ↦ b·x mod 1, produced from a sliding
/// window of base-b digits so that no precision is lost along the way.
pub(crate) struct DigitOrbit {
    base: u64,
    window: Vec<u64>,
    head: usize,
}

impl DigitOrbit {
    pub(crate) fn new(base: u64, rng: &mut RngStream) -> Self {
        // enough digits to fill a double mantissa, plus slack
        let bits = 64 - (base - 1).leading_zeros() as usize;
        let len = 64 / bits.max(1) + 2;
        let window = (0..len).map(|_| rng.next_below(base)).collect();
        Self { base, window, head: 0 }
    }

    /// Current point, 0.d₁d₂… in base b.
    pub(crate) fn value(&self) -> f64 {
        let b = self.base as f64;
        let n = self.window.len();
        let mut x = 0.0;
        for k in (0..n).rev() {
            x = (x + self.window[(self.head + k) % n] as f64) / b;
        }
        if x >= 1.0 {
            0.0
        } else {
            x
        }
    }

    pub(crate) fn advance(&mut self, rng: &mut RngStream) {
        self.window[self.head] = rng.next_below(self.base);
        self.head = (self.head + 1) % self.window.len();
    }
}

impl Endomorphism for ExpandingCircle {
    type Point = f64;

    fn kind_name(&self) -> &'static str {
        "expanding_circle"
    }

    fn metric(&self) -> Metric {
        self.metric
    }

    fn dim(&self) -> usize {
        1
    }

    fn apply(&self, x: &f64) -> f64 {
        frac(self.degree as f64 * x)
    }

    fn preimages_into(&self, x: &f64, out: &mut Vec<f64>) {
        out.clear();
        let d = self.degree as f64;
        out.extend((0..self.degree).map(|k| (x + k as f64) / d));
    }

    fn distance(&self, p: &f64, q: &f64) -> f64 {
        circle_dist(*p, *q)
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn reference_measure(&self) -> ReferenceMeasure {
        ReferenceMeasure::Haar
    }

    fn jacobian(&self, _x: &f64) -> Option<f64> {
        Some(self.degree as f64)
    }

    fn differential(&self, _x: &f64) -> Result<SquareMatrix> {
        SquareMatrix::new(1, &[self.degree as f64])
    }

    fn sample_reference(&self, rng: &mut RngStream) -> f64 {
        rng.next_uniform()
    }

    fn forward_orbit(&self, len: usize, rng: &mut RngStream, visit: &mut dyn FnMut(&f64)) {
        let mut orbit = DigitOrbit::new(self.degree as u64, rng);
        for _ in 0..len {
            visit(&orbit.value());
            orbit.advance(rng);
        }
    }
}
