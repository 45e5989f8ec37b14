use alloc::vec::Vec;

use super::{check_metric, Endomorphism, Metric, ReferenceMeasure};
use crate::error::{invalid, Result};
use crate::numerics::{RngStream, SquareMatrix};
use crate::prehistory::Prehistory;

/// Truncation level for the random series defining the horizontal marginal.
pub(crate) const TAIL_EPS: f64 = 1e-12;

/// The fat baker map on [-1, 1]²:
/// (x, y) ↦ (βx + (1-β), 2y - 1) for y ≥ 0 and (βx - (1-β), 2y + 1) for y < 0.
#[derive(Clone, Debug)]
pub struct FatBaker {
    beta: f64,
    tail: usize,
}

/// Number of terms after which βᵏ drops below the truncation level.
pub(crate) fn tail_len(beta: f64) -> usize {
    (libm::ceil(libm::log(TAIL_EPS) / libm::log(beta)) as usize).max(1)
}

/// One draw of Σ sᵢ(1-β)βⁱ with fair signs sᵢ = ±1, truncated.
pub fn sample_convolution(beta: f64, rng: &mut RngStream) -> f64 {
    let n = tail_len(beta);
    let c = 1.0 - beta;
    let mut x = 0.0;
    let mut w = c;
    let mut left = 0;
    let mut bits = 0u64;
    for _ in 0..n {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        x += if bits & 1 == 1 { w } else { -w };
        bits >>= 1;
        left -= 1;
        w *= beta;
    }
    x
}

impl FatBaker {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_metric(beta, None)
    }

    pub fn with_metric(beta: f64, metric: Option<Metric>) -> Result<Self> {
        if !(beta > 0.5 && beta < 1.0) {
            return Err(invalid("beta", "must lie strictly between 1/2 and 1"));
        }
        check_metric("fat_baker", metric.unwrap_or(Metric::ProductSup), &[Metric::ProductSup])?;
        Ok(Self { beta, tail: tail_len(beta) })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Endomorphism for FatBaker {
    type Point = [f64; 2];

    fn kind_name(&self) -> &'static str {
        "fat_baker"
    }

    fn metric(&self) -> Metric {
        Metric::ProductSup
    }

    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, p: &[f64; 2]) -> [f64; 2] {
        let [x, y] = *p;
        let c = 1.0 - self.beta;
        if y >= 0.0 {
            [self.beta * x + c, 2.0 * y - 1.0]
        } else {
            [self.beta * x - c, 2.0 * y + 1.0]
        }
    }

    fn preimages_into(&self, p: &[f64; 2], out: &mut Vec<[f64; 2]>) {
        out.clear();
        let [x, y] = *p;
        let c = 1.0 - self.beta;
        let upper = (x - c) / self.beta;
        if (-1.0..=1.0).contains(&upper) {
            out.push([upper, (y + 1.0) / 2.0]);
        }
        let lower = (x + c) / self.beta;
        if y < 1.0 && (-1.0..=1.0).contains(&lower) {
            out.push([lower, (y - 1.0) / 2.0]);
        }
    }

    fn distance(&self, p: &[f64; 2], q: &[f64; 2]) -> f64 {
        (p[0] - q[0]).abs().max((p[1] - q[1]).abs())
    }

    fn diameter(&self) -> f64 {
        2.0
    }

    fn reference_measure(&self) -> ReferenceMeasure {
        ReferenceMeasure::Srb
    }

    fn jacobian(&self, _p: &[f64; 2]) -> Option<f64> {
        None
    }

    fn differential(&self, _p: &[f64; 2]) -> Result<SquareMatrix> {
        SquareMatrix::diagonal(&[self.beta, 2.0])
    }

    fn sample_reference(&self, rng: &mut RngStream) -> [f64; 2] {
        let x = sample_convolution(self.beta, rng);
        [x, rng.next_range(-1.0, 1.0)]
    }

    /// Draws the coin sequence first and reads the whole backward
    /// trajectory off it: x₋ᵢ = Σⱼ s_{i+j}(1-β)βʲ and y₋ᵢ = (y₋ᵢ₊₁ + s_{i-1})/2.
    fn sample_anchor(&self, depth: usize, rng: &mut RngStream) -> Prehistory<[f64; 2]> {
        let c = 1.0 - self.beta;
        let total = depth + self.tail;
        let signs: Vec<f64> = (0..total).map(|_| if rng.next_bool() { 1.0 } else { -1.0 }).collect();
        let mut xs = alloc::vec![0.0; depth + 1];
        let mut x = 0.0;
        for j in (depth..total).rev() {
            x = self.beta * x + signs[j] * c;
        }
        xs[depth] = x;
        for i in (0..depth).rev() {
            xs[i] = self.beta * xs[i + 1] + signs[i] * c;
        }
        let mut pts = Vec::with_capacity(depth + 1);
        let mut y = rng.next_range(-1.0, 1.0);
        pts.push([xs[0], y]);
        for i in 1..=depth {
            y = (y + signs[i - 1]) / 2.0;
            pts.push([xs[i], y]);
        }
        Prehistory::new(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_and_preimage_examples() {
        let s = FatBaker::new(0.75).unwrap();
        assert_eq!(s.apply(&[0.0, 0.5]), [0.25, 0.0]);
        let pre = s.preimages(&[0.0, 0.0]);
        assert_eq!(pre.len(), 2);
        assert!((pre[0][0] + 1.0 / 3.0).abs() < 1e-15 && pre[0][1] == 0.5);
        assert!((pre[1][0] - 1.0 / 3.0).abs() < 1e-15 && pre[1][1] == -0.5);
    }

    #[test]
    fn boundary_belongs_to_upper_branch() {
        let s = FatBaker::new(0.75).unwrap();
        assert_eq!(s.apply(&[1.0, 0.0]), [1.0, -1.0]);
    }

    #[test]
    fn single_preimage_outside_overlap() {
        let s = FatBaker::new(0.75).unwrap();
        // x = 0.9 > 2β − 1 = 0.5, so only the upper branch applies
        assert_eq!(s.preimages(&[0.9, 0.1]).len(), 1);
        assert_eq!(s.preimages(&[-0.9, 0.1]).len(), 1);
    }

    #[test]
    fn anchors_are_backward_orbits() {
        let s = FatBaker::new(0.8).unwrap();
        let mut rng = RngStream::new(8, 1);
        for _ in 0..50 {
            let a = s.sample_anchor(30, &mut rng);
            for i in 1..=30 {
                let p = a.point(i);
                assert!(p[0].abs() <= 1.0 && p[1].abs() <= 1.0);
                assert!(s.distance(&s.apply(p), a.point(i - 1)) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_thin_and_degenerate_beta() {
        for b in [0.5, 0.3, 1.0, f64::NAN] {
            assert!(FatBaker::new(b).is_err());
        }
    }

    #[test]
    fn tail_truncation() {
        assert_eq!(tail_len(0.5), 40);
        assert!(libm::pow(0.75, tail_len(0.75) as f64) < TAIL_EPS);
    }
}
