use alloc::vec::Vec;

use super::circle::DigitOrbit;
use super::{check_metric, circle_dist, frac, Endomorphism, Metric, ReferenceMeasure, TrigPolynomial};
use crate::error::{invalid, Result};
use crate::numerics::{RngStream, SquareMatrix};
use crate::prehistory::Prehistory;

const TAIL_EPS: f64 = 1e-12;

/// Skew product (x, y) ↦ (l·x mod 1, λy + f(x)) on S¹ × R.
#[derive(Clone, Debug)]
pub struct Tsujii {
    l: u32,
    lambda: f64,
    f: TrigPolynomial,
    sup_f: f64,
    tail: usize,
}

impl Tsujii {
    pub fn new(l: u32, lambda: f64, f: TrigPolynomial) -> Result<Self> {
        Self::with_metric(l, lambda, f, None)
    }

    pub fn with_metric(l: u32, lambda: f64, f: TrigPolynomial, metric: Option<Metric>) -> Result<Self> {
        if !(2..=64).contains(&l) {
            return Err(invalid("l", "must be an integer in 2..=64"));
        }
        if !(lambda < 1.0 && lambda * l as f64 > 1.0) {
            return Err(invalid("lambda", "need 1/l < lambda < 1"));
        }
        check_metric("tsujii", metric.unwrap_or(Metric::ProductSup), &[Metric::ProductSup])?;
        let sup_f = f.sup_bound();
        let scale = sup_f.max(1.0);
        let tail = (libm::ceil(libm::log(TAIL_EPS / scale) / libm::log(lambda)) as usize).max(1);
        Ok(Self { l, lambda, f, sup_f, tail })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base_function(&self) -> &TrigPolynomial {
        &self.f
    }

    /// Half-width of the invariant strip, sup|f| / (1 - λ).
    pub fn strip(&self) -> f64 {
        self.sup_f / (1.0 - self.lambda)
    }

    /// y = Σⱼ λʲ⁻¹ f(x₋ⱼ) over a random backward branch of x.
    fn fibre_coordinate(&self, x: f64, rng: &mut RngStream) -> f64 {
        let lf = self.l as f64;
        let mut xb = x;
        let mut w = 1.0;
        let mut y = 0.0;
        for _ in 0..self.tail {
            xb = (xb + rng.next_below(self.l as u64) as f64) / lf;
            y += w * self.f.eval(xb);
            w *= self.lambda;
        }
        y
    }
}

impl Endomorphism for Tsujii {
    type Point = [f64; 2];

    fn kind_name(&self) -> &'static str {
        "tsujii"
    }

    fn metric(&self) -> Metric {
        Metric::ProductSup
    }

    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, p: &[f64; 2]) -> [f64; 2] {
        [frac(self.l as f64 * p[0]), self.lambda * p[1] + self.f.eval(p[0])]
    }

    fn preimages_into(&self, p: &[f64; 2], out: &mut Vec<[f64; 2]>) {
        out.clear();
        let lf = self.l as f64;
        for k in 0..self.l {
            let x = (p[0] + k as f64) / lf;
            out.push([x, (p[1] - self.f.eval(x)) / self.lambda]);
        }
    }

    fn distance(&self, p: &[f64; 2], q: &[f64; 2]) -> f64 {
        circle_dist(p[0], q[0]).max((p[1] - q[1]).abs())
    }

    fn diameter(&self) -> f64 {
        (2.0 * self.strip()).max(0.5)
    }

    fn reference_measure(&self) -> ReferenceMeasure {
        ReferenceMeasure::Srb
    }

    fn jacobian(&self, _p: &[f64; 2]) -> Option<f64> {
        None
    }

    fn exact_folding(&self) -> Option<f64> {
        Some(libm::log(self.lambda * self.l as f64))
    }

    fn differential(&self, p: &[f64; 2]) -> Result<SquareMatrix> {
        SquareMatrix::new(2, &[self.l as f64, 0.0, self.f.derivative(p[0]), self.lambda])
    }

    fn sample_reference(&self, rng: &mut RngStream) -> [f64; 2] {
        let x = rng.next_uniform();
        [x, self.fibre_coordinate(x, rng)]
    }

    /// Base points go backward by uniform digits; fibre coordinates come
    /// forward from the far end of the branch, where truncation is harmless.
    fn sample_anchor(&self, depth: usize, rng: &mut RngStream) -> Prehistory<[f64; 2]> {
        let total = depth + self.tail;
        let lf = self.l as f64;
        let mut xs = Vec::with_capacity(total + 1);
        xs.push(rng.next_uniform());
        for i in 0..total {
            xs.push((xs[i] + rng.next_below(self.l as u64) as f64) / lf);
        }
        let mut y = 0.0;
        for i in (depth + 1..=total).rev() {
            y = self.lambda * y + self.f.eval(xs[i]);
        }
        let mut pts = alloc::vec![[0.0; 2]; depth + 1];
        pts[depth] = [xs[depth], y];
        for i in (0..depth).rev() {
            y = self.lambda * y + self.f.eval(xs[i + 1]);
            pts[i] = [xs[i], y];
        }
        Prehistory::new(pts)
    }

    fn forward_orbit(&self, len: usize, rng: &mut RngStream, visit: &mut dyn FnMut(&[f64; 2])) {
        let mut orbit = DigitOrbit::new(self.l as u64, rng);
        let mut y = self.fibre_coordinate(orbit.value(), rng);
        for _ in 0..len {
            let x = orbit.value();
            visit(&[x, y]);
            y = self.lambda * y + self.f.eval(x);
            orbit.advance(rng);
        }
    }
}
