use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::numerics::RngStream;

/// Highest harmonic allowed in a base function.
pub const MAX_MODES: usize = 8;

/// f(x) = Σₖ aₖ cos 2πkx + bₖ sin 2πkx for k = 1..=K.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrigPolynomial {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPolynomial {
    pub fn new(cos: &[f64], sin: &[f64]) -> Result<Self> {
        if cos.len() > MAX_MODES || sin.len() > MAX_MODES {
            return Err(invalid("cos/sin", "at most 8 harmonics"));
        }
        if cos.iter().chain(sin).any(|v| !v.is_finite()) {
            return Err(invalid("cos/sin", "coefficients must be finite"));
        }
        let k = cos.len().max(sin.len());
        let mut c = cos.to_vec();
        let mut s = sin.to_vec();
        c.resize(k, 0.0);
        s.resize(k, 0.0);
        Ok(Self { cos: c, sin: s })
    }

    /// cos 2πx plus random coefficients uniform in [-scale, scale] on the
    /// first `modes` harmonics.
    pub fn random(modes: usize, scale: f64, rng: &mut RngStream) -> Result<Self> {
        let modes = modes.clamp(1, MAX_MODES);
        let mut c: Vec<f64> = (0..modes).map(|_| rng.next_range(-scale, scale)).collect();
        let s: Vec<f64> = (0..modes).map(|_| rng.next_range(-scale, scale)).collect();
        c[0] += 1.0;
        Self::new(&c, &s)
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    /// (f(x), f′(x)) via the angle-addition recurrence.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let (s1, c1) = libm::sincos(TAU * x);
        let (mut ck, mut sk) = (c1, s1);
        let mut f = 0.0;
        let mut df = 0.0;
        for k in 0..self.cos.len() {
            let kk = (k + 1) as f64;
            f += self.cos[k] * ck + self.sin[k] * sk;
            df += TAU * kk * (self.sin[k] * ck - self.cos[k] * sk);
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        (f, df)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (s1, c1) = libm::sincos(TAU * x);
        let (mut ck, mut sk) = (c1, s1);
        let mut f = 0.0;
        for k in 0..self.cos.len() {
            f += self.cos[k] * ck + self.sin[k] * sk;
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        f
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).1
    }

    /// Σ 2πk(|aₖ| + |bₖ|), a bound on |f′|.
    pub fn derivative_bound(&self) -> f64 {
        (0..self.cos.len()).map(|k| TAU * (k + 1) as f64 * (self.cos[k].abs() + self.sin[k].abs())).sum()
    }

    /// Upper bound on sup |f|: the maximum over a fine grid plus the largest
    /// possible excursion between grid points.
    pub fn sup_bound(&self) -> f64 {
        const GRID: usize = 4096;
        let h = 1.0 / GRID as f64;
        let m = (0..GRID).map(|i| self.eval(i as f64 * h).abs()).fold(0.0, f64::max);
        m + self.derivative_bound() * h / 2.0
    }
}
