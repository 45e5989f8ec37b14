//! Fixed-size linear algebra, least-squares slopes and seeded random streams.

mod eigen;
mod matrix;
mod regression;
mod rng;

pub use eigen::{eigenvalues, sort_spectrum, Eigenvalue};
pub use matrix::{determinant, qr_decompose, SquareMatrix, MAX_DIM};
pub use regression::{fit_line, fit_slope, SlopeEstimate};
pub use rng::{rng_next_uniform, RngStream};

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sample mean and standard error of the mean (0 for fewer than two values).
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let kf = k as f64;
    let mean = values.iter().sum::<f64>() / kf;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (kf - 1.0);
    (mean, libm::sqrt(var / kf))
}
