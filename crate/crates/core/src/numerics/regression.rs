use crate::error::{Error, Result};

/// Ordinary least-squares fit of `y ≈ slope·n + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopeEstimate {
    /// Nats per step.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope coefficient (0 with only two points).
    pub stderr: f64,
    pub num_points: usize,
    pub residual_rms: f64,
}

/// Least-squares slope over integer abscissae.
///
/// The abscissae are centred in exact integer arithmetic, so the slope is a
/// single weighted sum of the ordinates. Adding a constant to every `y`
/// changes that sum by `c·Σw = 0` exactly whenever the ordinates and shift
/// are representable without rounding (dyadic data, for instance).
pub fn fit_slope(points: &[(i64, f64)]) -> Result<SlopeEstimate> {
    let k = points.len() as i128;
    if k < 2 {
        return Err(Error::DegenerateFit);
    }
    let sum_n: i128 = points.iter().map(|&(n, _)| n as i128).sum();
    // w_i = k·n_i − Σn, so Σw = 0 and Σ w_i n_i = k·Sxx
    let denom: i128 = points.iter().map(|&(n, _)| (k * n as i128 - sum_n) * n as i128).sum();
    if denom == 0 {
        return Err(Error::DegenerateFit);
    }
    let mut num = 0.0;
    for &(n, y) in points {
        num += (k * n as i128 - sum_n) as f64 * y;
    }
    let slope = num / denom as f64;
    let kf = k as f64;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / kf;
    let mean_n = sum_n as f64 / kf;
    let intercept = mean_y - slope * mean_n;
    let ssr: f64 = points
        .iter()
        .map(|&(n, y)| {
            let r = y - (slope * n as f64 + intercept);
            r * r
        })
        .sum();
    let sxx = denom as f64 / kf;
    let stderr = if k > 2 { libm::sqrt(ssr / (kf - 2.0) / sxx) } else { 0.0 };
    Ok(SlopeEstimate {
        slope,
        intercept,
        stderr,
        num_points: points.len(),
        residual_rms: libm::sqrt(ssr / kf),
    })
}

/// Least-squares line through real-valued abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<SlopeEstimate> {
    assert_eq!(xs.len(), ys.len(), "abscissae and ordinates differ in length");
    let k = xs.len();
    if k < 2 {
        return Err(Error::DegenerateFit);
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let stderr = if k > 2 { libm::sqrt(ssr / (kf - 2.0) / sxx) } else { 0.0 };
    Ok(SlopeEstimate { slope, intercept, stderr, num_points: k, residual_rms: libm::sqrt(ssr / kf) })
}
