use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::balls::{summarize, DecayTable};
use super::identity::{Provenance, Quantity};
use super::{label, task_stream, EntropyReport, EstimatorConfig, Executor};
use crate::error::{invalid, Result};
use crate::numerics::{eigenvalues, fit_line, mean_and_sem, RngStream, SlopeEstimate, SquareMatrix};
use crate::systems::sample_convolution;

const SAMPLE_CHUNK: usize = 1 << 16;
/// Dyadic ladder 2^-FIRST_LEVEL, 2^-(FIRST_LEVEL+1), ...
const FIRST_LEVEL: i32 = 3;
const LAST_LEVEL: i32 = 40;
/// Centres per anchor.
const CENTRES_PER_ANCHOR: usize = 8;
/// Extra slack allowed between the two fat baker routes.
const ROUTE_SLACK: f64 = 0.03;

/// Pointwise dimension estimate of a Bernoulli convolution.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionReport {
    pub beta: f64,
    /// Mean over centres of the per-centre slopes; `stderr` is their spread.
    pub estimate: SlopeEstimate,
    pub centres_used: usize,
    pub samples: u64,
    /// Radii actually used, descending.
    pub radii: Vec<f64>,
    pub ladder_truncated: bool,
    /// Minimal polynomial of 1/β (leading coefficient first) when 1/β is Pisot.
    pub pisot_polynomial: Option<Vec<i64>>,
    pub notes: Vec<String>,
}

/// Whether two estimates agree within `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Agreement {
    pub difference: f64,
    pub tolerance: f64,
    pub agree: bool,
}

/// Both routes to the inverse entropy of the fat baker SRB measure.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FatBakerReport {
    pub beta: f64,
    pub dimension: DimensionReport,
    /// |log β|·δ̂ with δ̂ clamped to [0, 1].
    pub via_dimension: Quantity,
    /// Decay of ν̂(B(x, βⁿε)) in n.
    pub direct: EntropyReport,
    /// exp(log 2 - |log β|·δ̂).
    pub overlap_number: f64,
    /// `None` when the direct route could not resolve a slope.
    pub agreement: Option<Agreement>,
    pub notes: Vec<String>,
}

/// Monic integer polynomial of degree 2 to 4 with coefficients in [-3, 3]
/// having 1/β as a root and every other root strictly inside the unit
/// circle, i.e. a witness that 1/β is a Pisot number.
pub fn pisot_polynomial(beta: f64) -> Option<Vec<i64>> {
    if !(beta > 0.0 && beta < 1.0) {
        return None;
    }
    let theta = 1.0 / beta;
    for degree in 2..=4usize {
        let combos = 7usize.pow(degree as u32);
        for code in 0..combos {
            // coefficients of x^(degree-1), ..., x^0
            let mut c = [0i64; 4];
            let mut k = code;
            for slot in c.iter_mut().take(degree) {
                *slot = (k % 7) as i64 - 3;
                k /= 7;
            }
            if c[degree - 1] == 0 {
                continue;
            }
            let mut p = 1.0;
            let mut scale = 1.0;
            for &ci in c.iter().take(degree) {
                p = p * theta + ci as f64;
                scale = scale * theta + (ci as f64).abs();
            }
            if p.abs() > 1e-9 * scale {
                continue;
            }
            let mut comp = SquareMatrix::zeros(degree);
            for (j, &ci) in c.iter().take(degree).enumerate() {
                comp.set(0, j, -(ci as f64));
            }
            for i in 1..degree {
                comp.set(i, i - 1, 1.0);
            }
            let Ok(roots) = eigenvalues(&comp) else { continue };
            let mut found_theta = false;
            let mut others_inside = true;
            for r in roots {
                if !found_theta && (r.re - theta).abs() < 1e-7 && r.im.abs() < 1e-7 {
                    found_theta = true;
                } else if r.modulus() >= 1.0 - 1e-9 {
                    others_inside = false;
                }
            }
            if found_theta && others_inside {
                let mut out = alloc::vec![1];
                out.extend_from_slice(&c[..degree]);
                return Some(out);
            }
        }
    }
    None
}

fn format_polynomial(c: &[i64]) -> String {
    let d = c.len() - 1;
    let mut s = String::new();
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        let power = d - i;
        let sign = if ci < 0 { "-" } else { "+" };
        if s.is_empty() {
            if ci < 0 {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        let a = ci.abs();
        match power {
            0 => s.push_str(&format!("{a}")),
            _ => {
                if a != 1 {
                    s.push_str(&format!("{a}"));
                }
                s.push('x');
                if power > 1 {
                    s.push_str(&format!("^{power}"));
                }
            }
        }
    }
    s
}

/// `m` sorted draws from ν_β.
fn convolution_samples<E: Executor>(beta: f64, m: u64, stream: &RngStream, exec: &E) -> Vec<f64> {
    let m = m as usize;
    let chunks = m.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<Vec<f64>> = exec.map_collect(chunks, |c| {
        let mut rng = stream.substream(c as u64);
        let count = SAMPLE_CHUNK.min(m - c * SAMPLE_CHUNK);
        (0..count).map(|_| sample_convolution(beta, &mut rng)).collect()
    });
    let mut all: Vec<f64> = parts.into_iter().flatten().collect();
    all.sort_unstable_by(f64::total_cmp);
    all
}

/// Number of sorted samples in the open ball B(x, r).
fn ball_count(sorted: &[f64], x: f64, r: f64) -> u64 {
    let lo = sorted.partition_point(|&z| z <= x - r);
    let hi = sorted.partition_point(|&z| z < x + r);
    hi.saturating_sub(lo) as u64
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.5..1.0).contains(&beta) {
        return Err(invalid("beta", "must satisfy 1/2 <= beta < 1"));
    }
    Ok(())
}

/// Pointwise dimension δ̂ of ν_β: slope of log ν̂(B(x, r)) against log r on
/// a dyadic ladder, fitted per centre x ~ ν_β and averaged over centres.
///
/// `cfg.samples_per_ball` sets the size of the empirical measure and
/// `cfg.anchors × 8` the number of centres. The ladder stops at the first
/// radius where fewer than half of the centres still hold `min_hits` samples.
pub fn estimate_pointwise_dimension<E: Executor>(beta: f64, cfg: &EstimatorConfig, exec: &E) -> Result<DimensionReport> {
    check_beta(beta)?;
    cfg.validate()?;
    let stream = task_stream(cfg.seed, label::DIMENSION);
    let sorted = convolution_samples(beta, cfg.samples_per_ball, &stream.substream(label::SAMPLES), exec);
    let n_centres = cfg.anchors * CENTRES_PER_ANCHOR;
    let centre_stream = stream.substream(label::CENTRES);
    let centres: Vec<f64> = (0..n_centres)
        .map(|i| sample_convolution(beta, &mut centre_stream.substream(i as u64)))
        .collect();

    let full: Vec<f64> = (FIRST_LEVEL..=LAST_LEVEL).map(|k| libm::ldexp(1.0, -k)).collect();
    let counts: Vec<Vec<u64>> = exec.map_collect(n_centres, |i| {
        let x = centres[i];
        let mut row = Vec::with_capacity(full.len());
        for &r in &full {
            let c = ball_count(&sorted, x, r);
            row.push(c);
            if c < cfg.min_hits {
                break;
            }
        }
        row
    });
    let mut levels = 0;
    while levels < full.len() {
        let alive = counts.iter().filter(|row| row.get(levels).is_some_and(|&c| c >= cfg.min_hits)).count();
        if 2 * alive < n_centres {
            break;
        }
        levels += 1;
    }
    let ladder_truncated = levels < full.len();
    let radii = full[..levels].to_vec();
    if levels < 2 {
        return Err(invalid("samples_per_ball", "too few samples to resolve two radii"));
    }

    let m = sorted.len() as f64;
    let mut fits = Vec::new();
    for row in &counts {
        let (xs, ys): (Vec<f64>, Vec<f64>) = radii
            .iter()
            .zip(row)
            .filter(|(_, &c)| c >= cfg.min_hits)
            .map(|(&r, &c)| (libm::log(r), libm::log(c as f64 / m)))
            .unzip();
        if xs.len() >= 2 {
            if let Ok(f) = fit_line(&xs, &ys) {
                fits.push(f);
            }
        }
    }
    let slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    let (slope, stderr) = mean_and_sem(&slopes);
    let intercept = fits.iter().map(|f| f.intercept).sum::<f64>() / fits.len() as f64;
    let num_points = fits.iter().map(|f| f.num_points).sum();
    let rms = libm::sqrt(fits.iter().map(|f| f.residual_rms * f.residual_rms).sum::<f64>() / fits.len() as f64);

    let mut notes = Vec::new();
    if ladder_truncated {
        notes.push(format!(
            "radius ladder truncated at {:e}: smaller balls hold fewer than {} samples",
            radii[levels - 1],
            cfg.min_hits
        ));
    }
    let pisot = pisot_polynomial(beta);
    match &pisot {
        Some(p) => notes.push(format!(
            "1/beta is a Pisot number (root of {}): nu_beta is singular and its dimension is below 1; \
             a finite-sample slope need not resolve the gap",
            format_polynomial(p)
        )),
        None => notes.push(
            "no Pisot witness of degree <= 4 for 1/beta; singularity of nu_beta is not decided numerically".into(),
        ),
    }
    Ok(DimensionReport {
        beta,
        estimate: SlopeEstimate { slope, intercept, stderr, num_points, residual_rms: rms },
        centres_used: fits.len(),
        samples: cfg.samples_per_ball,
        radii,
        ladder_truncated,
        pisot_polynomial: pisot,
        notes,
    })
}

/// Inverse entropy of the fat baker SRB measure along two routes:
/// (a) |log β|·δ̂ from the pointwise dimension and (b) the decay rate in n of
/// ν̂(B(x, βⁿε)), the horizontal factor of the product-shaped inverse ball.
/// The routes use disjoint random streams.
pub fn estimate_fat_baker_inverse_entropy<E: Executor>(
    beta: f64,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<FatBakerReport> {
    check_beta(beta)?;
    cfg.validate()?;
    if cfg.radii[0] >= 1.0 {
        return Err(invalid("radii", "radii must stay below 1"));
    }
    let dimension = estimate_pointwise_dimension(beta, cfg, exec)?;
    let log_beta = libm::log(beta).abs();
    let delta = dimension.estimate.slope.clamp(0.0, 1.0);
    let via_dimension = Quantity {
        value: log_beta * delta,
        stderr: log_beta * dimension.estimate.stderr,
        provenance: Provenance::Estimated,
    };
    let overlap_number = libm::exp(core::f64::consts::LN_2 - via_dimension.value);

    let stream = task_stream(cfg.seed, label::BAKER_DIRECT);
    let sorted = convolution_samples(beta, cfg.samples_per_ball, &stream.substream(label::SAMPLES), exec);
    let anchor_stream = stream.substream(label::ANCHORS);
    let depth = cfg.max_depth();
    let r_count = cfg.radii.len();
    let rows: Vec<Vec<u64>> = exec.map_collect(cfg.anchors, |a| {
        let x = sample_convolution(beta, &mut anchor_stream.substream(a as u64));
        let mut row = Vec::with_capacity(r_count * (depth + 1));
        for &eps in &cfg.radii {
            let mut r = eps;
            for _ in 0..=depth {
                row.push(ball_count(&sorted, x, r));
                r *= beta;
            }
        }
        row
    });
    let table = DecayTable::new(&cfg.radii, depth, cfg.anchors, sorted.len() as u64, rows.concat());
    let direct = summarize(
        &table,
        &cfg.depths,
        cfg.min_hits,
        "inverse_entropy",
        "fat baker product-ball decay",
        alloc::vec!["curve omits the constant vertical factor eps, which does not change slopes".into()],
    );
    let agreement = direct.value().ok().map(|(v, s)| {
        let difference = (v - via_dimension.value).abs();
        let tolerance = 2.0 * libm::hypot(s, via_dimension.stderr) + ROUTE_SLACK;
        Agreement { difference, tolerance, agree: difference <= tolerance }
    });
    let mut notes = alloc::vec![format!("implied overlap number {:.6}", overlap_number)];
    if dimension.estimate.slope > 1.0 || dimension.estimate.slope < 0.0 {
        notes.push(format!("dimension slope {:.4} clamped to [0, 1]", dimension.estimate.slope));
    }
    Ok(FatBakerReport { beta, dimension, via_dimension, direct, overlap_number, agreement, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Sequential;

    #[test]
    fn pisot_examples() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(pisot_polynomial(golden), Some(alloc::vec![1, -1, -1]));
        // plastic number: x^3 - x - 1
        let plastic = 1.324_717_957_244_746f64;
        assert_eq!(pisot_polynomial(1.0 / plastic), Some(alloc::vec![1, 0, -1, -1]));
        assert_eq!(pisot_polynomial(0.75), None);
        assert_eq!(format_polynomial(&[1, 0, -1, -1]), "x^3 - x - 1");
        assert_eq!(format_polynomial(&[1, -2, 3]), "x^2 - 2x + 3");
    }

    #[test]
    fn ball_count_is_open() {
        let s = [0.0, 0.1, 0.2, 0.3];
        assert_eq!(ball_count(&s, 0.1, 0.1), 1);
        assert_eq!(ball_count(&s, 0.15, 0.1), 2);
        assert_eq!(ball_count(&s, 10.0, 0.1), 0);
    }

    #[test]
    fn uniform_case_has_dimension_one() {
        let cfg = EstimatorConfig { anchors: 8, samples_per_ball: 100_000, ..Default::default() };
        let r = estimate_pointwise_dimension(0.5, &cfg, &Sequential).unwrap();
        assert!((r.estimate.slope - 1.0).abs() < 0.03, "{:?}", r.estimate);
        assert!(r.ladder_truncated);
        assert!(r.pisot_polynomial.is_none());
    }

    #[test]
    fn beta_range() {
        let cfg = EstimatorConfig::default();
        assert!(estimate_pointwise_dimension(0.4, &cfg, &Sequential).is_err());
        assert!(estimate_pointwise_dimension(1.0, &cfg, &Sequential).is_err());
    }
}
