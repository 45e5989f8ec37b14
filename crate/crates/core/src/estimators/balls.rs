use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{label, task_stream, EstimatorConfig, Executor};
use crate::error::{invalid, Error, Result};
use crate::numerics::{fit_slope, mean_and_sem, RngStream, SlopeEstimate};
use crate::prehistory::{deepest_forward_level, BowenQuery, BranchSearch, Direction};
use crate::systems::{Endomorphism, ReferenceMeasure};

/// Reference samples per parallel work item.
const CHUNK: u64 = 8192;
/// A radius is kept when anchors retain this many depths on average.
const MIN_MEAN_DEPTHS: f64 = 3.0;
/// Preferred retention for the radius the estimate is read from.
const PREFERRED_RETENTION: f64 = 0.8;

/// Hit counts for one ball.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BallMeasureEstimate {
    pub hits: u64,
    pub trials: u64,
    pub phat: f64,
    pub stderr: f64,
}

impl BallMeasureEstimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        assert!(hits <= trials && trials > 0);
        let phat = hits as f64 / trials as f64;
        Self { hits, trials, phat, stderr: libm::sqrt(phat * (1.0 - phat) / trials as f64) }
    }
}

/// Slope of -log μ(ball) against n at one radius, averaged over anchors.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiusSlope {
    pub eps: f64,
    pub slope: Option<SlopeEstimate>,
    pub anchors_fitted: usize,
    /// Share of (anchor, depth) balls with at least `min_hits` hits.
    pub retained_fraction: f64,
    pub dropped: bool,
}

/// Pooled decay curve point (all anchors together).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub eps: f64,
    pub n: usize,
    pub hits: u64,
    pub trials: u64,
    /// -log(hits/trials); absent when the pooled ball has fewer than `min_hits` hits.
    pub neg_log_phat: Option<f64>,
}

/// A finite-sample estimate of an entropy-type rate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyReport {
    pub quantity: String,
    pub method: String,
    pub per_radius: Vec<RadiusSlope>,
    /// `None` when every radius was dropped (insufficient resolution).
    pub extrapolated: Option<f64>,
    pub stderr: Option<f64>,
    pub selected_eps: Option<f64>,
    pub anchors_used: usize,
    pub balls_skipped: u64,
    pub min_hits: u64,
    pub curve: Vec<CurvePoint>,
    pub notes: Vec<String>,
}

impl EntropyReport {
    /// (estimate, standard error), or an error if nothing was resolved.
    pub fn value(&self) -> Result<(f64, f64)> {
        match (self.extrapolated, self.stderr) {
            (Some(v), Some(s)) => Ok((v, s)),
            _ => Err(Error::InsufficientResolution),
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.extrapolated.is_some()
    }

    pub(crate) fn point(quantity: &str, method: &str, value: f64, stderr: f64, anchors: usize, notes: Vec<String>) -> Self {
        Self {
            quantity: quantity.into(),
            method: method.into(),
            per_radius: Vec::new(),
            extrapolated: Some(value),
            stderr: Some(stderr),
            selected_eps: None,
            anchors_used: anchors,
            balls_skipped: 0,
            min_hits: 0,
            curve: Vec::new(),
            notes,
        }
    }
}

/// Monte-Carlo estimate of μ(ball) from `n_samples` reference draws.
pub fn estimate_ball_measure<S: Endomorphism>(
    sys: &S,
    tag: ReferenceMeasure,
    q: &BowenQuery<'_, S::Point>,
    n_samples: u64,
    rng: &mut RngStream,
) -> Result<BallMeasureEstimate> {
    sys.check_measure(tag)?;
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    let orbit = match q.direction {
        Direction::Inverse => q.anchor.points().to_vec(),
        Direction::Forward => forward_orbit_of(sys, q.anchor.x0(), q.n),
    };
    let mut search = BranchSearch::new(sys);
    let mut hits = 0;
    for _ in 0..n_samples {
        let z = sys.sample_reference(rng);
        let level = match q.direction {
            Direction::Inverse => search.deepest_inverse_level(&orbit, q.epsilon, q.n, &z),
            Direction::Forward => deepest_forward_level(sys, &orbit, q.epsilon, q.n, &z),
        };
        if level == Some(q.n) {
            hits += 1;
        }
    }
    Ok(BallMeasureEstimate::from_counts(hits, n_samples))
}

pub(crate) fn forward_orbit_of<S: Endomorphism>(sys: &S, x: &S::Point, n: usize) -> Vec<S::Point> {
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(x.clone());
    for i in 0..n {
        let next = sys.apply(&orbit[i]);
        orbit.push(next);
    }
    orbit
}

/// Cumulative hit counts, indexed by anchor, radius and depth.
pub(crate) struct DecayTable {
    pub radii: Vec<f64>,
    pub max_depth: usize,
    pub anchors: usize,
    pub trials: u64,
    counts: Vec<u64>,
}

impl DecayTable {
    pub fn new(radii: &[f64], max_depth: usize, anchors: usize, trials: u64, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), anchors * radii.len() * (max_depth + 1));
        Self { radii: radii.to_vec(), max_depth, anchors, trials, counts }
    }

    #[inline]
    pub fn hits(&self, anchor: usize, radius: usize, n: usize) -> u64 {
        self.counts[(anchor * self.radii.len() + radius) * (self.max_depth + 1) + n]
    }
}

/// Samples reference points and, for every anchor orbit and radius, records
/// the deepest ball each sample falls in. Samples are shared across radii
/// and depths, so every curve is monotone by construction.
fn decay_table<S: Endomorphism, E: Executor>(
    sys: &S,
    orbits: &[Vec<S::Point>],
    direction: Direction,
    radii: &[f64],
    max_depth: usize,
    samples: u64,
    stream: &RngStream,
    exec: &E,
) -> DecayTable {
    let r_count = radii.len();
    let width = max_depth + 2;
    let chunks = samples.div_ceil(CHUNK) as usize;
    let hists: Vec<Vec<u64>> = exec.map_collect(orbits.len() * chunks, |item| {
        let a = item / chunks;
        let c = item % chunks;
        let mut rng = stream.substream(a as u64).substream(c as u64);
        let count = CHUNK.min(samples - c as u64 * CHUNK);
        let mut hist = alloc::vec![0u64; r_count * width];
        let mut search = BranchSearch::new(sys);
        let orbit = &orbits[a];
        for _ in 0..count {
            let z = sys.sample_reference(&mut rng);
            let mut cap = max_depth;
            for (r, &eps) in radii.iter().enumerate() {
                let level = match direction {
                    Direction::Inverse => search.deepest_inverse_level(orbit, eps, cap, &z),
                    Direction::Forward => deepest_forward_level(sys, orbit, eps, cap, &z),
                };
                match level {
                    // smaller radii cannot do better
                    None => break,
                    Some(d) => {
                        hist[r * width + d + 1] += 1;
                        cap = d;
                    }
                }
            }
        }
        hist
    });
    let mut counts = alloc::vec![0u64; orbits.len() * r_count * (max_depth + 1)];
    for a in 0..orbits.len() {
        let mut merged = alloc::vec![0u64; r_count * width];
        for c in 0..chunks {
            for (m, h) in merged.iter_mut().zip(&hists[a * chunks + c]) {
                *m += h;
            }
        }
        for r in 0..r_count {
            let mut acc = 0;
            for n in (0..=max_depth).rev() {
                acc += merged[r * width + n + 1];
                counts[(a * r_count + r) * (max_depth + 1) + n] = acc;
            }
        }
    }
    DecayTable::new(radii, max_depth, orbits.len(), samples, counts)
}

/// Per-anchor least-squares slopes of -log p̂ against n, averaged per radius.
pub(crate) fn summarize(
    table: &DecayTable,
    depths: &[usize],
    min_hits: u64,
    quantity: &str,
    method: &str,
    mut notes: Vec<String>,
) -> EntropyReport {
    let trials = table.trials as f64;
    let need = (depths.len() as f64).clamp(2.0, MIN_MEAN_DEPTHS);
    let mut per_radius = Vec::with_capacity(table.radii.len());
    let mut skipped = 0u64;
    let mut curve = Vec::new();
    for (r, &eps) in table.radii.iter().enumerate() {
        let mut fits: Vec<SlopeEstimate> = Vec::new();
        let mut retained = 0usize;
        for a in 0..table.anchors {
            let pts: Vec<(i64, f64)> = depths
                .iter()
                .filter_map(|&n| {
                    let h = table.hits(a, r, n);
                    (h >= min_hits).then(|| (n as i64, -libm::log(h as f64 / trials)))
                })
                .collect();
            retained += pts.len();
            skipped += (depths.len() - pts.len()) as u64;
            if pts.len() >= 2 {
                if let Ok(f) = fit_slope(&pts) {
                    fits.push(f);
                }
            }
        }
        let mean_retained = retained as f64 / table.anchors as f64;
        let retained_fraction = retained as f64 / (table.anchors * depths.len()) as f64;
        let slope = combine_fits(&fits);
        let dropped = slope.is_none() || mean_retained < need;
        per_radius.push(RadiusSlope { eps, slope, anchors_fitted: fits.len(), retained_fraction, dropped });

        let pooled_trials = table.trials * table.anchors as u64;
        for &n in depths {
            let hits: u64 = (0..table.anchors).map(|a| table.hits(a, r, n)).sum();
            let neg_log_phat = (hits >= min_hits).then(|| -libm::log(hits as f64 / pooled_trials as f64));
            curve.push(CurvePoint { eps, n, hits, trials: pooled_trials, neg_log_phat });
        }
    }

    notes.push("finite-n regression: one slope per radius; lower and upper decay rates are not separated".into());
    let kept: Vec<&RadiusSlope> = per_radius.iter().filter(|p| !p.dropped).collect();
    for p in per_radius.iter().filter(|p| p.dropped) {
        notes.push(format!(
            "radius {} dropped: {:.0}% of balls reached {} hits",
            p.eps,
            100.0 * p.retained_fraction,
            min_hits
        ));
    }
    let choice = kept
        .iter()
        .filter(|p| p.retained_fraction >= PREFERRED_RETENTION)
        .min_by(|a, b| a.eps.total_cmp(&b.eps))
        .copied()
        .or_else(|| {
            let best = kept.iter().map(|p| p.retained_fraction).fold(f64::NEG_INFINITY, f64::max);
            let pick = kept
                .iter()
                .filter(|p| p.retained_fraction == best)
                .min_by(|a, b| a.eps.total_cmp(&b.eps))
                .copied();
            if let Some(p) = pick {
                notes.push(format!(
                    "no radius kept {:.0}% of depths; using eps = {} ({:.0}% retained)",
                    100.0 * PREFERRED_RETENTION,
                    p.eps,
                    100.0 * p.retained_fraction
                ));
            }
            pick
        });
    let (extrapolated, stderr, selected_eps) = match choice {
        Some(p) => {
            let s = p.slope.expect("kept radius has a slope");
            (Some(s.slope), Some(s.stderr), Some(p.eps))
        }
        None => {
            notes.push("insufficient resolution: every radius was dropped".into());
            (None, None, None)
        }
    };
    EntropyReport {
        quantity: quantity.into(),
        method: method.into(),
        per_radius,
        extrapolated,
        stderr,
        selected_eps,
        anchors_used: table.anchors,
        balls_skipped: skipped,
        min_hits,
        curve,
        notes,
    }
}

/// Unweighted mean of per-anchor fits; the standard error is the spread of
/// the anchor slopes over √k.
fn combine_fits(fits: &[SlopeEstimate]) -> Option<SlopeEstimate> {
    match fits.len() {
        0 => None,
        1 => Some(fits[0]),
        k => {
            let slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
            let (slope, stderr) = mean_and_sem(&slopes);
            let intercept = fits.iter().map(|f| f.intercept).sum::<f64>() / k as f64;
            let num_points = fits.iter().map(|f| f.num_points).sum();
            let ms = fits.iter().map(|f| f.residual_rms * f.residual_rms * f.num_points as f64).sum::<f64>()
                / num_points as f64;
            Some(SlopeEstimate { slope, intercept, stderr, num_points, residual_rms: libm::sqrt(ms) })
        }
    }
}

fn check_radii<S: Endomorphism>(sys: &S, cfg: &EstimatorConfig) -> Result<()> {
    if cfg.radii[0] >= sys.diameter() / 2.0 {
        return Err(invalid("radii", format!("radii must stay below half the phase-space diameter ({})", sys.diameter() / 2.0)));
    }
    Ok(())
}

/// Inverse entropy from the decay of inverse Bowen balls around sampled
/// prehistories.
pub fn estimate_inverse_entropy<S: Endomorphism, E: Executor>(
    sys: &S,
    tag: ReferenceMeasure,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<EntropyReport> {
    cfg.validate()?;
    sys.check_measure(tag)?;
    check_radii(sys, cfg)?;
    let depth = cfg.max_depth();
    let stream = task_stream(cfg.seed, label::INVERSE);
    let anchor_stream = stream.substream(label::ANCHORS);
    let orbits: Vec<Vec<S::Point>> = exec.map_collect(cfg.anchors, |a| {
        let mut rng = anchor_stream.substream(a as u64);
        sys.sample_anchor(depth, &mut rng).points().to_vec()
    });
    let table = decay_table(
        sys,
        &orbits,
        Direction::Inverse,
        &cfg.radii,
        depth,
        cfg.samples_per_ball,
        &stream.substream(label::SAMPLES),
        exec,
    );
    let mut notes = Vec::new();
    if !sys.anchor_is_exact() {
        notes.push("prehistories use approximate backward conditionals".into());
    }
    Ok(summarize(&table, &cfg.depths, cfg.min_hits, "inverse_entropy", "inverse Bowen ball decay", notes))
}

/// Forward (Brin–Katok) entropy from the decay of forward Bowen balls.
pub fn estimate_forward_entropy<S: Endomorphism, E: Executor>(
    sys: &S,
    tag: ReferenceMeasure,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<EntropyReport> {
    cfg.validate()?;
    sys.check_measure(tag)?;
    check_radii(sys, cfg)?;
    let depth = cfg.max_depth();
    let stream = task_stream(cfg.seed, label::FORWARD);
    let anchor_stream = stream.substream(label::ANCHORS);
    let orbits: Vec<Vec<S::Point>> = exec.map_collect(cfg.anchors, |a| {
        let mut rng = anchor_stream.substream(a as u64);
        let x = sys.sample_reference(&mut rng);
        forward_orbit_of(sys, &x, depth)
    });
    let table = decay_table(
        sys,
        &orbits,
        Direction::Forward,
        &cfg.radii,
        depth,
        cfg.samples_per_ball,
        &stream.substream(label::SAMPLES),
        exec,
    );
    Ok(summarize(&table, &cfg.depths, cfg.min_hits, "forward_entropy", "forward Bowen ball decay", Vec::new()))
}
