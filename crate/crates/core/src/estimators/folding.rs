use alloc::format;
use alloc::vec::Vec;

use super::{label, task_stream, EntropyReport, EstimatorConfig, Executor};
use crate::error::{Error, Result};
use crate::numerics::{mean_and_sem, NeumaierSum};
use crate::systems::{Endomorphism, ReferenceMeasure};

/// Folding entropy as a Birkhoff average of log J along reference orbits,
/// one orbit per anchor; the standard error is the spread across orbits.
///
/// Systems whose Jacobian has no pointwise closed form but whose folding
/// entropy is known exactly report that value instead.
pub fn estimate_folding_entropy<S: Endomorphism, E: Executor>(
    sys: &S,
    tag: ReferenceMeasure,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<EntropyReport> {
    cfg.validate()?;
    sys.check_measure(tag)?;
    let stream = task_stream(cfg.seed, label::FOLDING);
    let probe = sys.sample_reference(&mut stream.substream(label::CENTRES));
    if sys.measure_jacobian(tag, &probe)?.is_none() {
        return match sys.exact_folding() {
            Some(v) => Ok(EntropyReport::point(
                "folding_entropy",
                "closed form",
                v,
                0.0,
                0,
                alloc::vec!["no pointwise Jacobian; value taken from the closed form".into()],
            )),
            None => Err(Error::JacobianUnavailable),
        };
    }
    let steps = cfg.orbit_len();
    let burn = cfg.burn_in;
    let averages: Vec<f64> = exec.map_collect(cfg.anchors, |a| {
        let mut rng = stream.substream(label::ANCHORS).substream(a as u64);
        let mut acc = NeumaierSum::default();
        let mut i = 0usize;
        sys.forward_orbit(burn + steps, &mut rng, &mut |x| {
            if i >= burn {
                acc.add(libm::log(sys.jacobian(x).expect("jacobian checked above")));
            }
            i += 1;
        });
        acc.value() / steps as f64
    });
    let (mean, sem) = mean_and_sem(&averages);
    Ok(EntropyReport::point(
        "folding_entropy",
        "Birkhoff average of log J",
        mean,
        sem,
        cfg.anchors,
        alloc::vec![format!("{} orbits of {} steps after {} burn-in steps", cfg.anchors, steps, burn)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Sequential;
    use crate::systems::{ExpandingCircle, FatBaker, FullShift, TrigPolynomial, Tsujii};

    fn small() -> EstimatorConfig {
        EstimatorConfig { anchors: 4, burn_in: 100, orbit_steps: Some(20_000), ..Default::default() }
    }

    #[test]
    fn constant_jacobian() {
        let s = ExpandingCircle::new(2).unwrap();
        let r = estimate_folding_entropy(&s, ReferenceMeasure::Haar, &small(), &Sequential).unwrap();
        let (v, _) = r.value().unwrap();
        assert!((v - core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_shannon_entropy() {
        let s = FullShift::new(&[0.3, 0.7], 48).unwrap();
        let r = estimate_folding_entropy(&s, ReferenceMeasure::Bernoulli, &small(), &Sequential).unwrap();
        let h = -(0.3f64 * 0.3f64.ln() + 0.7 * 0.7f64.ln());
        let (v, se) = r.value().unwrap();
        assert!((v - h).abs() < 4.0 * se + 1e-3, "{v} vs {h}");
    }

    #[test]
    fn closed_form_and_unavailable() {
        let t = Tsujii::new(2, 0.7, TrigPolynomial::new(&[1.0], &[]).unwrap()).unwrap();
        let r = estimate_folding_entropy(&t, ReferenceMeasure::Srb, &small(), &Sequential).unwrap();
        assert!((r.value().unwrap().0 - 1.4f64.ln()).abs() < 1e-15);
        let b = FatBaker::new(0.75).unwrap();
        let e = estimate_folding_entropy(&b, ReferenceMeasure::Srb, &small(), &Sequential).unwrap_err();
        assert_eq!(e, Error::JacobianUnavailable);
        assert_eq!(alloc::format!("{e}"), "folding estimator requires closed-form measure Jacobian");
    }

    #[test]
    fn wrong_measure() {
        let s = ExpandingCircle::new(2).unwrap();
        assert!(estimate_folding_entropy(&s, ReferenceMeasure::Srb, &small(), &Sequential).is_err());
    }
}
