use alloc::vec::Vec;

use super::{label, task_stream, EstimatorConfig, Executor};
use crate::error::Result;
use crate::numerics::{qr_decompose, NeumaierSum, SquareMatrix};
use crate::systems::Endomorphism;

/// Lyapunov exponents (descending) from QR-reorthonormalised products of
/// differentials along reference orbits, averaged over `cfg.anchors` orbits.
pub fn estimate_lyapunov_spectrum<S: Endomorphism, E: Executor>(
    sys: &S,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let stream = task_stream(cfg.seed, label::LYAPUNOV);
    let probe = sys.sample_reference(&mut stream.substream(label::CENTRES));
    sys.differential(&probe)?;
    let d = sys.dim();
    let steps = cfg.orbit_len();
    let burn = cfg.burn_in;
    let per_orbit: Vec<Vec<f64>> = exec.map_collect(cfg.anchors, |a| {
        let mut rng = stream.substream(label::ANCHORS).substream(a as u64);
        let mut q = SquareMatrix::identity(d);
        let mut sums = alloc::vec![NeumaierSum::default(); d];
        let mut i = 0usize;
        sys.forward_orbit(burn + steps, &mut rng, &mut |x| {
            let m = sys.differential(x).expect("differential checked above").mul(&q);
            let (qn, r) = qr_decompose(&m);
            if i >= burn {
                for (k, s) in sums.iter_mut().enumerate() {
                    s.add(libm::log(r.get(k, k).abs()));
                }
            }
            q = qn;
            i += 1;
        });
        sums.iter().map(|s| s.value() / steps as f64).collect()
    });
    let mut out: Vec<f64> =
        (0..d).map(|k| per_orbit.iter().map(|v| v[k]).sum::<f64>() / per_orbit.len() as f64).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Sequential;
    use crate::systems::{FatBaker, FullShift, ToralLinear};
    use crate::Error;

    fn cfg() -> EstimatorConfig {
        EstimatorConfig { anchors: 2, burn_in: 200, orbit_steps: Some(5_000), ..Default::default() }
    }

    #[test]
    fn toral_a1() {
        let a = SquareMatrix::from_int_rows(&[[8, 1, 4], [0, 3, 1], [0, 2, 1]]).unwrap();
        let s = ToralLinear::new(&a).unwrap();
        let l = estimate_lyapunov_spectrum(&s, &cfg(), &Sequential).unwrap();
        let r3 = 3f64.sqrt();
        let want = [8f64.ln(), (2.0 + r3).ln(), (2.0 - r3).ln()];
        for (x, y) in l.iter().zip(want) {
            assert!((x - y).abs() < 1e-6, "{l:?}");
        }
    }

    #[test]
    fn baker_constant_diagonal() {
        let s = FatBaker::new(0.75).unwrap();
        let l = estimate_lyapunov_spectrum(&s, &cfg(), &Sequential).unwrap();
        assert!((l[0] - 2f64.ln()).abs() < 1e-12);
        assert!((l[1] - 0.75f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn shift_is_not_smooth() {
        let s = FullShift::new(&[0.5, 0.5], 32).unwrap();
        assert!(matches!(estimate_lyapunov_spectrum(&s, &cfg(), &Sequential), Err(Error::NotSmooth(_))));
    }
}
