//! Distributional checks of the samplers.

use iel_core::estimators::estimate_ball_measure;
use iel_core::systems::{sample_convolution, ExpandingCircle, FullShift, ToralLinear, TrigPolynomial, Tsujii};
use iel_core::{BowenQuery, Endomorphism, Prehistory, ReferenceMeasure, RngStream, SquareMatrix};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(counts: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = counts.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic.
fn ks_critical(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[test]
fn uniform_bins_pass_chi_square() {
    let mut s = RngStream::new(11, 0);
    let mut counts = vec![0u64; 64];
    let n = 640_000;
    for _ in 0..n {
        counts[(s.next_uniform() * 64.0) as usize] += 1;
    }
    assert!(chi_square_p(&counts, &[n as f64 / 64.0; 64]) > 1e-3);
}

#[test]
fn next_below_is_unbiased_for_awkward_bounds() {
    let mut s = RngStream::new(12, 0);
    let k = 7u64;
    let mut counts = vec![0u64; k as usize];
    let n = 700_000;
    for _ in 0..n {
        counts[s.next_below(k) as usize] += 1;
    }
    assert!(chi_square_p(&counts, &vec![n as f64 / k as f64; k as usize]) > 1e-3);
}

#[test]
fn substreams_are_not_correlated() {
    let root = RngStream::new(13, 0);
    let mut a = root.substream(1);
    let mut b = root.substream(2);
    let n = 200_000;
    let (mut sab, mut sa, mut sb, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let x = a.next_uniform();
        let y = b.next_uniform();
        sab += x * y;
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
    }
    let nf = n as f64;
    let cov = sab / nf - sa * sb / (nf * nf);
    let r = cov / ((saa / nf - (sa / nf).powi(2)) * (sbb / nf - (sb / nf).powi(2))).sqrt();
    assert!(r.abs() < 4.0 / nf.sqrt(), "correlation {r}");
}

#[test]
fn half_convolution_is_uniform() {
    let mut s = RngStream::new(14, 0);
    let xs: Vec<f64> = (0..50_000).map(|_| sample_convolution(0.5, &mut s)).collect();
    assert!(xs.iter().all(|x| x.abs() <= 1.0));
    let d = ks_distance(xs, |x| (x + 1.0) / 2.0);
    assert!(d < ks_critical(50_000), "KS {d}");
}

#[test]
fn convolution_moments() {
    // variance of Σ ±(1-β)βⁱ is (1-β)²/(1-β²) = (1-β)/(1+β)
    let beta = 0.75;
    let mut s = RngStream::new(15, 0);
    let n = 200_000;
    let xs: Vec<f64> = (0..n).map(|_| sample_convolution(beta, &mut s)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let want = (1.0 - beta) / (1.0 + beta);
    assert!(mean.abs() < 4.0 * (want / n as f64).sqrt());
    assert!((var - want).abs() < 0.01 * want, "{var} vs {want}");
}

#[test]
fn tsujii_base_marginal_is_uniform() {
    let t = Tsujii::new(2, 0.7, TrigPolynomial::new(&[1.0], &[0.2]).unwrap()).unwrap();
    let mut s = RngStream::new(16, 0);
    let xs: Vec<f64> = (0..20_000).map(|_| t.sample_reference(&mut s)[0]).collect();
    assert!(ks_distance(xs, |x| x) < ks_critical(20_000));
}

#[test]
fn tsujii_samples_are_invariant() {
    // pushing SRB samples forward once leaves the fibre marginal unchanged
    let t = Tsujii::new(2, 0.7, TrigPolynomial::new(&[1.0], &[0.2]).unwrap()).unwrap();
    let mut s = RngStream::new(17, 0);
    let n = 20_000;
    let ys: Vec<f64> = (0..n).map(|_| t.sample_reference(&mut s)[1]).collect();
    let mut pushed: Vec<f64> = (0..n).map(|_| t.apply(&t.sample_reference(&mut s))[1]).collect();
    pushed.sort_by(f64::total_cmp);
    let empirical = |x: f64| pushed.partition_point(|&v| v <= x) as f64 / n as f64;
    // two-sample KS at 1%: 1.628·sqrt(2/n)
    let d = ks_distance(ys, empirical);
    assert!(d < 1.628 * (2.0 / n as f64).sqrt(), "KS {d}");
}

#[test]
fn bernoulli_backward_steps_follow_p() {
    let sys = FullShift::new(&[0.3, 0.7], 32).unwrap();
    let mut s = RngStream::new(18, 0);
    let mut counts = [0u64; 2];
    let n = 50_000;
    for _ in 0..n {
        let a = sys.sample_anchor(1, &mut s);
        counts[a.point(1).symbol(0) as usize] += 1;
    }
    assert!(chi_square_p(&counts, &[0.3 * n as f64, 0.7 * n as f64]) > 1e-3);
}

#[test]
fn circle_ball_measure_does_not_decay() {
    // B(x, eps) ⊆ B⁻ₙ(x̂, eps) for expanding maps; the hit rate is 2·eps for every n
    let sys = ExpandingCircle::new(2).unwrap();
    let mut rng = RngStream::new(19, 0);
    let anchor = sys.sample_anchor(8, &mut rng);
    let mut est = Vec::new();
    for n in 2..=8 {
        let q = BowenQuery::inverse(&anchor, n, 0.1).unwrap();
        est.push(estimate_ball_measure(&sys, ReferenceMeasure::Haar, &q, 40_000, &mut rng).unwrap());
    }
    for e in &est[1..] {
        let se = e.stderr.hypot(est[0].stderr);
        assert!((e.phat - est[0].phat).abs() <= 2.0 * se, "{e:?} vs {:?}", est[0]);
    }
    assert!((est[0].phat - 0.2).abs() <= 3.0 * est[0].stderr);
}

#[test]
fn cat_map_ball_ratio_is_the_stable_eigenvalue() {
    let sys = ToralLinear::new(&SquareMatrix::from_int_rows(&[[3, 1], [1, 1]]).unwrap()).unwrap();
    let oracle = 2.0 - 2f64.sqrt();
    let mut rng = RngStream::new(20, 0);
    let anchor = sys.sample_anchor(10, &mut rng);
    let trials = 400_000;
    let phat: Vec<_> = (4..=8)
        .map(|n| {
            let q = BowenQuery::inverse(&anchor, n, 0.2).unwrap();
            estimate_ball_measure(&sys, ReferenceMeasure::Haar, &q, trials, &mut rng).unwrap()
        })
        .collect();
    for w in phat.windows(2) {
        let r = w[1].phat / w[0].phat;
        // delta-method standard error of a ratio of independent proportions
        let se = r * ((w[0].stderr / w[0].phat).powi(2) + (w[1].stderr / w[1].phat).powi(2)).sqrt();
        assert!((r - oracle).abs() < 3.0 * se, "ratio {r} vs {oracle} (se {se})");
    }
}

#[test]
fn whole_space_ball() {
    let sys = ToralLinear::new(&SquareMatrix::from_int_rows(&[[3, 1], [1, 1]]).unwrap()).unwrap();
    let anchor = Prehistory::new(vec![[0.25, 0.5, 0.0, 0.0]]);
    let q = BowenQuery::inverse(&anchor, 0, 1.0).unwrap();
    let e = estimate_ball_measure(&sys, ReferenceMeasure::Haar, &q, 1000, &mut RngStream::new(1, 1)).unwrap();
    assert_eq!((e.hits, e.phat), (1000, 1.0));
}
