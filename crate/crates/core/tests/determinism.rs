use iel_core::estimators::{
    check_entropy_identity, estimate_fat_baker_inverse_entropy, estimate_inverse_entropy, EstimatorConfig, Executor,
    Sequential,
};
use iel_core::systems::{FullShift, ToralLinear};
use iel_core::{ReferenceMeasure, SquareMatrix};

/// Runs jobs back to front.
struct Reversed;

impl Executor for Reversed {
    fn map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, count: usize, f: F) -> Vec<T> {
        let mut v: Vec<T> = (0..count).rev().map(f).collect();
        v.reverse();
        v
    }
}

/// Deals jobs round-robin to scoped threads.
struct Interleaved(usize);

impl Executor for Interleaved {
    fn map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, count: usize, f: F) -> Vec<T> {
        let k = self.0;
        let f = &f;
        let parts: Vec<Vec<(usize, T)>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..k)
                .map(|w| s.spawn(move || (w..count).step_by(k).map(|i| (i, f(i))).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all: Vec<(usize, T)> = parts.into_iter().flatten().collect();
        all.sort_by_key(|p| p.0);
        all.into_iter().map(|p| p.1).collect()
    }
}

fn cat() -> ToralLinear {
    ToralLinear::new(&SquareMatrix::from_int_rows(&[[3, 1], [1, 1]]).unwrap()).unwrap()
}

fn light() -> EstimatorConfig {
    EstimatorConfig { anchors: 5, samples_per_ball: 20_000, ..Default::default() }
}

#[test]
fn inverse_reports_do_not_depend_on_scheduling() {
    let cfg = light();
    let a = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &cfg, &Sequential).unwrap();
    let b = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &cfg, &Reversed).unwrap();
    let c = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &cfg, &Interleaved(3)).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    assert_eq!(format!("{a:?}"), format!("{c:?}"));
}

#[test]
fn same_seed_same_bits_other_seed_other_bits() {
    let cfg = light();
    let a = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &cfg, &Sequential).unwrap();
    let again = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &cfg, &Sequential).unwrap();
    assert_eq!(a, again);
    let other = EstimatorConfig { seed: 1, ..cfg };
    let c = estimate_inverse_entropy(&cat(), ReferenceMeasure::Haar, &other, &Sequential).unwrap();
    assert_ne!(a.curve, c.curve);
}

#[test]
fn composite_reports_are_deterministic() {
    let cfg = light();
    let shift = FullShift::new(&[0.5, 0.5], 48).unwrap();
    let a = check_entropy_identity(&shift, ReferenceMeasure::Bernoulli, &cfg, &Sequential).unwrap();
    let b = check_entropy_identity(&shift, ReferenceMeasure::Bernoulli, &cfg, &Interleaved(4)).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));

    let a = estimate_fat_baker_inverse_entropy(0.7, &cfg, &Sequential).unwrap();
    let b = estimate_fat_baker_inverse_entropy(0.7, &cfg, &Reversed).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
