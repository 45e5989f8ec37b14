use alloc::vec::Vec;

use super::{check_metric, circle_dist, frac, Endomorphism, Metric, ReferenceMeasure};
use crate::error::{invalid, Error, Result};
use crate::numerics::{eigenvalues, RngStream, SquareMatrix};

/// Largest torus dimension for the map itself (the exact evaluators go to 8).
pub const MAX_TORUS_DIM: usize = 4;

/// A point of the torus; coordinates past the system dimension stay zero.
pub type TorusPoint = [f64; MAX_TORUS_DIM];

const HYPERBOLIC_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-9;
const MAX_DET: u64 = 1 << 12;
const MAX_OFFSET_BOX: u64 = 1 << 24;

/// x ↦ A·x mod 1 for an integer matrix A.
#[derive(Clone, Debug)]
pub struct ToralLinear {
    matrix: SquareMatrix,
    inverse: SquareMatrix,
    dim: usize,
    det_abs: u64,
    /// frac(A⁻¹k) for one integer k in each coset of Zᵈ / AZᵈ.
    offsets: Vec<TorusPoint>,
    metric: Metric,
}

/// |λ| within tolerance of 1 for some eigenvalue.
pub(crate) fn check_hyperbolic(matrix: &SquareMatrix) -> Result<()> {
    for e in eigenvalues(matrix)? {
        let m = e.modulus();
        if (m - 1.0).abs() < HYPERBOLIC_TOL {
            return Err(Error::NonHyperbolic(m));
        }
    }
    Ok(())
}

impl ToralLinear {
    pub fn new(matrix: &SquareMatrix) -> Result<Self> {
        Self::with_metric(matrix, None)
    }

    pub fn with_metric(matrix: &SquareMatrix, metric: Option<Metric>) -> Result<Self> {
        let dim = matrix.dim();
        if dim > MAX_TORUS_DIM {
            return Err(Error::Dimension(dim));
        }
        if !matrix.is_integer() {
            return Err(invalid("matrix", "entries must be integers"));
        }
        let det = matrix
            .integer_determinant()
            .ok_or_else(|| invalid("matrix", "determinant overflows"))?;
        let det_abs = det.unsigned_abs();
        if det_abs < 2 {
            return Err(invalid("matrix", "|det A| must be at least 2"));
        }
        if det_abs > MAX_DET as u128 {
            return Err(invalid("matrix", alloc::format!("|det A| = {det_abs} exceeds {MAX_DET}")));
        }
        check_hyperbolic(matrix)?;
        let metric = check_metric(
            "toral_linear",
            metric.unwrap_or(Metric::TorusSup),
            &[Metric::TorusSup, Metric::TorusEuclidean],
        )?;
        let inverse = matrix.inverse().ok_or_else(|| invalid("matrix", "singular"))?;
        let offsets = coset_offsets(matrix, &inverse, det_abs as usize)?;
        Ok(Self { matrix: matrix.clone(), inverse, dim, det_abs: det_abs as u64, offsets, metric })
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn det_abs(&self) -> u64 {
        self.det_abs
    }

    /// Smallest distance between two distinct preimages of the same point.
    /// Preimage sets are translates of the offset set, so this is the
    /// minimal pairwise distance between offsets.
    pub fn preimage_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.offsets.iter().enumerate() {
            for b in &self.offsets[i + 1..] {
                best = best.min(self.distance(a, b));
            }
        }
        best
    }
}

/// Integer points of the box spanned by A[0,1)ᵈ represent every coset of
/// Zᵈ/AZᵈ; map them through A⁻¹ and deduplicate mod 1.
fn coset_offsets(a: &SquareMatrix, inv: &SquareMatrix, count: usize) -> Result<Vec<TorusPoint>> {
    let d = a.dim();
    let mut lo = [0i64; MAX_TORUS_DIM];
    let mut hi = [0i64; MAX_TORUS_DIM];
    let mut cells: u64 = 1;
    for i in 0..d {
        for j in 0..d {
            let v = a.get(i, j) as i64;
            if v < 0 {
                lo[i] += v;
            } else {
                hi[i] += v;
            }
        }
        cells = cells.saturating_mul((hi[i] - lo[i] + 1) as u64);
    }
    if cells > MAX_OFFSET_BOX {
        return Err(invalid("matrix", "entries too large for preimage enumeration"));
    }
    let mut out: Vec<TorusPoint> = Vec::with_capacity(count);
    let mut k = lo;
    'outer: loop {
        let kf: Vec<f64> = (0..d).map(|i| k[i] as f64).collect();
        let mut w = [0.0; MAX_TORUS_DIM];
        inv.mul_vec(&kf, &mut w);
        for c in w.iter_mut().take(d) {
            *c = frac(*c);
            if *c > 1.0 - DEDUP_TOL {
                *c = 0.0;
            }
        }
        let dup = out
            .iter()
            .any(|o| (0..d).all(|i| circle_dist(o[i], w[i]) < DEDUP_TOL));
        if !dup {
            out.push(w);
            if out.len() == count {
                break 'outer;
            }
        }
        // odometer over the box
        let mut i = 0;
        loop {
            if i == d {
                break 'outer;
            }
            k[i] += 1;
            if k[i] <= hi[i] {
                break;
            }
            k[i] = lo[i];
            i += 1;
        }
    }
    if out.len() != count {
        return Err(invalid("matrix", "preimage enumeration found too few cosets"));
    }
    out.sort_by(|p, q| lex_cmp(p, q, d));
    Ok(out)
}

fn lex_cmp(p: &TorusPoint, q: &TorusPoint, d: usize) -> core::cmp::Ordering {
    for i in 0..d {
        match p[i].total_cmp(&q[i]) {
            core::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    core::cmp::Ordering::Equal
}

impl Endomorphism for ToralLinear {
    type Point = TorusPoint;

    fn kind_name(&self) -> &'static str {
        "toral_linear"
    }

    fn metric(&self) -> Metric {
        self.metric
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &TorusPoint) -> TorusPoint {
        let mut y = [0.0; MAX_TORUS_DIM];
        self.matrix.mul_vec(x, &mut y);
        for c in y.iter_mut().take(self.dim) {
            *c = frac(*c);
        }
        y
    }

    fn preimages_into(&self, x: &TorusPoint, out: &mut Vec<TorusPoint>) {
        out.clear();
        let mut base = [0.0; MAX_TORUS_DIM];
        self.inverse.mul_vec(x, &mut base);
        for off in &self.offsets {
            let mut w = [0.0; MAX_TORUS_DIM];
            for i in 0..self.dim {
                w[i] = frac(base[i] + off[i]);
            }
            out.push(w);
        }
        let d = self.dim;
        out.sort_by(|p, q| lex_cmp(p, q, d));
    }

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        match self.metric {
            Metric::TorusEuclidean => {
                let s: f64 = (0..self.dim).map(|i| circle_dist(p[i], q[i])).map(|d| d * d).sum();
                libm::sqrt(s)
            }
            _ => (0..self.dim).map(|i| circle_dist(p[i], q[i])).fold(0.0, f64::max),
        }
    }

    fn diameter(&self) -> f64 {
        match self.metric {
            Metric::TorusEuclidean => 0.5 * libm::sqrt(self.dim as f64),
            _ => 0.5,
        }
    }

    fn reference_measure(&self) -> ReferenceMeasure {
        ReferenceMeasure::Haar
    }

    fn jacobian(&self, _x: &TorusPoint) -> Option<f64> {
        Some(self.det_abs as f64)
    }

    fn differential(&self, _x: &TorusPoint) -> Result<SquareMatrix> {
        Ok(self.matrix.clone())
    }

    fn sample_reference(&self, rng: &mut RngStream) -> TorusPoint {
        let mut p = [0.0; MAX_TORUS_DIM];
        for c in p.iter_mut().take(self.dim) {
            *c = rng.next_uniform();
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ToralLinear {
        ToralLinear::new(&SquareMatrix::from_int_rows(&[[3, 1], [1, 1]]).unwrap()).unwrap()
    }

    #[test]
    fn apply_example() {
        let y = cat().apply(&[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(&y[..2], &[0.0, 0.0]);
    }

    #[test]
    fn preimages_round_trip() {
        let s = cat();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..1000 {
            let x = s.sample_reference(&mut rng);
            let pre = s.preimages(&x);
            assert_eq!(pre.len(), 2);
            for w in &pre {
                assert!(s.distance(&s.apply(w), &x) < 1e-10);
            }
            assert!(s.distance(&pre[0], &pre[1]) > 0.4);
        }
    }

    #[test]
    fn three_dimensional_cosets() {
        let a1 = SquareMatrix::from_int_rows(&[[8, 1, 4], [0, 3, 1], [0, 2, 1]]).unwrap();
        let s = ToralLinear::new(&a1).unwrap();
        assert_eq!(s.det_abs(), 8);
        let x = [0.123, 0.456, 0.789, 0.0];
        let pre = s.preimages(&x);
        assert_eq!(pre.len(), 8);
        for w in &pre {
            assert!(s.distance(&s.apply(w), &x) < 1e-10);
        }
        for i in 0..8 {
            for j in i + 1..8 {
                assert!(s.distance(&pre[i], &pre[j]) > 1e-3);
            }
        }
    }

    #[test]
    fn negative_entries() {
        let m = SquareMatrix::from_int_rows(&[[-2, 1], [1, -3]]).unwrap();
        let s = ToralLinear::new(&m).unwrap();
        assert_eq!(s.preimages(&[0.3, 0.9, 0.0, 0.0]).len(), 5);
    }

    #[test]
    fn construction_rejects() {
        let unimodular = SquareMatrix::from_int_rows(&[[2, 1], [1, 1]]).unwrap();
        assert!(ToralLinear::new(&unimodular).is_err());
        let elliptic = SquareMatrix::from_int_rows(&[[1, 0], [0, 2]]).unwrap();
        assert!(matches!(ToralLinear::new(&elliptic), Err(Error::NonHyperbolic(_))));
        let frac_entry = SquareMatrix::from_rows(&[[2.5, 0.0], [0.0, 2.0]]).unwrap();
        assert!(ToralLinear::new(&frac_entry).is_err());
        assert!(ToralLinear::with_metric(&SquareMatrix::from_int_rows(&[[3, 1], [1, 1]]).unwrap(), Some(Metric::ProductSup)).is_err());
    }

    #[test]
    fn distances() {
        let s = cat();
        assert!((s.distance(&[0.1, 0.9, 0.0, 0.0], &[0.9, 0.1, 0.0, 0.0]) - 0.2).abs() < 1e-15);
        let e = ToralLinear::with_metric(s.matrix(), Some(Metric::TorusEuclidean)).unwrap();
        let d = e.distance(&[0.1, 0.9, 0.0, 0.0], &[0.9, 0.1, 0.0, 0.0]);
        assert!((d - libm::sqrt(0.08)).abs() < 1e-15);
        assert!((s.preimage_separation() - 0.5).abs() < 1e-12);
    }
}
