//! Telling toral endomorphisms apart by their entropy invariants.

use iel_core::exact::{toral_invariants, InvariantPair};
use iel_core::SquareMatrix;
use serde::{Deserialize, Serialize};

/// Entropies closer than this are treated as equal.
pub const TOLERANCE: f64 = 1e-9;

pub const INVERSE_DIFFERS: &str = "not isomorphic (inverse entropy differs)";
pub const FORWARD_DIFFERS: &str = "not isomorphic (forward entropy differs)";
pub const INDISTINGUISHABLE: &str = "indistinguishable by these invariants";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub a: InvariantPair,
    pub b: InvariantPair,
    /// inverse(b) - inverse(a).
    pub inverse_difference: f64,
    /// forward(b) - forward(a).
    pub forward_difference: f64,
    pub verdict: String,
}

/// Compares the exact invariants of two toral endomorphisms. Equal
/// invariants never imply an isomorphism, so the verdict never claims one.
pub fn distinguish(a: &SquareMatrix, b: &SquareMatrix) -> iel_core::Result<Verdict> {
    let pa = toral_invariants(a)?;
    let pb = toral_invariants(b)?;
    let inverse_difference = pb.inverse_entropy - pa.inverse_entropy;
    let forward_difference = pb.forward_entropy - pa.forward_entropy;
    let verdict = if inverse_difference.abs() > TOLERANCE {
        INVERSE_DIFFERS
    } else if forward_difference.abs() > TOLERANCE {
        FORWARD_DIFFERS
    } else {
        INDISTINGUISHABLE
    };
    Ok(Verdict { a: pa, b: pb, inverse_difference, forward_difference, verdict: verdict.into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SquareMatrix {
        SquareMatrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn a1_a2() {
        let a1 = m(&[&[8, 1, 4], &[0, 3, 1], &[0, 2, 1]]);
        let a2 = m(&[&[4, 0, 0], &[3, 6, 2], &[5, 4, 2]]);
        let v = distinguish(&a1, &a2).unwrap();
        assert_eq!(v.verdict, INVERSE_DIFFERS);
        assert!(v.forward_difference.abs() < 1e-10);
        let r3 = 3f64.sqrt();
        let want = ((4.0 - 2.0 * r3) / (2.0 - r3)).ln();
        assert!((v.inverse_difference.abs() - want).abs() < 1e-10);
    }

    #[test]
    fn reflexive_and_powers() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(distinguish(&a, &a).unwrap().verdict, INDISTINGUISHABLE);
        let v = distinguish(&a, &a.pow(2)).unwrap();
        assert_eq!(v.verdict, INVERSE_DIFFERS);
        assert!((v.b.inverse_entropy - 2.0 * v.a.inverse_entropy).abs() < 1e-10);
    }

    #[test]
    fn forward_only() {
        // same stable spectrum, different unstable one
        let a = m(&[&[3, 1], &[1, 1]]);
        let b = SquareMatrix::block_diagonal(&a, &m(&[&[2]])).unwrap();
        let v = distinguish(&a, &b).unwrap();
        assert_eq!(v.verdict, FORWARD_DIFFERS);
    }
}
