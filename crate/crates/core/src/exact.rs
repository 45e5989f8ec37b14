//! Closed-form invariants.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numerics::{eigenvalues, SquareMatrix, MAX_DIM};
use crate::systems::{System, SystemKind, SystemSpec};

const HYPERBOLIC_TOL: f64 = 1e-9;

/// Forward, inverse and folding entropy with the Lyapunov spectrum.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvariantPair {
    pub forward_entropy: f64,
    pub inverse_entropy: f64,
    pub folding_entropy: f64,
    /// Descending, with multiplicity.
    pub lyapunov: Vec<f64>,
    pub provenance: String,
}

/// Invariants of x ↦ Ax mod 1 with respect to Haar measure.
///
/// Exponents above 1 in modulus come from the spectrum of A; those below 1
/// come from the spectrum of adj(A) = det(A)·A⁻¹, where they are large and
/// therefore well conditioned.
pub fn toral_invariants(a: &SquareMatrix) -> Result<InvariantPair> {
    if !a.is_integer() {
        return Err(invalid("matrix", "entries must be integers"));
    }
    let det = a.integer_determinant().ok_or_else(|| invalid("matrix", "determinant overflows"))?;
    if det == 0 {
        return Err(invalid("matrix", "matrix is singular"));
    }
    let log_det = libm::log(det.unsigned_abs() as f64);
    let spectrum = eigenvalues(a)?;
    for e in &spectrum {
        let m = e.modulus();
        if (m - 1.0).abs() < HYPERBOLIC_TOL {
            return Err(Error::NonHyperbolic(m));
        }
    }
    let mut expanding: Vec<f64> = spectrum.iter().filter(|e| e.modulus() > 1.0).map(|e| e.ln_modulus()).collect();
    let n_contracting = spectrum.len() - expanding.len();

    let mut contracting: Vec<f64> = if n_contracting == 0 {
        Vec::new()
    } else {
        // log|det/ν| for the n_contracting largest |ν| of adj(A)
        let mut adj: Vec<f64> = eigenvalues(&a.adjugate())?.iter().map(|e| e.ln_modulus()).collect();
        adj.sort_by(|x, y| y.total_cmp(x));
        adj.iter().take(n_contracting).map(|l| log_det - l).collect()
    };
    expanding.sort_by(|x, y| y.total_cmp(x));
    contracting.sort_by(|x, y| y.total_cmp(x));
    let forward_entropy: f64 = expanding.iter().sum();
    let inverse_entropy: f64 = -contracting.iter().sum::<f64>();
    expanding.extend(contracting);
    Ok(InvariantPair {
        forward_entropy,
        inverse_entropy,
        folding_entropy: log_det,
        lyapunov: expanding,
        provenance: "exact: toral eigenvalues".into(),
    })
}

/// Inverse entropy and overlap number of the fat baker map from δ(ν_β).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FatBakerInvariants {
    pub inverse_entropy: f64,
    pub overlap_number: f64,
}

pub fn fat_baker_inverse_from_dimension(beta: f64, delta: f64) -> Result<FatBakerInvariants> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(invalid("beta", "must lie strictly between 1/2 and 1"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid("delta", "must lie in [0, 1]"));
    }
    let inverse_entropy = libm::log(beta).abs() * delta;
    Ok(FatBakerInvariants {
        inverse_entropy,
        overlap_number: libm::exp(core::f64::consts::LN_2 - inverse_entropy),
    })
}

/// Invariants of the Tsujii skew product with respect to its SRB measure.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TsujiiInvariants {
    pub forward: f64,
    pub folding: f64,
    /// Value when the SRB measure is absolutely continuous.
    pub inverse_exact_ac: f64,
    pub inverse_bounds: [f64; 2],
}

pub fn tsujii_invariants(l: u32, lambda: f64) -> Result<TsujiiInvariants> {
    if l < 2 {
        return Err(invalid("l", "must be at least 2"));
    }
    if !(lambda < 1.0 && lambda * l as f64 > 1.0) {
        return Err(invalid("lambda", "need 1/l < lambda < 1"));
    }
    let a = libm::log(lambda).abs();
    Ok(TsujiiInvariants {
        forward: libm::log(l as f64),
        folding: libm::log(lambda * l as f64),
        inverse_exact_ac: a,
        inverse_bounds: [a / 2.0, a],
    })
}

/// Inverse entropy known exactly or only up to bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InverseEntropy {
    Exact(f64),
    Bounds { lower: f64, upper: f64 },
}

/// Forward entropy of the SRB measure and inverse entropy of the inverse SRB measure.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RigidityPair {
    pub forward: f64,
    pub inverse: InverseEntropy,
}

pub fn rigidity_pair(spec: &SystemSpec) -> Result<RigidityPair> {
    match &spec.kind {
        SystemKind::ToralLinear { matrix } => {
            if matrix.dim() != 2 {
                return Err(Error::Unsupported("rigidity pair needs a 2x2 matrix"));
            }
            let p = toral_invariants(matrix)?;
            if !(p.lyapunov[0] > 0.0 && p.lyapunov[1] < 0.0) {
                return Err(Error::Unsupported("rigidity pair needs one expanding and one contracting direction"));
            }
            Ok(RigidityPair { forward: p.lyapunov[0], inverse: InverseEntropy::Exact(-p.lyapunov[1]) })
        }
        SystemKind::Tsujii { l, lambda, .. } => {
            let t = tsujii_invariants(*l, *lambda)?;
            Ok(RigidityPair {
                forward: t.forward,
                inverse: InverseEntropy::Bounds { lower: t.inverse_bounds[0], upper: t.inverse_bounds[1] },
            })
        }
        _ => Err(Error::Unsupported("rigidity pair is defined for 2x2 toral and Tsujii systems")),
    }
}

/// Closed-form invariants of a constructed system with respect to its
/// reference measure.
pub fn closed_forms(system: &System) -> Result<InvariantPair> {
    match system {
        System::Toral(t) => toral_invariants(t.matrix()),
        System::Circle(c) => {
            let h = libm::log(c.degree() as f64);
            Ok(InvariantPair {
                forward_entropy: h,
                inverse_entropy: 0.0,
                folding_entropy: h,
                lyapunov: alloc::vec![h],
                provenance: "exact: expanding circle map".into(),
            })
        }
        System::Shift(s) => {
            let h: f64 = s.probabilities().iter().filter(|&&p| p > 0.0).map(|&p| -p * libm::log(p)).sum();
            Ok(InvariantPair {
                forward_entropy: h,
                inverse_entropy: 0.0,
                folding_entropy: h,
                lyapunov: Vec::new(),
                provenance: "exact: Bernoulli shift".into(),
            })
        }
        System::Tsujii(t) => {
            let v = tsujii_invariants(t.l(), t.lambda())?;
            Ok(InvariantPair {
                forward_entropy: v.forward,
                inverse_entropy: v.inverse_exact_ac,
                folding_entropy: v.folding,
                lyapunov: alloc::vec![v.forward, libm::log(t.lambda())],
                provenance: "exact when the SRB measure is absolutely continuous; otherwise inverse entropy lies in \
                             [|log lambda|/2, |log lambda|]"
                    .into(),
            })
        }
        System::Baker(_) => Err(Error::Unsupported("fat baker inverse entropy depends on the dimension of the Bernoulli convolution")),
    }
}

/// Block-diagonal matrix diag(a, b), for product systems.
pub fn product_matrix(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    if a.dim() + b.dim() > MAX_DIM {
        return Err(Error::Dimension(a.dim() + b.dim()));
    }
    SquareMatrix::block_diagonal(a, b)
}
