use nalgebra::{Complex, DMatrix};

use super::{assemble_lmi, LqrWeights, StateSpace, CERT_TOLERANCE};
use crate::linalg::{eigenvalues, is_hurwitz, lyapunov, sym_eig_range};
use crate::Result;

/// Closed-loop facts about a gain, independent of how it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub hurwitz: bool,
    pub eigenvalues: Vec<Complex<f64>>,
    /// Solution of `A_clᵀP + PA_cl + Q + CᵀFᵀRFC = 0` when stable.
    pub lyapunov: Option<DMatrix<f64>>,
    /// `trace` of the above: the LQ cost for `E[x₀x₀ᵀ] = I`.
    pub cost: Option<f64>,
}

impl Certificate {
    /// Slowest closed-loop decay rate (`−max Re λ`).
    pub fn decay_rate(&self) -> f64 {
        -self
            .eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn certify(model: &StateSpace, f: &DMatrix<f64>, weights: &LqrWeights) -> Result<Certificate> {
    model.validate()?;
    weights.validate(model.states(), model.inputs())?;
    let acl = model.closed_loop(f);
    let eigs = eigenvalues(&acl);
    let hurwitz = is_hurwitz(&eigs);
    let lyap = if hurwitz {
        let fc = f * &model.c;
        let w = &weights.q + fc.transpose() * weights.r() * fc;
        Some(lyapunov(&acl, &w)?)
    } else {
        None
    };
    Ok(Certificate {
        hurwitz,
        eigenvalues: eigs,
        cost: lyap.as_ref().map(|p| p.trace()),
        lyapunov: lyap,
    })
}

/// Independent re-check of a synthesis output.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub max_eig_m: f64,
    pub min_eig_p: f64,
    pub hurwitz: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.max_eig_m <= CERT_TOLERANCE && self.min_eig_p > 0.0 && self.hurwitz
    }
}

/// Rebuilds `M` from `(Ξ, F, P)` and checks `M ⪯ tol`, `P ≻ 0` and that
/// `A − BFC` is Hurwitz.
pub fn verify_result(
    model: &StateSpace,
    weights: &LqrWeights,
    xi: &DMatrix<f64>,
    f: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<Verification> {
    let m = assemble_lmi(model, weights, xi, f, p)?.m;
    Ok(Verification {
        max_eig_m: sym_eig_range(&m).1,
        min_eig_p: sym_eig_range(p).0,
        hurwitz: is_hurwitz(&eigenvalues(&model.closed_loop(f))),
    })
}
