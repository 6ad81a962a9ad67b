use nalgebra::DMatrix;

use super::{LqrWeights, StateSpace};
use crate::{Error, Result};

/// The LMI matrix of one convexified subproblem and its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiValue {
    /// `[[AᵀP + PA + Q + H, Gᵀ], [G, −R⁻¹]]`.
    pub m: DMatrix<f64>,
    pub trace: f64,
}

/// Builds `M` for gains `F`, Lyapunov candidate `P` and convexification
/// matrix `Ξ`, with
///
/// `G = F C − R⁻¹ Bᵀ P` and
/// `H = −(ΞB) R⁻¹ (BᵀP) − (PB) R⁻¹ (BᵀΞ) + (ΞB) R⁻¹ (BᵀΞ)`.
pub fn assemble_lmi(
    model: &StateSpace,
    weights: &LqrWeights,
    xi: &DMatrix<f64>,
    f: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<LmiValue> {
    model.validate()?;
    let (n, m, outputs) = (model.states(), model.inputs(), model.outputs());
    let dims_ok = xi.shape() == (n, n)
        && p.shape() == (n, n)
        && f.shape() == (m, outputs)
        && weights.q.shape() == (n, n)
        && weights.r_shape.shape() == (m, m);
    if !dims_ok {
        return Err(Error::Dimension(format!(
            "LMI blocks: n = {n}, m = {m}, p = {outputs}; Ξ {:?}, P {:?}, F {:?}, Q {:?}, R {:?}",
            xi.shape(),
            p.shape(),
            f.shape(),
            weights.q.shape(),
            weights.r_shape.shape()
        )));
    }
    let r_inv = weights
        .r()
        .try_inverse()
        .ok_or_else(|| Error::param("R", "must be invertible"))?;
    let (a, b, c) = (&model.a, &model.b, &model.c);

    let g = f * c - &r_inv * b.transpose() * p;
    let xb = xi * b;
    let pb = p * b;
    let h = -(&xb * &r_inv * pb.transpose()) - (&pb * &r_inv * xb.transpose())
        + &xb * &r_inv * xb.transpose();
    let top = a.transpose() * p + p * a + &weights.q + h;

    let mut out = DMatrix::<f64>::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(&top);
    out.view_mut((0, n), (n, m)).copy_from(&g.transpose());
    out.view_mut((n, 0), (m, n)).copy_from(&g);
    out.view_mut((n, n), (m, m)).copy_from(&(-r_inv));
    Ok(LmiValue {
        m: crate::linalg::symmetrize(&out),
        trace: p.trace(),
    })
}
