use nalgebra::DMatrix;

use crate::linalg::symmetrize;
use crate::{Error, Result};

/// Stabilizing solution of the continuous algebraic Riccati equation
/// `AᵀP + PA − P B R⁻¹ Bᵀ P + Q = 0`, via the matrix sign function of the
/// Hamiltonian with determinant scaling.
pub fn care(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::param("R", "must be invertible"))?;
    let g = b * r_inv * b.transpose();

    let mut z = DMatrix::<f64>::zeros(2 * n, 2 * n);
    z.view_mut((0, 0), (n, n)).copy_from(a);
    z.view_mut((0, n), (n, n)).copy_from(&(-&g));
    z.view_mut((n, 0), (n, n)).copy_from(&(-q));
    z.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut converged = false;
    for _ in 0..100 {
        let inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SynthesisFailed("Hamiltonian has eigenvalues on the imaginary axis".into()))?;
        let det = z.determinant().abs();
        let c = if det.is_finite() && det > 0.0 {
            det.powf(1.0 / (2 * n) as f64)
        } else {
            1.0
        };
        let next = (&z / c + inv * c) * 0.5;
        let change = (&next - &z).norm() / next.norm();
        z = next;
        if change < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SynthesisFailed("matrix sign iteration did not converge".into()));
    }

    // (W + I) [I; P] = 0  ⇒  [W12; W22 + I] P = −[W11 + I; W21]
    let eye = DMatrix::<f64>::identity(n, n);
    let mut lhs = DMatrix::<f64>::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&z.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n)).copy_from(&(z.view((n, n), (n, n)) + &eye));
    let mut rhs = DMatrix::<f64>::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(z.view((0, 0), (n, n)) + &eye)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-z.view((n, 0), (n, n))));
    let p = lhs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::SynthesisFailed(format!("Riccati least squares failed: {e}")))?;
    Ok(symmetrize(&p))
}
