//! Small dense helpers shared by synthesis and certification.

use nalgebra::{Complex, DMatrix, DVector};

use crate::{Error, Result};

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eig_range(m: &DMatrix<f64>) -> (f64, f64) {
    let ev = symmetrize(m).symmetric_eigenvalues();
    (ev.min(), ev.max())
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    m.clone().complex_eigenvalues().iter().copied().collect()
}

pub fn is_hurwitz(eigs: &[Complex<f64>]) -> bool {
    eigs.iter().all(|l| l.re < 0.0)
}

/// Solves `Aᵀ P + P A + W = 0` by vectorization.
pub fn lyapunov(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || w.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "lyapunov: A is {:?}, W is {:?}",
            a.shape(),
            w.shape()
        )));
    }
    // vec(AᵀP) = (I ⊗ Aᵀ) vec P, vec(PA) = (Aᵀ ⊗ I) vec P (column-major).
    let eye = DMatrix::<f64>::identity(n, n);
    let at = a.transpose();
    let k = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = -DVector::from_column_slice(w.as_slice());
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SynthesisFailed("Lyapunov operator is singular".into()))?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, sol.as_slice())))
}

/// Symmetric positive-definite square root.
pub fn spd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = symmetrize(m).symmetric_eigen();
    if e.eigenvalues.min() <= 0.0 {
        return Err(Error::param("R", "must be positive definite"));
    }
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f64::sqrt));
    Ok(&e.eigenvectors * d * e.eigenvectors.transpose())
}

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|v| Complex::new(v, 0.0))
}

/// Numerical rank from singular values relative to the largest one.
fn rank(m: DMatrix<Complex<f64>>, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|s| **s > rel_tol * top.max(f64::MIN_POSITIVE)).count()
}

/// PBH test: `[A − λI, B]` has full row rank for every eigenvalue of `A`
/// with `Re λ ≥ 0`.
pub fn is_stabilizable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    eigenvalues(a).into_iter().filter(|l| l.re >= -1e-9).all(|l| {
        let shifted = complex(a) - DMatrix::<Complex<f64>>::identity(n, n) * l;
        let mut aug = DMatrix::<Complex<f64>>::zeros(n, n + b.ncols());
        aug.view_mut((0, 0), (n, n)).copy_from(&shifted);
        aug.view_mut((0, n), (n, b.ncols())).copy_from(&complex(b));
        rank(aug, 1e-10) == n
    })
}

/// Dual PBH test on `(A, C)`.
pub fn is_detectable(a: &DMatrix<f64>, c: &DMatrix<f64>) -> bool {
    is_stabilizable(&a.transpose(), &c.transpose())
}
