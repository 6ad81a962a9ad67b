use nalgebra::{Matrix2x5, Matrix4, Matrix5, Matrix5x2};

use crate::{Error, PendulumParams, Result};

/// Linearized planar model about the hanging equilibrium with the low-pass
/// filter state appended.
///
/// State ordering: `x = [q1, q̇1, θ, θ̇, θ̇_lp]`, input `u = [F, T]`, output
/// `y = [l2 θ̇ + l1 θ̇_lp, θ̇]` so that the damping law reads `u = −F y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    pub a: Matrix5<f64>,
    pub b: Matrix5x2<f64>,
    pub c: Matrix2x5<f64>,
    pub tau: f64,
}

impl LinearModel {
    /// Upper-left block: the undamped mechanical subsystem without the filter.
    pub fn mechanical_block(&self) -> Matrix4<f64> {
        self.a.fixed_view::<4, 4>(0, 0).into_owned()
    }
}

/// Linearization about the origin. Joint damping is not part of this model.
pub fn linearize(p: &PendulumParams, tau: f64) -> Result<LinearModel> {
    p.validate()?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::param("tau", format!("must be finite and > 0, got {tau}")));
    }
    let (m1, m2, l1, l2, g) = (p.m1, p.m2, p.l1, p.l2, p.g);
    let m12 = p.m12();

    let mut a = Matrix5::zeros();
    a[(0, 1)] = 1.0;
    a[(1, 0)] = -g * m12 / (m1 * l1);
    a[(1, 2)] = m2 * g / (m1 * l1);
    a[(2, 3)] = 1.0;
    a[(3, 0)] = g * m12 / (m1 * l2);
    a[(3, 2)] = -g * m12 / (m1 * l2);
    a[(4, 3)] = 1.0 / tau;
    a[(4, 4)] = -1.0 / tau;

    let mut b = Matrix5x2::zeros();
    b[(1, 1)] = -1.0 / (m1 * l1 * l2);
    b[(3, 0)] = 1.0 / (m2 * l2);
    b[(3, 1)] = m12 / (m1 * m2 * l2 * l2);

    let mut c = Matrix2x5::zeros();
    c[(0, 3)] = l2;
    c[(0, 4)] = l1;
    c[(1, 3)] = 1.0;

    Ok(LinearModel { a, b, c, tau })
}
