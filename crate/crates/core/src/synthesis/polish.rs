//! Local refinement of a stabilizing gain on the exact closed-loop cost
//! `J(F) = trace P_F`.
//!
//! The convexified LMI iteration converges only linearly and stalls in flat
//! directions of `J`; a few Newton steps on `J` itself finish the job.

use nalgebra::{DMatrix, DVector};

use super::{LqrWeights, StateSpace};
use crate::linalg::{eigenvalues, is_hurwitz, lyapunov};

/// Cost and gradient with respect to the listed gain entries.
///
/// `∂J/∂F = 2 (R F C − Bᵀ P) L Cᵀ` with `A_cl L + L A_clᵀ + I = 0`.
fn cost_and_gradient(
    model: &StateSpace,
    weights: &LqrWeights,
    entries: &[(usize, usize)],
    f: &DMatrix<f64>,
) -> Option<(f64, DVector<f64>)> {
    let acl = model.closed_loop(f);
    if !is_hurwitz(&eigenvalues(&acl)) {
        return None;
    }
    let n = model.states();
    let r = weights.r();
    let fc = f * &model.c;
    let p = lyapunov(&acl, &(&weights.q + fc.transpose() * &r * &fc)).ok()?;
    let l = lyapunov(&acl.transpose(), &DMatrix::identity(n, n)).ok()?;
    let g = (&r * f * &model.c - model.b.transpose() * &p) * l * model.c.transpose() * 2.0;
    let grad = DVector::from_iterator(entries.len(), entries.iter().map(|&(i, j)| g[(i, j)]));
    let cost = p.trace();
    cost.is_finite().then_some((cost, grad))
}

fn with_entries(f: &DMatrix<f64>, entries: &[(usize, usize)], v: &DVector<f64>) -> DMatrix<f64> {
    let mut out = f.clone();
    for (k, &(i, j)) in entries.iter().enumerate() {
        out[(i, j)] = v[k];
    }
    out
}

pub(crate) struct Polished {
    pub f: DMatrix<f64>,
    /// Gradient norm fell below the requested relative level.
    pub stationary: bool,
}

/// Damped Newton on `J` over `entries`, Hessian from central differences of
/// the analytic gradient. Returns `None` if `f0` is not stabilizing.
pub(crate) fn polish(
    model: &StateSpace,
    weights: &LqrWeights,
    entries: &[(usize, usize)],
    f0: &DMatrix<f64>,
    tol: f64,
) -> Option<Polished> {
    let k = entries.len();
    let mut v = DVector::from_iterator(k, entries.iter().map(|&(i, j)| f0[(i, j)]));
    let (mut cost, mut grad) = cost_and_gradient(model, weights, entries, f0)?;
    let mut stationary = false;

    for _ in 0..50 {
        let scale = v.amax().max(1.0);
        // Stationarity: predicted first-order change over a relative step of
        // `scale` is negligible against the cost.
        if grad.norm() * scale <= tol * cost {
            stationary = true;
            break;
        }
        let h = 1e-6 * scale;
        let mut hess = DMatrix::zeros(k, k);
        for c in 0..k {
            let mut a = v.clone();
            let mut b = v.clone();
            a[c] += h;
            b[c] -= h;
            let ga = cost_and_gradient(model, weights, entries, &with_entries(f0, entries, &a))?.1;
            let gb = cost_and_gradient(model, weights, entries, &with_entries(f0, entries, &b))?.1;
            hess.set_column(c, &((ga - gb) / (2.0 * h)));
        }
        let hess = (&hess + hess.transpose()) * 0.5;
        let dir = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => -&grad * (scale * scale / cost.max(1e-12)),
        };
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-10 {
            let trial = &v + &dir * step;
            if let Some((c, g)) = cost_and_gradient(model, weights, entries, &with_entries(f0, entries, &trial)) {
                if c < cost {
                    v = trial;
                    cost = c;
                    grad = g;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            // No decrease representable in double precision.
            stationary = grad.norm() * scale <= tol.sqrt() * cost;
            break;
        }
    }
    Some(Polished {
        f: with_entries(f0, entries, &v),
        stationary,
    })
}
