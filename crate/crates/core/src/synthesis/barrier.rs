//! Log-barrier interior-point method for small dense LMI problems:
//!
//! minimize cᵀx subject to S_j(x) = S_j0 + Σ_i x_i S_ji ≻ 0.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Affine symmetric matrix function of the decision vector.
#[derive(Debug, Clone)]
pub(crate) struct AffineLmi {
    pub base: DMatrix<f64>,
    pub coeffs: Vec<DMatrix<f64>>,
}

impl AffineLmi {
    pub fn eval(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut s = self.base.clone();
        for (xi, a) in x.iter().zip(&self.coeffs) {
            if *xi != 0.0 {
                s += a * *xi;
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.base.nrows()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierOptions {
    /// Target duality-gap bound relative to |cᵀx|.
    pub rel_gap: f64,
    pub abs_gap: f64,
    /// Barrier parameter growth per outer step.
    pub mu: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-9,
            abs_gap: 1e-13,
            mu: 20.0,
            max_newton: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierOutcome {
    pub x: DVector<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierProblem {
    pub c: DVector<f64>,
    pub constraints: Vec<AffineLmi>,
}

/// Newton steps allowed for one centering before it counts as stalled.
const MAX_CENTERING_STEPS: usize = 100;

/// Relative gap below which a stalled centering is accepted.
const STALL_GAP: f64 = 1e-7;

struct Centering {
    steps: usize,
    /// Ended without meeting the Newton decrement target.
    stalled: bool,
}

struct Local {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

impl BarrierProblem {
    fn nvars(&self) -> usize {
        self.c.len()
    }

    fn barrier_dim(&self) -> f64 {
        self.constraints.iter().map(|c| c.dim()).sum::<usize>() as f64
    }

    /// `−Σ log det S_j(x)`, or `None` outside the domain.
    fn log_barrier(&self, x: &DVector<f64>) -> Option<f64> {
        let mut v = 0.0;
        for lmi in &self.constraints {
            let chol = lmi.eval(x).cholesky()?;
            v -= 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        }
        v.is_finite().then_some(v)
    }

    pub fn is_strictly_feasible(&self, x: &DVector<f64>) -> bool {
        self.log_barrier(x).is_some()
    }

    /// Value, gradient and Hessian of `t cᵀx − Σ log det S_j(x)`.
    fn local(&self, x: &DVector<f64>, t: f64) -> Option<Local> {
        let n = self.nvars();
        let mut grad = &self.c * t;
        let mut hess = DMatrix::<f64>::zeros(n, n);
        let mut value = t * self.c.dot(x);
        for lmi in &self.constraints {
            let chol = lmi.eval(x).cholesky()?;
            let l = chol.l();
            value -= 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
            // Ã_i = L⁻¹ A_i L⁻ᵀ; ∂/∂x_i = −tr Ã_i, ∂²/∂x_i∂x_k = ⟨Ã_i, Ã_k⟩.
            let scaled: Vec<DMatrix<f64>> = lmi
                .coeffs
                .iter()
                .map(|a| {
                    let y = l.solve_lower_triangular(a).expect("Cholesky factor is invertible");
                    l.solve_lower_triangular(&y.transpose())
                        .expect("Cholesky factor is invertible")
                })
                .collect();
            for i in 0..n {
                grad[i] -= scaled[i].trace();
                for k in i..n {
                    let h = scaled[i].dot(&scaled[k]);
                    hess[(i, k)] += h;
                    if k != i {
                        hess[(k, i)] += h;
                    }
                }
            }
        }
        value.is_finite().then_some(Local { value, grad, hess })
    }

    fn newton_direction(local: &Local) -> Option<DVector<f64>> {
        let n = local.grad.len();
        // Jacobi scaling keeps badly scaled variables from wrecking the factorization.
        let d = DVector::from_iterator(
            n,
            local.hess.diagonal().iter().map(|h| if *h > 0.0 { 1.0 / h.sqrt() } else { 1.0 }),
        );
        let dm = DMatrix::from_diagonal(&d);
        let hs = &dm * &local.hess * &dm;
        let gs = &dm * &local.grad;
        let mut reg = 0.0;
        for _ in 0..8 {
            let mut h = hs.clone();
            for i in 0..n {
                h[(i, i)] += reg;
            }
            if let Some(ch) = h.cholesky() {
                let step = ch.solve(&(-&gs));
                return Some(dm * step);
            }
            reg = if reg == 0.0 { 1e-12 } else { reg * 100.0 };
        }
        None
    }

    /// Minimizes the barrier function for fixed `t` from a strictly
    /// feasible point.
    fn center(&self, x: &mut DVector<f64>, t: f64, budget: usize) -> Result<Centering> {
        self.center_until(x, t, budget, |_| false)
    }

    /// [`Self::center`] that also ends as soon as `done` holds for an iterate.
    fn center_until(
        &self,
        x: &mut DVector<f64>,
        t: f64,
        budget: usize,
        done: impl Fn(&DVector<f64>) -> bool,
    ) -> Result<Centering> {
        let mut steps = 0;
        let mut stalled = true;
        while steps < budget {
            let local = self
                .local(x, t)
                .ok_or_else(|| Error::SynthesisFailed("iterate left the feasible set".into()))?;
            let dx = Self::newton_direction(&local)
                .ok_or_else(|| Error::SynthesisFailed("singular barrier Hessian".into()))?;
            let decrement = -local.grad.dot(&dx);
            steps += 1;
            if decrement / 2.0 <= 1e-10 {
                stalled = false;
                break;
            }
            let mut s = 1.0;
            let accepted = loop {
                let trial = &*x + &dx * s;
                if let Some(b) = self.log_barrier(&trial) {
                    let v = t * self.c.dot(&trial) + b;
                    if v <= local.value - 0.25 * s * decrement {
                        break Some(trial);
                    }
                }
                s *= 0.5;
                // Below this the Armijo test is decided by rounding noise.
                if s < 1e-6 {
                    break None;
                }
            };
            match accepted {
                Some(trial) => *x = trial,
                None => break,
            }
            if done(x) {
                stalled = false;
                break;
            }
        }
        Ok(Centering { steps, stalled })
    }

    /// Path-following from a strictly feasible `x0`.
    pub fn minimize(&self, x0: &DVector<f64>, opts: &BarrierOptions) -> Result<BarrierOutcome> {
        if !self.is_strictly_feasible(x0) {
            return Err(Error::SynthesisFailed("starting point is not strictly feasible".into()));
        }
        let m = self.barrier_dim();
        let mut x = x0.clone();
        let mut t = m / self.c.dot(&x).abs().max(1e-8);
        let mut total = 0;
        loop {
            let budget = opts.max_newton.saturating_sub(total).clamp(1, MAX_CENTERING_STEPS);
            let run = self.center(&mut x, t, budget)?;
            total += run.steps;
            let obj = self.c.dot(&x);
            if m / t <= (opts.rel_gap * obj.abs()).max(opts.abs_gap) {
                break;
            }
            if run.stalled {
                // Centering no longer makes progress in double precision;
                // accept the point if the previous centre was already close.
                if m / t <= STALL_GAP * opts.mu * obj.abs().max(1.0) {
                    break;
                }
                return Err(Error::SynthesisFailed(format!(
                    "barrier centering stalled with gap {:.3e}",
                    m / t
                )));
            }
            if total >= opts.max_newton {
                return Err(Error::SynthesisFailed(format!(
                    "barrier method exceeded {} Newton steps (gap {:.3e})",
                    opts.max_newton,
                    m / t
                )));
            }
            t *= opts.mu;
        }
        Ok(BarrierOutcome {
            objective: self.c.dot(&x),
            x,
        })
    }

    /// Phase I: finds a strictly feasible point by minimizing a shared
    /// slack `s` with `S_j(x) + s I ≻ 0` until `s < 0`.
    ///
    /// The search is confined to `cᵀx < β`; without that bound the analytic
    /// centre of an unbounded feasible set lies at infinity. `β` grows if the
    /// bounded problem turns out infeasible.
    pub fn find_feasible(&self, x0: &DVector<f64>) -> Result<DVector<f64>> {
        if self.is_strictly_feasible(x0) {
            return Ok(x0.clone());
        }
        let base = self.c.dot(x0).abs().max(1.0);
        let mut last = None;
        for bound in [1e3, 1e6, 1e9] {
            match self.find_feasible_within(x0, self.c.dot(x0) + bound * base) {
                Ok(x) => return Ok(x),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one bound was tried"))
    }

    fn find_feasible_within(&self, x0: &DVector<f64>, beta: f64) -> Result<DVector<f64>> {
        let n = self.nvars();
        let mut worst = f64::INFINITY;
        let mut scale: f64 = 1.0;
        for lmi in &self.constraints {
            let ev = crate::linalg::symmetrize(&lmi.eval(x0)).symmetric_eigenvalues();
            worst = worst.min(ev.min());
            scale = scale.max(ev.amax());
        }
        let s0 = 1.1 * (-worst).max(0.0) + 1e-6 * scale;

        let mut lifted: Vec<AffineLmi> = self
            .constraints
            .iter()
            .map(|lmi| {
                let mut coeffs = lmi.coeffs.clone();
                coeffs.push(DMatrix::identity(lmi.dim(), lmi.dim()));
                AffineLmi {
                    base: lmi.base.clone(),
                    coeffs,
                }
            })
            .collect();
        let mut bound_coeffs: Vec<DMatrix<f64>> = self.c.iter().map(|ci| DMatrix::from_element(1, 1, -ci)).collect();
        bound_coeffs.push(DMatrix::zeros(1, 1));
        lifted.push(AffineLmi {
            base: DMatrix::from_element(1, 1, beta),
            coeffs: bound_coeffs,
        });
        let mut c = DVector::zeros(n + 1);
        c[n] = 1.0;
        let phase1 = BarrierProblem {
            c,
            constraints: lifted,
        };
        let mut z = DVector::zeros(n + 1);
        z.rows_mut(0, n).copy_from(x0);
        z[n] = s0;

        // Stop at the first strictly feasible iterate.
        let feasible = |z: &DVector<f64>| z[n] < 0.0 && self.is_strictly_feasible(&z.rows(0, n).into_owned());
        let m = phase1.barrier_dim();
        let mut t = m / s0.max(1e-8);
        let mut steps = 0;
        while steps < 5000 {
            steps += phase1.center_until(&mut z, t, 200, feasible)?.steps;
            let x = z.rows(0, n).into_owned();
            if z[n] < 0.0 && self.is_strictly_feasible(&x) {
                return Ok(x);
            }
            if m / t < 1e-12 * scale {
                break;
            }
            t *= 10.0;
        }
        Err(Error::SynthesisFailed(format!(
            "LMI is infeasible: smallest achievable slack {:.3e}",
            z[n]
        )))
    }
}
