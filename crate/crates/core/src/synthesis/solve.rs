use nalgebra::{DMatrix, DVector};

use super::barrier::{AffineLmi, BarrierOptions, BarrierProblem};
use super::polish::polish;
use super::{
    assemble_lmi, care, certify::verify_result, GainStructure, LqrWeights, StateSpace,
    SynthesisOptions, SynthesisResult, XiInit, LMI_EPSILON,
};
use crate::linalg::{eigenvalues, is_detectable, is_hurwitz, is_stabilizable, lyapunov, spd_sqrt, sym_eig_range};
use crate::{Error, Result};

/// Relative stationarity target of the final Newton refinement.
const POLISH_TOL: f64 = 1e-10;

/// Maps the decision vector `[vech(P), vec(F)]` to matrices.
struct Layout {
    n: usize,
    inputs: usize,
    outputs: usize,
    structure: GainStructure,
}

impl Layout {
    fn new(model: &StateSpace, structure: GainStructure) -> Result<Self> {
        let (n, inputs, outputs) = (model.states(), model.inputs(), model.outputs());
        if structure == GainStructure::Diagonal && inputs != outputs {
            return Err(Error::Dimension(format!(
                "diagonal gain needs as many outputs ({outputs}) as inputs ({inputs})"
            )));
        }
        Ok(Self {
            n,
            inputs,
            outputs,
            structure,
        })
    }

    fn p_vars(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    fn f_vars(&self) -> usize {
        match self.structure {
            GainStructure::Diagonal => self.inputs,
            GainStructure::Dense => self.inputs * self.outputs,
        }
    }

    fn len(&self) -> usize {
        self.p_vars() + self.f_vars()
    }

    /// Upper-triangular `(i, j)` pairs, row by row.
    fn p_index(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i..self.n).map(move |j| (i, j)))
    }

    fn f_index(&self) -> Vec<(usize, usize)> {
        match self.structure {
            GainStructure::Diagonal => (0..self.inputs).map(|i| (i, i)).collect(),
            GainStructure::Dense => (0..self.inputs)
                .flat_map(|i| (0..self.outputs).map(move |j| (i, j)))
                .collect(),
        }
    }

    fn decode(&self, x: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut p = DMatrix::zeros(self.n, self.n);
        for (k, (i, j)) in self.p_index().enumerate() {
            p[(i, j)] = x[k];
            p[(j, i)] = x[k];
        }
        let mut f = DMatrix::zeros(self.inputs, self.outputs);
        for (k, (i, j)) in self.f_index().into_iter().enumerate() {
            f[(i, j)] = x[self.p_vars() + k];
        }
        (p, f)
    }

    fn encode(&self, p: &DMatrix<f64>, f: &DMatrix<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.len());
        for (k, (i, j)) in self.p_index().enumerate() {
            x[k] = 0.5 * (p[(i, j)] + p[(j, i)]);
        }
        for (k, (i, j)) in self.f_index().into_iter().enumerate() {
            x[self.p_vars() + k] = f[(i, j)];
        }
        x
    }

    /// Least-squares fit of `F C` to a full-state gain `K`.
    fn project(&self, k: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
        match self.structure {
            GainStructure::Diagonal => {
                let mut f = DMatrix::zeros(self.inputs, self.outputs);
                for i in 0..self.inputs {
                    let row = c.row(i);
                    f[(i, i)] = k.row(i).dot(&row) / row.norm_squared().max(f64::MIN_POSITIVE);
                }
                f
            }
            GainStructure::Dense => k * c.clone().pseudo_inverse(1e-12).expect("pseudo-inverse of C"),
        }
    }

    /// Drops entries outside the structure.
    fn restrict(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.inputs, self.outputs);
        for (i, j) in self.f_index() {
            out[(i, j)] = f[(i, j)];
        }
        out
    }
}

/// The convex subproblem for one `Ξ`, in barrier form.
struct Subproblem<'a> {
    model: &'a StateSpace,
    weights: &'a LqrWeights,
    layout: &'a Layout,
    /// Congruence `blkdiag(I, R^{1/2})` applied to `M` for conditioning.
    scale: DMatrix<f64>,
}

impl<'a> Subproblem<'a> {
    fn new(model: &'a StateSpace, weights: &'a LqrWeights, layout: &'a Layout) -> Result<Self> {
        let (n, m) = (layout.n, layout.inputs);
        let mut scale = DMatrix::identity(n + m, n + m);
        scale.view_mut((n, n), (m, m)).copy_from(&spd_sqrt(&weights.r())?);
        Ok(Self {
            model,
            weights,
            layout,
            scale,
        })
    }

    fn scaled_m(&self, xi: &DMatrix<f64>, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (p, f) = self.layout.decode(x);
        let m = assemble_lmi(self.model, self.weights, xi, &f, &p)?.m;
        Ok(&self.scale * m * &self.scale)
    }

    fn barrier(&self, xi: &DMatrix<f64>) -> Result<BarrierProblem> {
        let layout = self.layout;
        let nv = layout.len();
        let n = layout.n;
        let zero = DVector::zeros(nv);
        let m0 = self.scaled_m(xi, &zero)?;
        let dim = m0.nrows();

        // M is affine in (P, F) for fixed Ξ, so unit probes give its coefficients.
        let mut m_coeffs = Vec::with_capacity(nv);
        let mut p_coeffs = Vec::with_capacity(nv);
        let mut c = DVector::zeros(nv);
        for k in 0..nv {
            let mut e = zero.clone();
            e[k] = 1.0;
            m_coeffs.push(-(self.scaled_m(xi, &e)? - &m0));
            let (p, _) = layout.decode(&e);
            c[k] = p.trace();
            p_coeffs.push(p);
        }
        Ok(BarrierProblem {
            c,
            constraints: vec![
                AffineLmi {
                    base: -m0 - DMatrix::identity(dim, dim) * LMI_EPSILON,
                    coeffs: m_coeffs,
                },
                AffineLmi {
                    base: -DMatrix::identity(n, n) * LMI_EPSILON,
                    coeffs: p_coeffs,
                },
            ],
        })
    }
}

/// Closed-loop cost matrix of a stabilizing gain, or `None`.
fn gain_cost(model: &StateSpace, weights: &LqrWeights, f: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let acl = model.closed_loop(f);
    if !is_hurwitz(&eigenvalues(&acl)) {
        return None;
    }
    let fc = f * &model.c;
    let w = &weights.q + fc.transpose() * weights.r() * fc;
    lyapunov(&acl, &w).ok()
}

/// Strictly feasible start for `Ξ = P_F` where `P_F` is the cost matrix of a
/// stabilizing `F`: `P = P_F + c L` with `A_clᵀ L + L A_cl = −I`.
fn start_from_gain(
    model: &StateSpace,
    weights: &LqrWeights,
    f: &DMatrix<f64>,
) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let p_f = gain_cost(model, weights, f)?;
    let acl = model.closed_loop(f);
    let n = model.states();
    let l = lyapunov(&acl, &DMatrix::identity(n, n)).ok()?;
    let r_inv = weights.r().try_inverse()?;
    let lgl = &l * &model.b * r_inv * model.b.transpose() * &l;
    let top = sym_eig_range(&lgl).1;
    let c = if top > 0.0 { 0.5 / top } else { 1.0 };
    Some((p_f.clone(), p_f + l * c))
}

/// Synthesizes an output-feedback gain minimizing the LQ cost bound
/// `trace(P)` (expected cost for `E[x₀x₀ᵀ] = I`).
pub fn solve_output_feedback_lqr(
    model: &StateSpace,
    weights: &LqrWeights,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult> {
    check_model(model, weights)?;
    let layout = Layout::new(model, opts.structure)?;
    let n = model.states();

    let start = match opts.xi_init {
        XiInit::Riccati => {
            let p_are = care(&model.a, &model.b, &weights.q, &weights.r())?;
            let k = weights.r().try_inverse().expect("validated") * model.b.transpose() * p_are;
            let f0 = layout.project(&k, &model.c);
            start_from_gain(model, weights, &f0)
                .map(|(xi, p0)| (xi, layout.encode(&p0, &f0)))
        }
        XiInit::Identity => None,
    };
    let (xi, x0) = start.unwrap_or_else(|| {
        (
            DMatrix::identity(n, n),
            layout.encode(&DMatrix::identity(n, n), &DMatrix::zeros(layout.inputs, layout.outputs)),
        )
    });
    iterate(model, weights, &layout, opts, xi, x0)
}

/// Warm-started synthesis from a known gain (used along σ sweeps). Falls
/// back to a cold start when `f0` does not stabilize the plant.
pub fn solve_from_gain(
    model: &StateSpace,
    weights: &LqrWeights,
    f0: &DMatrix<f64>,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult> {
    check_model(model, weights)?;
    let layout = Layout::new(model, opts.structure)?;
    if f0.shape() != (layout.inputs, layout.outputs) {
        return Err(Error::Dimension(format!("warm-start gain is {:?}", f0.shape())));
    }
    let f0 = layout.restrict(f0);
    match start_from_gain(model, weights, &f0) {
        Some((xi, p0)) => {
            let x0 = layout.encode(&p0, &f0);
            iterate(model, weights, &layout, opts, xi, x0)
        }
        None => solve_output_feedback_lqr(model, weights, opts),
    }
}

fn check_model(model: &StateSpace, weights: &LqrWeights) -> Result<()> {
    model.validate()?;
    weights.validate(model.states(), model.inputs())?;
    if !is_stabilizable(&model.a, &model.b) {
        return Err(Error::Uncontrollable("(A, B) is not stabilizable".into()));
    }
    if !is_detectable(&model.a, &model.c) {
        return Err(Error::Uncontrollable("(A, C) is not detectable".into()));
    }
    Ok(())
}

fn iterate(
    model: &StateSpace,
    weights: &LqrWeights,
    layout: &Layout,
    opts: &SynthesisOptions,
    mut xi: DMatrix<f64>,
    mut x: DVector<f64>,
) -> Result<SynthesisResult> {
    if opts.max_iter == 0 {
        return Err(Error::param("max_iter", "must be >= 1"));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::param("tol", "must be finite and > 0"));
    }
    let sub = Subproblem::new(model, weights, layout)?;
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut used_xi = xi.clone();

    for _ in 0..opts.max_iter {
        x = solve_subproblem(&sub, &xi, &x).map_err(|e| {
            Error::SynthesisFailed(format!(
                "no feasible point for the convexified LMI after {} iterations: {e}",
                history.len()
            ))
        })?;
        let (p, _) = layout.decode(&x);
        let cost = p.trace();
        let prev = history.last().copied();
        history.push(cost);
        used_xi = std::mem::replace(&mut xi, p);
        if let Some(prev) = prev {
            if (prev - cost).abs() < opts.tol * prev.abs() {
                converged = true;
                break;
            }
        }
    }

    // Newton refinement on the exact cost, then one more convexified solve
    // at the refined gain so the returned (Ξ, F, P) is LMI-certified.
    let (_, f) = layout.decode(&x);
    if let Some(refined) = polish(model, weights, &layout.f_index(), &f, POLISH_TOL) {
        if let Some((xi_r, p0)) = start_from_gain(model, weights, &refined.f) {
            let x0 = layout.encode(&p0, &refined.f);
            if let Ok(xr) = solve_subproblem(&sub, &xi_r, &x0) {
                let cost = layout.decode(&xr).0.trace();
                if history.last().is_none_or(|prev| cost <= *prev) {
                    history.push(cost);
                    x = xr;
                    used_xi = xi_r;
                    converged |= refined.stationary;
                }
            }
        }
    }

    let (p, f) = layout.decode(&x);
    let check = verify_result(model, weights, &used_xi, &f, &p)?;
    Ok(SynthesisResult {
        cost: p.trace(),
        feasible: check.passed(),
        max_eig_m: check.max_eig_m,
        min_eig_p: check.min_eig_p,
        iterations: history.len(),
        converged,
        history,
        xi: used_xi,
        f,
        p,
    })
}

fn solve_subproblem(sub: &Subproblem, xi: &DMatrix<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let problem = sub.barrier(xi)?;
    let start = problem.find_feasible(x)?;
    Ok(problem.minimize(&start, &BarrierOptions::default())?.x)
}
