//! Output-feedback LQR gain synthesis through a sequence of convex LMI
//! problems, plus Riccati and Lyapunov based certification.

mod barrier;
mod certify;
mod lmi;
mod polish;
mod riccati;
mod solve;
mod sweep;

pub use certify::{certify, verify_result, Certificate, Verification};
pub use lmi::{assemble_lmi, LmiValue};
pub use riccati::care;
pub use solve::{solve_from_gain, solve_output_feedback_lqr};
pub use sweep::{default_sigma_grid, sigma_sweep, SweepPoint};

use nalgebra::DMatrix;

use crate::controller::DampingGains;
use crate::dynamics::LinearModel;
use crate::{Error, Result};

/// Regularization turning `M ≤ 0`, `P > 0` into `M ⪯ −εI`, `P ⪰ εI`.
pub const LMI_EPSILON: f64 = 1e-9;

/// Certification threshold on the largest eigenvalue of `M`.
pub const CERT_TOLERANCE: f64 = 1e-8;

/// Dense `(A, B, C)` triple used by the synthesis routines.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl From<&LinearModel> for StateSpace {
    fn from(m: &LinearModel) -> Self {
        Self {
            a: DMatrix::from_column_slice(5, 5, m.a.as_slice()),
            b: DMatrix::from_column_slice(5, 2, m.b.as_slice()),
            c: DMatrix::from_column_slice(2, 5, m.c.as_slice()),
        }
    }
}

impl StateSpace {
    /// Same plant with every state measured (`C = I`).
    pub fn full_state(&self) -> Self {
        let n = self.a.nrows();
        Self {
            c: DMatrix::identity(n, n),
            ..self.clone()
        }
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        if self.a.ncols() != n || self.b.nrows() != n || self.c.ncols() != n {
            return Err(Error::Dimension(format!(
                "A {:?}, B {:?}, C {:?} are inconsistent",
                self.a.shape(),
                self.b.shape(),
                self.c.shape()
            )));
        }
        Ok(())
    }

    /// `A − B F C`.
    pub fn closed_loop(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a - &self.b * f * &self.c
    }
}

/// Quadratic weights `Q` and `R = σ·R₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrWeights {
    pub q: DMatrix<f64>,
    /// Unscaled input weight `R₀`.
    pub r_shape: DMatrix<f64>,
    pub sigma: f64,
}

impl LqrWeights {
    /// `Q = diag{0, 10, 0, 1, 0}`, `R = σ · diag{1, 10}`: only the two rates
    /// are penalized, the slow mode more heavily.
    pub fn paper(sigma: f64) -> Self {
        Self {
            q: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 10.0, 0.0, 1.0, 0.0])),
            r_shape: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 10.0])),
            sigma,
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            sigma,
            ..self.clone()
        }
    }

    /// Multiplies both `Q` and `R` by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            q: &self.q * k,
            r_shape: self.r_shape.clone(),
            sigma: self.sigma * k,
        }
    }

    pub fn r(&self) -> DMatrix<f64> {
        &self.r_shape * self.sigma
    }

    pub fn validate(&self, states: usize, inputs: usize) -> Result<()> {
        if self.q.shape() != (states, states) || self.r_shape.shape() != (inputs, inputs) {
            return Err(Error::Dimension(format!(
                "weights Q {:?}, R {:?} for {states} states and {inputs} inputs",
                self.q.shape(),
                self.r_shape.shape()
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be finite and > 0, got {}", self.sigma)));
        }
        let sym = |m: &DMatrix<f64>| (m - m.transpose()).abs().max() <= 1e-12 * m.abs().max().max(1.0);
        if !sym(&self.q) || crate::linalg::sym_eig_range(&self.q).0 < -1e-12 {
            return Err(Error::param("Q", "must be symmetric positive semidefinite"));
        }
        if !sym(&self.r_shape) || crate::linalg::sym_eig_range(&self.r_shape).0 <= 0.0 {
            return Err(Error::param("R", "must be symmetric positive definite"));
        }
        Ok(())
    }
}

/// Admissible gain pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainStructure {
    /// `F = diag(K_v, K_w)`; requires as many outputs as inputs.
    Diagonal,
    /// Unrestricted `inputs × outputs` gain.
    Dense,
}

/// Choice of the first convexification matrix `Ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiInit {
    /// `Ξ⁰ = I`, starting point found by a phase-I search.
    Identity,
    /// `Ξ⁰` = cost matrix of the Riccati gain projected onto the output
    /// feedback structure.
    Riccati,
}

impl std::str::FromStr for XiInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(XiInit::Identity),
            "riccati" => Ok(XiInit::Riccati),
            other => Err(Error::param("xi_init", format!("expected identity|riccati, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub max_iter: usize,
    /// Stop when `|Δ trace P| < tol · trace P`.
    pub tol: f64,
    pub xi_init: XiInit,
    pub structure: GainStructure,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            xi_init: XiInit::Riccati,
            structure: GainStructure::Diagonal,
        }
    }
}

/// Outcome of the iterative synthesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// Output-feedback gain, `u = −F y`.
    pub f: DMatrix<f64>,
    /// Lyapunov matrix bounding the closed-loop cost.
    pub p: DMatrix<f64>,
    /// `trace(P)`.
    pub cost: f64,
    /// Passed independent re-certification.
    pub feasible: bool,
    /// Largest eigenvalue of the LMI matrix `M` at the solution.
    pub max_eig_m: f64,
    /// Smallest eigenvalue of `P`.
    pub min_eig_p: f64,
    pub iterations: usize,
    /// Relative trace change fell below the tolerance.
    pub converged: bool,
    /// `trace(P)` after each convexification step.
    pub history: Vec<f64>,
    /// Convexification matrix of the last solved subproblem.
    pub xi: DMatrix<f64>,
}

impl SynthesisResult {
    /// `(K_v, K_w)` for a diagonal 2×2 gain.
    pub fn gains(&self) -> Option<DampingGains> {
        if self.f.shape() != (2, 2) {
            return None;
        }
        DampingGains::new(self.f[(0, 0)], self.f[(1, 1)]).ok()
    }
}
