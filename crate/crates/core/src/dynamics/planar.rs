use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, SVector, Vector2, Vector3, Vector4};

use super::integrate::Plant;
use super::{BodyTwist, BodyWrench};
use crate::{Error, PendulumParams, Result};

/// Configuration and rates of the planar double pendulum.
///
/// `q1` is the upper link angle from the vertical, `q2` the lower link angle
/// relative to the upper link. The IMU on the platform sees `theta = q1 + q2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarState {
    pub q1: f64,
    pub q2: f64,
    pub q1dot: f64,
    pub q2dot: f64,
}

impl PlanarState {
    pub fn new(q1: f64, q2: f64, q1dot: f64, q2dot: f64) -> Self {
        Self { q1, q2, q1dot, q2dot }
    }

    pub fn from_degrees(q1: f64, q2: f64) -> Self {
        Self::new(q1.to_radians(), q2.to_radians(), 0.0, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.q1 + self.q2
    }

    pub fn theta_dot(&self) -> f64 {
        self.q1dot + self.q2dot
    }

    pub fn q(&self) -> Vector2<f64> {
        Vector2::new(self.q1, self.q2)
    }

    pub fn qdot(&self) -> Vector2<f64> {
        Vector2::new(self.q1dot, self.q2dot)
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.q1, self.q2, self.q1dot, self.q2dot)
    }

    pub fn from_vector(x: &Vector4<f64>) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Mass matrix, Coriolis matrix and gravity vector at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTerms {
    pub mass: Matrix2<f64>,
    pub coriolis: Matrix2<f64>,
    pub gravity: Vector2<f64>,
}

/// Rigid-body terms of the two-point-mass Lagrangian in `(q1, q2)`.
pub fn planar_terms(state: &PlanarState, p: &PendulumParams) -> PlanarTerms {
    let (s2, c2) = state.q2.sin_cos();
    let m12 = p.m12();
    let a = p.m2 * p.l1 * p.l2;
    let b = p.m2 * p.l2 * p.l2;

    let m11 = m12 * p.l1 * p.l1 + 2.0 * a * c2 + b;
    let m12_ = a * c2 + b;
    let mass = Matrix2::new(m11, m12_, m12_, b);

    // Christoffel form, so that Mdot - 2C is skew.
    let h = a * s2;
    let coriolis = Matrix2::new(
        -h * state.q2dot,
        -h * (state.q1dot + state.q2dot),
        h * state.q1dot,
        0.0,
    );

    let st = state.theta().sin();
    let gravity = Vector2::new(
        m12 * p.g * p.l1 * state.q1.sin() + p.m2 * p.g * p.l2 * st,
        p.m2 * p.g * p.l2 * st,
    );

    PlanarTerms {
        mass,
        coriolis,
        gravity,
    }
}

/// Map from joint rates to the platform twist `(v_b, w_b)`.
pub fn planar_jacobian(state: &PlanarState, p: &PendulumParams) -> Matrix2<f64> {
    Matrix2::new(p.l1 * state.q2.cos() + p.l2, p.l2, 1.0, 1.0)
}

/// Inverse of [`planar_jacobian`], refused outside `|q2| < π/2`.
pub fn planar_jacobian_inverse(state: &PlanarState, p: &PendulumParams) -> Result<Matrix2<f64>> {
    if !(state.q2.abs() < FRAC_PI_2) {
        return Err(Error::SingularConfiguration(format!(
            "Jacobian is not invertible for |q2| = {} >= pi/2",
            state.q2.abs()
        )));
    }
    planar_jacobian(state, p)
        .try_inverse()
        .ok_or_else(|| Error::SingularConfiguration("Jacobian inversion failed".into()))
}

/// Joint accelerations `(q̈1, q̈2)` solving
/// `M q̈ = Jᵀ u − C q̇ − g − D q̇`.
pub fn planar_dynamics(
    state: &PlanarState,
    wrench: &BodyWrench,
    p: &PendulumParams,
) -> Result<Vector2<f64>> {
    if !state.is_finite() {
        return Err(Error::InvalidState(format!("non-finite planar state {state:?}")));
    }
    if !wrench.is_finite() {
        return Err(Error::InvalidState(format!("non-finite wrench {wrench:?}")));
    }
    let terms = planar_terms(state, p);
    let u = Vector2::new(wrench.planar_force(), wrench.planar_torque());
    let qdot = state.qdot();
    let damping = Vector2::new(p.d1 * state.q1dot, p.d2 * state.q2dot);
    let rhs = planar_jacobian(state, p).transpose() * u
        - terms.coriolis * qdot
        - terms.gravity
        - damping;
    terms
        .mass
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::InvalidState("planar mass matrix is not positive definite".into()))
}

/// Body twist of the platform.
pub fn planar_twist(state: &PlanarState, p: &PendulumParams) -> BodyTwist {
    let v = planar_jacobian(state, p) * state.qdot();
    BodyTwist::planar(v[0], v[1])
}

/// Hook and platform positions in the `(x, z)` plane, `z` pointing down.
pub fn planar_positions(state: &PlanarState, p: &PendulumParams) -> (Vector2<f64>, Vector2<f64>) {
    let hook = p.l1 * Vector2::new(state.q1.sin(), state.q1.cos());
    let th = state.theta();
    (hook, hook + p.l2 * Vector2::new(th.sin(), th.cos()))
}

/// Kinetic plus potential energy, zero at the hanging equilibrium.
pub fn planar_energy(state: &PlanarState, p: &PendulumParams) -> f64 {
    let kinetic = 0.5 * state.qdot().dot(&(planar_terms(state, p).mass * state.qdot()));
    let potential = p.m12() * p.g * p.l1 * (1.0 - state.q1.cos())
        + p.m2 * p.g * p.l2 * (1.0 - state.theta().cos());
    kinetic + potential
}

/// Planar double pendulum as a simulation plant with state
/// `[q1, q2, q̇1, q̇2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarModel {
    pub params: PendulumParams,
}

impl PlanarModel {
    pub fn new(params: PendulumParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Plant<4> for PlanarModel {
    fn derivative(&self, x: &SVector<f64, 4>, wrench: &BodyWrench) -> Result<SVector<f64, 4>> {
        let s = PlanarState::from_vector(x);
        let qdd = planar_dynamics(&s, wrench, &self.params)?;
        Ok(Vector4::new(s.q1dot, s.q2dot, qdd[0], qdd[1]))
    }

    fn check_state(&self, x: &SVector<f64, 4>) -> Result<()> {
        if x.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidState(format!("non-finite planar state {:?}", x.as_slice())))
        }
    }

    fn twist(&self, x: &SVector<f64, 4>) -> BodyTwist {
        planar_twist(&PlanarState::from_vector(x), &self.params)
    }

    fn tilt(&self, x: &SVector<f64, 4>) -> Vector3<f64> {
        Vector3::new(0.0, x[0] + x[1], 0.0)
    }

    fn energy(&self, x: &SVector<f64, 4>) -> f64 {
        planar_energy(&PlanarState::from_vector(x), &self.params)
    }

    fn params(&self) -> &PendulumParams {
        &self.params
    }
}
