use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Matrix5, Rotation3, SVector, Unit, Vector3, Vector5};

use super::integrate::Plant;
use super::{BodyTwist, BodyWrench};
use crate::{Error, PendulumParams, Result};

/// Distance from ±π/2 at which a joint angle is rejected as singular.
pub const SINGULARITY_MARGIN: f64 = 1e-3;

type Vector10 = SVector<f64, 10>;

/// Five-DoF spatial double pendulum state.
///
/// Each passive joint is a universal joint: a rotation about the parent `x`
/// axis followed by one about the (rotated) `y` axis. The fifth coordinate
/// is the platform yaw about the lower link.
///
/// Coordinate order: `[φ1x, φ1y, φ2x, φ2y, ψ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialState {
    pub q: Vector5<f64>,
    pub qdot: Vector5<f64>,
}

impl SpatialState {
    pub fn new(q: Vector5<f64>, qdot: Vector5<f64>) -> Self {
        Self { q, qdot }
    }

    /// Embeds a planar state in the `x`–`z` plane (rotations about `y`).
    pub fn from_planar(s: &super::PlanarState) -> Self {
        Self {
            q: Vector5::new(0.0, s.q1, 0.0, s.q2, 0.0),
            qdot: Vector5::new(0.0, s.q1dot, 0.0, s.q2dot, 0.0),
        }
    }

    pub fn to_vector(&self) -> Vector10 {
        let mut x = Vector10::zeros();
        x.fixed_rows_mut::<5>(0).copy_from(&self.q);
        x.fixed_rows_mut::<5>(5).copy_from(&self.qdot);
        x
    }

    pub fn from_vector(x: &Vector10) -> Self {
        Self {
            q: x.fixed_rows::<5>(0).into_owned(),
            qdot: x.fixed_rows::<5>(5).into_owned(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qdot.iter()).all(|v| v.is_finite())
    }

    fn check(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidState(format!("non-finite spatial state {self:?}")));
        }
        let limit = FRAC_PI_2 - SINGULARITY_MARGIN;
        for (i, name) in ["phi1x", "phi1y", "phi2x", "phi2y"].iter().enumerate() {
            if self.q[i].abs() >= limit {
                return Err(Error::SingularConfiguration(format!(
                    "{name} = {:.6} rad is within {SINGULARITY_MARGIN} of the gimbal singularity",
                    self.q[i]
                )));
            }
        }
        Ok(())
    }
}

const AXES: [usize; 5] = [0, 1, 0, 1, 2];

fn unit(axis: usize) -> Vector3<f64> {
    let mut v = Vector3::zeros();
    v[axis] = 1.0;
    v
}

/// Elementary rotations and their first/second derivatives with respect to
/// their own angle.
struct Factors {
    f: [Matrix3<f64>; 5],
    d: [Matrix3<f64>; 5],
    e: [Matrix3<f64>; 5],
}

impl Factors {
    fn new(q: &Vector5<f64>) -> Self {
        let mut f = [Matrix3::identity(); 5];
        let mut d = [Matrix3::zeros(); 5];
        let mut e = [Matrix3::zeros(); 5];
        for k in 0..5 {
            let a = unit(AXES[k]);
            let s = a.cross_matrix();
            f[k] = *Rotation3::from_axis_angle(&Unit::new_unchecked(a), q[k]).matrix();
            d[k] = f[k] * s;
            e[k] = d[k] * s;
        }
        Self { f, d, e }
    }

    /// `F0 … F(n-1) v` with factors `i` and `j` differentiated once each
    /// (or twice when `i == j`). `None` leaves a factor undifferentiated.
    fn apply(&self, n: usize, i: Option<usize>, j: Option<usize>, v: Vector3<f64>) -> Vector3<f64> {
        let mut out = v;
        for k in (0..n).rev() {
            let m = match (Some(k) == i, Some(k) == j) {
                (true, true) => &self.e[k],
                (true, false) | (false, true) => &self.d[k],
                (false, false) => &self.f[k],
            };
            out = m * out;
        }
        out
    }

    fn rotation(&self) -> Matrix3<f64> {
        self.f[0] * self.f[1] * self.f[2] * self.f[3] * self.f[4]
    }
}

/// Position, Jacobian and Hessian of a point carried by the chain.
struct PointKinematics {
    pos: Vector3<f64>,
    jac: [Vector3<f64>; 5],
    hess: [[Vector3<f64>; 5]; 5],
}

impl PointKinematics {
    fn chain(fac: &Factors, n: usize, v: Vector3<f64>) -> Self {
        let mut jac = [Vector3::zeros(); 5];
        let mut hess = [[Vector3::zeros(); 5]; 5];
        for i in 0..n {
            jac[i] = fac.apply(n, Some(i), None, v);
            for j in i..n {
                let h = fac.apply(n, Some(i), Some(j), v);
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Self {
            pos: fac.apply(n, None, None, v),
            jac,
            hess,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut jac = self.jac;
        let mut hess = self.hess;
        for i in 0..5 {
            jac[i] += other.jac[i];
            for j in 0..5 {
                hess[i][j] += other.hess[i][j];
            }
        }
        Self {
            pos: self.pos + other.pos,
            jac,
            hess,
        }
    }

    fn jacobian(&self) -> nalgebra::Matrix3x5<f64> {
        nalgebra::Matrix3x5::from_columns(&self.jac)
    }

    /// `∂J/∂q_i`, columns indexed by `j`.
    fn jacobian_derivative(&self, i: usize) -> nalgebra::Matrix3x5<f64> {
        nalgebra::Matrix3x5::from_columns(&self.hess[i])
    }

    /// `J̇ q̇` for `q̈ = 0`.
    fn bias(&self, qdot: &Vector5<f64>) -> Vector3<f64> {
        let mut b = Vector3::zeros();
        for i in 0..5 {
            for j in 0..5 {
                b += self.hess[i][j] * (qdot[i] * qdot[j]);
            }
        }
        b
    }
}

/// Platform angular Jacobian (body frame) and its configuration derivatives.
struct AngularKinematics {
    jac: nalgebra::Matrix3x5<f64>,
    djac: [nalgebra::Matrix3x5<f64>; 5],
}

impl AngularKinematics {
    fn new(fac: &Factors) -> Self {
        // Column k is Tail_kᵀ a_k with Tail_k = F(k+1) … F4.
        let tail = |k: usize, diff: Option<usize>| -> Matrix3<f64> {
            let mut t = Matrix3::identity();
            for m in (k + 1)..5 {
                let f = if Some(m) == diff { &fac.d[m] } else { &fac.f[m] };
                t *= f;
            }
            t
        };
        let mut jac = nalgebra::Matrix3x5::zeros();
        let mut djac = [nalgebra::Matrix3x5::zeros(); 5];
        for k in 0..5 {
            let a = unit(AXES[k]);
            jac.set_column(k, &(tail(k, None).transpose() * a));
            for (i, dj) in djac.iter_mut().enumerate().skip(k + 1) {
                dj.set_column(k, &(tail(k, Some(i)).transpose() * a));
            }
        }
        Self { jac, djac }
    }
}

/// Mass matrix, Coriolis matrix, gravity vector and the kinematic quantities
/// needed to map a body wrench, at one spatial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialTerms {
    pub mass: Matrix5<f64>,
    pub coriolis: Matrix5<f64>,
    pub gravity: Vector5<f64>,
    /// Platform orientation (world from body).
    pub rotation: Matrix3<f64>,
    /// World-frame linear Jacobian of the platform point.
    pub platform_jacobian: nalgebra::Matrix3x5<f64>,
    /// Body-frame angular Jacobian of the platform.
    pub angular_jacobian: nalgebra::Matrix3x5<f64>,
    pub hook_position: Vector3<f64>,
    pub platform_position: Vector3<f64>,
    /// `m1 J1ᵀ J̇1 q̇ + m2 J2ᵀ J̇2 q̇ + J_ωᵀ(I α + ω × I ω)`; equals `C q̇`.
    pub velocity_bias: Vector5<f64>,
}

pub(crate) fn spatial_terms(state: &SpatialState, p: &PendulumParams) -> SpatialTerms {
    let fac = Factors::new(&state.q);
    let down = Vector3::z();
    let hook = PointKinematics::chain(&fac, 2, down * p.l1);
    let platform = hook.add(&PointKinematics::chain(&fac, 4, down * p.l2));
    let ang = AngularKinematics::new(&fac);

    let j1 = hook.jacobian();
    let j2 = platform.jacobian();
    let jz = ang.jac.row(2).into_owned();

    let mass = p.m1 * j1.transpose() * j1 + p.m2 * j2.transpose() * j2 + p.jz * jz.transpose() * jz;

    let mut dmass = [Matrix5::zeros(); 5];
    for (i, dm) in dmass.iter_mut().enumerate() {
        let h1 = hook.jacobian_derivative(i);
        let h2 = platform.jacobian_derivative(i);
        let hz = ang.djac[i].row(2).into_owned();
        let t1 = j1.transpose() * h1;
        let t2 = j2.transpose() * h2;
        let tz = jz.transpose() * hz;
        *dm = p.m1 * (t1 + t1.transpose()) + p.m2 * (t2 + t2.transpose()) + p.jz * (tz + tz.transpose());
    }

    let qd = &state.qdot;
    let mut coriolis = Matrix5::zeros();
    for k in 0..5 {
        for j in 0..5 {
            let mut c = 0.0;
            for i in 0..5 {
                c += 0.5 * (dmass[i][(k, j)] + dmass[j][(k, i)] - dmass[k][(i, j)]) * qd[i];
            }
            coriolis[(k, j)] = c;
        }
    }

    let gravity = -p.g * (p.m1 * j1.row(2).transpose() + p.m2 * j2.row(2).transpose());

    // Velocity-product terms straight from Newton–Euler, for cross-checking.
    let omega = ang.jac * qd;
    let mut alpha = Vector3::zeros();
    for i in 0..5 {
        alpha += ang.djac[i] * qd * qd[i];
    }
    let inertia = Vector3::new(0.0, 0.0, p.jz);
    let body = inertia.component_mul(&alpha) + omega.cross(&inertia.component_mul(&omega));
    let velocity_bias = p.m1 * j1.transpose() * hook.bias(qd)
        + p.m2 * j2.transpose() * platform.bias(qd)
        + ang.jac.transpose() * body;

    SpatialTerms {
        mass,
        coriolis,
        gravity,
        rotation: fac.rotation(),
        platform_jacobian: j2,
        angular_jacobian: ang.jac,
        hook_position: hook.pos,
        platform_position: platform.pos,
        velocity_bias,
    }
}

fn damping(p: &PendulumParams) -> Vector5<f64> {
    Vector5::new(p.d1, p.d1, p.d2, p.d2, p.d2)
}

/// Generalized accelerations of the spatial model.
pub fn spatial_dynamics(
    state: &SpatialState,
    wrench: &BodyWrench,
    p: &PendulumParams,
) -> Result<Vector5<f64>> {
    state.check()?;
    if !wrench.is_finite() {
        return Err(Error::InvalidState(format!("non-finite wrench {wrench:?}")));
    }
    let t = spatial_terms(state, p);
    let generalized = t.platform_jacobian.transpose() * (t.rotation * wrench.force)
        + t.angular_jacobian.transpose() * wrench.torque;
    let rhs = generalized
        - t.coriolis * state.qdot
        - t.gravity
        - damping(p).component_mul(&state.qdot);
    t.mass
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::SingularConfiguration("spatial mass matrix is not positive definite".into()))
}

pub fn spatial_twist(state: &SpatialState, p: &PendulumParams) -> BodyTwist {
    let t = spatial_terms(state, p);
    BodyTwist {
        linear: t.rotation.transpose() * (t.platform_jacobian * state.qdot),
        angular: t.angular_jacobian * state.qdot,
    }
}

/// Kinetic plus potential energy, zero at the hanging equilibrium.
pub fn spatial_energy(state: &SpatialState, p: &PendulumParams) -> f64 {
    let t = spatial_terms(state, p);
    let kinetic = 0.5 * state.qdot.dot(&(t.mass * state.qdot));
    let potential = p.g
        * (p.m1 * (p.l1 - t.hook_position.z) + p.m2 * (p.l12() - t.platform_position.z));
    kinetic + potential
}

/// Spatial double pendulum as a simulation plant with state `[q, q̇]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialModel {
    pub params: PendulumParams,
}

impl SpatialModel {
    pub fn new(params: PendulumParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Plant<10> for SpatialModel {
    fn derivative(&self, x: &Vector10, wrench: &BodyWrench) -> Result<Vector10> {
        let s = SpatialState::from_vector(x);
        let qdd = spatial_dynamics(&s, wrench, &self.params)?;
        Ok(SpatialState::new(s.qdot, qdd).to_vector())
    }

    fn check_state(&self, x: &Vector10) -> Result<()> {
        SpatialState::from_vector(x).check()
    }

    fn twist(&self, x: &Vector10) -> BodyTwist {
        spatial_twist(&SpatialState::from_vector(x), &self.params)
    }

    fn tilt(&self, x: &Vector10) -> Vector3<f64> {
        let fac = Factors::new(&SpatialState::from_vector(x).q);
        Rotation3::from_matrix_unchecked(fac.rotation()).scaled_axis()
    }

    fn energy(&self, x: &Vector10) -> f64 {
        spatial_energy(&SpatialState::from_vector(x), &self.params)
    }

    fn params(&self) -> &PendulumParams {
        &self.params
    }
}
