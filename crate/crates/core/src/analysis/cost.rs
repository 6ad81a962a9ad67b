use nalgebra::{DMatrix, DVector, Vector5};

use crate::dynamics::{Sample, Trajectory};
use crate::synthesis::{LqrWeights, StateSpace};
use crate::{Error, Result};

/// Sampled run of a linear closed loop `ẋ = (A − BFC) x`, `u = −F C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRun {
    pub dt: f64,
    pub states: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
}

impl LinearRun {
    pub fn cost(&self, weights: &LqrWeights) -> f64 {
        quadratic_cost(&self.states, &self.inputs, self.dt, weights)
    }
}

/// Samples the closed loop exactly at multiples of `dt` through the
/// transition matrix `exp((A − BFC) dt)`.
pub fn simulate_linear(
    model: &StateSpace,
    f: &DMatrix<f64>,
    x0: &DVector<f64>,
    dt: f64,
    duration: f64,
) -> Result<LinearRun> {
    model.validate()?;
    if f.shape() != (model.inputs(), model.outputs()) || x0.len() != model.states() {
        return Err(Error::Dimension(format!(
            "gain {:?} and x0 of length {} for {} states",
            f.shape(),
            x0.len(),
            model.states()
        )));
    }
    if !(dt.is_finite() && dt > 0.0 && duration.is_finite() && duration >= dt) {
        return Err(Error::param("dt", "need 0 < dt <= duration, both finite"));
    }
    let phi = (model.closed_loop(f) * dt).exp();
    let k = f * &model.c;
    let steps = (duration / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    let mut inputs = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    for _ in 0..=steps {
        inputs.push(-(&k * &x));
        let next = &phi * &x;
        states.push(std::mem::replace(&mut x, next));
    }
    Ok(LinearRun { dt, states, inputs })
}

/// Trapezoidal `∫ xᵀQx + uᵀRu dt`.
pub fn quadratic_cost(
    states: &[DVector<f64>],
    inputs: &[DVector<f64>],
    dt: f64,
    weights: &LqrWeights,
) -> f64 {
    let r = weights.r();
    let stage: Vec<f64> = states
        .iter()
        .zip(inputs)
        .map(|(x, u)| (x.transpose() * &weights.q * x)[0] + (u.transpose() * &r * u)[0])
        .collect();
    trapezoid(&stage, dt)
}

fn trapezoid(v: &[f64], dt: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => dt * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1])),
    }
}

/// Linear coordinates `[q1, q̇1, θ, θ̇, θ̇_lp]` of a planar sample; the
/// filter state is the one logged by the controller.
pub fn linear_state(s: &Sample<4>) -> Vector5<f64> {
    let x = &s.state;
    Vector5::new(x[0], x[2], x[0] + x[1], x[2] + x[3], s.filtered_rate.y)
}

/// Quadratic cost of a planar closed-loop trajectory using the commanded
/// wrench `(F, T)` as input.
pub fn trajectory_cost(traj: &Trajectory<4>, weights: &LqrWeights) -> Result<f64> {
    weights.validate(5, 2)?;
    let states: Vec<DVector<f64>> = traj
        .samples
        .iter()
        .map(|s| DVector::from_column_slice(linear_state(s).as_slice()))
        .collect();
    let inputs: Vec<DVector<f64>> = traj
        .samples
        .iter()
        .map(|s| DVector::from_vec(vec![s.control.planar_force(), s.control.planar_torque()]))
        .collect();
    Ok(quadratic_cost(&states, &inputs, traj.dt, weights))
}
