//! Nonlinear double-pendulum models, their linearization and simulation.
//!
//! World frame convention: `z` points down (along gravity), `x`/`y` are
//! horizontal. A positive rotation about `y` swings a hanging link towards
//! `+x`, so the planar model lives in the `x`–`z` plane with its angles
//! measured about `+y`.

mod frequencies;
mod integrate;
mod linear;
mod planar;
mod spatial;

pub use frequencies::{mode_frequencies, ModeFrequencies};
pub use integrate::{
    total_disturbance, Disturbance, DisturbanceKind, Plant, Sample, SimOptions, Simulation,
    Trajectory,
};
pub use linear::{linearize, LinearModel};
pub use planar::{
    planar_dynamics, planar_energy, planar_jacobian, planar_jacobian_inverse, planar_positions,
    planar_terms, planar_twist, PlanarModel, PlanarState, PlanarTerms,
};
pub use spatial::{
    spatial_dynamics, spatial_energy, spatial_twist, SpatialModel, SpatialState, SpatialTerms,
    SINGULARITY_MARGIN,
};

use nalgebra::Vector3;

/// Platform velocity expressed in the platform frame.
///
/// The planar model uses `linear.x` (`v_b`) and `angular.y` (`w_b`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyTwist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl BodyTwist {
    pub fn planar(v_b: f64, w_b: f64) -> Self {
        Self {
            linear: Vector3::new(v_b, 0.0, 0.0),
            angular: Vector3::new(0.0, w_b, 0.0),
        }
    }

    pub fn v_b(&self) -> f64 {
        self.linear.x
    }

    pub fn w_b(&self) -> f64 {
        self.angular.y
    }
}

/// Force and torque applied at the platform centre of mass, in the platform
/// frame.
///
/// The planar model uses `force.x` (`F`) and `torque.y` (`T`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyWrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl BodyWrench {
    pub const ZERO: BodyWrench = BodyWrench {
        force: Vector3::new(0.0, 0.0, 0.0),
        torque: Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Self { force, torque }
    }

    pub fn planar(force: f64, torque: f64) -> Self {
        Self {
            force: Vector3::new(force, 0.0, 0.0),
            torque: Vector3::new(0.0, torque, 0.0),
        }
    }

    pub fn planar_force(&self) -> f64 {
        self.force.x
    }

    pub fn planar_torque(&self) -> f64 {
        self.torque.y
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|v| v.is_finite())
    }

    /// Mechanical power delivered to a platform moving with `twist`.
    pub fn power(&self, twist: &BodyTwist) -> f64 {
        self.force.dot(&twist.linear) + self.torque.dot(&twist.angular)
    }

    /// Componentwise symmetric clamp.
    pub fn saturate(&self, max_force: f64, max_torque: f64) -> Self {
        Self {
            force: self.force.map(|v| v.clamp(-max_force, max_force)),
            torque: self.torque.map(|v| v.clamp(-max_torque, max_torque)),
        }
    }
}

impl std::ops::Add for BodyWrench {
    type Output = BodyWrench;

    fn add(self, rhs: BodyWrench) -> BodyWrench {
        BodyWrench {
            force: self.force + rhs.force,
            torque: self.torque + rhs.torque,
        }
    }
}
