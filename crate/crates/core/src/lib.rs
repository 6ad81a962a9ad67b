//! Oscillation damping for a cable-suspended aerial manipulator modelled as
//! a double pendulum: plant models, an IMU-only damping controller,
//! output-feedback LQR gain synthesis and closed-loop analysis tools.

pub mod analysis;
pub mod controller;
pub mod dynamics;
mod error;
pub mod linalg;
mod params;
pub mod synthesis;

pub use error::{Error, Result};
pub use params::PendulumParams;
