use std::ops::{Add, Mul};

use nalgebra::Vector3;

use crate::{Error, Result};

/// First-order low-pass `1/(τ s + 1)` discretized exactly under a
/// zero-order hold: `y⁺ = α y + (1 − α) u`, `α = exp(−dt/τ)`.
///
/// The state is seeded with the first input it sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPassFilter<T> {
    tau: f64,
    state: Option<T>,
}

/// Values a filter can run on: scalars and 3-vectors.
pub trait FilterValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {}

impl FilterValue for f64 {}
impl FilterValue for Vector3<f64> {}

impl<T: FilterValue> LowPassFilter<T> {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("tau", format!("must be finite and > 0, got {tau}")));
        }
        Ok(Self { tau, state: None })
    }

    /// Filter starting from a given output instead of the first input.
    pub fn with_state(tau: f64, state: T) -> Result<Self> {
        let mut f = Self::new(tau)?;
        f.state = Some(state);
        Ok(f)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Current output, `None` before the first update.
    pub fn value(&self) -> Option<T> {
        self.state
    }

    pub fn reset(&mut self) {
        self.state = None;
    }

    pub fn update(&mut self, input: T, dt: f64) -> T {
        let next = match self.state {
            None => input,
            Some(y) => {
                let alpha = (-dt / self.tau).exp();
                y * alpha + input * (1.0 - alpha)
            }
        };
        self.state = Some(next);
        next
    }
}
