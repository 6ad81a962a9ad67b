use std::f64::consts::PI;

use crate::PendulumParams;

/// Natural frequencies of the undamped planar double pendulum [Hz].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequencies {
    pub slow: f64,
    pub fast: f64,
}

impl ModeFrequencies {
    /// Midpoint of the two modes, used as the low-pass cutoff.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.slow + self.fast)
    }
}

/// Closed-form slow and fast mode frequencies of the point-mass double
/// pendulum:
///
/// `ν² = g m12 / (8π² m1 l1 l2) · (l12 ∓ √(l12² − 4 m1 l1 l2 / m12))`
pub fn mode_frequencies(p: &PendulumParams) -> ModeFrequencies {
    let (m12, l12) = (p.m12(), p.l12());
    let scale = p.g * m12 / (8.0 * PI * PI * p.m1 * p.l1 * p.l2);
    // Written as a sum of squares so it never goes negative by rounding.
    let disc = (p.l1 - p.l2).powi(2) + 4.0 * p.l1 * p.l2 * p.m2 / m12;
    let root = disc.sqrt();
    let fast_sq = scale * (l12 + root);
    // l12 - root cancels badly when m2 << m1; use the product of roots.
    let slow_sq = scale * (4.0 * p.m1 * p.l1 * p.l2 / m12) / (l12 + root);
    ModeFrequencies {
        slow: slow_sq.sqrt(),
        fast: fast_sq.sqrt(),
    }
}
