/// Physical parameters of the two-point-mass double pendulum.
///
/// `m1` sits at the hook (end of the upper link), `m2` at the platform
/// centre of mass (end of the lower link). Links are massless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    /// Hook mass [kg].
    pub m1: f64,
    /// Platform mass [kg].
    pub m2: f64,
    /// Upper link (crane tip to hook) [m].
    pub l1: f64,
    /// Lower link (hook to platform CoM) [m].
    pub l2: f64,
    /// Gravitational acceleration [m/s²].
    pub g: f64,
    /// Viscous damping of the upper joint [N·m·s/rad].
    pub d1: f64,
    /// Viscous damping of the lower joint [N·m·s/rad].
    pub d2: f64,
    /// Platform yaw inertia [kg·m²], spatial model only.
    pub jz: f64,
}

impl Default for PendulumParams {
    /// Measured values of the crane-suspended platform, with the default
    /// joint damping and yaw inertia.
    fn default() -> Self {
        Self {
            m1: 18.5,
            m2: 55.0,
            l1: 6.0,
            l2: 2.2,
            g: 9.81,
            d1: 0.5,
            d2: 0.5,
            jz: 5.0,
        }
    }
}

impl PendulumParams {
    /// Same geometry and masses with joint damping removed.
    pub fn undamped(self) -> Self {
        Self {
            d1: 0.0,
            d2: 0.0,
            ..self
        }
    }

    pub fn with_damping(self, d1: f64, d2: f64) -> Self {
        Self { d1, d2, ..self }
    }

    pub fn with_l1(self, l1: f64) -> Self {
        Self { l1, ..self }
    }

    /// Total mass `m1 + m2`.
    pub fn m12(&self) -> f64 {
        self.m1 + self.m2
    }

    /// Total length `l1 + l2`.
    pub fn l12(&self) -> f64 {
        self.l1 + self.l2
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("m1", self.m1),
            ("m2", self.m2),
            ("l1", self.l1),
            ("l2", self.l2),
            ("g", self.g),
            ("jz", self.jz),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::param(field, format!("must be finite and > 0, got {v}")));
            }
        }
        for (field, v) in [("d1", self.d1), ("d2", self.d2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(crate::Error::param(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}
