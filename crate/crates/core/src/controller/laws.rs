use std::f64::consts::PI;

use nalgebra::Vector3;

use super::LowPassFilter;
use crate::dynamics::{mode_frequencies, BodyTwist, BodyWrench};
use crate::{Error, PendulumParams, Result};

/// Gains reported for the hardware experiment.
pub const PAPER_GAINS: DampingGains = DampingGains { kv: 48.0, kw: 70.0 };

/// Cutoff measured on the hardware [Hz].
pub const HARDWARE_CUTOFF_HZ: f64 = 0.76;

/// Yaw rate damper gain [N·m·s/rad].
pub const DEFAULT_YAW_GAIN: f64 = 20.0;

/// Linear and angular damping gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingGains {
    /// Linear damping [N·s/m].
    pub kv: f64,
    /// Angular damping [N·m·s/rad].
    pub kw: f64,
}

impl DampingGains {
    pub fn new(kv: f64, kw: f64) -> Result<Self> {
        for (field, v) in [("kv", kv), ("kw", kw)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(field, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { kv, kw })
    }
}

/// Low-pass cutoff and the matching time constant `τ = 1/(2π ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub hz: f64,
    pub tau: f64,
}

impl Cutoff {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(Error::param("cutoff_hz", format!("must be finite and > 0, got {hz}")));
        }
        Ok(Self {
            hz,
            tau: 1.0 / (2.0 * PI * hz),
        })
    }

    pub fn hardware() -> Self {
        Self::from_hz(HARDWARE_CUTOFF_HZ).expect("constant is valid")
    }
}

/// Cutoff halfway between the slow and fast modes of the model.
pub fn cutoff_frequency(p: &PendulumParams) -> Cutoff {
    let hz = mode_frequencies(p).midpoint();
    Cutoff {
        hz,
        tau: 1.0 / (2.0 * PI * hz),
    }
}

/// Gyro reading handed to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImuSample {
    /// Body angular velocity [rad/s]; the planar model uses `.y`.
    pub angular_velocity: Vector3<f64>,
    /// Orientation as a rotation vector [rad]; the planar model uses `.y` (θ).
    pub tilt: Vector3<f64>,
}

impl ImuSample {
    pub fn planar(w_b: f64, theta: f64) -> Self {
        Self {
            angular_velocity: Vector3::new(0.0, w_b, 0.0),
            tilt: Vector3::new(0.0, theta, 0.0),
        }
    }

    pub fn w_b(&self) -> f64 {
        self.angular_velocity.y
    }
}

/// White gyro noise specified as a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroNoise {
    /// Noise density [deg/s/√Hz].
    pub density: f64,
}

impl Default for GyroNoise {
    fn default() -> Self {
        Self { density: 0.009 }
    }
}

impl GyroNoise {
    /// Per-sample standard deviation [rad/s] at the given sample rate.
    pub fn sigma(&self, sample_rate_hz: f64) -> f64 {
        self.density.to_radians() * sample_rate_hz.sqrt()
    }
}

/// Symmetric per-component actuator limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub force: f64,
    pub torque: f64,
}

/// `F = −K_v (l1 w_lp + l2 w_b)`, `T = −K_w w_b`.
///
/// Only the link lengths enter; no mass parameter is used.
pub fn damping_wrench_planar(
    imu: &ImuSample,
    w_b_lp: f64,
    gains: &DampingGains,
    params: &PendulumParams,
) -> BodyWrench {
    let w_b = imu.w_b();
    BodyWrench::planar(
        -gains.kv * (params.l1 * w_b_lp + params.l2 * w_b),
        -gains.kw * w_b,
    )
}

/// Spatial law applied on the roll/pitch axes, plus a yaw rate damper.
///
/// A body rate about `y` moves the platform along `+x` and a rate about `x`
/// moves it along `−y` (hanging along `+z`), so the force is
/// `−K_v (s × ẑ)` with `s = l1 w_lp + l2 w_b`.
pub fn damping_wrench_3d(
    imu: &ImuSample,
    w_b_lp: &Vector3<f64>,
    gains: &DampingGains,
    yaw_gain: f64,
    params: &PendulumParams,
) -> BodyWrench {
    let w = imu.angular_velocity;
    let s = w_b_lp * params.l1 + w * params.l2;
    BodyWrench::new(
        Vector3::new(-gains.kv * s.y, gains.kv * s.x, 0.0),
        Vector3::new(-gains.kw * w.x, -gains.kw * w.y, -yaw_gain * w.z),
    )
}

/// Full-twist benchmark `F = −K_v v_b`, `T = −K_w w_b` (yaw via `yaw_gain`).
pub fn ideal_wrench(twist: &BodyTwist, gains: &DampingGains, yaw_gain: f64) -> BodyWrench {
    let w = twist.angular;
    BodyWrench::new(
        -gains.kv * twist.linear,
        Vector3::new(-gains.kw * w.x, -gains.kw * w.y, -yaw_gain * w.z),
    )
}

/// A controller sampled by the simulator at its control rate.
///
/// `twist` is the true platform twist; only the simulation-only benchmark
/// uses it.
pub trait ControlLaw {
    fn control(&mut self, imu: &ImuSample, twist: &BodyTwist, dt: f64) -> BodyWrench;

    /// Low-passed body rate, zero for controllers without a filter.
    fn filtered_rate(&self) -> Vector3<f64> {
        Vector3::zeros()
    }

    fn reset(&mut self) {}
}

fn clamp(w: BodyWrench, sat: Option<Saturation>) -> BodyWrench {
    match sat {
        Some(s) => w.saturate(s.force, s.torque),
        None => w,
    }
}

/// The IMU-only filtered damping controller.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposedController {
    pub gains: DampingGains,
    pub yaw_gain: f64,
    pub saturation: Option<Saturation>,
    params: PendulumParams,
    planar: bool,
    filter: LowPassFilter<Vector3<f64>>,
    planar_filter: LowPassFilter<f64>,
}

impl ProposedController {
    pub fn planar(gains: DampingGains, tau: f64, params: PendulumParams) -> Result<Self> {
        Self::build(gains, tau, params, true)
    }

    pub fn spatial(gains: DampingGains, tau: f64, params: PendulumParams) -> Result<Self> {
        Self::build(gains, tau, params, false)
    }

    fn build(gains: DampingGains, tau: f64, params: PendulumParams, planar: bool) -> Result<Self> {
        Ok(Self {
            gains,
            yaw_gain: DEFAULT_YAW_GAIN,
            saturation: None,
            params,
            planar,
            filter: LowPassFilter::new(tau)?,
            planar_filter: LowPassFilter::new(tau)?,
        })
    }

    pub fn with_yaw_gain(mut self, k: f64) -> Self {
        self.yaw_gain = k;
        self
    }

    pub fn with_saturation(mut self, s: Option<Saturation>) -> Self {
        self.saturation = s;
        self
    }

    pub fn tau(&self) -> f64 {
        self.filter.tau()
    }
}

impl ControlLaw for ProposedController {
    fn control(&mut self, imu: &ImuSample, _twist: &BodyTwist, dt: f64) -> BodyWrench {
        let w = if self.planar {
            let lp = self.planar_filter.update(imu.w_b(), dt);
            damping_wrench_planar(imu, lp, &self.gains, &self.params)
        } else {
            let lp = self.filter.update(imu.angular_velocity, dt);
            damping_wrench_3d(imu, &lp, &self.gains, self.yaw_gain, &self.params)
        };
        clamp(w, self.saturation)
    }

    fn filtered_rate(&self) -> Vector3<f64> {
        if self.planar {
            Vector3::new(0.0, self.planar_filter.value().unwrap_or(0.0), 0.0)
        } else {
            self.filter.value().unwrap_or_else(Vector3::zeros)
        }
    }

    fn reset(&mut self) {
        self.filter.reset();
        self.planar_filter.reset();
    }
}

/// Benchmark controller with access to the true twist.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealController {
    pub gains: DampingGains,
    pub yaw_gain: f64,
    pub saturation: Option<Saturation>,
}

impl IdealController {
    pub fn new(gains: DampingGains) -> Self {
        Self {
            gains,
            yaw_gain: DEFAULT_YAW_GAIN,
            saturation: None,
        }
    }
}

impl ControlLaw for IdealController {
    fn control(&mut self, _imu: &ImuSample, twist: &BodyTwist, _dt: f64) -> BodyWrench {
        clamp(ideal_wrench(twist, &self.gains, self.yaw_gain), self.saturation)
    }
}

/// No actuation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PassiveController;

impl ControlLaw for PassiveController {
    fn control(&mut self, _imu: &ImuSample, _twist: &BodyTwist, _dt: f64) -> BodyWrench {
        BodyWrench::ZERO
    }
}

/// Runtime-selected controller.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyController {
    Proposed(ProposedController),
    Ideal(IdealController),
    Passive(PassiveController),
}

impl AnyController {
    pub fn name(&self) -> &'static str {
        match self {
            AnyController::Proposed(_) => "proposed",
            AnyController::Ideal(_) => "ideal",
            AnyController::Passive(_) => "passive",
        }
    }
}

impl ControlLaw for AnyController {
    fn control(&mut self, imu: &ImuSample, twist: &BodyTwist, dt: f64) -> BodyWrench {
        match self {
            AnyController::Proposed(c) => c.control(imu, twist, dt),
            AnyController::Ideal(c) => c.control(imu, twist, dt),
            AnyController::Passive(c) => c.control(imu, twist, dt),
        }
    }

    fn filtered_rate(&self) -> Vector3<f64> {
        match self {
            AnyController::Proposed(c) => c.filtered_rate(),
            _ => Vector3::zeros(),
        }
    }

    fn reset(&mut self) {
        if let AnyController::Proposed(c) = self {
            c.reset();
        }
    }
}
