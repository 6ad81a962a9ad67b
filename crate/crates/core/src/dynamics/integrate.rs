use std::f64::consts::PI;
use std::ops::ControlFlow;

use nalgebra::{SVector, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{BodyTwist, BodyWrench};
use crate::controller::{ControlLaw, GyroNoise, ImuSample};
use crate::{Error, PendulumParams, Result};

/// A second-order mechanical system with state `[q, q̇]` driven by a body
/// wrench at the platform.
pub trait Plant<const N: usize>: Sync {
    fn derivative(&self, x: &SVector<f64, N>, wrench: &BodyWrench) -> Result<SVector<f64, N>>;

    fn check_state(&self, x: &SVector<f64, N>) -> Result<()>;

    fn twist(&self, x: &SVector<f64, N>) -> BodyTwist;

    /// Platform orientation as a rotation vector; `.y` is θ in the plane.
    fn tilt(&self, x: &SVector<f64, N>) -> Vector3<f64>;

    /// Mechanical energy relative to the hanging equilibrium [J].
    fn energy(&self, x: &SVector<f64, N>) -> f64;

    fn params(&self) -> &PendulumParams;
}

/// Time profile of an injected disturbance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisturbanceKind {
    /// Rectangular pulse on `[start, start + duration)`.
    Impulse,
    /// Constant from `start`; lasts `duration` (infinite if not finite).
    Step,
    /// `sin(2π f (t − start))` scaling on `[start, start + duration)`.
    Sinusoid { frequency_hz: f64 },
    /// Alternating-sign pulses of width `duration`, one every `period`.
    JerkTrain { pulses: u32, period: f64 },
}

/// Additive body wrench applied in the platform frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disturbance {
    pub kind: DisturbanceKind,
    pub start: f64,
    pub duration: f64,
    pub wrench: BodyWrench,
}

impl Disturbance {
    pub fn impulse(start: f64, duration: f64, wrench: BodyWrench) -> Self {
        Self {
            kind: DisturbanceKind::Impulse,
            start,
            duration,
            wrench,
        }
    }

    /// Scaling of `wrench` at time `t`.
    pub fn profile(&self, t: f64) -> f64 {
        let local = t - self.start;
        if local < 0.0 {
            return 0.0;
        }
        match self.kind {
            DisturbanceKind::Impulse => (local < self.duration) as u8 as f64,
            DisturbanceKind::Step => {
                if !self.duration.is_finite() || local < self.duration {
                    1.0
                } else {
                    0.0
                }
            }
            DisturbanceKind::Sinusoid { frequency_hz } => {
                if local < self.duration {
                    (2.0 * PI * frequency_hz * local).sin()
                } else {
                    0.0
                }
            }
            DisturbanceKind::JerkTrain { pulses, period } => {
                let k = (local / period).floor();
                if k >= pulses as f64 || local - k * period >= self.duration {
                    0.0
                } else if (k as u64).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn at(&self, t: f64) -> BodyWrench {
        let s = self.profile(t);
        BodyWrench::new(self.wrench.force * s, self.wrench.torque * s)
    }

    /// Time after which this disturbance is identically zero.
    pub fn end(&self) -> f64 {
        match self.kind {
            DisturbanceKind::JerkTrain { pulses, period } => {
                self.start + (pulses.saturating_sub(1)) as f64 * period + self.duration
            }
            _ => self.start + self.duration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.start >= 0.0) {
            return Err(Error::param("start", "must be finite and >= 0"));
        }
        let duration_ok = self.duration > 0.0
            && (self.duration.is_finite() || self.kind == DisturbanceKind::Step);
        if !duration_ok {
            return Err(Error::param("duration", "must be > 0"));
        }
        if !self.wrench.is_finite() {
            return Err(Error::param("wrench", "must be finite"));
        }
        match self.kind {
            DisturbanceKind::Sinusoid { frequency_hz } if !(frequency_hz > 0.0) => {
                Err(Error::param("frequency_hz", "must be > 0"))
            }
            DisturbanceKind::JerkTrain { period, .. } if !(period >= self.duration) => {
                Err(Error::param("period", "must be >= pulse duration"))
            }
            _ => Ok(()),
        }
    }
}

/// Sum of a schedule of disturbances at time `t`.
pub fn total_disturbance(schedule: &[Disturbance], t: f64) -> BodyWrench {
    schedule.iter().fold(BodyWrench::ZERO, |acc, d| acc + d.at(t))
}

/// Fixed-step simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Integrator step [s].
    pub dt: f64,
    /// Simulated time [s].
    pub duration: f64,
    /// Controller sample rate [Hz]; the wrench is held between samples.
    pub control_rate_hz: f64,
    /// Gyro noise, `None` for noiseless measurements.
    pub noise: Option<GyroNoise>,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            duration: 10.0,
            control_rate_hz: 200.0,
            noise: None,
            seed: 0,
        }
    }
}

impl SimOptions {
    pub fn with_duration(self, duration: f64) -> Self {
        Self { duration, ..self }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    /// Integrator steps per controller sample.
    pub fn steps_per_control(&self) -> usize {
        ((1.0 / (self.control_rate_hz * self.dt)).round() as usize).max(1)
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", "must be finite and > 0"));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(Error::param("duration", "must be finite and >= dt"));
        }
        if !(self.control_rate_hz.is_finite() && self.control_rate_hz > 0.0) {
            return Err(Error::param("control_rate_hz", "must be finite and > 0"));
        }
        if self.control_rate_hz * self.dt > 1.0 + 1e-12 {
            return Err(Error::param("control_rate_hz", "control period must be at least dt"));
        }
        if let Some(n) = self.noise {
            if !(n.density.is_finite() && n.density >= 0.0) {
                return Err(Error::param("noise_density", "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// One logged step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub t: f64,
    pub state: SVector<f64, N>,
    pub twist: BodyTwist,
    /// Wrench commanded by the controller (held since the last control tick).
    pub control: BodyWrench,
    /// Disturbance wrench at `t`.
    pub disturbance: BodyWrench,
    /// Gyro reading seen by the controller at the last control tick.
    pub measured_rate: Vector3<f64>,
    /// Controller low-pass state after the last control tick.
    pub filtered_rate: Vector3<f64>,
    pub tilt: Vector3<f64>,
    pub energy: f64,
}

/// Uniformly sampled closed-loop trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub dt: f64,
    pub samples: Vec<Sample<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample<N>> {
        self.samples.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    /// Arbitrary scalar channel.
    pub fn series(&self, f: impl Fn(&Sample<N>) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    /// `|w_b|` (Euclidean norm of the true body rate).
    pub fn body_rate_norm(&self) -> Vec<f64> {
        self.series(|s| s.twist.angular.norm())
    }
}

/// Closed-loop fixed-step RK4 simulation.
pub struct Simulation<'a, P> {
    pub plant: &'a P,
    pub options: SimOptions,
    pub disturbances: Vec<Disturbance>,
}

impl<'a, P> Simulation<'a, P> {
    pub fn new(plant: &'a P, options: SimOptions) -> Self {
        Self {
            plant,
            options,
            disturbances: Vec::new(),
        }
    }

    pub fn with_disturbances(mut self, d: Vec<Disturbance>) -> Self {
        self.disturbances = d;
        self
    }

    /// Runs the full horizon and records every step.
    pub fn run<const N: usize>(
        &self,
        x0: SVector<f64, N>,
        controller: &mut dyn ControlLaw,
    ) -> Result<Trajectory<N>>
    where
        P: Plant<N>,
    {
        self.options.validate()?;
        let mut samples = Vec::with_capacity(self.options.steps() + 1);
        self.run_with(x0, controller, |s| {
            samples.push(*s);
            ControlFlow::Continue(())
        })?;
        Ok(Trajectory {
            dt: self.options.dt,
            samples,
        })
    }

    /// Runs until the horizon ends or `observe` breaks; returns the last
    /// sample.
    pub fn run_with<const N: usize>(
        &self,
        x0: SVector<f64, N>,
        controller: &mut dyn ControlLaw,
        mut observe: impl FnMut(&Sample<N>) -> ControlFlow<()>,
    ) -> Result<Sample<N>>
    where
        P: Plant<N>,
    {
        let opts = &self.options;
        opts.validate()?;
        for d in &self.disturbances {
            d.validate()?;
        }
        self.plant.check_state(&x0)?;

        let dt = opts.dt;
        let every = opts.steps_per_control();
        let control_dt = every as f64 * dt;
        let steps = opts.steps();

        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let noise = match opts.noise {
            Some(n) if n.density > 0.0 => Some(
                Normal::new(0.0, n.sigma(1.0 / control_dt))
                    .map_err(|e| Error::param("noise_density", e.to_string()))?,
            ),
            _ => None,
        };

        let mut x = x0;
        let mut u = BodyWrench::ZERO;
        let mut measured = Vector3::zeros();
        let mut last = None;

        for step in 0..=steps {
            let t = step as f64 * dt;
            let twist = self.plant.twist(&x);
            let tilt = self.plant.tilt(&x);
            if step % every == 0 {
                measured = twist.angular;
                if let Some(n) = &noise {
                    measured += Vector3::from_fn(|_, _| n.sample(&mut rng));
                }
                let imu = ImuSample {
                    angular_velocity: measured,
                    tilt,
                };
                u = controller.control(&imu, &twist, control_dt);
                if !u.is_finite() {
                    return Err(Error::SimulationAborted {
                        time: t,
                        source: Box::new(Error::InvalidState("controller produced a non-finite wrench".into())),
                    });
                }
            }
            let sample = Sample {
                t,
                state: x,
                twist,
                control: u,
                disturbance: total_disturbance(&self.disturbances, t),
                measured_rate: measured,
                filtered_rate: controller.filtered_rate(),
                tilt,
                energy: self.plant.energy(&x),
            };
            last = Some(sample);
            if observe(&sample).is_break() || step == steps {
                break;
            }

            let abort = |e: Error| Error::SimulationAborted {
                time: t,
                source: Box::new(e),
            };
            x = self.rk4_step(&x, u, t, dt).map_err(abort)?;
            self.plant.check_state(&x).map_err(|e| Error::SimulationAborted {
                time: t + dt,
                source: Box::new(e),
            })?;
        }
        Ok(last.expect("at least one sample is always produced"))
    }

    fn rk4_step<const N: usize>(
        &self,
        x: &SVector<f64, N>,
        u: BodyWrench,
        t: f64,
        dt: f64,
    ) -> Result<SVector<f64, N>>
    where
        P: Plant<N>,
    {
        let f = |x: &SVector<f64, N>, t: f64| {
            let w = u + total_disturbance(&self.disturbances, t);
            self.plant.derivative(x, &w)
        };
        let k1 = f(x, t)?;
        let k2 = f(&(x + k1 * (0.5 * dt)), t + 0.5 * dt)?;
        let k3 = f(&(x + k2 * (0.5 * dt)), t + 0.5 * dt)?;
        let k4 = f(&(x + k3 * dt), t + dt)?;
        Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
    }
}
