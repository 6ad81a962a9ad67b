//! JSON scenario files. Every section is optional and falls back to the
//! built-in defaults; unknown keys are rejected.

use std::path::Path;

use nalgebra::{Vector3, Vector5};
use serde::Deserialize;
use swingdamp::analysis::{GridOptions, GridSpec, RateDirection};
use swingdamp::controller::{
    cutoff_frequency, AnyController, Cutoff, DampingGains, GyroNoise, IdealController,
    PassiveController, ProposedController, Saturation, HARDWARE_CUTOFF_HZ,
};
use swingdamp::dynamics::{BodyWrench, Disturbance, DisturbanceKind, PlanarState, SimOptions, SpatialState};
use swingdamp::synthesis::{GainStructure, SynthesisOptions, XiInit};
use swingdamp::PendulumParams;

use crate::error::{CliError, CliResult};

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid parameter `{field}`: {reason}"))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub params: ParamsConfig,
    pub model: ModelKind,
    pub initial: InitialConfig,
    pub controller: ControllerConfig,
    pub disturbances: Vec<DisturbanceConfig>,
    pub sim: SimConfig,
    pub synthesis: SynthesisConfig,
    pub sweep: SweepConfig,
    pub spectrum: SpectrumConfig,
    pub grid: GridConfig,
    pub compare: CompareConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Planar,
    Spatial,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub g: f64,
    pub d1: f64,
    pub d2: f64,
    pub jz: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = PendulumParams::default();
        Self {
            m1: p.m1,
            m2: p.m2,
            l1: p.l1,
            l2: p.l2,
            g: p.g,
            d1: p.d1,
            d2: p.d2,
            jz: p.jz,
        }
    }
}

/// Planar: `[q1, q2]`; spatial: `[φ1x, φ1y, φ2x, φ2y, ψ]`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub angles_deg: Vec<f64>,
    /// Joint rates [rad/s].
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[default]
    Proposed,
    Ideal,
    Passive,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationConfig {
    pub force: f64,
    pub torque: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    #[serde(rename = "type")]
    pub kind: ControllerKind,
    /// Linear damping gain [N·s/m].
    pub kv: f64,
    /// Angular damping gain [N·m·s/rad].
    pub kw: f64,
    /// Low-pass time constant [s]; the mode-midpoint cutoff when absent.
    pub tau: Option<f64>,
    /// Yaw rate damping gain [N·m·s/rad], spatial model only.
    pub kpsi: f64,
    /// Gyro noise at `sim.noise_density` on the controller's measurements.
    pub noise_enabled: bool,
    /// Per-component force [N] and torque [N·m] limits.
    pub saturation: Option<SaturationConfig>,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Proposed,
            kv: 48.0,
            kw: 70.0,
            tau: None,
            kpsi: swingdamp::controller::DEFAULT_YAW_GAIN,
            noise_enabled: false,
            saturation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceType {
    Impulse,
    Step,
    Sinusoid,
    JerkTrain,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceConfig {
    #[serde(rename = "type")]
    pub kind: DisturbanceType,
    pub start: f64,
    pub duration: f64,
    #[serde(default)]
    pub force: [f64; 3],
    #[serde(default)]
    pub torque: [f64; 3],
    pub frequency_hz: Option<f64>,
    pub pulses: Option<u32>,
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub control_rate_hz: f64,
    /// Gyro noise density [deg/s/√Hz], used by controllers with
    /// `noise_enabled`.
    pub noise_density: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let s = SimOptions::default();
        Self {
            dt: s.dt,
            duration: s.duration,
            control_rate_hz: s.control_rate_hz,
            noise_density: GyroNoise::default().density,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureConfig {
    #[default]
    Diagonal,
    Dense,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisConfig {
    pub sigma: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub xi_init: String,
    pub structure: StructureConfig,
    /// Measure every state (`C = I`) instead of the two IMU outputs.
    pub full_state: bool,
    /// Filter cutoff of the design model [Hz].
    pub cutoff_hz: f64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        let o = SynthesisOptions::default();
        Self {
            sigma: 5e-6,
            max_iter: o.max_iter,
            tol: o.tol,
            xi_init: "riccati".into(),
            structure: StructureConfig::Diagonal,
            full_state: false,
            cutoff_hz: HARDWARE_CUTOFF_HZ,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigma_min: 1e-6,
            sigma_max: 8e-5,
            points: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    #[default]
    Wb,
    Vb,
    Theta,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub duration: f64,
    pub sample_rate_hz: f64,
    pub signal: SignalKind,
    /// Zero the joint damping for the free swing.
    pub undamped: bool,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            duration: 120.0,
            sample_rate_hz: 200.0,
            signal: SignalKind::Wb,
            undamped: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub l1: Vec<f64>,
    pub angles_deg: Vec<f64>,
    pub rates: Vec<f64>,
    pub rate_direction: String,
    pub energy_tol: f64,
    pub hold: f64,
    /// Simulated time per cell [s].
    pub budget: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let spec = GridSpec::paper();
        let opts = GridOptions::default();
        Self {
            l1: spec.l1,
            angles_deg: spec.angles_deg,
            rates: spec.rates,
            rate_direction: "restoring".into(),
            energy_tol: opts.energy_tol,
            hold: opts.hold,
            budget: opts.sim.duration,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedController {
    pub name: String,
    pub controller: ControllerConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub controllers: Vec<NamedController>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        let proposed = ControllerConfig::default();
        let ideal = ControllerConfig {
            kind: ControllerKind::Ideal,
            ..ControllerConfig::default()
        };
        Self {
            controllers: vec![
                NamedController {
                    name: "proposed".into(),
                    controller: proposed,
                },
                NamedController {
                    name: "ideal".into(),
                    controller: ideal,
                },
            ],
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> CliResult<PendulumParams> {
        let c = &self.params;
        let p = PendulumParams {
            m1: c.m1,
            m2: c.m2,
            l1: c.l1,
            l2: c.l2,
            g: c.g,
            d1: c.d1,
            d2: c.d2,
            jz: c.jz,
        };
        p.validate()?;
        Ok(p)
    }

    fn initial_vectors<const N: usize>(&self) -> CliResult<([f64; N], [f64; N])> {
        let pad = |v: &[f64], field: &str| -> CliResult<[f64; N]> {
            if v.len() > N {
                return Err(invalid(field, format!("expected at most {N} values for this model, got {}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(field, "values must be finite"));
            }
            let mut out = [0.0; N];
            out[..v.len()].copy_from_slice(v);
            Ok(out)
        };
        Ok((
            pad(&self.initial.angles_deg, "initial.angles_deg")?,
            pad(&self.initial.rates, "initial.rates")?,
        ))
    }

    pub fn planar_state(&self) -> CliResult<PlanarState> {
        let (a, r) = self.initial_vectors::<2>()?;
        Ok(PlanarState::new(a[0].to_radians(), a[1].to_radians(), r[0], r[1]))
    }

    pub fn spatial_state(&self) -> CliResult<SpatialState> {
        let (a, r) = self.initial_vectors::<5>()?;
        Ok(SpatialState::new(
            Vector5::from_iterator(a.iter().map(|d| d.to_radians())),
            Vector5::from(r),
        ))
    }

    /// Integration settings; gyro noise is on when `noisy`.
    pub fn sim_options(&self, noisy: bool) -> CliResult<SimOptions> {
        let s = &self.sim;
        if !(s.noise_density.is_finite() && s.noise_density >= 0.0) {
            return Err(invalid("sim.noise_density", "must be finite and >= 0"));
        }
        let noise = noisy.then_some(GyroNoise { density: s.noise_density });
        let opts = SimOptions {
            dt: s.dt,
            duration: s.duration,
            control_rate_hz: s.control_rate_hz,
            noise,
            seed: s.seed,
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn disturbances(&self) -> CliResult<Vec<Disturbance>> {
        self.disturbances
            .iter()
            .enumerate()
            .map(|(i, d)| build_disturbance(d).map_err(|e| prefix(e, &format!("disturbances[{i}]"))))
            .collect()
    }

    /// Controller for the configured model.
    pub fn controller(&self, cfg: &ControllerConfig, params: &PendulumParams) -> CliResult<AnyController> {
        let gains = || DampingGains::new(cfg.kv, cfg.kw);
        if !(cfg.kpsi.is_finite() && cfg.kpsi >= 0.0) {
            return Err(invalid("controller.kpsi", "must be finite and >= 0"));
        }
        let saturation = match cfg.saturation {
            Some(s) if !(s.force > 0.0 && s.torque > 0.0) => {
                return Err(invalid("controller.saturation", "limits must be > 0"))
            }
            Some(s) => Some(Saturation {
                force: s.force,
                torque: s.torque,
            }),
            None => None,
        };
        Ok(match cfg.kind {
            ControllerKind::Proposed => {
                let tau = self.cutoff(cfg, params)?.tau;
                let c = match self.model {
                    ModelKind::Planar => ProposedController::planar(gains()?, tau, *params)?,
                    ModelKind::Spatial => ProposedController::spatial(gains()?, tau, *params)?,
                };
                AnyController::Proposed(c.with_yaw_gain(cfg.kpsi).with_saturation(saturation))
            }
            ControllerKind::Ideal => {
                let mut c = IdealController::new(gains()?);
                c.yaw_gain = cfg.kpsi;
                c.saturation = saturation;
                AnyController::Ideal(c)
            }
            ControllerKind::Passive => AnyController::Passive(PassiveController),
        })
    }

    pub fn cutoff(&self, cfg: &ControllerConfig, params: &PendulumParams) -> CliResult<Cutoff> {
        match cfg.tau {
            Some(tau) if !(tau.is_finite() && tau > 0.0) => Err(invalid("controller.tau", "must be finite and > 0")),
            Some(tau) => Ok(Cutoff::from_hz(1.0 / (2.0 * std::f64::consts::PI * tau))?),
            None => Ok(cutoff_frequency(params)),
        }
    }

    pub fn synthesis_options(&self) -> CliResult<SynthesisOptions> {
        let s = &self.synthesis;
        if s.max_iter == 0 {
            return Err(invalid("synthesis.max_iter", "must be >= 1"));
        }
        if !(s.tol.is_finite() && s.tol > 0.0) {
            return Err(invalid("synthesis.tol", "must be finite and > 0"));
        }
        if !(s.sigma.is_finite() && s.sigma > 0.0) {
            return Err(invalid("synthesis.sigma", "must be finite and > 0"));
        }
        let xi_init: XiInit = s.xi_init.parse()?;
        Ok(SynthesisOptions {
            max_iter: s.max_iter,
            tol: s.tol,
            xi_init,
            structure: match s.structure {
                StructureConfig::Diagonal => GainStructure::Diagonal,
                StructureConfig::Dense => GainStructure::Dense,
            },
        })
    }

    pub fn sigma_grid(&self) -> CliResult<Vec<f64>> {
        let s = &self.sweep;
        if !(s.sigma_min > 0.0 && s.sigma_max >= s.sigma_min && s.sigma_max.is_finite()) {
            return Err(invalid("sweep.sigma_min", "need 0 < sigma_min <= sigma_max"));
        }
        if s.points == 0 {
            return Err(invalid("sweep.points", "must be >= 1"));
        }
        if s.points == 1 {
            return Ok(vec![s.sigma_min]);
        }
        let (a, b) = (s.sigma_min.ln(), s.sigma_max.ln());
        Ok((0..s.points)
            .map(|i| (a + (b - a) * i as f64 / (s.points - 1) as f64).exp())
            .collect())
    }

    pub fn grid(&self) -> CliResult<(GridSpec, GridOptions)> {
        let g = &self.grid;
        let rate_direction: RateDirection = g.rate_direction.parse()?;
        let spec = GridSpec {
            l1: g.l1.clone(),
            angles_deg: g.angles_deg.clone(),
            rates: g.rates.clone(),
            rate_direction,
        };
        if spec.is_empty() {
            return Err(invalid("grid", "every axis needs at least one value"));
        }
        let opts = GridOptions {
            sim: SimOptions {
                duration: g.budget,
                ..self.sim_options(false)?
            },
            energy_tol: g.energy_tol,
            hold: g.hold,
        };
        opts.sim.validate()?;
        Ok((spec, opts))
    }
}

fn prefix(e: CliError, at: &str) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Config(format!("{at}: {msg}")),
        other => other,
    }
}

fn build_disturbance(d: &DisturbanceConfig) -> CliResult<Disturbance> {
    let unused = |name: &str, present: bool| -> CliResult<()> {
        if present {
            Err(invalid(name, format!("not used by a {:?} disturbance", d.kind)))
        } else {
            Ok(())
        }
    };
    let kind = match d.kind {
        DisturbanceType::Impulse | DisturbanceType::Step => {
            unused("frequency_hz", d.frequency_hz.is_some())?;
            unused("pulses", d.pulses.is_some())?;
            unused("period", d.period.is_some())?;
            if d.kind == DisturbanceType::Impulse {
                DisturbanceKind::Impulse
            } else {
                DisturbanceKind::Step
            }
        }
        DisturbanceType::Sinusoid => {
            unused("pulses", d.pulses.is_some())?;
            unused("period", d.period.is_some())?;
            DisturbanceKind::Sinusoid {
                frequency_hz: d.frequency_hz.ok_or_else(|| invalid("frequency_hz", "required"))?,
            }
        }
        DisturbanceType::JerkTrain => {
            unused("frequency_hz", d.frequency_hz.is_some())?;
            DisturbanceKind::JerkTrain {
                pulses: d.pulses.ok_or_else(|| invalid("pulses", "required"))?,
                period: d.period.ok_or_else(|| invalid("period", "required"))?,
            }
        }
    };
    let dist = Disturbance {
        kind,
        start: d.start,
        duration: d.duration,
        wrench: BodyWrench::new(Vector3::from(d.force), Vector3::from(d.torque)),
    };
    dist.validate()?;
    Ok(dist)
}
