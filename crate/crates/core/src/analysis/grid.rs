use std::ops::ControlFlow;

use nalgebra::Vector5;
use rayon::prelude::*;

use crate::controller::{cutoff_frequency, AnyController, DampingGains, PassiveController, ProposedController};
use crate::dynamics::{SimOptions, Simulation, SpatialModel, SpatialState};
use crate::{Error, PendulumParams, Result};

/// Axes of the initial-condition grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Upper link lengths [m].
    pub l1: Vec<f64>,
    /// Initial angle applied to both joints about both horizontal axes [deg].
    pub angles_deg: Vec<f64>,
    /// Initial rate magnitude applied to the same four joint coordinates [rad/s].
    pub rates: Vec<f64>,
    pub rate_direction: RateDirection,
}

/// Sign of the initial joint rates relative to the initial displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateDirection {
    /// Moving back towards the hanging equilibrium.
    #[default]
    Restoring,
    /// Moving further away from it.
    Outward,
}

impl std::str::FromStr for RateDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restoring" => Ok(RateDirection::Restoring),
            "outward" => Ok(RateDirection::Outward),
            other => Err(Error::param("rate_direction", format!("expected restoring|outward, got {other}"))),
        }
    }
}

impl GridSpec {
    /// `l1 ∈ {4, …, 10}` m, angles 2° to 45° in 7° steps plus the 45° end
    /// point, rates `{0, 0.5, 1}` rad/s.
    pub fn paper() -> Self {
        let mut angles: Vec<f64> = (0..7).map(|k| 2.0 + 7.0 * k as f64).collect();
        angles.push(45.0);
        Self {
            l1: (4..=10).map(f64::from).collect(),
            angles_deg: angles,
            rates: vec![0.0, 0.5, 1.0],
            rate_direction: RateDirection::Restoring,
        }
    }

    pub fn with_rate_direction(self, rate_direction: RateDirection) -> Self {
        Self {
            rate_direction,
            ..self
        }
    }

    pub fn len(&self) -> usize {
        self.l1.len() * self.angles_deg.len() * self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in row-major order `(l1, angle, rate)`.
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &l1 in &self.l1 {
            for &a in &self.angles_deg {
                for &r in &self.rates {
                    out.push((l1, a, r));
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::param("grid", "every axis needs at least one value"));
        }
        if self.l1.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::param("l1", "grid values must be finite and > 0"));
        }
        if self.angles_deg.iter().chain(&self.rates).any(|v| !v.is_finite()) {
            return Err(Error::param("grid", "angles and rates must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Integration settings; `duration` is the time budget per cell.
    pub sim: SimOptions,
    /// Energy below which a cell counts as at rest [J].
    pub energy_tol: f64,
    /// How long the energy must stay below tolerance before stopping early [s].
    pub hold: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            sim: SimOptions::default().with_duration(120.0),
            energy_tol: 1e-4,
            hold: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub l1: f64,
    pub angle_deg: f64,
    pub rate: f64,
    pub converged: bool,
    /// Time at which the energy entered the tolerance band for good.
    pub settling_s: Option<f64>,
    /// Largest commanded force and torque magnitudes.
    pub peak_force: f64,
    pub peak_torque: f64,
    /// Why a cell failed to run, if it did.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGridReport {
    pub spec: GridSpec,
    /// One entry per cell, in [`GridSpec::cells`] order.
    pub cells: Vec<GridCell>,
}

impl StabilityGridReport {
    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }

    pub fn converged_count(&self) -> usize {
        self.cells.iter().filter(|c| c.converged).count()
    }

    pub fn to_csv(&self) -> String {
        let f = super::fmt_f64;
        let mut out = String::from("l1,angle_deg,rate,converged,settling_s,peak_force,peak_torque\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                f(c.l1),
                f(c.angle_deg),
                f(c.rate),
                c.converged,
                c.settling_s.map(f).unwrap_or_else(|| "NaN".into()),
                f(c.peak_force),
                f(c.peak_torque)
            ));
        }
        out
    }
}

/// Runs one spatial closed-loop simulation per grid cell in parallel.
///
/// `gains = None` leaves the plant to its joint damping alone. The filter
/// time constant follows the cutoff rule for each cell's `l1`.
pub fn stability_grid(
    template: &PendulumParams,
    spec: &GridSpec,
    gains: Option<DampingGains>,
    opts: &GridOptions,
) -> Result<StabilityGridReport> {
    template.validate()?;
    spec.validate()?;
    opts.sim.validate()?;
    if !(opts.energy_tol.is_finite() && opts.energy_tol > 0.0) {
        return Err(Error::param("energy_tol", "must be finite and > 0"));
    }
    if !(opts.hold.is_finite() && opts.hold >= 0.0) {
        return Err(Error::param("hold", "must be finite and >= 0"));
    }
    for &l1 in &spec.l1 {
        template.with_l1(l1).validate()?;
    }
    let cells = spec
        .cells()
        .into_par_iter()
        .map(|(l1, angle, rate)| run_cell(template, l1, angle, rate, spec.rate_direction, gains, opts))
        .collect();
    Ok(StabilityGridReport {
        spec: spec.clone(),
        cells,
    })
}

fn run_cell(
    template: &PendulumParams,
    l1: f64,
    angle_deg: f64,
    rate: f64,
    direction: RateDirection,
    gains: Option<DampingGains>,
    opts: &GridOptions,
) -> GridCell {
    let mut cell = GridCell {
        l1,
        angle_deg,
        rate,
        converged: false,
        settling_s: None,
        peak_force: 0.0,
        peak_torque: 0.0,
        diagnostic: None,
    };
    let params = template.with_l1(l1);
    let outcome = (|| -> Result<()> {
        let plant = SpatialModel::new(params)?;
        let mut controller = match gains {
            Some(g) => AnyController::Proposed(ProposedController::spatial(g, cutoff_frequency(&params).tau, params)?),
            None => AnyController::Passive(PassiveController),
        };
        let a = angle_deg.to_radians();
        let outward = if a < 0.0 { -rate } else { rate };
        let r = match direction {
            RateDirection::Restoring => -outward,
            RateDirection::Outward => outward,
        };
        let x0 = SpatialState::new(Vector5::new(a, a, a, a, 0.0), Vector5::new(r, r, r, r, 0.0));
        let mut below_since: Option<f64> = None;
        let last = Simulation::new(&plant, opts.sim).run_with(x0.to_vector(), &mut controller, |s| {
            cell.peak_force = cell.peak_force.max(s.control.force.norm());
            cell.peak_torque = cell.peak_torque.max(s.control.torque.norm());
            if s.energy < opts.energy_tol {
                let since = *below_since.get_or_insert(s.t);
                if s.t - since >= opts.hold {
                    return ControlFlow::Break(());
                }
            } else {
                below_since = None;
            }
            ControlFlow::Continue(())
        })?;
        if last.energy < opts.energy_tol {
            cell.converged = true;
            cell.settling_s = below_since;
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        cell.diagnostic = Some(e.to_string());
    }
    cell
}
