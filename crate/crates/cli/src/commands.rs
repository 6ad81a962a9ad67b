//! Subcommand implementations. Each returns the artifacts it produced and a
//! summary; nothing is written until the whole run succeeded.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use swingdamp::analysis::{
    compare_controllers, fmt_f64, planar_trajectory_csv, power_spectrum, settling_time,
    spatial_trajectory_csv, stability_grid, sweep_csv, DEFAULT_SETTLING_THRESHOLD,
};
use swingdamp::controller::{AnyController, PassiveController, PAPER_GAINS};
use swingdamp::dynamics::{
    linearize, mode_frequencies, Plant, PlanarModel, SimOptions, Simulation, SpatialModel, Trajectory,
};
use swingdamp::synthesis::{certify, sigma_sweep, solve_output_feedback_lqr, LqrWeights, StateSpace};
use swingdamp::PendulumParams;

use crate::config::{ControllerKind, ModelKind, Scenario, SignalKind};
use crate::error::{CliError, CliResult};

/// Files to write plus a human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl Output {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.summary, "{key} = {value}");
    }

    pub fn write_to(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
        for (name, contents) in self.files.iter().chain(std::iter::once(&("summary.txt".to_string(), self.summary.clone()))) {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        }
        Ok(())
    }
}

fn opt_secs(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "not settled".into())
}

/// Settling of `|w_b|` counted from the end of the last disturbance.
fn settling_after<const N: usize>(traj: &Trajectory<N>, from: f64) -> CliResult<Option<f64>> {
    let start = traj.samples.iter().position(|s| s.t >= from).unwrap_or(traj.len());
    let signal: Vec<f64> = traj.samples[start..].iter().map(|s| s.twist.angular.norm()).collect();
    if signal.is_empty() {
        return Ok(None);
    }
    Ok(settling_time(&signal, traj.dt, DEFAULT_SETTLING_THRESHOLD)?)
}

fn trajectory_summary<const N: usize>(out: &mut Output, traj: &Trajectory<N>, disturbance_end: f64) -> CliResult<()> {
    let peak_rate = traj.body_rate_norm().into_iter().fold(0.0, f64::max);
    let peak_tilt = traj.series(|s| s.tilt.norm()).into_iter().fold(0.0, f64::max);
    let peak_force = traj.series(|s| s.control.force.norm()).into_iter().fold(0.0, f64::max);
    let peak_torque = traj.series(|s| s.control.torque.norm()).into_iter().fold(0.0, f64::max);
    let last = traj.last().expect("a run has at least one sample");
    out.line("samples", traj.len());
    out.line("peak_body_rate_rad_s", fmt_f64(peak_rate));
    out.line("peak_tilt_deg", fmt_f64(peak_tilt.to_degrees()));
    out.line("peak_force_N", fmt_f64(peak_force));
    out.line("peak_torque_Nm", fmt_f64(peak_torque));
    out.line("disturbance_end_s", fmt_f64(disturbance_end));
    out.line("settling_after_disturbance_s", opt_secs(settling_after(traj, disturbance_end)?));
    out.line("final_energy_J", fmt_f64(last.energy));
    Ok(())
}

fn controller_name(kind: ControllerKind) -> &'static str {
    match kind {
        ControllerKind::Proposed => "proposed",
        ControllerKind::Ideal => "ideal",
        ControllerKind::Passive => "passive",
    }
}

pub fn simulate(sc: &Scenario) -> CliResult<Output> {
    let params = sc.params()?;
    let opts = sc.sim_options(sc.controller.noise_enabled)?;
    let disturbances = sc.disturbances()?;
    let mut controller = sc.controller(&sc.controller, &params)?;
    let end = disturbances.iter().map(|d| d.end()).fold(0.0, f64::max).min(opts.duration);

    let mut out = Output::default();
    out.line("command", "simulate");
    out.line("model", format!("{:?}", sc.model).to_lowercase());
    out.line("controller", controller_name(sc.controller.kind));
    if let AnyController::Proposed(c) = &controller {
        out.line("kv", fmt_f64(c.gains.kv));
        out.line("kw", fmt_f64(c.gains.kw));
        out.line("tau_s", fmt_f64(c.tau()));
    }
    out.line("seed", opts.seed);
    match sc.model {
        ModelKind::Planar => {
            let x0 = sc.planar_state()?;
            let plant = PlanarModel::new(params)?;
            let traj = Simulation::new(&plant, opts).with_disturbances(disturbances).run(x0.to_vector(), &mut controller)?;
            trajectory_summary(&mut out, &traj, end)?;
            out.files.push(("trajectory.csv".into(), planar_trajectory_csv(&traj)));
        }
        ModelKind::Spatial => {
            let x0 = sc.spatial_state()?;
            let plant = SpatialModel::new(params)?;
            let traj = Simulation::new(&plant, opts).with_disturbances(disturbances).run(x0.to_vector(), &mut controller)?;
            trajectory_summary(&mut out, &traj, end)?;
            out.files.push(("trajectory.csv".into(), spatial_trajectory_csv(&traj)));
        }
    }
    Ok(out)
}

fn design_model(sc: &Scenario, params: &PendulumParams) -> CliResult<StateSpace> {
    let cutoff = swingdamp::controller::Cutoff::from_hz(sc.synthesis.cutoff_hz)?;
    let ss = StateSpace::from(&linearize(params, cutoff.tau)?);
    Ok(if sc.synthesis.full_state { ss.full_state() } else { ss })
}

fn matrix_rows(m: &DMatrix<f64>) -> String {
    m.row_iter()
        .map(|r| r.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn synthesize(sc: &Scenario) -> CliResult<Output> {
    let params = sc.params()?;
    let opts = sc.synthesis_options()?;
    let ss = design_model(sc, &params)?;
    let weights = LqrWeights::paper(sc.synthesis.sigma);
    let res = solve_output_feedback_lqr(&ss, &weights, &opts)?;
    let cert = certify(&ss, &res.f, &weights)?;

    let mut out = Output::default();
    out.line("command", "synthesize");
    out.line("sigma", fmt_f64(sc.synthesis.sigma));
    out.line("cutoff_hz", fmt_f64(sc.synthesis.cutoff_hz));
    out.line("xi_init", &sc.synthesis.xi_init);
    if let Some(g) = res.gains() {
        out.line("kv", fmt_f64(g.kv));
        out.line("kw", fmt_f64(g.kw));
        out.line("kv_over_reported", format!("{:.4}", g.kv / PAPER_GAINS.kv));
        out.line("kw_over_reported", format!("{:.4}", g.kw / PAPER_GAINS.kw));
    }
    out.line("F", matrix_rows(&res.f));
    out.line("trace_P", fmt_f64(res.cost));
    if let Some(c) = cert.cost {
        out.line("closed_loop_cost", fmt_f64(c));
    }
    out.line("hurwitz", cert.hurwitz);
    out.line("decay_rate", fmt_f64(cert.decay_rate()));
    out.line("feasible", res.feasible);
    out.line("max_eig_M", fmt_f64(res.max_eig_m));
    out.line("min_eig_P", fmt_f64(res.min_eig_p));
    out.line("iterations", res.iterations);
    out.line("converged", res.converged);
    let mut history = String::from("iteration,trace_P\n");
    for (i, c) in res.history.iter().enumerate() {
        let _ = writeln!(history, "{},{}", i + 1, fmt_f64(*c));
    }
    out.files.push(("history.csv".into(), history));
    Ok(out)
}

pub fn sweep(sc: &Scenario) -> CliResult<Output> {
    let params = sc.params()?;
    let opts = sc.synthesis_options()?;
    let sigmas = sc.sigma_grid()?;
    let ss = design_model(sc, &params)?;
    let points = sigma_sweep(&ss, &LqrWeights::paper(sigmas[0]), &sigmas, &opts)?;

    let mut out = Output::default();
    out.line("command", "sweep");
    out.line("points", points.len());
    let feasible: Vec<_> = points.iter().filter_map(|p| p.result().filter(|r| r.feasible).map(|r| (p.sigma, r))).collect();
    out.line("feasible_points", feasible.len());
    for (key, idx) in [("kv", 0), ("kw", 1)] {
        let gains: Vec<(f64, f64)> = feasible.iter().map(|(s, r)| (*s, r.f[(idx, idx)])).collect();
        out.line(&format!("{key}_non_increasing"), gains.windows(2).all(|w| w[1].1 <= w[0].1));
        if let Some((sigma, k)) = gains.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)) {
            out.line(&format!("{key}_max"), format!("{} at sigma {}", fmt_f64(k), fmt_f64(sigma)));
        }
    }
    for p in &points {
        if let Err(e) = &p.outcome {
            out.line(&format!("failed_sigma_{}", fmt_f64(p.sigma)), e);
        }
    }
    out.files.push(("sweep.csv".into(), sweep_csv(&points)));
    Ok(out)
}

pub fn spectrum(sc: &Scenario) -> CliResult<Output> {
    let mut params = sc.params()?;
    if sc.spectrum.undamped {
        params = params.undamped();
    }
    let cfg = sc.spectrum;
    let base = sc.sim_options(false)?;
    if !(cfg.sample_rate_hz.is_finite() && cfg.sample_rate_hz > 0.0) {
        return Err(CliError::Config("invalid parameter `spectrum.sample_rate_hz`: must be > 0".into()));
    }
    let stride = 1.0 / (cfg.sample_rate_hz * base.dt);
    if (stride - stride.round()).abs() > 1e-9 || stride.round() < 1.0 {
        return Err(CliError::Config(
            "invalid parameter `spectrum.sample_rate_hz`: must divide the integration rate 1/sim.dt".into(),
        ));
    }
    let opts = SimOptions {
        duration: cfg.duration,
        ..base
    };
    let select = |s: &swingdamp::dynamics::Sample<4>| match cfg.signal {
        SignalKind::Wb => s.twist.w_b(),
        SignalKind::Vb => s.twist.v_b(),
        SignalKind::Theta => s.tilt.y,
    };
    let signal: Vec<f64> = match sc.model {
        ModelKind::Planar => {
            let plant = PlanarModel::new(params)?;
            free_swing(&plant, sc.planar_state()?.to_vector(), opts, stride.round() as usize, select)?
        }
        ModelKind::Spatial => {
            return Err(CliError::Config("invalid parameter `model`: spectrum runs on the planar model".into()))
        }
    };
    let spec = power_spectrum(&signal, cfg.sample_rate_hz)?;
    let modes = mode_frequencies(&params);

    let mut out = Output::default();
    out.line("command", "spectrum");
    out.line("samples", signal.len());
    out.line("bin_width_hz", fmt_f64(spec.bin_width()));
    out.line("predicted_slow_hz", fmt_f64(modes.slow));
    out.line("predicted_fast_hz", fmt_f64(modes.fast));
    for (i, p) in spec.peaks.iter().enumerate() {
        out.line(&format!("peak_{}_hz", i + 1), fmt_f64(p.frequency));
    }
    out.files.push(("spectrum.csv".into(), spec.to_csv()));
    Ok(out)
}

fn free_swing<P: Plant<4>>(
    plant: &P,
    x0: nalgebra::SVector<f64, 4>,
    opts: SimOptions,
    stride: usize,
    select: impl Fn(&swingdamp::dynamics::Sample<4>) -> f64,
) -> CliResult<Vec<f64>> {
    let mut signal = Vec::new();
    let mut i = 0usize;
    Simulation::new(plant, opts).run_with(x0, &mut PassiveController, |s| {
        if i.is_multiple_of(stride) {
            signal.push(select(s));
        }
        i += 1;
        std::ops::ControlFlow::Continue(())
    })?;
    Ok(signal)
}

pub fn grid(sc: &Scenario) -> CliResult<Output> {
    let params = sc.params()?;
    let (spec, opts) = sc.grid()?;
    let gains = match sc.controller.kind {
        ControllerKind::Proposed => Some(swingdamp::controller::DampingGains::new(sc.controller.kv, sc.controller.kw)?),
        ControllerKind::Passive => None,
        ControllerKind::Ideal => {
            return Err(CliError::Config(
                "invalid parameter `controller.type`: the grid runs the proposed or passive controller".into(),
            ))
        }
    };
    let report = stability_grid(&params, &spec, gains, &opts)?;

    let mut out = Output::default();
    out.line("command", "grid");
    out.line("cells", report.cells.len());
    out.line("converged", report.converged_count());
    out.line("all_converged", report.all_converged());
    let worst = report.cells.iter().filter_map(|c| c.settling_s).fold(0.0, f64::max);
    out.line("worst_settling_s", fmt_f64(worst));
    for c in report.cells.iter().filter(|c| c.diagnostic.is_some()) {
        out.line(
            &format!("failed_l1_{}_angle_{}_rate_{}", fmt_f64(c.l1), fmt_f64(c.angle_deg), fmt_f64(c.rate)),
            c.diagnostic.as_deref().unwrap_or_default(),
        );
    }
    out.files.push(("grid.csv".into(), report.to_csv()));
    Ok(out)
}

pub fn compare(sc: &Scenario) -> CliResult<Output> {
    let params = sc.params()?;
    let disturbances = sc.disturbances()?;
    let Some(first) = sc.compare.controllers.first() else {
        return Err(CliError::Config("invalid parameter `compare.controllers`: need at least one".into()));
    };
    // Paired runs share one gyro noise sequence.
    let noisy = first.controller.noise_enabled;
    if sc.compare.controllers.iter().any(|n| n.controller.noise_enabled != noisy) {
        return Err(CliError::Config(
            "invalid parameter `compare.controllers`: noise_enabled must agree across controllers".into(),
        ));
    }
    let opts = sc.sim_options(noisy)?;
    let controllers = sc
        .compare
        .controllers
        .iter()
        .map(|n| Ok((n.name.clone(), sc.controller(&n.controller, &params)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let end = disturbances.iter().map(|d| d.end()).fold(0.0, f64::max).min(opts.duration);

    let mut out = Output::default();
    out.line("command", "compare");
    let csv = match sc.model {
        ModelKind::Planar => {
            let plant = PlanarModel::new(params)?;
            let sim = Simulation::new(&plant, opts).with_disturbances(disturbances);
            let cmp = compare_controllers(&sim, sc.planar_state()?.to_vector(), controllers)?;
            for (name, run) in cmp.names.iter().zip(&cmp.runs) {
                summarize_run(&mut out, name, run, end)?;
            }
            cmp.to_csv()
        }
        ModelKind::Spatial => {
            let plant = SpatialModel::new(params)?;
            let sim = Simulation::new(&plant, opts).with_disturbances(disturbances);
            let cmp = compare_controllers(&sim, sc.spatial_state()?.to_vector(), controllers)?;
            for (name, run) in cmp.names.iter().zip(&cmp.runs) {
                summarize_run(&mut out, name, run, end)?;
            }
            cmp.to_csv()
        }
    };
    out.files.push(("compare.csv".into(), csv));
    Ok(out)
}

fn summarize_run<const N: usize>(out: &mut Output, name: &str, run: &Trajectory<N>, end: f64) -> CliResult<()> {
    let last = run.last().expect("non-empty run");
    out.line(&format!("{name}_settling_after_disturbance_s"), opt_secs(settling_after(run, end)?));
    out.line(&format!("{name}_final_energy_J"), fmt_f64(last.energy));
    Ok(())
}
