//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix5, Matrix5x2, Vector2, Vector4, Vector5};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use swingdamp::analysis::{
    power_spectrum, settling_time_of, simulate_linear, stability_grid, RateDirection, DEFAULT_SETTLING_THRESHOLD,
};
use swingdamp::controller::{
    cutoff_frequency, Cutoff, IdealController, PassiveController, ProposedController, PAPER_GAINS,
};
use swingdamp::dynamics::{
    linearize, mode_frequencies, planar_dynamics, BodyWrench, Disturbance, PlanarModel, PlanarState, SimOptions,
    Simulation, SpatialModel, SpatialState,
};
use swingdamp::synthesis::{
    default_sigma_grid, sigma_sweep, solve_output_feedback_lqr, GainStructure, LqrWeights, StateSpace,
    SynthesisOptions, SynthesisResult, CERT_TOLERANCE,
};
use swingdamp::PendulumParams;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn design_model() -> StateSpace {
    StateSpace::from(&linearize(&PendulumParams::default(), Cutoff::hardware().tau).unwrap())
}

// ---- 1 ---------------------------------------------------------------------

fn criterion_1() -> Check {
    let start = Instant::now();
    let p = PendulumParams::default().undamped();
    let f = mode_frequencies(&p);
    let mech = linearize(&p, 1.0).map_err(|e| e.to_string())?.mechanical_block();
    let mut w: Vec<f64> = mech.complex_eigenvalues().iter().map(|z| z.im.abs() / (2.0 * PI)).collect();
    w.sort_by(f64::total_cmp);
    let (slow, fast) = (w[0], w[3]);
    let eig_ok = (f.slow - slow).abs() <= 1e-9 * slow && (f.fast - fast).abs() <= 1e-9 * fast;

    let plant = PlanarModel::new(p).map_err(|e| e.to_string())?;
    let opts = SimOptions::default().with_duration(120.0);
    let traj = Simulation::new(&plant, opts)
        .run(PlanarState::from_degrees(5.0, -2.0).to_vector(), &mut PassiveController)
        .map_err(|e| e.to_string())?;
    let rate: Vec<f64> = traj.series(|s| s.twist.w_b()).into_iter().step_by(5).collect();
    let spec = power_spectrum(&rate, 1.0 / (5.0 * opts.dt)).map_err(|e| e.to_string())?;
    let bin = spec.bin_width();
    let mut top: Vec<f64> = spec.peaks.iter().take(2).map(|pk| pk.frequency).collect();
    top.sort_by(f64::total_cmp);
    let fft_ok = top.len() == 2 && (top[0] - f.slow).abs() <= bin && (top[1] - f.fast).abs() <= bin;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        eig_ok && fft_ok && secs < 10.0,
        format!(
            "modes {:.6}/{:.6} Hz vs eig {slow:.6}/{fast:.6}; FFT peaks {top:.5?} (bin {bin:.5}); {secs:.1} s",
            f.slow, f.fast
        ),
    )
}

// ---- 2 ---------------------------------------------------------------------

fn lifted_rhs(x: &Vector5<f64>, u: &Vector2<f64>, p: &PendulumParams, tau: f64) -> Vector5<f64> {
    let s = PlanarState::new(x[0], x[2] - x[0], x[1], x[3] - x[1]);
    let qdd = planar_dynamics(&s, &BodyWrench::planar(u[0], u[1]), p).unwrap();
    Vector5::new(x[1], qdd[0], x[3], qdd[0] + qdd[1], (x[3] - x[4]) / tau)
}

/// Agreement to four significant digits of the printed value.
fn four_digits(got: f64, printed: f64) -> bool {
    let exp = printed.abs().log10().floor();
    (got - printed).abs() <= 0.5 * 10f64.powf(exp - 3.0)
}

fn criterion_2() -> Check {
    let p = PendulumParams::default().undamped();
    let tau = cutoff_frequency(&p).tau;
    let m = linearize(&p, tau).map_err(|e| e.to_string())?;
    let h = 1e-6;
    let mut a = Matrix5::zeros();
    for j in 0..5 {
        let mut e = Vector5::zeros();
        e[j] = h;
        a.set_column(j, &((lifted_rhs(&e, &Vector2::zeros(), &p, tau) - lifted_rhs(&-e, &Vector2::zeros(), &p, tau)) / (2.0 * h)));
    }
    let mut b = Matrix5x2::zeros();
    for j in 0..2 {
        let mut e = Vector2::zeros();
        e[j] = 1e-3;
        let x0 = Vector5::zeros();
        b.set_column(j, &((lifted_rhs(&x0, &e, &p, tau) - lifted_rhs(&x0, &-e, &p, tau)) / 2e-3));
    }
    // Relative to the entry, or to a small fraction of the matrix scale for
    // structural zeros.
    let err = |got: &[f64], want: &[f64], scale: f64| {
        got.iter().zip(want).map(|(g, w)| (g - w).abs() / w.abs().max(1e-3 * scale)).fold(0.0, f64::max)
    };
    let ea = err(m.a.as_slice(), a.as_slice(), m.a.amax());
    let eb = err(m.b.as_slice(), b.as_slice(), m.b.amax());

    let printed = [
        (m.a[(1, 0)], -6.4955),
        (m.a[(1, 2)], 4.8608),
        (m.a[(3, 0)], 17.715),
        (m.a[(3, 2)], -17.715),
        (m.b[(1, 1)], -4.095e-3),
        (m.b[(3, 0)], 8.264e-3),
        (m.b[(3, 1)], 1.4925e-2),
    ];
    let bad: Vec<String> =
        printed.iter().filter(|(g, w)| !four_digits(*g, *w)).map(|(g, w)| format!("{g:.6e} vs {w}")).collect();
    ensure(
        ea <= 1e-6 && eb <= 1e-6 && bad.is_empty(),
        format!("FD relative error A {ea:.1e}, B {eb:.1e}; printed entries off: {bad:?}"),
    )
}

// ---- 3 ---------------------------------------------------------------------

fn drift(e: &[f64]) -> f64 {
    e.iter().map(|x| (x - e[0]).abs() / e[0]).fold(0.0, f64::max)
}

fn criterion_3() -> Check {
    let p = PendulumParams::default().undamped();
    let opts = SimOptions::default();
    let planar = PlanarModel::new(p).map_err(|e| e.to_string())?;
    let d2 = drift(
        &Simulation::new(&planar, opts)
            .run(PlanarState::new(0.3, -0.2, 0.1, 0.4).to_vector(), &mut PassiveController)
            .map_err(|e| e.to_string())?
            .energies(),
    );
    let spatial = SpatialModel::new(p).map_err(|e| e.to_string())?;
    let x0 = SpatialState::new(Vector5::new(0.2, -0.3, 0.1, 0.25, 0.0), Vector5::new(0.1, 0.0, -0.2, 0.1, 0.3));
    let d3 = drift(
        &Simulation::new(&spatial, opts)
            .run(x0.to_vector(), &mut PassiveController)
            .map_err(|e| e.to_string())?
            .energies(),
    );

    // Control on every integrator step, so the sampled wrench and twist
    // are simultaneous.
    let every_step = SimOptions {
        control_rate_hz: 1.0 / opts.dt,
        ..opts
    };
    let pd = PendulumParams::default();
    let push = vec![Disturbance::impulse(
        1.0,
        0.5,
        BodyWrench::new(nalgebra::Vector3::new(80.0, 40.0, 0.0), nalgebra::Vector3::new(10.0, -20.0, 15.0)),
    )];
    let mut ideal = IdealController::new(PAPER_GAINS);
    let t2 = Simulation::new(&PlanarModel::new(pd).unwrap(), every_step)
        .with_disturbances(push.clone())
        .run(PlanarState::from_degrees(5.0, 3.0).to_vector(), &mut ideal)
        .map_err(|e| e.to_string())?;
    let t3 = Simulation::new(&SpatialModel::new(pd).unwrap(), every_step)
        .with_disturbances(push)
        .run(SpatialState::new(Vector5::new(0.1, 0.08, -0.05, 0.03, 0.2), Vector5::zeros()).to_vector(), &mut ideal)
        .map_err(|e| e.to_string())?;
    let max_power = t2
        .samples
        .iter()
        .map(|s| s.control.power(&s.twist))
        .chain(t3.samples.iter().map(|s| s.control.power(&s.twist)))
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(
        d2 < 1e-6 && d3 < 1e-6 && max_power <= 0.0,
        format!("drift planar {d2:.2e}, 3D {d3:.2e}; max ideal power {max_power:.3e} W"),
    )
}

// ---- 4 ---------------------------------------------------------------------

fn criterion_4() -> Check {
    let p = PendulumParams::default();
    let tau = cutoff_frequency(&p).tau;
    let opts = SimOptions::default();
    let push = vec![Disturbance::impulse(1.0, 0.5, BodyWrench::planar(130.0, 20.0))];
    let ps = PlanarState::new(0.08, -0.03, 0.02, 0.05);
    let mut c2 = ProposedController::planar(PAPER_GAINS, tau, p).map_err(|e| e.to_string())?;
    let a = Simulation::new(&PlanarModel::new(p).unwrap(), opts)
        .with_disturbances(push.clone())
        .run(ps.to_vector(), &mut c2)
        .map_err(|e| e.to_string())?;
    let mut c3 = ProposedController::spatial(PAPER_GAINS, tau, p).map_err(|e| e.to_string())?;
    let b = Simulation::new(&SpatialModel::new(p).unwrap(), opts)
        .with_disturbances(push)
        .run(SpatialState::from_planar(&ps).to_vector(), &mut c3)
        .map_err(|e| e.to_string())?;
    if a.len() != b.len() {
        return Err(format!("sample counts differ: {} vs {}", a.len(), b.len()));
    }
    let mut worst = 0.0f64;
    for (s, r) in a.samples.iter().zip(&b.samples) {
        let q = SpatialState::from_vector(&r.state);
        let embedded = Vector4::new(q.q[1], q.q[3], q.qdot[1], q.qdot[3]);
        let off_plane = [0, 2, 4].iter().map(|&i| q.q[i].abs().max(q.qdot[i].abs())).fold(0.0, f64::max);
        worst = worst
            .max((s.state - embedded).amax())
            .max(off_plane)
            .max((s.control.force - r.control.force).amax())
            .max((s.control.torque - r.control.torque).amax())
            .max((s.energy - r.energy).abs());
    }
    ensure(worst <= 1e-9, format!("max per-step deviation {worst:.2e} over {} steps", a.len()))
}

// ---- 5 ---------------------------------------------------------------------

/// `AᵀX + XA + W = 0` via the Kronecker form.
fn lyapunov_kron(a: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(&a.transpose()) + a.transpose().kronecker(&eye);
    let x = op.lu().solve(&-DVector::from_column_slice(w.as_slice())).unwrap();
    let x = DMatrix::from_column_slice(n, n, x.as_slice());
    (&x + x.transpose()) * 0.5
}

/// Riccati solution by Newton–Kleinman from a stabilizing full-state gain.
fn riccati_oracle(ss: &StateSpace, w: &LqrWeights) -> DMatrix<f64> {
    let r = w.r();
    let r_inv = r.clone().try_inverse().unwrap();
    let mut k = DMatrix::from_row_slice(2, 5, &[0.0, 0.0, 0.0, 200.0, 0.0, 0.0, 0.0, 0.0, 200.0, 0.0]);
    let mut p = DMatrix::zeros(5, 5);
    for _ in 0..100 {
        let next = lyapunov_kron(&(&ss.a - &ss.b * &k), &(&w.q + k.transpose() * &r * &k));
        let done = (&next - &p).norm() <= 1e-13 * next.norm();
        p = next;
        k = &r_inv * ss.b.transpose() * &p;
        if done {
            break;
        }
    }
    p
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let ss = design_model();
    let opts = SynthesisOptions {
        structure: GainStructure::Dense,
        ..SynthesisOptions::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for sigma in [1e-6, 5e-6, 8e-5] {
        let w = LqrWeights::paper(sigma);
        let oracle = riccati_oracle(&ss, &w).trace();
        match solve_output_feedback_lqr(&ss.full_state(), &w, &opts) {
            Ok(r) => {
                let rel = (r.cost - oracle).abs() / oracle;
                ok &= r.feasible && rel <= 1e-4;
                parts.push(format!("σ={sigma:e}: {:.6} vs {oracle:.6} ({rel:.1e})", r.cost));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("σ={sigma:e}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(ok && secs < 60.0, format!("{}; {secs:.1} s", parts.join("; ")))
}

// ---- 6 ---------------------------------------------------------------------

/// Eigenvalue certificate recomputed from the raw matrices.
fn certified(ss: &StateSpace, w: &LqrWeights, r: &SynthesisResult) -> Result<(), String> {
    let (n, m) = (ss.states(), ss.inputs());
    let rm = w.r();
    let r_inv = rm.clone().try_inverse().ok_or("R singular")?;
    let (a, b, c, p, xi, f) = (&ss.a, &ss.b, &ss.c, &r.p, &r.xi, &r.f);
    let g = f * c - &r_inv * b.transpose() * p;
    let h = -(xi * b * &r_inv * b.transpose() * p) - p * b * &r_inv * b.transpose() * xi
        + xi * b * &r_inv * b.transpose() * xi;
    let mut big = DMatrix::zeros(n + m, n + m);
    big.view_mut((0, 0), (n, n)).copy_from(&(a.transpose() * p + p * a + &w.q + h));
    big.view_mut((n, 0), (m, n)).copy_from(&g);
    big.view_mut((0, n), (n, m)).copy_from(&g.transpose());
    big.view_mut((n, n), (m, m)).copy_from(&-r_inv);
    let big = (&big + big.transpose()) * 0.5;
    let max_m = big.symmetric_eigen().eigenvalues.max();
    let min_p = ((p + p.transpose()) * 0.5).symmetric_eigen().eigenvalues.min();
    let hurwitz = (a - b * f * c).complex_eigenvalues().iter().all(|z| z.re < 0.0);
    if min_p > 0.0 && max_m <= CERT_TOLERANCE && hurwitz {
        Ok(())
    } else {
        Err(format!("min eig P {min_p:.2e}, max eig M {max_m:.2e}, Hurwitz {hurwitz}"))
    }
}

fn criterion_6() -> Check {
    let ss = design_model();
    let opts = SynthesisOptions::default();
    let mut problems = Vec::new();

    let nominal = solve_output_feedback_lqr(&ss, &LqrWeights::paper(5e-6), &opts).map_err(|e| e.to_string())?;
    if let Err(e) = certified(&ss, &LqrWeights::paper(5e-6), &nominal) {
        problems.push(format!("σ=5e-6 not certified: {e}"));
    }
    let g = nominal.gains().ok_or("nominal gain is not diagonal")?;
    let (rv, rw) = (g.kv / PAPER_GAINS.kv, g.kw / PAPER_GAINS.kw);
    if !(0.3..=3.0).contains(&rv) || !(0.3..=3.0).contains(&rw) {
        problems.push("nominal gains outside [0.3, 3]× of (48, 70)".into());
    }

    let points = sigma_sweep(&ss, &LqrWeights::paper(1.0), &default_sigma_grid(), &opts).map_err(|e| e.to_string())?;
    let mut kv = Vec::new();
    let mut kw = Vec::new();
    for pt in &points {
        match pt.result().filter(|r| r.feasible) {
            Some(r) => {
                if let Err(e) = certified(&ss, &LqrWeights::paper(pt.sigma), r) {
                    problems.push(format!("σ={:e} not certified: {e}", pt.sigma));
                }
                kv.push((pt.sigma, r.f[(0, 0)]));
                kw.push((pt.sigma, r.f[(1, 1)]));
            }
            None => problems.push(format!("σ={:e} infeasible", pt.sigma)),
        }
    }
    for (name, series) in [("K_v", &kv), ("K_w", &kw)] {
        if let Some(w) = series.windows(2).find(|w| w[1].1 > w[0].1) {
            let peak = series.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            problems.push(format!(
                "{name} increases from {:.4} at σ={:.3e} to {:.4} at σ={:.3e} (max {:.4} at σ={:.3e})",
                w[0].1, w[0].0, w[1].1, w[1].0, peak.1, peak.0
            ));
        }
    }
    let detail = format!(
        "σ=5e-6 gains ({:.3}, {:.3}) = ({rv:.3}×, {rw:.3}×) of (48, 70); {} sweep points certified",
        g.kv,
        g.kw,
        kv.len()
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

// ---- 7 ---------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swingdamp"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn cli(cfg: &Path, out: &Path, cmd: &str) -> Result<String, String> {
    let o = bin()
        .args(["--quiet", "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .arg(cmd)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{cmd} {}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr).trim()));
    }
    std::fs::read_to_string(out.join("summary.txt")).map_err(|e| e.to_string())
}

fn summary_value<'a>(summary: &'a str, key: &str) -> Option<&'a str> {
    summary.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

fn criterion_7() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let summary = cli(&config("grid_3e.json"), dir.path(), "grid")?;
    let secs = start.elapsed().as_secs_f64();
    let cells = summary_value(&summary, "cells").unwrap_or("?");
    let converged = summary_value(&summary, "converged").unwrap_or("?");
    let all = summary_value(&summary, "all_converged") == Some("true");
    ensure(
        all && cells == "168" && secs < 600.0,
        format!("{converged}/{cells} cells converged (restoring rates); {secs:.1} s"),
    )
}

/// Informational: the same grid with rates pointing away from equilibrium.
fn outward_grid_note() -> String {
    let text = std::fs::read_to_string(config("grid_3e.json")).unwrap();
    let sc: swingdamp_cli::config::Scenario = serde_json::from_str(&text).unwrap();
    let (spec, opts) = sc.grid().unwrap();
    let spec = spec.with_rate_direction(RateDirection::Outward);
    match stability_grid(&sc.params().unwrap(), &spec, Some(PAPER_GAINS), &opts) {
        Ok(r) => format!("outward rates: {}/{} cells converged", r.converged_count(), r.cells.len()),
        Err(e) => format!("outward rates: {e}"),
    }
}

// ---- 8 ---------------------------------------------------------------------

fn criterion_8() -> Check {
    let p = PendulumParams::default();
    let plant = PlanarModel::new(p).map_err(|e| e.to_string())?;
    let push = vec![Disturbance::impulse(0.0, 0.5, BodyWrench::planar(130.0, 0.0))];
    let x0 = PlanarState::default().to_vector();
    let mut proposed = ProposedController::planar(PAPER_GAINS, cutoff_frequency(&p).tau, p).map_err(|e| e.to_string())?;
    let controlled = Simulation::new(&plant, SimOptions::default().with_duration(60.0))
        .with_disturbances(push.clone())
        .run(x0, &mut proposed)
        .map_err(|e| e.to_string())?;
    let peak = controlled.series(|s| s.tilt.y.abs().to_degrees()).into_iter().fold(0.0, f64::max);
    let t_ctrl = settling_time_of(&controlled, |s| s.twist.w_b(), DEFAULT_SETTLING_THRESHOLD)
        .map_err(|e| e.to_string())?
        .ok_or(format!("controlled run did not settle (peak {peak:.2}°)"))?;

    let horizon = (5.0 * t_ctrl).max(300.0);
    let passive = Simulation::new(&plant, SimOptions::default().with_duration(horizon))
        .with_disturbances(push)
        .run(x0, &mut PassiveController)
        .map_err(|e| e.to_string())?;
    let t_pass = settling_time_of(&passive, |s| s.twist.w_b(), DEFAULT_SETTLING_THRESHOLD).map_err(|e| e.to_string())?;
    let ratio_ok = t_pass.is_none_or(|t| t >= 5.0 * t_ctrl);
    let passive_text = match t_pass {
        Some(t) => format!("{t:.2} s"),
        None => format!("not settled within {horizon:.0} s"),
    };
    let six = if t_ctrl - 0.5 <= 6.0 { "within" } else { "beyond" };
    ensure(
        (4.0..=6.0).contains(&peak) && ratio_ok,
        format!(
            "peak tilt {peak:.2}°; controlled settling {t_ctrl:.2} s ({:.2} s after the impulse, {six} the reported 6 s); passive {passive_text}",
            t_ctrl - 0.5
        ),
    )
}

// ---- 9 ---------------------------------------------------------------------

fn criterion_9() -> Check {
    let ss = design_model();
    let w = LqrWeights::paper(5e-6);
    let r = solve_output_feedback_lqr(&ss, &w, &SynthesisOptions::default()).map_err(|e| e.to_string())?;
    certified(&ss, &w, &r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let x0 = DVector::<f64>::from_fn(5, |_, _| StandardNormal.sample(&mut rng)).normalize();
        let run = simulate_linear(&ss, &r.f, &x0, 2e-3, 80.0).map_err(|e| e.to_string())?;
        worst = worst.max(run.cost(&w) / x0.dot(&(&r.p * &x0)));
    }
    ensure(worst <= 1.02, format!("max cost / x0ᵀPx0 = {worst:.5} over 100 initial states"))
}

// ---- 10 --------------------------------------------------------------------

fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    Ok(files)
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    // The full grid already runs under criterion 7; repeat a reduced copy.
    let mut grid: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(config("grid_3e.json")).unwrap()).unwrap();
    grid["grid"]["l1"] = serde_json::json!([4, 10]);
    grid["grid"]["angles_deg"] = serde_json::json!([9, 45]);
    grid["grid"]["rates"] = serde_json::json!([0.0, 1.0]);
    let small_grid = dir.path().join("grid_small.json");
    std::fs::write(&small_grid, grid.to_string()).unwrap();

    let runs = [
        (config("default.json"), "simulate"),
        (config("default.json"), "synthesize"),
        (config("fig6_sweep.json"), "sweep"),
        (config("fig7_spectrum.json"), "spectrum"),
        (config("fig8_compare.json"), "compare"),
        (small_grid, "grid"),
    ];
    let mut checked = 0;
    for (i, (cfg, cmd)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{i}-{rep}"));
            cli(cfg, &out, cmd)?;
            outputs.push(csv_files(&out)?);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            return Err(format!("{cmd} {} differs between runs", cfg.display()));
        }
        checked += outputs[0].len();
    }
    Ok(format!("{checked} CSV files byte-identical across repeated runs of {} commands", runs.len()))
}

fn main() {
    let criteria: [(usize, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS - {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL - {detail}");
            }
        }
        if n == 7 {
            println!("  note: {}", outward_grid_note());
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
