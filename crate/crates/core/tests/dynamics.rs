use std::f64::consts::PI;

use nalgebra::{Complex, Matrix5, Matrix5x2, SVector, Vector2, Vector4, Vector5};
use proptest::prelude::*;
use swingdamp::analysis::power_spectrum;
use swingdamp::controller::{
    cutoff_frequency, DampingGains, IdealController, PassiveController, ProposedController, PAPER_GAINS,
};
use swingdamp::dynamics::{
    linearize, mode_frequencies, planar_dynamics, planar_energy, planar_jacobian, planar_terms,
    spatial_energy, BodyWrench, Disturbance, PlanarModel, PlanarState, SimOptions, Simulation,
    SpatialModel, SpatialState,
};
use swingdamp::PendulumParams;

/// Right-hand side of the nonlinear planar model in the linear state
/// `[q1, q̇1, θ, θ̇, θ̇_lp]`.
fn lifted_rhs(x: &Vector5<f64>, u: &Vector2<f64>, p: &PendulumParams, tau: f64) -> Vector5<f64> {
    let s = PlanarState::new(x[0], x[2] - x[0], x[1], x[3] - x[1]);
    let qdd = planar_dynamics(&s, &BodyWrench::planar(u[0], u[1]), p).unwrap();
    Vector5::new(x[1], qdd[0], x[3], qdd[0] + qdd[1], (x[3] - x[4]) / tau)
}

#[test]
fn linearization_matches_central_differences() {
    let p = PendulumParams::default().undamped();
    let tau = cutoff_frequency(&p).tau;
    let m = linearize(&p, tau).unwrap();
    let h = 1e-6;
    let zero_u = Vector2::zeros();
    let mut a = Matrix5::zeros();
    for j in 0..5 {
        let mut e = Vector5::zeros();
        e[j] = h;
        a.set_column(j, &((lifted_rhs(&e, &zero_u, &p, tau) - lifted_rhs(&-e, &zero_u, &p, tau)) / (2.0 * h)));
    }
    let mut b = Matrix5x2::zeros();
    for j in 0..2 {
        let mut e = Vector2::zeros();
        e[j] = 1e-3;
        let x0 = Vector5::zeros();
        b.set_column(j, &((lifted_rhs(&x0, &e, &p, tau) - lifted_rhs(&x0, &-e, &p, tau)) / 2e-3));
    }
    let rel = |got: f64, want: f64, scale: f64| (got - want).abs() <= 1e-6 * want.abs().max(scale);
    for (i, j) in (0..5).flat_map(|i| (0..5).map(move |j| (i, j))) {
        assert!(rel(m.a[(i, j)], a[(i, j)], m.a.amax() * 1e-3), "A[{i},{j}] {} vs {}", m.a[(i, j)], a[(i, j)]);
    }
    for (i, j) in (0..5).flat_map(|i| (0..2).map(move |j| (i, j))) {
        assert!(rel(m.b[(i, j)], b[(i, j)], m.b.amax() * 1e-3), "B[{i},{j}] {} vs {}", m.b[(i, j)], b[(i, j)]);
    }
}

fn eigen_frequencies(p: &PendulumParams) -> (f64, f64) {
    let m = linearize(p, 1.0).unwrap().mechanical_block();
    let mut w: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z: &Complex<f64>| z.im.abs() / (2.0 * PI))
        .collect();
    w.sort_by(f64::total_cmp);
    // Pairs ±iω: [slow, slow, fast, fast].
    (w[0], w[3])
}

#[test]
fn mode_frequencies_match_linear_eigenvalues() {
    let p = PendulumParams::default();
    let f = mode_frequencies(&p);
    let (slow, fast) = eigen_frequencies(&p);
    assert!((f.slow - slow).abs() <= 1e-9 * slow, "{} vs {slow}", f.slow);
    assert!((f.fast - fast).abs() <= 1e-9 * fast, "{} vs {fast}", f.fast);
}

#[test]
fn free_swing_spectrum_peaks_at_mode_frequencies() {
    let p = PendulumParams::default().undamped();
    let plant = PlanarModel::new(p).unwrap();
    let opts = SimOptions {
        dt: 1e-3,
        duration: 120.0,
        ..SimOptions::default()
    };
    let x0 = PlanarState::from_degrees(5.0, -2.0).to_vector();
    let traj = Simulation::new(&plant, opts).run(x0, &mut PassiveController).unwrap();
    let rate: Vec<f64> = traj.series(|s| s.twist.w_b()).into_iter().step_by(5).collect();
    let spec = power_spectrum(&rate, 200.0).unwrap();
    let f = mode_frequencies(&p);
    assert!(spec.peaks.len() >= 2);
    let mut top: Vec<f64> = spec.peaks[..2].iter().map(|pk| pk.frequency).collect();
    top.sort_by(f64::total_cmp);
    let bin = spec.bin_width();
    assert!((top[0] - f.slow).abs() <= bin, "{} vs {}", top[0], f.slow);
    assert!((top[1] - f.fast).abs() <= bin, "{} vs {}", top[1], f.fast);
}

fn max_relative_drift(energies: &[f64]) -> f64 {
    let e0 = energies[0];
    energies.iter().map(|e| (e - e0).abs() / e0).fold(0.0, f64::max)
}

#[test]
fn undamped_planar_conserves_energy() {
    let plant = PlanarModel::new(PendulumParams::default().undamped()).unwrap();
    let x0 = PlanarState::new(0.3, -0.2, 0.1, 0.4).to_vector();
    let traj = Simulation::new(&plant, SimOptions::default()).run(x0, &mut PassiveController).unwrap();
    let drift = max_relative_drift(&traj.energies());
    assert!(drift < 1e-6, "{drift:e}");
}

#[test]
fn undamped_spatial_conserves_energy() {
    let plant = SpatialModel::new(PendulumParams::default().undamped()).unwrap();
    let x0 = SpatialState::new(Vector5::new(0.2, -0.3, 0.1, 0.25, 0.0), Vector5::new(0.1, 0.0, -0.2, 0.1, 0.3)).to_vector();
    let traj = Simulation::new(&plant, SimOptions::default()).run(x0, &mut PassiveController).unwrap();
    let drift = max_relative_drift(&traj.energies());
    assert!(drift < 1e-6, "{drift:e}");
}

/// Control evaluated on every integrator step, so the sampled wrench and
/// twist are simultaneous.
fn every_step() -> SimOptions {
    SimOptions {
        control_rate_hz: 1000.0,
        ..SimOptions::default()
    }
}

fn impulse() -> Vec<Disturbance> {
    vec![Disturbance::impulse(1.0, 0.5, BodyWrench::new(
        nalgebra::Vector3::new(80.0, 40.0, 0.0),
        nalgebra::Vector3::new(10.0, -20.0, 15.0),
    ))]
}

#[test]
fn ideal_controller_never_injects_energy() {
    let p = PendulumParams::default();
    let planar = PlanarModel::new(p).unwrap();
    let mut ideal = IdealController::new(PAPER_GAINS);
    let traj = Simulation::new(&planar, every_step())
        .with_disturbances(impulse())
        .run(PlanarState::from_degrees(5.0, 3.0).to_vector(), &mut ideal)
        .unwrap();
    assert!(traj.samples.iter().all(|s| s.control.power(&s.twist) <= 0.0));

    let spatial = SpatialModel::new(p).unwrap();
    let x0 = SpatialState::new(Vector5::new(0.1, 0.08, -0.05, 0.03, 0.2), Vector5::zeros()).to_vector();
    let traj = Simulation::new(&spatial, every_step())
        .with_disturbances(impulse())
        .run(x0, &mut ideal)
        .unwrap();
    assert!(traj.samples.iter().all(|s| s.control.power(&s.twist) <= 0.0));
}

#[test]
fn spatial_model_embeds_planar_model() {
    let p = PendulumParams::default();
    let tau = cutoff_frequency(&p).tau;
    let opts = SimOptions::default();
    let planar_d = vec![Disturbance::impulse(1.0, 0.5, BodyWrench::planar(130.0, 20.0))];
    let ps = PlanarState::new(0.08, -0.03, 0.02, 0.05);

    let planar = PlanarModel::new(p).unwrap();
    let mut c2 = ProposedController::planar(PAPER_GAINS, tau, p).unwrap();
    let a = Simulation::new(&planar, opts)
        .with_disturbances(planar_d.clone())
        .run(ps.to_vector(), &mut c2)
        .unwrap();

    let spatial = SpatialModel::new(p).unwrap();
    let mut c3 = ProposedController::spatial(PAPER_GAINS, tau, p).unwrap();
    let b = Simulation::new(&spatial, opts)
        .with_disturbances(planar_d)
        .run(SpatialState::from_planar(&ps).to_vector(), &mut c3)
        .unwrap();

    assert_eq!(a.len(), b.len());
    for (s, r) in a.samples.iter().zip(&b.samples) {
        let q = SpatialState::from_vector(&r.state);
        let want = Vector4::new(q.q[1], q.q[3], q.qdot[1], q.qdot[3]);
        assert!((s.state - want).amax() <= 1e-9, "t = {}", s.t);
        for i in [0, 2, 4] {
            assert!(q.q[i].abs() <= 1e-9 && q.qdot[i].abs() <= 1e-9, "t = {}", s.t);
        }
        assert!((s.control.force - r.control.force).amax() <= 1e-9);
        assert!((s.control.torque - r.control.torque).amax() <= 1e-9);
        assert!((s.energy - r.energy).abs() <= 1e-9);
    }
}

#[test]
fn rk4_controlled_run_converges_with_fourth_order() {
    // The proposed law introduces no discontinuity inside a control period,
    // so halving dt (at a fixed control rate) shrinks the error ~16×.
    let p = PendulumParams::default();
    let plant = PlanarModel::new(p).unwrap();
    let tau = cutoff_frequency(&p).tau;
    let run = |dt: f64| {
        let opts = SimOptions {
            dt,
            duration: 5.0,
            control_rate_hz: 10.0,
            ..SimOptions::default()
        };
        let mut c = ProposedController::planar(PAPER_GAINS, tau, p).unwrap();
        Simulation::new(&plant, opts)
            .run(PlanarState::from_degrees(6.0, -3.0).to_vector(), &mut c)
            .unwrap()
            .last()
            .unwrap()
            .state
    };
    let reference = run(1.25e-4);
    let e1 = (run(2e-2) - reference).norm();
    let e2 = (run(1e-2) - reference).norm();
    assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
}

fn state_strategy() -> impl Strategy<Value = PlanarState> {
    (-1.4..1.4f64, -1.4..1.4f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c, d)| PlanarState::new(a, b, c, d))
}

fn params_strategy() -> impl Strategy<Value = PendulumParams> {
    (1.0..50.0f64, 1.0..100.0f64, 1.0..12.0f64, 0.3..4.0f64).prop_map(|(m1, m2, l1, l2)| PendulumParams {
        m1,
        m2,
        l1,
        l2,
        ..PendulumParams::default()
    })
}

proptest! {
    #[test]
    fn mass_matrix_is_symmetric_positive_definite(s in state_strategy(), p in params_strategy()) {
        let m = planar_terms(&s, &p).mass;
        prop_assert_eq!(m[(0, 1)], m[(1, 0)]);
        prop_assert!(m.cholesky().is_some());
    }

    #[test]
    fn mass_derivative_minus_twice_coriolis_is_skew(s in state_strategy(), p in params_strategy()) {
        let h = 1e-6;
        let step = |sign: f64| PlanarState::new(s.q1 + sign * h * s.q1dot, s.q2 + sign * h * s.q2dot, s.q1dot, s.q2dot);
        let mdot = (planar_terms(&step(1.0), &p).mass - planar_terms(&step(-1.0), &p).mass) / (2.0 * h);
        let n = mdot - 2.0 * planar_terms(&s, &p).coriolis;
        let skew = n + n.transpose();
        prop_assert!(skew.amax() <= 1e-5 * (1.0 + mdot.amax()), "{}", skew);
    }

    #[test]
    fn jacobian_determinant_is_l1_cos_q2(s in state_strategy(), p in params_strategy()) {
        let det = planar_jacobian(&s, &p).determinant();
        prop_assert!((det - p.l1 * s.q2.cos()).abs() <= 1e-12 * p.l1);
    }

    #[test]
    fn energy_is_nonnegative_and_zero_only_at_rest(s in state_strategy(), p in params_strategy()) {
        prop_assert!(planar_energy(&s, &p) >= 0.0);
        prop_assert_eq!(planar_energy(&PlanarState::default(), &p), 0.0);
    }

    #[test]
    fn spatial_energy_of_embedded_state_matches_planar(s in state_strategy(), p in params_strategy()) {
        let e2 = planar_energy(&s, &p);
        let e3 = spatial_energy(&SpatialState::from_planar(&s), &p);
        prop_assert!((e2 - e3).abs() <= 1e-9 * (1.0 + e2.abs()));
    }

    #[test]
    fn mode_frequencies_match_eigenvalues_for_any_parameters(p in params_strategy()) {
        let f = mode_frequencies(&p);
        let (slow, fast) = eigen_frequencies(&p);
        prop_assert!((f.slow - slow).abs() <= 1e-8 * slow);
        prop_assert!((f.fast - fast).abs() <= 1e-8 * fast);
        prop_assert!(f.slow < f.fast);
    }

    #[test]
    fn damping_gains_accept_only_positive_values(kv in -10.0..10.0f64, kw in -10.0..10.0f64) {
        prop_assert_eq!(DampingGains::new(kv, kw).is_ok(), kv > 0.0 && kw > 0.0);
    }
}

#[test]
fn equilibrium_stays_put() {
    let plant = PlanarModel::new(PendulumParams::default()).unwrap();
    let x0 = SVector::<f64, 4>::zeros();
    let traj = Simulation::new(&plant, SimOptions::default()).run(x0, &mut PassiveController).unwrap();
    assert!(traj.samples.iter().all(|s| s.state == x0 && s.energy == 0.0));
}
