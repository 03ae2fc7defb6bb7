use std::f64::consts::PI;
use std::sync::Arc;

use rotgn::algebra::TimeJet;
use rotgn::coefficients::{gbbm_velocity_family, rch_parameters, surface_family, PhysicalParams, Transcription};
use rotgn::grid::{Backend, Field, Grid, GridSpec};
use rotgn::rch::ScalarModel;
use rotgn::time::TimeGrid;
use rotgn::Error;

fn grid(n: usize, length: f64) -> Arc<Grid<f64>> {
    Grid::new(GridSpec {
        n,
        length,
        backend: Backend::Fourier,
        dealias: true,
    })
    .unwrap()
}

fn params(epsilon: f64, mu: f64, omega: f64) -> PhysicalParams {
    PhysicalParams {
        epsilon,
        mu,
        omega,
        ..PhysicalParams::default()
    }
}

fn rch(epsilon: f64, mu: f64, omega: f64, g: &Arc<Grid<f64>>) -> ScalarModel<f64> {
    ScalarModel::new(rch_parameters(omega).unwrap(), params(epsilon, mu, omega), g.clone()).unwrap()
}

fn pulse(g: &Arc<Grid<f64>>, amp: f64, width: f64) -> Field<f64> {
    let x0 = g.length() / 2.0;
    Field::from_fn(g, |x| amp / ((x - x0) / width).cosh().powi(2))
}

#[test]
fn zero_field_has_zero_rhs_and_stays_zero() {
    let g = grid(64, 20.0);
    let m = rch(0.1, 0.01, 0.5, &g);
    let z = Field::zeros(&g);
    assert_eq!(m.rhs(&z).unwrap().max_abs(), 0.0);
    assert_eq!(m.step_rk4(&z, 0.01).unwrap().max_abs(), 0.0);
}

#[test]
fn constant_field_is_stationary_without_small_parameters() {
    let g = grid(64, 20.0);
    let m = rch(0.0, 0.0, 0.5, &g);
    let w = Field::constant(&g, 0.7);
    assert!(m.rhs(&w).unwrap().max_abs() < 1e-14);
}

#[test]
fn linear_phase_speed_matches_dispersion_relation() {
    let g = grid(64, 2.0 * PI);
    for omega in [0.0, 0.5] {
        let m = rch(0.0, 0.05, omega, &g);
        let set = rch_parameters(omega).unwrap().rch.unwrap();
        for k in [1.0, 2.0, 4.0] {
            let expect = (set.c + set.beta0 * 0.05 * k * k) / (1.0 + set.beta_rch * 0.05 * k * k);
            assert!((m.linear_phase_speed(k) - expect).abs() < 1e-14);
            let w0 = Field::from_fn(&g, |x| (k * x).sin());
            let period = 2.0 * PI / (k * expect);
            let traj = m
                .integrate(&w0, &TimeGrid { t_end: period, dt: 1e-3, dt_out: period })
                .unwrap();
            let w1 = traj.states.last().unwrap();
            assert!((w1 - &w0).max_abs() < 1e-6, "k = {k}, omega = {omega}");
        }
    }
}

#[test]
fn reverse_step_recovers_state_to_fifth_order() {
    let g = grid(128, 30.0);
    let m = rch(0.2, 0.04, 0.5, &g);
    let w = pulse(&g, 1.0, 2.0);
    let err = |dt: f64| {
        let back = m.step_rk4(&m.step_rk4(&w, dt).unwrap(), -dt).unwrap();
        (&back - &w).max_abs()
    };
    let (e1, e2) = (err(0.08), err(0.04));
    assert!(e1 < 1e-6);
    assert!(e1 / e2 > 20.0, "ratio {}", e1 / e2);
}

#[test]
fn rk4_self_convergence_order() {
    let g = grid(128, 30.0);
    let m = rch(0.2, 0.04, 0.5, &g);
    let w0 = pulse(&g, 1.0, 2.0);
    let run = |dt: f64| {
        m.integrate(&w0, &TimeGrid { t_end: 2.0, dt, dt_out: 2.0 })
            .unwrap()
            .states
            .pop()
            .unwrap()
    };
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let order = ((&a - &b).max_abs() / (&b - &c).max_abs()).log2();
    assert!((3.7..=4.3).contains(&order), "order {order}");
}

#[test]
fn mass_is_conserved() {
    let g = grid(256, 40.0);
    for set in [
        rch_parameters(0.5).unwrap(),
        gbbm_velocity_family(0.25, -0.2, 0.05).unwrap(),
        surface_family(0.5, -0.2, Transcription::Consistent).unwrap(),
    ] {
        let m = ScalarModel::new(set, params(0.3, 0.05, 0.5), g.clone()).unwrap();
        let w0 = pulse(&g, 1.0, 2.0);
        let traj = m.integrate(&w0, &TimeGrid { t_end: 5.0, dt: 0.02, dt_out: 1.0 }).unwrap();
        let m0 = m.diagnostics(&w0).unwrap().mass;
        for w in &traj.states {
            let mass = m.diagnostics(w).unwrap().mass;
            assert!(((mass - m0) / m0).abs() < 1e-10);
        }
    }
}

#[test]
fn quadratic_invariant_is_nearly_conserved_for_canonical_rch() {
    let g = grid(256, 40.0);
    let m = rch(1e-4, 1e-3, 0.0, &g);
    let w0 = pulse(&g, 1.0, 2.0);
    let traj = m.integrate(&w0, &TimeGrid { t_end: 10.0, dt: 0.02, dt_out: 1.0 }).unwrap();
    let i0 = m.diagnostics(&w0).unwrap().h1_invariant;
    let drift = traj
        .states
        .iter()
        .map(|w| ((m.diagnostics(w).unwrap().h1_invariant - i0) / i0).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "drift {drift}");
}

#[test]
fn zero_horizon_returns_initial_state() {
    let g = grid(64, 20.0);
    let m = rch(0.1, 0.01, 0.0, &g);
    let w0 = pulse(&g, 0.5, 2.0);
    let traj = m.integrate(&w0, &TimeGrid { t_end: 0.0, dt: 0.01, dt_out: 0.1 }).unwrap();
    assert_eq!(traj.times, vec![0.0]);
    assert_eq!(traj.states[0].values(), w0.values());
}

#[test]
fn step_above_cfl_limit_is_rejected() {
    let g = grid(64, 20.0);
    let m = rch(0.1, 0.01, 0.0, &g);
    let w = pulse(&g, 0.5, 2.0);
    let limit = m.cfl_limit(&w);
    assert!(matches!(m.step_rk4(&w, 2.0 * limit), Err(Error::CflViolation { .. })));
}

#[test]
fn strong_rotation_rch_is_not_evolvable() {
    let g = grid(64, 20.0);
    let omega = 1.875;
    let r = ScalarModel::new(rch_parameters(omega).unwrap(), params(0.1, 0.01, omega), g);
    assert!(matches!(r, Err(Error::NonEvolvable)));
}

#[test]
fn runs_are_bitwise_deterministic() {
    let g = grid(128, 30.0);
    let m = rch(0.2, 0.04, 0.5, &g);
    let w0 = pulse(&g, 1.0, 2.0);
    let tg = TimeGrid { t_end: 1.0, dt: 0.05, dt_out: 0.5 };
    let a = m.integrate(&w0, &tg).unwrap();
    let b = m.integrate(&w0, &tg).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert_eq!(x.values(), y.values());
    }
}

#[test]
fn jet_evaluation_gives_second_time_derivative() {
    let g = grid(128, 30.0);
    let m = rch(0.2, 0.04, 0.5, &g);
    let w = pulse(&g, 1.0, 2.0);
    let wt = m.rhs(&w).unwrap();
    let jet = m.rhs(&TimeJet::new(vec![w.clone(), wt.clone()])).unwrap();
    assert!((jet.derivative(0) - &wt).max_abs() < 1e-14);
    let h = 1e-5;
    let fd = &m.rhs(&w.axpy(h, &wt)).unwrap() - &m.rhs(&w.axpy(-h, &wt)).unwrap();
    let fd = fd.scale(0.5 / h);
    assert!((jet.derivative(1) - &fd).max_abs() < 1e-7);
}
