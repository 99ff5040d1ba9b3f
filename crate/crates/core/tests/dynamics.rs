use std::f64::consts::PI;

use aircombat::flightdyn::{rk4_unclamped, step, AircraftState, ControlInput, PhysicsConstants, MAX_GAMMA};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = AircraftState<f64>> {
    (-1e5..1e5f64, -1e5..1e5f64, 0.0..15_000.0f64, 250.0..=400.0f64, -MAX_GAMMA..=MAX_GAMMA, -PI..=PI).prop_map(
        |(x, y, z, v, gamma, psi)| AircraftState { x, y, z, v, gamma, psi: if psi == -PI { PI } else { psi } },
    )
}

fn control() -> impl Strategy<Value = ControlInput<f64>> {
    (-1.0..=2.0f64, 0.0..=8.0f64, -PI..=PI).prop_map(|(nx, nz, mu)| ControlInput::new(nx, nz, mu))
}

proptest! {
    #[test]
    fn step_preserves_state_invariants(s in state(), c in control()) {
        let consts = PhysicsConstants::default();
        let mut x = s;
        for _ in 0..consts.substeps().unwrap() * 5 {
            x = step(&x, &c, &consts);
            prop_assert!(x.is_valid(), "{x:?}");
            prop_assert!(x.gamma.abs() <= MAX_GAMMA);
        }
    }

    #[test]
    fn step_is_bit_deterministic(s in state(), c in control()) {
        let consts = PhysicsConstants::default();
        let a = step(&s, &c, &consts);
        let b = step(&s, &c, &consts);
        prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
        prop_assert_eq!(a.psi.to_bits(), b.psi.to_bits());
        prop_assert_eq!(a, b);
    }
}

/// Error at t = 2 s of RK4 with step `dt` against a much finer RK4 solution.
fn rk4_error(s0: &AircraftState<f64>, c: &ControlInput<f64>, dt: f64, reference: &AircraftState<f64>) -> f64 {
    let n = (2.0 / dt).round() as usize;
    let mut s = *s0;
    for _ in 0..n {
        s = rk4_unclamped(&s, c, 9.81, dt);
    }
    [s.x - reference.x, s.y - reference.y, s.z - reference.z, s.v - reference.v]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
        .max((s.gamma - reference.gamma).abs() * 1000.0)
        .max((s.psi - reference.psi).abs() * 1000.0)
}

#[test]
fn halving_the_step_reduces_error_at_least_eightfold() {
    let cases = [
        (AircraftState { x: 0.0, y: 0.0, z: 6000.0, v: 300.0, gamma: 0.1, psi: 0.3 }, ControlInput::new(1.0, 4.0, 1.0)),
        (AircraftState { x: 0.0, y: 0.0, z: 6000.0, v: 380.0, gamma: -0.2, psi: -2.0 }, ControlInput::new(-0.5, 6.0, -2.5)),
        (AircraftState { x: 0.0, y: 0.0, z: 6000.0, v: 260.0, gamma: 0.4, psi: 3.0 }, ControlInput::new(2.0, 2.0, 0.4)),
    ];
    for (s0, c) in cases {
        let fine_dt = 0.2 / 256.0;
        let mut reference = s0;
        for _ in 0..(2.0 / fine_dt) as usize {
            reference = rk4_unclamped(&reference, &c, 9.81, fine_dt);
        }
        let coarse = rk4_error(&s0, &c, 0.2, &reference);
        let half = rk4_error(&s0, &c, 0.1, &reference);
        assert!(coarse / half >= 8.0, "ratio {} ({coarse:e} -> {half:e})", coarse / half);
    }
}

#[test]
fn level_flight_holds_altitude_and_speed_over_a_minute() {
    let consts = PhysicsConstants::<f64>::default();
    let mut s = AircraftState { x: 0.0, y: 0.0, z: 8000.0, v: 300.0, gamma: 0.0, psi: 0.7 };
    for _ in 0..3000 {
        s = step(&s, &ControlInput::level(), &consts);
    }
    assert_eq!((s.z, s.v, s.gamma), (8000.0, 300.0, 0.0));
    let travelled = s.x.hypot(s.y);
    assert!((travelled - 18_000.0).abs() < 1e-6, "{travelled}");
}

#[test]
fn coordinated_turn_closes_a_circle() {
    // Level turn: nz cos(mu) = 1 keeps gamma at zero.
    let consts = PhysicsConstants::<f64>::default();
    let mu: f64 = 1.2;
    let c = ControlInput::new(0.0, 1.0 / mu.cos(), mu);
    let mut s = AircraftState { x: 0.0, y: 0.0, z: 8000.0, v: 300.0, gamma: 0.0, psi: 0.0 };
    let rate = 9.81 * mu.tan() / 300.0;
    let period = 2.0 * PI / rate;
    let n = (period / consts.dt_physics).round() as usize;
    for _ in 0..n {
        s = step(&s, &c, &consts);
    }
    let radius = 300.0 / rate;
    // Back near the start after one revolution (within one step of travel).
    assert!(s.x.hypot(s.y) < 10.0, "{s:?} radius {radius}");
    assert!(s.gamma.abs() < 1e-9);
}
