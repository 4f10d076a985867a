#![allow(clippy::needless_range_loop)]

mod oracle;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use capillary1d::galerkin::{assemble_rhs, simulate, IntegratorSpec, SimulationOptions};
use capillary1d::spectral::{Basis, DomainSpec, SpectralField};
use capillary1d::{ModelParams, PressureMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn basis(n: usize) -> Basis {
    Basis::new(DomainSpec::new(1.0, n, 8).unwrap()).unwrap()
}

fn linear_constant(mu: f64, delta: f64) -> ModelParams {
    ModelParams {
        delta,
        pressure_mode: PressureMode::Linear,
        constant_mobility: Some(mu),
        ..Default::default()
    }
}

fn run(u0: &SpectralField, spec: &IntegratorSpec, p: &ModelParams, b: &Basis) -> Vec<Vec<f64>> {
    simulate(u0, spec, p, b, &SimulationOptions::default(), &mut [])
        .unwrap()
        .snapshots
        .into_iter()
        .map(|s| s.coeffs.coeffs)
        .collect()
}

#[test]
fn flat_film_is_steady() {
    let b = basis(8);
    let u0 = SpectralField::constant(0.6, b.domain());
    let p = ModelParams::default();
    let dc = assemble_rhs(&u0, &p, &b).unwrap();
    assert!(dc.coeffs.iter().all(|v| *v == 0.0));
    for c in run(&u0, &IntegratorSpec::adaptive(1.0, 4), &p, &b) {
        assert_eq!(c, u0.coeffs);
    }
}

#[test]
fn linear_constant_mobility_rhs_is_diagonal() {
    let b = basis(8);
    let d = b.domain();
    let (mu, delta) = (0.7, 0.25);
    let mut c = vec![1.0; 9];
    for (j, v) in c.iter_mut().enumerate().skip(1) {
        *v = 0.3 / j as f64;
    }
    let dc = assemble_rhs(
        &SpectralField::new(c.clone()).unwrap(),
        &linear_constant(mu, delta),
        &b,
    )
    .unwrap();
    for j in 0..=8 {
        let expected = -mu * (1.0 + delta) * d.eigenvalue(j).powi(2) * c[j];
        assert_abs_diff_eq!(
            dc.coeffs[j],
            expected,
            epsilon = 1e-10 * expected.abs().max(1.0)
        );
    }
}

#[test]
fn mass_mode_has_zero_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(oracle::seed());
    let b = basis(12);
    for _ in 0..20 {
        let mut c: Vec<f64> = (0..=12)
            .map(|j| rng.gen_range(-0.3..0.3) / (1.0 + j as f64))
            .collect();
        c[0] = rng.gen_range(0.8..1.5);
        let dc =
            assemble_rhs(&SpectralField::new(c).unwrap(), &ModelParams::default(), &b).unwrap();
        assert_eq!(dc.coeffs[0], 0.0);
    }
}

#[test]
fn single_mode_decays_exponentially() {
    let b = basis(8);
    let p = linear_constant(1.0, 0.1);
    let rate = 1.1 * b.domain().eigenvalue(1).powi(2);
    let c1 = 0.1;
    let mut u0 = SpectralField::mode(1, c1, b.domain()).unwrap();
    u0.coeffs[0] = 2f64.sqrt();
    // Amplitude drops by a factor of ten at t_end.
    let t_end = 10f64.ln() / rate;
    let mut spec = IntegratorSpec::adaptive(t_end, 5);
    spec.rtol = 1e-10;
    spec.atol = 1e-13;
    let snaps = simulate(&u0, &spec, &p, &b, &SimulationOptions::default(), &mut []).unwrap();
    for s in &snaps.snapshots {
        let exact = c1 * (-rate * s.t).exp();
        assert_relative_eq!(s.coeffs.coeffs[1], exact, max_relative = 1e-6);
        assert!(s.coeffs.coeffs[2..].iter().all(|v| v.abs() < 1e-12));
    }
    assert_relative_eq!(
        snaps.final_snapshot().coeffs.coeffs[1],
        c1 / 10.0,
        max_relative = 1e-6
    );
}

#[test]
fn fixed_step_rk4_converges_at_fourth_order() {
    let b = basis(4);
    let p = ModelParams::default();
    let u0 = SpectralField::new(vec![1.2, 0.3, -0.15, 0.05, 0.02]).unwrap();
    let t_end = 0.04;
    let finals: Vec<Vec<f64>> = [4e-4, 2e-4, 1e-4]
        .iter()
        .map(|dt| {
            run(&u0, &IntegratorSpec::fixed(*dt, t_end, 1), &p, &b)
                .pop()
                .unwrap()
        })
        .collect();
    let diff = |a: &[f64], c: &[f64]| {
        a.iter()
            .zip(c)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let e1 = diff(&finals[0], &finals[1]);
    let e2 = diff(&finals[1], &finals[2]);
    let order = (e1 / e2).log2();
    assert!(
        (3.6..4.4).contains(&order),
        "observed order {order} ({e1:e}, {e2:e})"
    );
}

#[test]
fn adaptive_run_conserves_mass() {
    let b = basis(16);
    let p = ModelParams::default();
    let u0 = b
        .project_fn(|x| 0.6 + 0.3 * (2.0 * x).cos() + 0.1 * x * x * x)
        .unwrap();
    let mass0 = u0.mass(b.domain());
    let result = simulate(
        &u0,
        &IntegratorSpec::adaptive(0.05, 5),
        &p,
        &b,
        &SimulationOptions::default(),
        &mut [],
    )
    .unwrap();
    assert!(result.stats.accepted > 0);
    for s in &result.snapshots {
        assert_abs_diff_eq!(s.coeffs.mass(b.domain()), mass0, epsilon = 1e-12);
    }
    // Energy decreases along a nonconstant trajectory.
    assert!(result
        .snapshots
        .windows(2)
        .all(|w| w[1].dissipation_cum >= w[0].dissipation_cum));
}

#[test]
fn snapshot_times_are_hit_exactly() {
    let b = basis(6);
    let mut spec = IntegratorSpec::adaptive(0.3, 1);
    spec.snapshot_times = vec![0.0, 0.013, 0.1, 0.3];
    let u0 = b.project_fn(|x| 1.0 + 0.2 * x).unwrap();
    let r = simulate(
        &u0,
        &spec,
        &ModelParams::default(),
        &b,
        &SimulationOptions::default(),
        &mut [],
    )
    .unwrap();
    let t: Vec<f64> = r.snapshots.iter().map(|s| s.t).collect();
    assert_eq!(t, spec.snapshot_times);
}

#[test]
fn invalid_integrator_settings_are_rejected() {
    let b = basis(4);
    let u0 = SpectralField::constant(1.0, b.domain());
    let mut spec = IntegratorSpec::fixed(0.0, 1.0, 2);
    assert!(simulate(
        &u0,
        &spec,
        &ModelParams::default(),
        &b,
        &SimulationOptions::default(),
        &mut []
    )
    .is_err());
    spec = IntegratorSpec::adaptive(1.0, 2);
    spec.snapshot_times = vec![0.0, 2.0];
    assert!(simulate(
        &u0,
        &spec,
        &ModelParams::default(),
        &b,
        &SimulationOptions::default(),
        &mut []
    )
    .is_err());
    let short = SpectralField::new(vec![1.0, 0.0]).unwrap();
    assert!(simulate(
        &short,
        &IntegratorSpec::adaptive(1.0, 2),
        &ModelParams::default(),
        &b,
        &SimulationOptions::default(),
        &mut []
    )
    .is_err());
}
