mod oracle;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use capillary1d::config::{Anchor, InitialData, SimulationConfig, Snapshots};
use capillary1d::diagnostics::{
    default_modes, gradient_bound_quantities, holder_probe, slope_threshold, snapshot_diagnostics,
    threshold_integral, weak_residual,
};
use capillary1d::galerkin::{assemble_rhs, Snapshot};
use capillary1d::model::EntropyEval;
use capillary1d::run::{execute, prepare};
use capillary1d::spectral::{Basis, DomainSpec, SpectralField};
use capillary1d::verify::reference;
use capillary1d::ModelParams;

fn basis(n: usize) -> Basis {
    Basis::new(DomainSpec::new(1.0, n, 8).unwrap()).unwrap()
}

fn snapshot(coeffs: SpectralField) -> Snapshot {
    Snapshot {
        t: 0.0,
        coeffs,
        dissipation_cum: 0.0,
        entropy_dissipation_cum: 0.0,
        weighted_cum: vec![],
    }
}

fn constant_config(value: f64) -> SimulationConfig {
    let mut c = SimulationConfig::default();
    c.domain.modes = 8;
    c.integrator.t_end = 0.5;
    c.integrator.snapshots = Snapshots::Count(5);
    c.initial_data = InitialData::Constant { value };
    c
}

#[test]
fn flat_film_record() {
    let b = basis(8);
    let p = ModelParams {
        entropy_anchor: 2.0,
        ..Default::default()
    };
    let e = EntropyEval::new(&p).unwrap();
    let r = snapshot_diagnostics(
        &snapshot(SpectralField::constant(1.0, b.domain())),
        &p,
        Some(&e),
        &b,
        1e-7,
    )
    .unwrap();
    assert_abs_diff_eq!(r.mass, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(r.energy_surface, 2.0, epsilon = 1e-14);
    assert_eq!(r.energy_delta, 0.0);
    assert_eq!(r.y_max, 0.0);
    assert_eq!(r.zero_frac, 0.0);
    assert_eq!(r.weak_residual, 0.0);
    let g1 = oracle::entropy_density(|s| s * s + 0.1, 1.0, 2.0);
    assert_relative_eq!(r.entropy, 2.0 * g1, max_relative = 1e-10);
}

#[test]
fn surface_energy_matches_quadrature_oracle() {
    let b = basis(16);
    let mut c = SpectralField::mode(1, 0.3, b.domain()).unwrap();
    c.coeffs[0] = 2f64.sqrt();
    let p = ModelParams::default();
    let r = snapshot_diagnostics(&snapshot(c.clone()), &p, None, &b, 1e-7).unwrap();
    let ux = |x: f64| oracle::series_dx(&c.coeffs, 1.0, x);
    let surface = oracle::tanh_sinh(|x| (1.0 + ux(x).powi(2)).sqrt(), -1.0, 1.0);
    let delta = 0.05 * oracle::tanh_sinh(|x| ux(x).powi(2), -1.0, 1.0);
    assert_abs_diff_eq!(r.energy_surface, surface, epsilon = 1e-13);
    assert_abs_diff_eq!(r.energy_delta, delta, epsilon = 1e-13);
    assert_abs_diff_eq!(r.mass, 2.0, epsilon = 1e-13);
    assert!(r.entropy.is_nan());
}

#[test]
fn slope_ratio_of_a_steep_profile() {
    let b = basis(4);
    let g = b.grid_len();
    let mut ux = vec![0.5; g];
    ux[7] = -3.0;
    let q = gradient_bound_quantities(&SpectralField::zeros(b.domain()), &ux, &vec![0.0; g], &b);
    assert_abs_diff_eq!(q.y_max, 3.0 / 10f64.sqrt(), epsilon = 1e-15);
    assert_eq!(q.c2, 0.0);
    assert_abs_diff_eq!(q.k, 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn unit_slopes_give_ratio_at_most_one_over_root_two() {
    let b = basis(8);
    let c = b.project_fn(|x| 0.9 * (x * 1.1).sin()).unwrap();
    let r = snapshot_diagnostics(&snapshot(c), &ModelParams::default(), None, &b, 1e-7).unwrap();
    assert!(r.ux_linf <= 1.0);
    assert!(r.y_max <= 1.0 / 2f64.sqrt());
}

#[test]
fn threshold_integral_closed_form() {
    for (y, k, l) in [(0.3, 1.5, 1.0), (0.9, 0.7, 2.0), (0.99, 3.0, 0.5)] {
        let s = (1.0f64 - y * y).sqrt();
        let exact = 0.5 * oracle::tanh_sinh(|x| 1.0 / (k * k * (l - x) + s), -l, l);
        assert_relative_eq!(threshold_integral(y, k, l), exact, max_relative = 1e-12);
    }
    assert!(threshold_integral(1.0, 1.0, 1.0).is_infinite());
    let m = slope_threshold(2.5, 1.6, 1.0);
    assert!(m > 0.0 && m < 1.0);
    assert!(threshold_integral(m, 1.6, 1.0) <= 2.5);
    assert!(threshold_integral(m + 1e-12, 1.6, 1.0) > 2.5);
}

#[test]
fn constant_runs_have_zero_residuals() {
    let run = prepare(&constant_config(0.7)).unwrap();
    let out = execute(&run, &mut []).unwrap();
    let v = &out.summary.verdicts;
    assert_eq!(v.mass_drift_rel, 0.0);
    assert_eq!(v.energy_residual_max, 0.0);
    assert_eq!(v.entropy_residual_max, Some(0.0));
    assert_eq!(v.weak_residual_max, 0.0);
    assert!(v.energy_monotone && v.nonnegative && v.gradient_bound_holds);
    assert_eq!(
        out.summary.holder.as_ref().map(|h| h.conclusive),
        Some(false)
    );
}

#[test]
fn weak_residual_vanishes_on_resolved_modes() {
    let b = basis(12);
    let p = ModelParams::default();
    let c = b
        .project_fn(|x| 1.0 + 0.3 * (1.3 * x).sin() + 0.1 * x * x)
        .unwrap();
    let modes = default_modes(12);
    let w = weak_residual(&c.coeffs, None, &p, &b, &modes, 1e-7).unwrap();
    assert_eq!(w.modes, modes);
    assert!(
        w.max_within(12) <= 1e-12 * w.scale.max(1.0),
        "{:e}",
        w.max_within(12)
    );
    let tail = w.get(13).unwrap().abs();
    assert!(tail > 1e3 * w.max_within(12));

    // A wrong time derivative shows up in the resolved modes.
    let mut dc = assemble_rhs(&c, &p, &b).unwrap().coeffs;
    dc[2] += 1e-3;
    let w = weak_residual(&c.coeffs, Some(&dc), &p, &b, &modes, 1e-7).unwrap();
    assert_relative_eq!(w.get(2).unwrap(), 1e-3, max_relative = 1e-6);
}

#[test]
fn holder_probe_on_smooth_and_steady_runs() {
    let run = prepare(&reference::smooth(16, 0.01)).unwrap();
    let out = execute(&run, &mut []).unwrap();
    let h = holder_probe(&out.result.snapshots, &run.basis).unwrap();
    assert!(h.conclusive);
    assert!(h.exponent_time.unwrap() >= 0.125);
    assert!(h.exponent_space.unwrap() >= 0.5);

    let flat_run = prepare(&constant_config(1.0)).unwrap();
    let flat = execute(&flat_run, &mut []).unwrap();
    let h = holder_probe(&flat.result.snapshots, &flat_run.basis).unwrap();
    assert!(!h.conclusive);
}

#[test]
fn cubic_mobility_keeps_positive_data_positive() {
    let mut c = constant_config(1.0);
    c.domain.modes = 16;
    c.model.n = 3.0;
    c.model.epsilon = 0.0;
    c.model.entropy_anchor = Anchor::Value(2.0);
    c.integrator.t_end = 0.05;
    c.initial_data = InitialData::CosineBump {
        base: 0.05,
        amplitude: 1.0,
    };
    let out = execute(&prepare(&c).unwrap(), &mut []).unwrap();
    let pos = &out.summary.positivity;
    assert_eq!(pos.strictly_positive, Some(true));
    assert_eq!(pos.zero_set_negligible, Some(true));
    assert!(pos.nonnegative);
}

/// Linear mobility with droplet data: the minimum dips below zero at finite
/// epsilon, and the dip shrinks as epsilon decreases.
#[test]
fn linear_mobility_droplet_negativity_shrinks_with_epsilon() {
    let mins: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|eps| {
            let mut c = reference::droplet();
            c.model.n = 1.0;
            c.model.epsilon = *eps;
            let out = execute(&prepare(&c).unwrap(), &mut []).unwrap();
            println!("eps {eps:e}: min u {:e}", out.summary.positivity.global_min);
            out.summary.positivity.global_min
        })
        .collect();
    let negative_part: Vec<f64> = mins.iter().map(|m| (-m).max(0.0)).collect();
    assert!(negative_part.windows(2).all(|w| w[1] <= w[0]), "{mins:?}");
}
