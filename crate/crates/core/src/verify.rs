//! Built-in reference configurations and the acceptance checks run by
//! `capillary1d verify`.
//!
//! Reports contain no timings, so repeated runs produce identical bytes.
//! Runtime budgets are recorded as booleans.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Anchor, InitialData, SimulationConfig, Snapshots};
use crate::diagnostics::{
    energy_identity_residual, energy_monotone, entropy_identity_residual, snapshot_fields,
    weak_residual, DiagnosticsRecord, WeakResidualMonitor,
};
use crate::error::Result;
use crate::experiments::{
    curvature_profile_study, run_sweep, SweepParameter, SweepSpec, PLATEAU_FACTOR, SLOPE_MARGIN,
};
use crate::galerkin::Observer;
use crate::io::write_json;
use crate::model::PressureMode;
use crate::run::{execute, prepare, series_table, RunOutcome, MASS_TOLERANCE};

/// Reference configurations.
pub mod reference {
    use super::*;

    fn base(modes: usize, t_end: f64, snapshots: usize) -> SimulationConfig {
        let mut c = SimulationConfig::default();
        c.domain.modes = modes;
        c.integrator.t_end = t_end;
        c.integrator.snapshots = Snapshots::Count(snapshots);
        c
    }

    /// `u0 = 1 + 0.3 sin(pi x / 2) + 0.2 cos(pi x)` on `(-1, 1)`, with
    /// `n = 2`, `delta = eps = 0.1`, `eta = 0`, `a = 3`.
    pub fn smooth(modes: usize, t_end: f64) -> SimulationConfig {
        let mut c = base(modes, t_end, 10);
        c.model.entropy_anchor = Anchor::Value(3.0);
        c.initial_data = InitialData::Coeffs {
            values: vec![std::f64::consts::SQRT_2, -0.3, -0.2],
        };
        c
    }

    /// Linear pressure with constant mobility `mu = 1`; every mode decays
    /// independently at rate `(1 + delta) lambda_j^2`.
    pub fn linear_constant_mobility() -> SimulationConfig {
        let mut c = base(8, 1.0, 1);
        c.model.pressure_mode = PressureMode::Linear;
        c.model.constant_mobility = Some(1.0);
        c.integrator.rtol = 1e-10;
        c.integrator.atol = 1e-13;
        c.initial_data = InitialData::Coeffs {
            values: vec![std::f64::consts::SQRT_2, 0.1, 0.1, 0.1],
        };
        let times: Vec<f64> = (1..=3).rev().map(|j| linear_decay_time(&c, j)).collect();
        c.integrator.t_end = times[2];
        c.integrator.snapshots = Snapshots::Times(times);
        c
    }

    /// `1 / (mu (1 + delta) lambda_j^2)`.
    pub fn linear_decay_time(c: &SimulationConfig, j: usize) -> f64 {
        let lambda = (j as f64 * std::f64::consts::PI / (2.0 * c.domain.l)).powi(2);
        1.0 / (c.model.constant_mobility.unwrap_or(1.0) * (1.0 + c.model.delta) * lambda * lambda)
    }

    /// Cosine bump `(1 + cos(pi x)) / 2` touching zero at the boundary, `n = 1.5`.
    pub fn contact(epsilon: f64) -> SimulationConfig {
        let mut c = base(16, 0.1, 10);
        c.model.n = 1.5;
        c.model.epsilon = epsilon;
        c.initial_data = InitialData::CosineBump {
            base: 0.0,
            amplitude: 1.0,
        };
        c
    }

    /// `u0 = 1 + 0.3 e_1` with `eps = 1`; `T` is the time at which the
    /// linearised decay `0.3 exp(-m(1) (1 + delta) lambda_1^2 t)` reaches `1e-6`.
    pub fn steady_state() -> SimulationConfig {
        let mut c = base(8, 1.0, 10);
        c.model.epsilon = 1.0;
        c.initial_data = InitialData::Coeffs {
            values: vec![std::f64::consts::SQRT_2, 0.3],
        };
        let lambda = (std::f64::consts::PI / 2.0).powi(2);
        let m = 1.0 / (1.0 + c.model.eta) + c.model.epsilon;
        c.integrator.t_end = (0.3f64 / 1e-6).ln() / (m * (1.0 + c.model.delta) * lambda * lambda);
        c
    }

    /// Droplet `1e-6 + ((1 + cos(pi x)) / 2)^2` with `eps = 0.01`.
    pub fn droplet() -> SimulationConfig {
        let mut c = base(16, 0.01, 10);
        c.model.epsilon = 0.01;
        c.initial_data = InitialData::Droplet {
            amplitude: 1.0,
            power: 2,
            floor: 1e-6,
        };
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    /// Sweep worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Extend the epsilon-sweep by one decade.
    pub deep: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        for c in &self.criteria {
            s.push_str(&format!(
                "{:>2}  {:<4}  {:<34}  {}\n",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.summary
            ));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("verify_report.json"), self)
    }
}

/// `max_t |M(t) - M(0)| / |M(0)|`.
pub fn mass_drift(masses: &[f64]) -> f64 {
    let m0 = masses.first().copied().unwrap_or(0.0);
    masses.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.abs().max(f64::MIN_POSITIVE)
}

struct TimedRun {
    label: String,
    outcome: RunOutcome,
    within_budget: bool,
}

const RUN_BUDGET_SECONDS: f64 = 30.0;
const SWEEP_BUDGET_SECONDS: f64 = 300.0;

fn timed(
    label: &str,
    config: &SimulationConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<TimedRun> {
    let start = Instant::now();
    let run = prepare(config)?;
    let outcome = execute(&run, observers)?;
    Ok(TimedRun {
        label: label.to_string(),
        outcome,
        within_budget: start.elapsed().as_secs_f64() <= RUN_BUDGET_SECONDS,
    })
}

fn masses(records: &[DiagnosticsRecord]) -> Vec<f64> {
    records.iter().map(|r| r.mass).collect()
}

fn criterion(
    id: u32,
    name: &str,
    passed: bool,
    summary: String,
    details: Value,
) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        passed,
        summary,
        details,
    }
}

fn failed(id: u32, name: &str, err: crate::Error) -> CriterionResult {
    criterion(
        id,
        name,
        false,
        format!("aborted: {err}"),
        json!({ "error": err.kind(), "message": err.to_string() }),
    )
}

/// Runs criteria 1 to 10.
pub fn run_verification(opts: VerifyOptions) -> VerifyReport {
    let mut runs: Vec<TimedRun> = Vec::new();
    let mut out = Vec::new();
    let mut extra_mass: Vec<(String, f64, bool)> = Vec::new();

    out.push(energy_criterion(&mut runs).unwrap_or_else(|e| failed(2, ENERGY, e)));
    out.push(linear_criterion(&mut runs).unwrap_or_else(|e| failed(3, LINEAR, e)));
    let (c4, c9) = entropy_and_weak_criteria(&mut runs)
        .unwrap_or_else(|e| (failed(4, ENTROPY, e.clone()), failed(9, WEAK, e)));
    out.push(c4);
    out.push(
        positivity_criterion(opts, &mut extra_mass).unwrap_or_else(|e| failed(5, POSITIVITY, e)),
    );
    out.push(slope_criterion(opts, &mut extra_mass).unwrap_or_else(|e| failed(6, SLOPE, e)));
    out.push(steady_criterion(&mut runs).unwrap_or_else(|e| failed(7, STEADY, e)));
    out.push(profile_criterion(opts, &mut extra_mass).unwrap_or_else(|e| failed(8, PROFILE, e)));
    out.push(c9);
    out.push(determinism_criterion().unwrap_or_else(|e| failed(10, DETERMINISM, e)));

    let mut per_run: Vec<(String, f64, bool)> = runs
        .iter()
        .map(|r| {
            (
                r.label.clone(),
                mass_drift(&masses(&r.outcome.records)),
                r.within_budget,
            )
        })
        .collect();
    per_run.extend(extra_mass);
    let worst = per_run.iter().map(|r| r.1).fold(0.0, f64::max);
    let budget = per_run.iter().all(|r| r.2);
    let passed = !per_run.is_empty() && worst <= MASS_TOLERANCE && budget;
    out.insert(
        0,
        criterion(
            1,
            MASS,
            passed,
            format!("max relative drift {worst:.2e} <= {MASS_TOLERANCE:.0e} over {} runs", per_run.len()),
            json!({
                "runs": per_run.iter().map(|r| json!({"run": r.0, "relative_drift": r.1, "within_runtime_budget": r.2})).collect::<Vec<_>>(),
                "tolerance": MASS_TOLERANCE,
            }),
        ),
    );
    let all_passed = out.iter().all(|c| c.passed);
    VerifyReport {
        criteria: out,
        all_passed,
    }
}

const MASS: &str = "mass conservation";
const ENERGY: &str = "energy identity";
const LINEAR: &str = "linear constant-mobility decay";
const ENTROPY: &str = "entropy estimate";
const POSITIVITY: &str = "nonnegativity";
const SLOPE: &str = "uniform slope bound";
const STEADY: &str = "steady state";
const PROFILE: &str = "curvature profile contrast";
const WEAK: &str = "Galerkin weak residual";
const DETERMINISM: &str = "determinism";

fn energy_criterion(runs: &mut Vec<TimedRun>) -> Result<CriterionResult> {
    let mut results = Vec::new();
    for (rtol, atol) in [(1e-8, 1e-10), (1e-9, 1e-11)] {
        let mut c = reference::smooth(16, 0.05);
        c.integrator.rtol = rtol;
        c.integrator.atol = atol;
        let r = timed(&format!("energy rtol={rtol:e}"), &c, &mut [])?;
        let e0 = r.outcome.records[0].energy();
        let res = energy_identity_residual(&r.outcome.records).max_abs;
        let mono = energy_monotone(&r.outcome.records, 1e-6 * e0);
        results.push((rtol, e0, res, mono));
        runs.push(r);
    }
    let (_, e0, coarse, mono_a) = results[0];
    let (_, _, fine, mono_b) = results[1];
    let ratio = coarse / fine;
    let passed = coarse <= 1e-6 * e0 && ratio >= 4.0 && mono_a && mono_b;
    Ok(criterion(
        2,
        ENERGY,
        passed,
        format!(
            "residual {:.2e} E(0) at rtol 1e-8, {ratio:.1}x smaller at 1e-9",
            coarse / e0
        ),
        json!({
            "e0": e0,
            "residual_rtol_1e-8": coarse,
            "residual_rtol_1e-9": fine,
            "reduction": ratio,
            "monotone": mono_a && mono_b,
            "tolerance_relative": 1e-6,
            "required_reduction": 4.0,
        }),
    ))
}

fn linear_criterion(runs: &mut Vec<TimedRun>) -> Result<CriterionResult> {
    let c = reference::linear_constant_mobility();
    let r = timed("linear oracle", &c, &mut [])?;
    let c0 = &r.outcome.result.snapshots[0].coeffs.coeffs;
    let mut modes = Vec::new();
    let mut worst = 0.0f64;
    for j in 1..=3usize {
        let t = reference::linear_decay_time(&c, j);
        let snap = r
            .outcome
            .result
            .snapshots
            .iter()
            .find(|s| s.t == t)
            .ok_or_else(|| crate::Error::Experiment(format!("no snapshot at t = {t}")))?;
        let mu = c.model.constant_mobility.unwrap_or(1.0);
        let lambda = (j as f64 * std::f64::consts::PI / (2.0 * c.domain.l)).powi(2);
        let exact = c0[j] * (-mu * (1.0 + c.model.delta) * lambda * lambda * t).exp();
        let rel = (snap.coeffs.coeffs[j] - exact).abs() / exact.abs();
        worst = worst.max(rel);
        modes.push(json!({"mode": j, "t": t, "computed": snap.coeffs.coeffs[j], "exact": exact, "relative_error": rel}));
    }
    runs.push(r);
    Ok(criterion(
        3,
        LINEAR,
        worst <= 1e-6,
        format!("max relative error {worst:.2e} <= 1e-6 (modes 1-3)"),
        json!({"modes": modes, "tolerance": 1e-6}),
    ))
}

fn entropy_and_weak_criteria(
    runs: &mut Vec<TimedRun>,
) -> Result<(CriterionResult, CriterionResult)> {
    let mut rows = Vec::new();
    let mut weak_rows = Vec::new();
    let mut all_bounded = true;
    let mut steps_ok = true;
    let mut residuals = Vec::new();
    let mut tail = Vec::new();
    for modes in [8usize, 16, 32] {
        let c = reference::smooth(modes, 0.01);
        let prepared = prepare(&c)?;
        let mut monitor = WeakResidualMonitor::new(
            prepared.params,
            &prepared.basis,
            prepared.tolerances.tol_zero,
        );
        let start = Instant::now();
        let outcome = execute(&prepared, &mut [&mut monitor])?;
        let within_budget = start.elapsed().as_secs_f64() <= RUN_BUDGET_SECONDS;
        if let Some(e) = monitor.error.take() {
            return Err(e);
        }
        let rec = &outcome.records;
        let s0 = rec[0].entropy;
        let smax = rec
            .iter()
            .map(|r| r.entropy)
            .fold(f64::NEG_INFINITY, f64::max);
        let bounded = smax <= s0 * (1.0 + 1e-3);
        all_bounded &= bounded;
        let res = entropy_identity_residual(rec)?.max_abs;
        residuals.push(res);
        rows.push(json!({"N": modes, "entropy_initial": s0, "entropy_max": smax, "bounded": bounded, "identity_residual": res}));

        let last = outcome.result.final_snapshot();
        let r_next = weak_residual(
            &last.coeffs.coeffs,
            None,
            &prepared.params,
            &prepared.basis,
            &[modes + 1],
            prepared.tolerances.tol_zero,
        )?
        .residual[0]
            .abs();
        tail.push(r_next);
        let ok = monitor.max_relative <= 1e-11;
        steps_ok &= ok;
        weak_rows.push(json!({
            "N": modes,
            "steps_checked": monitor.steps,
            "max_relative_residual": monitor.max_relative,
            "abs_r_next_at_T": r_next,
        }));
        runs.push(TimedRun {
            label: format!("smooth N={modes}"),
            outcome,
            within_budget,
        });
    }
    let shrinking = residuals.windows(2).all(|w| w[1] < w[0]);
    let c4 = criterion(
        4,
        ENTROPY,
        all_bounded && shrinking,
        format!(
            "sup entropy <= initial (1 + 1e-3); residual {:.1e} > {:.1e} > {:.1e} (N = 8, 16, 32)",
            residuals[0], residuals[1], residuals[2]
        ),
        json!({"runs": rows, "bounded": all_bounded, "residual_decreasing": shrinking}),
    );
    let tail_decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let worst = weak_rows
        .iter()
        .map(|r| r["max_relative_residual"].as_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let c9 = criterion(
        9,
        WEAK,
        steps_ok && tail_decreasing,
        format!(
            "max |r_j|/scale {worst:.1e} <= 1e-11 on every step; |r_(N+1)| {:.1e} > {:.1e} > {:.1e}",
            tail[0], tail[1], tail[2]
        ),
        json!({"runs": weak_rows, "tolerance": 1e-11, "tail_decreasing": tail_decreasing}),
    );
    Ok((c4, c9))
}

fn positivity_criterion(
    opts: VerifyOptions,
    mass: &mut Vec<(String, f64, bool)>,
) -> Result<CriterionResult> {
    let spec = SweepSpec {
        parameter: SweepParameter::Epsilon,
        values: SweepParameter::Epsilon.default_values(opts.deep),
        base: reference::contact(0.1),
        jobs: opts.jobs,
    };
    let start = Instant::now();
    let report = run_sweep(&spec)?;
    let within_budget = start.elapsed().as_secs_f64() <= SWEEP_BUDGET_SECONDS;
    for m in &report.members {
        mass.push((
            format!("contact eps={:e}", m.value),
            m.verdicts.mass_drift_rel,
            within_budget,
        ));
    }
    let Some(last) = report.members.last().filter(|_| report.failure.is_none()) else {
        return Ok(criterion(
            5,
            POSITIVITY,
            false,
            "epsilon-sweep did not complete".into(),
            serde_json::to_value(&report)?,
        ));
    };
    let tol = last.config.diagnostics.tol_neg.unwrap_or(0.0);
    let passed = last.min_u >= -tol && within_budget;
    Ok(criterion(
        5,
        POSITIVITY,
        passed,
        format!(
            "min u = {:.3e} >= -{tol:.0e} at eps = {:e}",
            last.min_u, last.value
        ),
        json!({
            "members": report.members.iter().map(|m| json!({"epsilon": m.value, "min_u": m.min_u})).collect::<Vec<_>>(),
            "l2_differences": report.l2_differences,
            "tol_neg": tol,
            "within_runtime_budget": within_budget,
        }),
    ))
}

fn slope_criterion(
    opts: VerifyOptions,
    mass: &mut Vec<(String, f64, bool)>,
) -> Result<CriterionResult> {
    let spec = SweepSpec {
        parameter: SweepParameter::Delta,
        values: SweepParameter::Delta.default_values(false),
        base: reference::smooth(16, 0.05),
        jobs: opts.jobs,
    };
    let start = Instant::now();
    let report = run_sweep(&spec)?;
    let within_budget =
        start.elapsed().as_secs_f64() <= RUN_BUDGET_SECONDS * report.members.len() as f64;
    for m in &report.members {
        mass.push((
            format!("smooth delta={}", m.value),
            m.verdicts.mass_drift_rel,
            within_budget,
        ));
    }
    let margin = report
        .members
        .iter()
        .map(|m| m.slope_margin_min)
        .fold(f64::INFINITY, f64::min);
    let plateau = report.plateaus.iter().find(|p| p.quantity == "h2_max");
    let plateau_ok = plateau.is_some_and(|p| p.ratio <= PLATEAU_FACTOR);
    let passed = report.failure.is_none() && margin >= SLOPE_MARGIN && plateau_ok;
    Ok(criterion(
        6,
        SLOPE,
        passed,
        format!(
            "min (M - y_max) = {margin:.3} >= {SLOPE_MARGIN}; H2 ratio over last three = {:.3}",
            plateau.map_or(f64::NAN, |p| p.ratio)
        ),
        json!({
            "members": report.members.iter().map(|m| json!({
                "delta": m.value, "y_max": m.y_max, "slope_margin_min": m.slope_margin_min, "h2_max": m.h2_max,
            })).collect::<Vec<_>>(),
            "h2_plateau": plateau,
            "uniform": report.uniform,
        }),
    ))
}

fn steady_criterion(runs: &mut Vec<TimedRun>) -> Result<CriterionResult> {
    let c = reference::steady_state();
    let r = timed("steady state", &c, &mut [])?;
    let prepared = prepare(&c)?;
    let basis = &prepared.basis;
    let mean0 = prepared.u0.mean(basis.domain());
    let last = r.outcome.result.final_snapshot();
    let f = snapshot_fields(&last.coeffs.coeffs, &prepared.params, basis)?;
    let du = basis.integrate_with(|i| (f.u[i] - mean0).powi(2)).sqrt();
    let p = basis.integrate_with(|i| f.p[i] * f.p[i]).sqrt();
    runs.push(r);
    Ok(criterion(
        7,
        STEADY,
        du <= 1e-5 && p <= 1e-5,
        format!(
            "||u(T) - mean|| = {du:.2e}, ||p(T)|| = {p:.2e} (<= 1e-5) at T = {:.4}",
            c.integrator.t_end
        ),
        json!({"t_end": c.integrator.t_end, "deviation_l2": du, "pressure_l2": p, "tolerance": 1e-5}),
    ))
}

fn profile_criterion(
    opts: VerifyOptions,
    mass: &mut Vec<(String, f64, bool)>,
) -> Result<CriterionResult> {
    let start = Instant::now();
    let study = curvature_profile_study(&reference::droplet(), opts.jobs)?;
    let within_budget = start.elapsed().as_secs_f64() <= 2.0 * RUN_BUDGET_SECONDS;
    let r = &study.report;
    let nl = &r.nonlinear;
    let li = &r.linear;
    for m in [nl, li] {
        mass.push((
            format!("droplet {:?}", m.pressure_mode).to_lowercase(),
            m.mass_drift_rel,
            within_budget,
        ));
    }
    let passed = !r.degenerate && nl.decreased && li.decreased && r.kappa_equilibrates_first;
    Ok(criterion(
        8,
        PROFILE,
        passed,
        format!(
            "CoV(kappa) {:.3} -> {:.3}; linear CoV(u_xx) {:.3} -> {:.3}; at T CoV(kappa) {:.3} < CoV(u_xx) {:.3}",
            nl.initial.cov_kappa,
            nl.final_stats.cov_kappa,
            li.initial.cov_uxx,
            li.final_stats.cov_uxx,
            nl.final_stats.cov_kappa,
            nl.final_stats.cov_uxx
        ),
        serde_json::to_value(r)?,
    ))
}

fn determinism_criterion() -> Result<CriterionResult> {
    let c = reference::smooth(8, 0.01);
    let render = || -> Result<(String, String)> {
        let o = execute(&prepare(&c)?, &mut [])?;
        let mut summary = o.summary.clone();
        summary.wall_clock_seconds = 0.0;
        Ok((
            series_table(&o.records).render(),
            serde_json::to_string(&summary)?,
        ))
    };
    let a = render()?;
    let b = render()?;
    let same = a == b;
    Ok(criterion(
        10,
        DETERMINISM,
        same,
        format!(
            "repeated reference run {} byte-identical",
            if same { "is" } else { "is not" }
        ),
        json!({"series_bytes": a.0.len(), "identical": same}),
    ))
}
