//! End-to-end execution of a [`SimulationConfig`]: resolution, integration,
//! diagnostics and output files.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Anchor, SimulationConfig};
use crate::diagnostics::{
    energy_identity_residual, energy_monotone, entropy_identity_residual,
    gradient_bound_quantities, holder_probe, positivity_report, snapshot_fields,
    trajectory_diagnostics, DiagnosticsRecord, GradientBound, HolderProbe, MinTracker,
    PositivityReport, PositivityTolerances, SERIES_HEADER, SNAPSHOT_HEADER,
};
use crate::error::Result;
use crate::galerkin::{
    simulate, IntegratorSpec, Observer, SimulationOptions, SimulationResult, StepStats,
};
use crate::io::{write_json, CsvTable};
use crate::model::{
    validate_initial_data, EntropyEval, ModelParams, ValidationReport, ValidationTolerances,
};
use crate::spectral::{Basis, DerivativeOrder, SpectralField};

/// Relative mass drift accepted as conservation.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// A configuration with every `"auto"` value replaced, plus the objects it
/// resolves to.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub config: SimulationConfig,
    pub basis: Basis,
    pub params: ModelParams,
    pub spec: IntegratorSpec,
    pub u0: SpectralField,
    pub tolerances: PositivityTolerances,
    pub validation: ValidationReport,
}

/// Resolves and validates a configuration.
pub fn prepare(config: &SimulationConfig) -> Result<PreparedRun> {
    let mut config = config.clone();
    let basis = Basis::new(config.domain_spec()?)?;
    let u0 = config.initial_data.project(&basis)?;
    let grid = basis.synthesize(&u0, DerivativeOrder::Value)?;
    let sup = grid.u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if let Anchor::Keyword(_) = config.model.entropy_anchor {
        config.model.entropy_anchor = Anchor::Value(sup + 1.0);
    }
    let auto = PositivityTolerances::from_sup(sup);
    let tolerances = PositivityTolerances {
        tol_zero: *config.diagnostics.tol_zero.get_or_insert(auto.tol_zero),
        tol_neg: *config.diagnostics.tol_neg.get_or_insert(auto.tol_neg),
    };
    let params = config.model_params();
    params.validate()?;
    let spec = config.integrator_spec();
    spec.validate()?;
    let validation = validate_initial_data(
        &u0,
        &params,
        &basis,
        ValidationTolerances {
            tol_zero: tolerances.tol_zero,
            tol_neg: tolerances.tol_neg,
            entropy_tracking: config.diagnostics.entropy_tracking,
        },
    )?;
    Ok(PreparedRun {
        config,
        basis,
        params,
        spec,
        u0,
        tolerances,
        validation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub mass_drift_rel: f64,
    pub mass_conserved: bool,
    pub energy_residual_max: f64,
    pub energy_residual_rel: f64,
    pub energy_monotone: bool,
    pub entropy_residual_max: Option<f64>,
    /// `int G(u(t)) <= int G(u_0)` at every snapshot.
    pub entropy_bounded: Option<bool>,
    pub nonnegative: bool,
    pub gradient_bound_holds: bool,
    pub weak_residual_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// The resolved configuration; re-running it reproduces the series.
    pub config: SimulationConfig,
    pub validation: ValidationReport,
    pub stats: StepStats,
    pub flags: Vec<String>,
    pub verdicts: Verdicts,
    pub positivity: PositivityReport,
    pub gradient_bound: Vec<GradientBound>,
    pub holder: Option<HolderProbe>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: SimulationResult,
    pub records: Vec<DiagnosticsRecord>,
    pub summary: RunSummary,
}

/// Integrates a prepared run and evaluates all diagnostics.
pub fn execute(run: &PreparedRun, observers: &mut [&mut dyn Observer]) -> Result<RunOutcome> {
    let start = Instant::now();
    let tracking = run.config.diagnostics.entropy_tracking;
    let options = SimulationOptions {
        r_values: run.config.diagnostics.r_values.clone(),
        check_anchor: tracking,
    };
    let mut min_tracker = MinTracker::default();
    let result = {
        let mut all: Vec<&mut dyn Observer> = vec![&mut min_tracker];
        for o in observers.iter_mut() {
            all.push(&mut **o);
        }
        simulate(
            &run.u0,
            &run.spec,
            &run.params,
            &run.basis,
            &options,
            &mut all,
        )?
    };
    let entropy = if tracking {
        Some(EntropyEval::new(&run.params)?)
    } else {
        None
    };
    let records = trajectory_diagnostics(
        &result,
        &run.params,
        entropy.as_ref(),
        &run.basis,
        run.tolerances.tol_zero,
    )?;

    let gradient_bound = result
        .snapshots
        .iter()
        .map(|s| {
            let f = snapshot_fields(&s.coeffs.coeffs, &run.params, &run.basis)?;
            Ok(gradient_bound_quantities(
                &s.coeffs, &f.ux, &f.uxx, &run.basis,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let holder = if run.config.diagnostics.holder_probe {
        Some(holder_probe(&result.snapshots, &run.basis)?)
    } else {
        None
    };
    let positivity = positivity_report(
        &records,
        &run.params,
        run.tolerances,
        run.basis.grid_len(),
        Some(min_tracker.min_u),
    );

    let m0 = records[0].mass;
    let mass_drift_rel = records
        .iter()
        .map(|r| (r.mass - m0).abs())
        .fold(0.0, f64::max)
        / m0.abs().max(f64::MIN_POSITIVE);
    let e0 = records[0].energy();
    let energy = energy_identity_residual(&records);
    let (entropy_residual_max, entropy_bounded) = if tracking {
        let s0 = records[0].entropy;
        let bounded = records
            .iter()
            .all(|r| r.entropy.is_finite() && r.entropy <= s0 + 1e-9 * s0.abs().max(1.0));
        (
            entropy_identity_residual(&records).ok().map(|r| r.max_abs),
            Some(bounded),
        )
    } else {
        (None, None)
    };
    let verdicts = Verdicts {
        mass_drift_rel,
        mass_conserved: mass_drift_rel <= MASS_TOLERANCE,
        energy_residual_max: energy.max_abs,
        energy_residual_rel: energy.max_abs / e0,
        energy_monotone: energy_monotone(&records, 1e-10 * e0),
        entropy_residual_max,
        entropy_bounded,
        nonnegative: positivity.nonnegative,
        gradient_bound_holds: gradient_bound.iter().all(GradientBound::holds),
        weak_residual_max: records.iter().map(|r| r.weak_residual).fold(0.0, f64::max),
    };
    let summary = RunSummary {
        config: run.config.clone(),
        validation: run.validation.clone(),
        stats: result.stats,
        flags: result.flags.clone(),
        verdicts,
        positivity,
        gradient_bound,
        holder,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome {
        result,
        records,
        summary,
    })
}

/// `series.csv` content.
pub fn series_table(records: &[DiagnosticsRecord]) -> CsvTable {
    let mut t = CsvTable::new(&SERIES_HEADER);
    for r in records {
        t.push_row(&r.series_row());
    }
    t
}

/// Writes `series.csv`, `snap_<i>.csv` (when `"csv"` is among the formats)
/// and `summary.json` into `dir`.
pub fn write_outputs(run: &PreparedRun, outcome: &RunOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if run.config.output.formats.iter().any(|f| f == "csv") {
        series_table(&outcome.records).write(&dir.join("series.csv"))?;
        for (i, s) in outcome.result.snapshots.iter().enumerate() {
            let f = snapshot_fields(&s.coeffs.coeffs, &run.params, &run.basis)?;
            let mut t = CsvTable::new(&SNAPSHOT_HEADER);
            for k in 0..f.x.len() {
                t.push_row(&[f.x[k], f.u[k], f.ux[k], f.uxx[k], f.p[k], f.q[k]]);
            }
            t.write(&dir.join(format!("snap_{i}.csv")))?;
        }
    }
    write_json(&dir.join("summary.json"), &outcome.summary)
}

/// Prepares, executes and writes a configuration.
pub fn run_config(config: &SimulationConfig, dir: &Path) -> Result<RunOutcome> {
    let run = prepare(config)?;
    let outcome = execute(&run, &mut [])?;
    write_outputs(&run, &outcome, dir)?;
    Ok(outcome)
}
