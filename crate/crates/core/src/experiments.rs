//! Parameter sweeps, the curvature-profile comparison and the positivity
//! threshold study. Every report is deterministic and embeds the resolved
//! configuration of each member run.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimulationConfig;
use crate::diagnostics::{snapshot_fields, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_json, CsvTable};
use crate::model::PressureMode;
use crate::run::{execute, prepare, RunOutcome, Verdicts};
use crate::spectral::SpectralField;

/// Ratio `max / min` over the last three members accepted as a plateau.
pub const PLATEAU_FACTOR: f64 = 2.0;
/// Required distance of `y_max` from 1 in a uniform delta-sweep.
pub const SLOPE_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "N")]
    Modes,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Self::Eta),
            "epsilon" => Ok(Self::Epsilon),
            "delta" => Ok(Self::Delta),
            "N" | "n_modes" => Ok(Self::Modes),
            _ => Err(Error::Config(format!(
                "unknown sweep parameter `{s}` (eta, epsilon, delta, N)"
            ))),
        }
    }
}

impl SweepParameter {
    /// Default value lists; `deep` appends one more refinement level.
    pub fn default_values(self, deep: bool) -> Vec<f64> {
        let mut v = match self {
            Self::Eta => vec![1.0, 0.1, 0.01],
            Self::Epsilon => vec![1e-1, 1e-2, 1e-3],
            Self::Delta => vec![0.3, 0.1, 0.03, 0.01],
            Self::Modes => vec![8.0, 16.0, 32.0],
        };
        if deep {
            v.push(match self {
                Self::Eta => 1e-3,
                Self::Epsilon => 1e-4,
                Self::Delta => 3e-3,
                Self::Modes => 64.0,
            });
        }
        v
    }

    /// Copy of `base` with the parameter set to `value`.
    pub fn apply(self, base: &SimulationConfig, value: f64) -> Result<SimulationConfig> {
        let mut c = base.clone();
        match self {
            Self::Eta => c.model.eta = value,
            Self::Epsilon => c.model.epsilon = value,
            Self::Delta => c.model.delta = value,
            Self::Modes => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::Config(format!(
                        "N must be a positive integer, got {value}"
                    )));
                }
                c.domain.modes = value as usize;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub base: SimulationConfig,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 3 {
            return Err(Error::Config("a sweep needs at least 3 values".into()));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::Config(
                "sweep values must be strictly monotone".into(),
            ));
        }
        for v in &self.values {
            self.parameter.apply(&self.base, *v)?;
        }
        Ok(())
    }
}

/// Trajectory maxima of one sweep member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub value: f64,
    pub config: SimulationConfig,
    pub energy_max: f64,
    #[serde(with = "crate::io::float_or_string")]
    pub entropy_max: f64,
    pub h2_max: f64,
    pub y_max: f64,
    /// Smallest `M - y_max` over snapshots.
    pub slope_margin_min: f64,
    pub min_u: f64,
    pub sup_abs_u: f64,
    /// Hölder constant in time, when the probe was conclusive.
    pub holder_time_constant: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub verdicts: Verdicts,
}

impl MemberSummary {
    fn from_outcome(value: f64, outcome: &RunOutcome) -> Self {
        let r = &outcome.records;
        let fold_max = |f: &dyn Fn(&DiagnosticsRecord) -> f64| {
            r.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
        };
        let s = &outcome.summary;
        Self {
            value,
            config: s.config.clone(),
            energy_max: fold_max(&|r| r.energy()),
            entropy_max: fold_max(&|r| r.entropy),
            h2_max: fold_max(&|r| r.h2),
            y_max: fold_max(&|r| r.y_max),
            slope_margin_min: s
                .gradient_bound
                .iter()
                .map(|g| g.margin())
                .fold(f64::INFINITY, f64::min),
            min_u: s.positivity.global_min,
            sup_abs_u: fold_max(&|r| r.max_u.abs().max(r.min_u.abs())),
            holder_time_constant: s.holder.as_ref().and_then(|h| h.constant_time),
            accepted_steps: s.stats.accepted,
            rejected_steps: s.stats.rejected,
            verdicts: s.verdicts.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauVerdict {
    pub quantity: String,
    pub last_three: Vec<f64>,
    /// `max / min` of `|last_three|`.
    pub ratio: f64,
    /// `"bounded"` or `"growing"`.
    pub verdict: String,
}

fn plateau(quantity: &str, values: &[f64]) -> PlateauVerdict {
    let last: Vec<f64> = values[values.len().saturating_sub(3)..].to_vec();
    let hi = last.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let lo = last.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let ratio = if hi == 0.0 { 1.0 } else { hi / lo };
    PlateauVerdict {
        quantity: quantity.to_string(),
        last_three: last,
        ratio,
        verdict: if ratio <= PLATEAU_FACTOR {
            "bounded"
        } else {
            "growing"
        }
        .to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberFailure {
    pub value: f64,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Members that completed, in sweep order, up to the first failure.
    pub members: Vec<MemberSummary>,
    /// `||u_k - u_{k+1}||_{L^2(Omega_T)}` between consecutive members.
    pub l2_differences: Vec<f64>,
    pub differences_decreasing: bool,
    pub plateaus: Vec<PlateauVerdict>,
    /// Delta sweeps only: `H^2` plateau and `y_max < 1 - SLOPE_MARGIN` over the last three values.
    pub uniform: Option<bool>,
    pub failure: Option<MemberFailure>,
    pub notes: Vec<String>,
}

/// `(int_0^T ||u - v||^2 dt)^{1/2}` by the trapezoidal rule over shared snapshot times.
pub fn l2_time_space_difference(a: &RunOutcome, b: &RunOutcome) -> Result<f64> {
    let (sa, sb) = (&a.result.snapshots, &b.result.snapshots);
    if sa.len() != sb.len() || sa.iter().zip(sb).any(|(x, y)| x.t != y.t) {
        return Err(Error::Experiment(
            "trajectories have different snapshot times".into(),
        ));
    }
    let sq: Vec<f64> = sa
        .iter()
        .zip(sb)
        .map(|(x, y)| coefficient_distance_sq(&x.coeffs, &y.coeffs))
        .collect();
    let mut acc = 0.0;
    for k in 1..sa.len() {
        acc += 0.5 * (sa[k].t - sa[k - 1].t) * (sq[k] + sq[k - 1]);
    }
    Ok(acc.sqrt())
}

/// `||u - v||_{L^2}^2` by Parseval, zero-padding the shorter expansion.
fn coefficient_distance_sq(a: &SpectralField, b: &SpectralField) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|j| {
            let d =
                a.coeffs.get(j).copied().unwrap_or(0.0) - b.coeffs.get(j).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Experiment(e.to_string()))?;
    Ok(pool.install(f))
}

fn run_member(config: &SimulationConfig) -> Result<RunOutcome> {
    let run = prepare(config)?;
    execute(&run, &mut [])
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let configs: Vec<SimulationConfig> = spec
        .values
        .iter()
        .map(|v| spec.parameter.apply(&spec.base, *v))
        .collect::<Result<_>>()?;
    let outcomes: Vec<Result<RunOutcome>> =
        with_pool(spec.jobs, || configs.par_iter().map(run_member).collect())?;

    let mut members = Vec::new();
    let mut done = Vec::new();
    let mut failure = None;
    for (value, outcome) in spec.values.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                members.push(MemberSummary::from_outcome(*value, &o));
                done.push(o);
            }
            Err(e) => {
                failure = Some(MemberFailure {
                    value: *value,
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                });
                break;
            }
        }
    }
    let l2_differences = done
        .windows(2)
        .map(|w| l2_time_space_difference(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let differences_decreasing = l2_differences.windows(2).all(|w| w[1] < w[0]);
    let complete = failure.is_none();
    let series = |f: fn(&MemberSummary) -> f64| members.iter().map(f).collect::<Vec<_>>();
    let plateaus = if complete {
        let mut p = vec![
            plateau("energy_max", &series(|m| m.energy_max)),
            plateau("h2_max", &series(|m| m.h2_max)),
            plateau("y_max", &series(|m| m.y_max)),
            plateau("sup_abs_u", &series(|m| m.sup_abs_u)),
        ];
        if members.iter().all(|m| m.entropy_max.is_finite()) {
            p.push(plateau("entropy_max", &series(|m| m.entropy_max)));
        }
        p
    } else {
        Vec::new()
    };
    let uniform = (complete && spec.parameter == SweepParameter::Delta).then(|| {
        let h2 = plateaus
            .iter()
            .any(|p| p.quantity == "h2_max" && p.verdict == "bounded");
        let tail = &members[members.len() - 3..];
        h2 && tail.iter().all(|m| m.y_max < 1.0 - SLOPE_MARGIN)
    });
    let mut notes = Vec::new();
    if matches!(
        spec.base.initial_data,
        crate::config::InitialData::Droplet { .. }
    ) {
        notes.push(
            "droplet data stand in for compactly supported data: a smooth bump with tails at the floor value".into(),
        );
    }
    if spec.parameter == SweepParameter::Delta {
        notes.push("whether the entropy estimate improves gradient compactness as delta -> 0 is recorded as data only".into());
    }
    Ok(SweepReport {
        parameter: spec.parameter,
        values: spec.values.clone(),
        members,
        l2_differences,
        differences_decreasing,
        plateaus,
        uniform,
        failure,
        notes,
    })
}

/// Spread statistics of a grid quantity on the core set `{u > 0.1 max u}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub core_points: usize,
    pub mean_kappa: f64,
    /// Coefficient of variation `std / |mean|` of `kappa = u_xx / Q^3`.
    pub cov_kappa: f64,
    pub mean_uxx: f64,
    pub cov_uxx: f64,
}

fn coefficient_of_variation(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt() / mean.abs())
}

/// Core-set statistics of the field with coefficients `coeffs`.
pub fn profile_stats(
    coeffs: &[f64],
    params: &crate::model::ModelParams,
    basis: &crate::spectral::Basis,
) -> Result<ProfileStats> {
    let f = snapshot_fields(coeffs, params, basis)?;
    let max_u = f.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let core: Vec<usize> = (0..f.u.len())
        .filter(|&i| max_u > 0.0 && f.u[i] > 0.1 * max_u)
        .collect();
    if core.is_empty() {
        return Err(Error::Experiment(
            "core set {u > 0.1 max u} is empty".into(),
        ));
    }
    let kappa: Vec<f64> = core.iter().map(|&i| f.uxx[i] / f.q[i].powi(3)).collect();
    let uxx: Vec<f64> = core.iter().map(|&i| f.uxx[i]).collect();
    let (mean_kappa, cov_kappa) = coefficient_of_variation(&kappa);
    let (mean_uxx, cov_uxx) = coefficient_of_variation(&uxx);
    Ok(ProfileStats {
        core_points: core.len(),
        mean_kappa,
        cov_kappa,
        mean_uxx,
        cov_uxx,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub pressure_mode: PressureMode,
    pub config: SimulationConfig,
    /// `"kappa"` in nonlinear mode, `"uxx"` in linear mode.
    pub statistic: String,
    pub initial: ProfileStats,
    pub final_stats: ProfileStats,
    /// The mode's statistic strictly decreased from `t = 0` to `t = T`.
    pub decreased: bool,
    pub t_final: f64,
    pub mass_drift_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    /// Flat data: curvature vanishes and no statistic is meaningful.
    pub degenerate: bool,
    pub nonlinear: ModeProfile,
    pub linear: ModeProfile,
    /// At `T`, nonlinear `CoV(kappa) < CoV(u_xx)`.
    pub kappa_equilibrates_first: bool,
    pub notes: Vec<String>,
}

/// The report plus final-time grid profiles of both runs for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileStudy {
    pub report: ProfileReport,
    pub nonlinear_final: CsvTable,
    pub linear_final: CsvTable,
}

fn final_profile_table(
    outcome: &RunOutcome,
    params: &crate::model::ModelParams,
    basis: &crate::spectral::Basis,
) -> Result<CsvTable> {
    let f = snapshot_fields(
        &outcome.result.final_snapshot().coeffs.coeffs,
        params,
        basis,
    )?;
    let mut t = CsvTable::new(&["x", "u", "ux", "uxx", "p", "Q", "kappa"]);
    for i in 0..f.x.len() {
        t.push_row(&[
            f.x[i],
            f.u[i],
            f.ux[i],
            f.uxx[i],
            f.p[i],
            f.q[i],
            f.uxx[i] / f.q[i].powi(3),
        ]);
    }
    Ok(t)
}

/// Runs `config` in both pressure modes and compares how the curvature and
/// the second derivative equilibrate on the core set.
pub fn curvature_profile_study(config: &SimulationConfig, jobs: usize) -> Result<ProfileStudy> {
    let modes = [PressureMode::Nonlinear, PressureMode::Linear];
    let runs: Vec<Result<_>> = with_pool(jobs, || {
        modes
            .par_iter()
            .map(|mode| {
                let mut c = config.clone();
                c.model.pressure_mode = *mode;
                let run = prepare(&c)?;
                let outcome = execute(&run, &mut [])?;
                let initial = profile_stats(&run.u0.coeffs, &run.params, &run.basis)?;
                let last = &outcome.result.final_snapshot();
                let final_stats = profile_stats(&last.coeffs.coeffs, &run.params, &run.basis)?;
                let table = final_profile_table(&outcome, &run.params, &run.basis)?;
                let (statistic, decreased) = match mode {
                    PressureMode::Nonlinear => ("kappa", final_stats.cov_kappa < initial.cov_kappa),
                    PressureMode::Linear => ("uxx", final_stats.cov_uxx < initial.cov_uxx),
                };
                Ok((
                    ModeProfile {
                        pressure_mode: *mode,
                        config: run.config.clone(),
                        statistic: statistic.into(),
                        initial,
                        final_stats,
                        decreased,
                        t_final: last.t,
                        mass_drift_rel: outcome.summary.verdicts.mass_drift_rel,
                    },
                    table,
                ))
            })
            .collect()
    })?;
    let mut it = runs.into_iter();
    let (nonlinear, nonlinear_final) = it.next().expect("two runs")?;
    let (linear, linear_final) = it.next().expect("two runs")?;
    let degenerate =
        !(nonlinear.initial.cov_kappa.is_finite() && linear.initial.cov_uxx.is_finite());
    let mut notes = Vec::new();
    if degenerate {
        notes.push(
            "initial curvature vanishes on the core set; coefficients of variation are undefined"
                .into(),
        );
    }
    let kappa_equilibrates_first =
        !degenerate && nonlinear.final_stats.cov_kappa < nonlinear.final_stats.cov_uxx;
    Ok(ProfileStudy {
        report: ProfileReport {
            degenerate,
            nonlinear,
            linear,
            kappa_equilibrates_first,
            notes,
        },
        nonlinear_final,
        linear_final,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: f64,
    /// `"ran"`, `"skipped"` (invalid data) or `"failed"` (integration aborted).
    pub status: String,
    pub reason: Option<String>,
    pub config: Option<SimulationConfig>,
    pub global_min: Option<f64>,
    pub final_min: Option<f64>,
    pub zero_frac_max: Option<f64>,
    pub nonnegative: Option<bool>,
    pub zero_set_negligible: Option<bool>,
    pub strictly_positive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub epsilon: f64,
    pub rows: Vec<ThresholdRow>,
    pub notes: Vec<String>,
}

/// Positivity measurements across mobility exponents straddling 2 and 8/3.
pub fn threshold_study(
    n_values: &[f64],
    config: &SimulationConfig,
    jobs: usize,
) -> Result<ThresholdReport> {
    if n_values.is_empty() {
        return Err(Error::Config("threshold study needs at least one n".into()));
    }
    let rows: Vec<ThresholdRow> = with_pool(jobs, || {
        n_values
            .par_iter()
            .map(|&n| {
                let mut c = config.clone();
                c.model.n = n;
                c.diagnostics.entropy_tracking = true;
                let blank =
                    |status: &str, reason: String, config: Option<SimulationConfig>| ThresholdRow {
                        n,
                        status: status.into(),
                        reason: Some(reason),
                        config,
                        global_min: None,
                        final_min: None,
                        zero_frac_max: None,
                        nonnegative: None,
                        zero_set_negligible: None,
                        strictly_positive: None,
                    };
                let run = match prepare(&c) {
                    Ok(r) => r,
                    Err(e) => return blank("skipped", e.to_string(), None),
                };
                match execute(&run, &mut []) {
                    Ok(o) => {
                        let p = &o.summary.positivity;
                        ThresholdRow {
                            n,
                            status: "ran".into(),
                            reason: None,
                            config: Some(run.config.clone()),
                            global_min: Some(p.global_min),
                            final_min: p.min_u.last().copied(),
                            zero_frac_max: Some(p.zero_frac.iter().copied().fold(0.0, f64::max)),
                            nonnegative: Some(p.nonnegative),
                            zero_set_negligible: p.zero_set_negligible,
                            strictly_positive: p.strictly_positive,
                        }
                    }
                    Err(e) => blank("failed", e.to_string(), Some(run.config.clone())),
                }
            })
            .collect()
    })?;
    Ok(ThresholdReport {
        epsilon: config.model.epsilon,
        rows,
        notes: vec![
            "limit statements (eps -> 0) cannot be established numerically; rows are trends at the configured epsilon"
                .into(),
        ],
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

fn opt_bool(v: Option<bool>) -> String {
    v.map_or_else(String::new, |b| b.to_string())
}

/// `sweep_report.json`, `sweep_members.csv`, `sweep_differences.csv`.
pub fn write_sweep_report(report: &SweepReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("sweep_report.json"), report)?;
    let mut t = CsvTable::new(&[
        "value",
        "energy_max",
        "entropy_max",
        "h2_max",
        "y_max",
        "slope_margin_min",
        "min_u",
        "sup_abs_u",
        "holder_time_constant",
    ]);
    for m in &report.members {
        t.push_raw(&[
            fmt_f64(m.value),
            fmt_f64(m.energy_max),
            fmt_f64(m.entropy_max),
            fmt_f64(m.h2_max),
            fmt_f64(m.y_max),
            fmt_f64(m.slope_margin_min),
            fmt_f64(m.min_u),
            fmt_f64(m.sup_abs_u),
            opt(m.holder_time_constant),
        ]);
    }
    t.write(&dir.join("sweep_members.csv"))?;
    let mut d = CsvTable::new(&["value_a", "value_b", "l2_difference"]);
    for (k, diff) in report.l2_differences.iter().enumerate() {
        d.push_row(&[report.values[k], report.values[k + 1], *diff]);
    }
    d.write(&dir.join("sweep_differences.csv"))
}

/// `profile_report.json`, `profile_nonlinear.csv`, `profile_linear.csv`.
pub fn write_profile_study(study: &ProfileStudy, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("profile_report.json"), &study.report)?;
    study
        .nonlinear_final
        .write(&dir.join("profile_nonlinear.csv"))?;
    study.linear_final.write(&dir.join("profile_linear.csv"))
}

/// `thresholds_report.json`, `thresholds.csv`.
pub fn write_threshold_report(report: &ThresholdReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("thresholds_report.json"), report)?;
    let mut t = CsvTable::new(&[
        "n",
        "status",
        "global_min",
        "final_min",
        "zero_frac_max",
        "nonnegative",
        "zero_set_negligible",
        "strictly_positive",
    ]);
    for r in &report.rows {
        t.push_raw(&[
            fmt_f64(r.n),
            r.status.clone(),
            opt(r.global_min),
            opt(r.final_min),
            opt(r.zero_frac_max),
            opt_bool(r.nonnegative),
            opt_bool(r.zero_set_negligible),
            opt_bool(r.strictly_positive),
        ]);
    }
    t.write(&dir.join("thresholds.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_verdicts() {
        assert_eq!(plateau("q", &[10.0, 1.0, 1.5, 1.9]).verdict, "bounded");
        assert_eq!(plateau("q", &[1.0, 2.0, 4.1]).verdict, "growing");
        assert_eq!(plateau("q", &[0.0, 0.0, 0.0]).ratio, 1.0);
    }

    #[test]
    fn sweep_spec_validation() {
        let base = SimulationConfig::default();
        let ok = SweepSpec {
            parameter: SweepParameter::Delta,
            values: vec![0.3, 0.1, 0.03],
            base: base.clone(),
            jobs: 1,
        };
        assert!(ok.validate().is_ok());
        let short = SweepSpec {
            values: vec![0.3, 0.1],
            ..ok.clone()
        };
        assert!(short.validate().is_err());
        let zigzag = SweepSpec {
            values: vec![0.3, 0.1, 0.2],
            ..ok.clone()
        };
        assert!(zigzag.validate().is_err());
        let frac_n = SweepSpec {
            parameter: SweepParameter::Modes,
            values: vec![8.0, 12.5, 16.0],
            ..ok
        };
        assert!(frac_n.validate().is_err());
        assert_eq!(
            "N".parse::<SweepParameter>().unwrap(),
            SweepParameter::Modes
        );
        assert!("mu".parse::<SweepParameter>().is_err());
    }

    #[test]
    fn parseval_distance_pads() {
        let a = SpectralField::new(vec![1.0, 2.0]).unwrap();
        let b = SpectralField::new(vec![1.0, 0.0, 3.0]).unwrap();
        assert_eq!(coefficient_distance_sq(&a, &b), 13.0);
    }

    #[test]
    fn cov_of_constant_is_zero() {
        let (m, c) = coefficient_of_variation(&[2.0, 2.0, 2.0]);
        assert_eq!((m, c), (2.0, 0.0));
        assert!(coefficient_of_variation(&[0.0, 0.0]).1.is_nan());
    }
}
