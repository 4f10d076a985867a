//! Per-snapshot and per-trajectory diagnostics: conserved and dissipated
//! quantities, positivity measures, Hölder probes, the gradient bound chain
//! and the weak-form residual.

mod gradient;
mod holder;
mod positivity;
mod weak;

pub use gradient::{
    gradient_bound_quantities, slope_threshold, threshold_integral, GradientBound, HOLDER_EMBEDDING,
};
pub use holder::{holder_probe, HolderProbe};
pub use positivity::{positivity_report, MinTracker, PositivityReport, PositivityTolerances};
pub use weak::{default_modes, weak_residual, WeakResidual, WeakResidualMonitor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::{evaluate, RhsEval, SimulationResult, Snapshot, Workspace};
use crate::model::{EntropyEval, ModelParams, PressureMode};
use crate::spectral::{sobolev_norms, Basis};

/// Instantaneous and cumulative quantities at one output time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    /// `int sqrt(1 + u_x^2)`; `int 1 + u_x^2 / 2` in linear mode.
    pub energy_surface: f64,
    /// `(delta / 2) ||u_x||^2`.
    pub energy_delta: f64,
    pub dissipation_cum: f64,
    /// `int G_eps(u)`; `NaN` when entropy is not tracked.
    #[serde(with = "crate::io::float_or_string")]
    pub entropy: f64,
    pub entropy_dissipation_cum: f64,
    pub weighted_dissipation_cum: Vec<f64>,
    pub min_u: f64,
    pub max_u: f64,
    pub zero_frac: f64,
    /// `max |u_x| / Q`.
    pub y_max: f64,
    pub ux_linf: f64,
    pub h1: f64,
    pub h2: f64,
    /// Euclidean norm of the weak-form residual over test modes `0..=2N+1`.
    pub weak_residual: f64,
}

impl DiagnosticsRecord {
    pub fn energy(&self) -> f64 {
        self.energy_surface + self.energy_delta
    }

    /// Values in the order of [`SERIES_HEADER`].
    pub fn series_row(&self) -> [f64; 14] {
        [
            self.t,
            self.mass,
            self.energy_surface,
            self.energy_delta,
            self.dissipation_cum,
            self.entropy,
            self.entropy_dissipation_cum,
            self.min_u,
            self.max_u,
            self.zero_frac,
            self.y_max,
            self.h1,
            self.h2,
            self.weak_residual,
        ]
    }
}

pub const SERIES_HEADER: [&str; 14] = [
    "t",
    "mass",
    "energy_surface",
    "energy_delta",
    "dissipation_cum",
    "entropy",
    "entropy_dissipation_cum",
    "min_u",
    "max_u",
    "zero_frac",
    "y_max",
    "h1",
    "h2",
    "weak_residual",
];

/// Grid-level fields of a snapshot, as written to `snap_<i>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFields {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
    /// Galerkin pressure `p = sum d_k e_k`.
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

pub const SNAPSHOT_HEADER: [&str; 6] = ["x", "u", "ux", "uxx", "p", "Q"];

pub fn snapshot_fields(
    coeffs: &[f64],
    params: &ModelParams,
    basis: &Basis,
) -> Result<SnapshotFields> {
    let g = basis.grid_len();
    let mut ws = Workspace::new(basis);
    let mut ev = RhsEval::default();
    evaluate(coeffs, params, basis, &[], &mut ws, 0.0, &mut ev)?;
    let mut ux = vec![0.0; g];
    let mut uxx = vec![0.0; g];
    let mut p = vec![0.0; g];
    let mut scratch = vec![0.0; basis.dim()];
    basis.eval_slopes(coeffs, &mut ux);
    basis.eval_curvatures(coeffs, &mut scratch, &mut uxx);
    basis.eval_values(&ev.pressure, &mut p);
    let q = ux.iter().map(|d| (1.0 + d * d).sqrt()).collect();
    Ok(SnapshotFields {
        x: basis.grid().to_vec(),
        u: ws.u().to_vec(),
        ux,
        uxx,
        p,
        q,
    })
}

/// Computes the record for one snapshot.
///
/// `entropy` is evaluated when given; `sup|u| >= a` is then an
/// [`Error::AnchorViolation`].
pub fn snapshot_diagnostics(
    snap: &Snapshot,
    params: &ModelParams,
    entropy: Option<&EntropyEval>,
    basis: &Basis,
    tol_zero: f64,
) -> Result<DiagnosticsRecord> {
    let domain = basis.domain();
    let f = snapshot_fields(&snap.coeffs.coeffs, params, basis)?;
    let g = basis.grid_len();
    let mass = basis.integrate(&f.u);
    let (energy_surface, energy_delta) = energies(&f.ux, params, basis);
    let min_u = f.u.iter().copied().fold(f64::INFINITY, f64::min);
    let max_u = f.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sup = min_u.abs().max(max_u.abs());
    let entropy_value = match entropy {
        Some(e) => {
            if sup >= e.anchor() {
                return Err(Error::AnchorViolation {
                    t: snap.t,
                    sup_abs_u: sup,
                    anchor: e.anchor(),
                });
            }
            basis.integrate_with(|i| e.density(f.u[i]))
        }
        None => f64::NAN,
    };
    let zero_frac = f.u.iter().filter(|v| **v < tol_zero).count() as f64 / g as f64;
    let y_max =
        f.ux.iter()
            .zip(&f.q)
            .map(|(d, q)| d.abs() / q)
            .fold(0.0, f64::max);
    let ux_linf = f.ux.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norms = sobolev_norms(&snap.coeffs, domain);
    let weak = weak_residual(
        &snap.coeffs.coeffs,
        None,
        params,
        basis,
        &weak::default_modes(domain.modes),
        tol_zero,
    )?;
    Ok(DiagnosticsRecord {
        t: snap.t,
        mass,
        energy_surface,
        energy_delta,
        dissipation_cum: snap.dissipation_cum,
        entropy: entropy_value,
        entropy_dissipation_cum: snap.entropy_dissipation_cum,
        weighted_dissipation_cum: snap.weighted_cum.clone(),
        min_u,
        max_u,
        zero_frac,
        y_max,
        ux_linf,
        h1: norms.h1,
        h2: norms.h2,
        weak_residual: weak.norm(),
    })
}

/// Surface and `delta` parts of the energy whose dissipation is `int m p_x^2`.
pub fn energies(ux: &[f64], params: &ModelParams, basis: &Basis) -> (f64, f64) {
    let surface = match params.pressure_mode {
        PressureMode::Nonlinear => basis.integrate_with(|i| (1.0 + ux[i] * ux[i]).sqrt()),
        PressureMode::Linear => basis.integrate_with(|i| 1.0 + 0.5 * ux[i] * ux[i]),
    };
    let delta = 0.5 * params.delta * basis.integrate_with(|i| ux[i] * ux[i]);
    (surface, delta)
}

pub fn trajectory_diagnostics(
    result: &SimulationResult,
    params: &ModelParams,
    entropy: Option<&EntropyEval>,
    basis: &Basis,
    tol_zero: f64,
) -> Result<Vec<DiagnosticsRecord>> {
    result
        .snapshots
        .iter()
        .map(|s| snapshot_diagnostics(s, params, entropy, basis, tol_zero))
        .collect()
}

/// A residual time series with its maximum magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub t: Vec<f64>,
    pub residual: Vec<f64>,
    pub max_abs: f64,
}

impl ResidualSeries {
    fn from_pairs(t: Vec<f64>, residual: Vec<f64>) -> Self {
        let max_abs = residual.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        Self {
            t,
            residual,
            max_abs,
        }
    }
}

/// `E(t) + int_0^t D - E(0)`.
pub fn energy_identity_residual(records: &[DiagnosticsRecord]) -> ResidualSeries {
    let e0 = records.first().map(|r| r.energy()).unwrap_or(0.0);
    ResidualSeries::from_pairs(
        records.iter().map(|r| r.t).collect(),
        records
            .iter()
            .map(|r| r.energy() + r.dissipation_cum - e0)
            .collect(),
    )
}

/// `int G(u(t)) - int G(u_0) + int_0^t D_entropy`.
pub fn entropy_identity_residual(records: &[DiagnosticsRecord]) -> Result<ResidualSeries> {
    let s0 = records.first().map(|r| r.entropy).unwrap_or(0.0);
    if records.iter().any(|r| !r.entropy.is_finite()) {
        return Err(Error::InvalidParameter(
            "entropy is infinite or not tracked".into(),
        ));
    }
    Ok(ResidualSeries::from_pairs(
        records.iter().map(|r| r.t).collect(),
        records
            .iter()
            .map(|r| r.entropy - s0 + r.entropy_dissipation_cum)
            .collect(),
    ))
}

/// Energy is nonincreasing up to `tol`.
pub fn energy_monotone(records: &[DiagnosticsRecord], tol: f64) -> bool {
    records
        .windows(2)
        .all(|w| w[1].energy() <= w[0].energy() + tol)
}
