use serde::{Deserialize, Serialize};

use super::DiagnosticsRecord;
use crate::galerkin::{Observer, RhsEval};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityTolerances {
    /// Grid values below this count as the zero set.
    pub tol_zero: f64,
    /// Values below `-tol_neg` are a nonnegativity violation.
    pub tol_neg: f64,
}

impl PositivityTolerances {
    /// `tol_zero = 1e-7 max(1, ||u0||_inf)`, `tol_neg = 1e-8 ||u0||_inf`.
    pub fn from_sup(u0_sup: f64) -> Self {
        Self {
            tol_zero: 1e-7 * u0_sup.max(1.0),
            tol_neg: 1e-8 * u0_sup,
        }
    }
}

/// Tracks the grid minimum of `u` over every accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct MinTracker {
    pub min_u: f64,
    pub t_at_min: f64,
}

impl Default for MinTracker {
    fn default() -> Self {
        Self {
            min_u: f64::INFINITY,
            t_at_min: 0.0,
        }
    }
}

impl Observer for MinTracker {
    fn wants_steps(&self) -> bool {
        true
    }

    fn on_step(&mut self, t: f64, _coeffs: &[f64], rhs: &RhsEval) {
        if rhs.min_u < self.min_u {
            self.min_u = rhs.min_u;
            self.t_at_min = t;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub n: f64,
    pub t: Vec<f64>,
    pub min_u: Vec<f64>,
    pub zero_frac: Vec<f64>,
    /// Minimum over snapshots and, when tracked, all accepted steps.
    pub global_min: f64,
    pub tolerances: PositivityTolerances,
    /// `min u >= -tol_neg`.
    pub nonnegative: bool,
    /// `zero_frac <= 1/G` at every snapshot; only judged for `n >= 2`.
    pub zero_set_negligible: Option<bool>,
    /// `min u >= tol_zero` throughout; only judged for `n >= 8/3` with positive data.
    pub strictly_positive: Option<bool>,
}

pub fn positivity_report(
    records: &[DiagnosticsRecord],
    params: &ModelParams,
    tol: PositivityTolerances,
    grid_len: usize,
    step_min: Option<f64>,
) -> PositivityReport {
    let min_snap = records
        .iter()
        .map(|r| r.min_u)
        .fold(f64::INFINITY, f64::min);
    let global_min = step_min.map_or(min_snap, |m| m.min(min_snap));
    let resolution = 1.0 / grid_len as f64;
    let zero_set_negligible =
        (params.n >= 2.0).then(|| records.iter().all(|r| r.zero_frac <= resolution));
    let initially_positive = records.first().is_some_and(|r| r.min_u >= tol.tol_zero);
    let strictly_positive =
        (params.n >= 8.0 / 3.0 && initially_positive).then_some(global_min >= tol.tol_zero);
    PositivityReport {
        n: params.n,
        t: records.iter().map(|r| r.t).collect(),
        min_u: records.iter().map(|r| r.min_u).collect(),
        zero_frac: records.iter().map(|r| r.zero_frac).collect(),
        global_min,
        tolerances: tol,
        nonnegative: global_min >= -tol.tol_neg,
        zero_set_negligible,
        strictly_positive,
    }
}
