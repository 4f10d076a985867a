//! Mobility, curvature pressure, the regularized operator `A_delta` and the
//! entropy functions.

mod entropy;

pub use entropy::EntropyEval;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Basis, DerivativeOrder, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PressureMode {
    /// `p = -u_xx / Q^3 - delta u_xx`, the exact curvature.
    #[default]
    Nonlinear,
    /// `p = -(1 + delta) u_xx`, the classical thin-film linearization.
    Linear,
}

/// Mobility exponent, regularization triple and entropy anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Growth exponent of `m(s) = |s|^n`.
    pub n: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub pressure_mode: PressureMode,
    /// Upper integration limit `a` of the entropy functions.
    pub entropy_anchor: f64,
    /// Replaces `m_{eps,eta}` by a constant. Verification hook for the
    /// linear decoupled oracle; not part of the physical model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_mobility: Option<f64>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 2.0,
            delta: 0.1,
            epsilon: 0.1,
            eta: 0.0,
            pressure_mode: PressureMode::Nonlinear,
            entropy_anchor: 2.0,
            constant_mobility: None,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "mobility exponent n must be >= 1, got {}",
                self.n
            )));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("eta", self.eta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if let Some(mu) = self.constant_mobility {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "constant mobility must be positive, got {mu}"
                )));
            }
        }
        Ok(())
    }

    /// Entropy is only evaluated with `a > 0`.
    pub fn check_anchor(&self) -> Result<()> {
        if !(self.entropy_anchor.is_finite() && self.entropy_anchor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "entropy anchor must be positive and finite, got {}",
                self.entropy_anchor
            )));
        }
        Ok(())
    }
}

/// `m_{eps,eta}(s) = |s|^n / (1 + eta |s|^n) + eps`.
#[inline]
pub fn mobility(s: f64, params: &ModelParams) -> f64 {
    if let Some(mu) = params.constant_mobility {
        return mu;
    }
    let m = s.abs().powf(params.n);
    if params.eta > 0.0 {
        if m.is_infinite() {
            return 1.0 / params.eta + params.epsilon;
        }
        m / (1.0 + params.eta * m) + params.epsilon
    } else {
        m + params.epsilon
    }
}

/// Flux density of `A_delta`: `<A_delta(u), v> = int F(u_x) v_x`.
#[inline]
pub fn a_delta_density(ux: f64, params: &ModelParams) -> f64 {
    match params.pressure_mode {
        PressureMode::Nonlinear => ux / (1.0 + ux * ux).sqrt() + params.delta * ux,
        PressureMode::Linear => (1.0 + params.delta) * ux,
    }
}

/// Pointwise pressure from `u_x` and `u_xx`.
#[inline]
pub fn pressure_at(ux: f64, uxx: f64, params: &ModelParams) -> f64 {
    match params.pressure_mode {
        PressureMode::Nonlinear => {
            let q2 = 1.0 + ux * ux;
            -uxx / (q2 * q2.sqrt()) - params.delta * uxx
        }
        PressureMode::Linear => -(1.0 + params.delta) * uxx,
    }
}

/// Pressure on the grid of a collocation field carrying `u_x` and `u_xx`.
pub fn pressure(
    field: &crate::spectral::CollocationField,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let ux = field.ux()?;
    let uxx = field.uxx()?;
    if ux.iter().chain(uxx).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pressure input".into()));
    }
    Ok(ux
        .iter()
        .zip(uxx)
        .map(|(a, b)| pressure_at(*a, *b, params))
        .collect())
}

/// `<A_delta(u), v>` by the grid rule.
pub fn a_delta_apply(
    u: &SpectralField,
    v: &SpectralField,
    params: &ModelParams,
    basis: &Basis,
) -> Result<f64> {
    u.check_len(basis.domain())?;
    v.check_len(basis.domain())?;
    let g = basis.grid_len();
    let mut ux = vec![0.0; g];
    let mut vx = vec![0.0; g];
    basis.eval_slopes(&u.coeffs, &mut ux);
    basis.eval_slopes(&v.coeffs, &mut vx);
    Ok(basis.integrate_with(|i| a_delta_density(ux[i], params) * vx[i]))
}

/// `d_k = <A_delta(u), e_k>`, the Galerkin pressure coefficients; `d_0 = 0`.
pub fn galerkin_pressure_coeffs(
    u: &SpectralField,
    params: &ModelParams,
    basis: &Basis,
) -> Result<SpectralField> {
    u.check_len(basis.domain())?;
    let g = basis.grid_len();
    let mut ux = vec![0.0; g];
    basis.eval_slopes(&u.coeffs, &mut ux);
    let flux: Vec<f64> = ux.iter().map(|d| a_delta_density(*d, params)).collect();
    let mut d = vec![0.0; basis.dim()];
    basis.test_slopes(&flux, &mut d);
    d[0] = 0.0;
    Ok(SpectralField { coeffs: d })
}

/// Outcome of [`validate_initial_data`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub min_u: f64,
    pub max_u: f64,
    pub touches_zero: bool,
    /// `int G(u_0)` for the limit entropy (`eps = eta = 0`); may be `+inf`.
    #[serde(with = "crate::io::float_or_string")]
    pub entropy: f64,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn entropy_finite(&self) -> bool {
        self.entropy.is_finite()
    }
}

/// Thresholds used by [`validate_initial_data`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationTolerances {
    pub tol_zero: f64,
    pub tol_neg: f64,
    /// Reject data whose entropy is infinite instead of warning.
    pub entropy_tracking: bool,
}

/// Checks nonnegativity of `u_0` and finiteness of `int G(u_0)`.
///
/// The entropy checked is the limit one (`eps = eta = 0`), so with `n >= 2`
/// data that reaches below `tol_zero` anywhere on the grid has infinite
/// entropy.
pub fn validate_initial_data(
    u0: &SpectralField,
    params: &ModelParams,
    basis: &Basis,
    tol: ValidationTolerances,
) -> Result<ValidationReport> {
    params.validate()?;
    params.check_anchor()?;
    let f = basis.synthesize(u0, DerivativeOrder::Value)?;
    // The grid is cell-centred, so sample the endpoints as well: contact
    // data typically attains its minimum there.
    let l = basis.domain().half_length;
    let ends = [-l, l].map(|x| {
        u0.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * crate::spectral::eigenfunction(j, l).value(x))
            .sum::<f64>()
    });
    let min_u =
        f.u.iter()
            .chain(&ends)
            .copied()
            .fold(f64::INFINITY, f64::min);
    let max_u =
        f.u.iter()
            .chain(&ends)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
    if min_u < -tol.tol_neg {
        return Err(Error::InvalidInitialData(format!(
            "u0 is negative on the grid (min {min_u:e} < -{:e})",
            tol.tol_neg
        )));
    }
    let sup = f.u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if sup >= params.entropy_anchor {
        return Err(Error::InvalidInitialData(format!(
            "entropy anchor a = {} does not exceed sup|u0| = {sup}",
            params.entropy_anchor
        )));
    }
    let touches_zero = min_u < tol.tol_zero;
    let limit = ModelParams {
        epsilon: 0.0,
        eta: 0.0,
        constant_mobility: None,
        ..*params
    };
    let ent = EntropyEval::new(&limit)?;
    let entropy = if touches_zero && params.n >= 2.0 {
        f64::INFINITY
    } else {
        basis.integrate_with(|i| ent.density(f.u[i].max(0.0)))
    };
    let mut warnings = Vec::new();
    if touches_zero && params.n >= 2.0 {
        warnings.push(format!(
            "u0 touches zero (min {min_u:e}) with n = {} >= 2: entropy is infinite",
            params.n
        ));
    }
    if !entropy.is_finite() {
        if tol.entropy_tracking {
            return Err(Error::InvalidInitialData(
                warnings
                    .pop()
                    .unwrap_or_else(|| "initial entropy is infinite".into()),
            ));
        } else if warnings.is_empty() {
            warnings.push("initial entropy is infinite".into());
        }
    }
    Ok(ValidationReport {
        min_u,
        max_u,
        touches_zero,
        entropy,
        warnings,
    })
}
