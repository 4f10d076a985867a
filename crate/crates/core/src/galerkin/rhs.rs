use crate::error::{Error, Result};
use crate::model::{a_delta_density, mobility, ModelParams, PressureMode};
use crate::spectral::{Basis, SpectralField};

/// Everything one right-hand-side evaluation produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RhsEval {
    /// `dc/dt`.
    pub dc: Vec<f64>,
    /// Galerkin pressure coefficients `d_k = <A_delta(u), e_k>`.
    pub pressure: Vec<f64>,
    /// `int m(u) p_x^2`.
    pub dissipation: f64,
    /// `int u_xx^2 / Q^3 + delta u_xx^2` (nonlinear) or `(1 + delta) int u_xx^2` (linear).
    pub entropy_dissipation: f64,
    /// `int m(u)^r p_x^2` for each configured `r`.
    pub weighted: Vec<f64>,
    pub sup_abs_u: f64,
    pub min_u: f64,
}

/// Grid buffers reused across evaluations.
#[derive(Debug, Clone)]
pub struct Workspace {
    u: Vec<f64>,
    ux: Vec<f64>,
    uxx: Vec<f64>,
    flux: Vec<f64>,
    px: Vec<f64>,
    mob: Vec<f64>,
    scratch: Vec<f64>,
}

impl Workspace {
    pub fn new(basis: &Basis) -> Self {
        let g = basis.grid_len();
        Self {
            u: vec![0.0; g],
            ux: vec![0.0; g],
            uxx: vec![0.0; g],
            flux: vec![0.0; g],
            px: vec![0.0; g],
            mob: vec![0.0; g],
            scratch: vec![0.0; basis.dim()],
        }
    }

    /// `p_x` from the last evaluation.
    pub fn px(&self) -> &[f64] {
        &self.px
    }

    /// `m(u)` from the last evaluation.
    pub fn mobility(&self) -> &[f64] {
        &self.mob
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }
}

fn check_finite(values: &[f64], stage: &'static str, t: f64) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteRhs { stage, t })
    }
}

/// Evaluates `dc_j/dt = -(m(u) p_x, e_j')` without forming the Gram matrix:
/// synthesize `u, u_x, u_xx`; test the `A_delta` flux density against `e_k'`
/// to get the pressure coefficients `d_k`; synthesize `p_x = sum d_k e_k'`;
/// test `m(u) p_x` against `e_j'`.
pub fn evaluate(
    coeffs: &[f64],
    params: &ModelParams,
    basis: &Basis,
    r_values: &[f64],
    ws: &mut Workspace,
    t: f64,
    out: &mut RhsEval,
) -> Result<()> {
    let dim = basis.dim();
    if coeffs.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            actual: coeffs.len(),
        });
    }
    check_finite(coeffs, "coefficients", t)?;
    basis.eval_values(coeffs, &mut ws.u);
    basis.eval_slopes(coeffs, &mut ws.ux);
    basis.eval_curvatures(coeffs, &mut ws.scratch, &mut ws.uxx);
    check_finite(&ws.u, "synthesis", t)?;

    for (f, ux) in ws.flux.iter_mut().zip(&ws.ux) {
        *f = a_delta_density(*ux, params);
    }
    out.pressure.resize(dim, 0.0);
    basis.test_slopes(&ws.flux, &mut out.pressure);
    out.pressure[0] = 0.0;
    check_finite(&out.pressure, "pressure", t)?;

    basis.eval_slopes(&out.pressure, &mut ws.px);
    for (m, u) in ws.mob.iter_mut().zip(&ws.u) {
        *m = mobility(*u, params);
    }
    for ((f, m), px) in ws.flux.iter_mut().zip(&ws.mob).zip(&ws.px) {
        *f = m * px;
    }
    check_finite(&ws.flux, "flux", t)?;
    out.dc.resize(dim, 0.0);
    basis.test_slopes(&ws.flux, &mut out.dc);
    for d in out.dc.iter_mut() {
        *d = -*d;
    }
    // e_0' vanishes identically.
    out.dc[0] = 0.0;

    let h = basis.weight();
    out.dissipation = h * ws
        .flux
        .iter()
        .zip(&ws.px)
        .map(|(f, px)| f * px)
        .sum::<f64>();
    out.entropy_dissipation = h * match params.pressure_mode {
        PressureMode::Nonlinear => ws
            .ux
            .iter()
            .zip(&ws.uxx)
            .map(|(ux, uxx)| {
                let q2 = 1.0 + ux * ux;
                uxx * uxx * (1.0 / (q2 * q2.sqrt()) + params.delta)
            })
            .sum::<f64>(),
        PressureMode::Linear => (1.0 + params.delta) * ws.uxx.iter().map(|v| v * v).sum::<f64>(),
    };
    out.weighted.clear();
    for r in r_values {
        let v = h * ws
            .mob
            .iter()
            .zip(&ws.px)
            .map(|(m, px)| m.powf(*r) * px * px)
            .sum::<f64>();
        out.weighted.push(v);
    }
    out.sup_abs_u = ws.u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    out.min_u = ws.u.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(())
}

/// `dc/dt` for the Galerkin system at `c`.
pub fn assemble_rhs(
    c: &SpectralField,
    params: &ModelParams,
    basis: &Basis,
) -> Result<SpectralField> {
    c.check_len(basis.domain())?;
    let mut ws = Workspace::new(basis);
    let mut out = RhsEval::default();
    evaluate(&c.coeffs, params, basis, &[], &mut ws, 0.0, &mut out)?;
    Ok(SpectralField { coeffs: out.dc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DomainSpec;

    #[test]
    fn constant_state_is_steady() {
        let b = Basis::new(DomainSpec::new(1.0, 8, 8).unwrap()).unwrap();
        let c = SpectralField::constant(0.7, b.domain());
        let dc = assemble_rhs(&c, &ModelParams::default(), &b).unwrap();
        assert!(dc.coeffs.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn mass_component_is_exactly_zero() {
        let b = Basis::new(DomainSpec::new(1.0, 8, 8).unwrap()).unwrap();
        let c = SpectralField::new(vec![1.0, 0.3, -0.2, 0.1, 0.05, 0.0, 0.01, 0.0, 0.002]).unwrap();
        let dc = assemble_rhs(&c, &ModelParams::default(), &b).unwrap();
        assert_eq!(dc.coeffs[0], 0.0);
        assert!(dc.coeffs[1].abs() > 0.0);
    }

    #[test]
    fn reports_non_finite_stage() {
        let b = Basis::new(DomainSpec::new(1.0, 4, 8).unwrap()).unwrap();
        let mut ws = Workspace::new(&b);
        let mut out = RhsEval::default();
        let c = vec![1.0, f64::NAN, 0.0, 0.0, 0.0];
        let err =
            evaluate(&c, &ModelParams::default(), &b, &[], &mut ws, 0.5, &mut out).unwrap_err();
        assert_eq!(
            err,
            Error::NonFiniteRhs {
                stage: "coefficients",
                t: 0.5
            }
        );
        let c = vec![1e300, 1e300, 0.0, 0.0, 0.0];
        let p = ModelParams {
            n: 4.0,
            ..Default::default()
        };
        assert!(matches!(
            evaluate(&c, &p, &b, &[], &mut ws, 0.0, &mut out),
            Err(Error::NonFiniteRhs { .. })
        ));
    }
}
