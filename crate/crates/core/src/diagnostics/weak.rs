use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::{evaluate, Observer, RhsEval, Workspace};
use crate::model::ModelParams;
use crate::spectral::{eigenfunction, Basis};

/// `r_j = (u_t, e_j) + (J, e_j')` for a list of test modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub modes: Vec<usize>,
    pub residual: Vec<f64>,
    /// Largest magnitude of either term over the tested modes.
    pub scale: f64,
}

impl WeakResidual {
    pub fn norm(&self) -> f64 {
        self.residual.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    pub fn get(&self, mode: usize) -> Option<f64> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .map(|i| self.residual[i])
    }

    /// `max |r_j|` over tested modes `j <= n`.
    pub fn max_within(&self, n: usize) -> f64 {
        self.modes
            .iter()
            .zip(&self.residual)
            .filter(|(m, _)| **m <= n)
            .fold(0.0, |a, (_, r)| a.max(r.abs()))
    }
}

/// Modes `0..=2N+1`.
pub fn default_modes(n: usize) -> Vec<usize> {
    (0..=2 * n + 1).collect()
}

/// Weak-form residual of the Galerkin solution against `e_j`, including modes
/// beyond `N` to expose truncation.
///
/// The flux `J = m(u) p_x` is restricted to `{u > tol_zero}`. `u_t` defaults
/// to the Galerkin right-hand side at `coeffs`.
pub fn weak_residual(
    coeffs: &[f64],
    u_t: Option<&[f64]>,
    params: &ModelParams,
    basis: &Basis,
    test_modes: &[usize],
    tol_zero: f64,
) -> Result<WeakResidual> {
    let mut ws = Workspace::new(basis);
    let mut ev = RhsEval::default();
    evaluate(coeffs, params, basis, &[], &mut ws, 0.0, &mut ev)?;
    let dc = match u_t {
        Some(v) => {
            if v.len() != basis.dim() {
                return Err(Error::LengthMismatch {
                    expected: basis.dim(),
                    actual: v.len(),
                });
            }
            v
        }
        None => &ev.dc[..],
    };
    let g = basis.grid_len();
    let mut ut = vec![0.0; g];
    basis.eval_values(dc, &mut ut);
    let flux: Vec<f64> = ws
        .u()
        .iter()
        .zip(ws.mobility())
        .zip(ws.px())
        .map(|((u, m), px)| if *u > tol_zero { m * px } else { 0.0 })
        .collect();
    let l = basis.domain().half_length;
    let x = basis.grid();
    let mut residual = Vec::with_capacity(test_modes.len());
    let mut scale = 0.0f64;
    for &j in test_modes {
        let e = eigenfunction(j, l);
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..g {
            a += ut[i] * e.value(x[i]);
            b += flux[i] * e.derivative(x[i]);
        }
        a *= basis.weight();
        b *= basis.weight();
        scale = scale.max(a.abs()).max(b.abs());
        residual.push(a + b);
    }
    Ok(WeakResidual {
        modes: test_modes.to_vec(),
        residual,
        scale,
    })
}

/// Observer checking `max_{j <= N} |r_j| / scale` on every accepted step.
pub struct WeakResidualMonitor<'a> {
    params: ModelParams,
    basis: &'a Basis,
    tol_zero: f64,
    ws: Workspace,
    ev: RhsEval,
    ut: Vec<f64>,
    flux: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    pub steps: usize,
    pub max_relative: f64,
    pub t_at_max: f64,
    pub error: Option<Error>,
}

impl<'a> WeakResidualMonitor<'a> {
    pub fn new(params: ModelParams, basis: &'a Basis, tol_zero: f64) -> Self {
        let g = basis.grid_len();
        Self {
            params,
            basis,
            tol_zero,
            ws: Workspace::new(basis),
            ev: RhsEval::default(),
            ut: vec![0.0; g],
            flux: vec![0.0; g],
            a: vec![0.0; basis.dim()],
            b: vec![0.0; basis.dim()],
            steps: 0,
            max_relative: 0.0,
            t_at_max: 0.0,
            error: None,
        }
    }
}

impl Observer for WeakResidualMonitor<'_> {
    fn wants_steps(&self) -> bool {
        true
    }

    fn on_step(&mut self, t: f64, coeffs: &[f64], _rhs: &RhsEval) {
        if let Err(e) = evaluate(
            coeffs,
            &self.params,
            self.basis,
            &[],
            &mut self.ws,
            t,
            &mut self.ev,
        ) {
            self.error.get_or_insert(e);
            return;
        }
        self.basis.eval_values(&self.ev.dc, &mut self.ut);
        for (((f, u), m), px) in self
            .flux
            .iter_mut()
            .zip(self.ws.u())
            .zip(self.ws.mobility())
            .zip(self.ws.px())
        {
            *f = if *u > self.tol_zero { m * px } else { 0.0 };
        }
        self.basis.test_values(&self.ut, &mut self.a);
        self.basis.test_slopes(&self.flux, &mut self.b);
        let (mut r, mut scale) = (0.0f64, 0.0f64);
        for (a, b) in self.a.iter().zip(&self.b) {
            r = r.max((a + b).abs());
            scale = scale.max(a.abs()).max(b.abs());
        }
        let rel = if r == 0.0 { 0.0 } else { r / scale };
        self.steps += 1;
        if rel > self.max_relative {
            self.max_relative = rel;
            self.t_at_max = t;
        }
    }
}
