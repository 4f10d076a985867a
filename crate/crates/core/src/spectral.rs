//! Neumann cosine eigenbasis of the Laplacian on `(-l, l)`.
//!
//! The basis functions are
//!
//! ```text
//! e_0(x) = 1 / sqrt(2l)
//! e_j(x) = cos(sqrt(lambda_j) x + j pi / 2) / sqrt(l),   lambda_j = (j pi / (2l))^2
//! ```
//!
//! which is the same as `cos(j pi (x + l) / (2l)) / sqrt(l)`; the shifted form is
//! what gets evaluated, with the phase reduced modulo `2 pi` before calling
//! `cos`/`sin` so that `e_j'(+-l)` vanishes to the last bit.
//!
//! Integrals over the domain use the cell-centred midpoint rule on
//! `G = oversample * (N + 1)` uniform nodes. Those nodes double as the
//! collocation grid. The rule is exact for every cosine `cos(m pi (x + l) / (2l))`
//! with `0 < m < 2G`, so products `e_i e_j` and `e_i' e_j'` with `i, j <= N` are
//! integrated exactly, and every integrand built from even reflections of
//! basis functions (`Q`, `m(u) p_x e_j'`, ...) converges spectrally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Geometry and resolution of the discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    /// Half length `l` of the interval `(-l, l)`.
    pub half_length: f64,
    /// Highest mode index `N`; the space has `N + 1` basis functions.
    pub modes: usize,
    /// Grid points per mode.
    pub oversample: usize,
}

impl DomainSpec {
    pub const DEFAULT_OVERSAMPLE: usize = 8;

    pub fn new(half_length: f64, modes: usize, oversample: usize) -> Result<Self> {
        let d = Self {
            half_length,
            modes,
            oversample,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_length.is_finite() && self.half_length > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "half length must be positive, got {}",
                self.half_length
            )));
        }
        if self.modes < 1 {
            return Err(Error::InvalidDomain("need at least N = 1".into()));
        }
        if self.oversample < 4 {
            return Err(Error::InvalidDomain(format!(
                "oversample must be >= 4, got {}",
                self.oversample
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.modes + 1
    }

    pub fn grid_len(&self) -> usize {
        self.oversample * (self.modes + 1)
    }

    /// `mu(Omega) = 2l`.
    pub fn measure(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        let k = wavenumber(j, self.half_length);
        k * k
    }
}

fn wavenumber(j: usize, l: f64) -> f64 {
    std::f64::consts::PI * j as f64 / (2.0 * l)
}

/// Phase of `e_j` at `x` as a multiple of `pi`, reduced to `[0, 2)`.
fn reduced_phase(j: usize, x: f64, l: f64) -> f64 {
    (j as f64 * (x + l) / (2.0 * l)).rem_euclid(2.0)
}

/// Closed-form handle for a single basis function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenfunction {
    pub index: usize,
    half_length: f64,
}

impl Eigenfunction {
    fn amplitude(&self) -> f64 {
        if self.index == 0 {
            1.0 / (2.0 * self.half_length).sqrt()
        } else {
            1.0 / self.half_length.sqrt()
        }
    }

    pub fn eigenvalue(&self) -> f64 {
        let k = wavenumber(self.index, self.half_length);
        k * k
    }

    pub fn value(&self, x: f64) -> f64 {
        if self.index == 0 {
            return self.amplitude();
        }
        let theta = std::f64::consts::PI * reduced_phase(self.index, x, self.half_length);
        self.amplitude() * theta.cos()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if self.index == 0 {
            return 0.0;
        }
        let k = wavenumber(self.index, self.half_length);
        let theta = std::f64::consts::PI * reduced_phase(self.index, x, self.half_length);
        -k * self.amplitude() * theta.sin()
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        -self.eigenvalue() * self.value(x)
    }
}

/// `e_j` together with its eigenvalue `lambda_j`.
pub fn eigenpair(j: usize, domain: &DomainSpec) -> Result<(Eigenfunction, f64)> {
    if j > domain.modes {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: domain.modes,
        });
    }
    let e = Eigenfunction {
        index: j,
        half_length: domain.half_length,
    };
    Ok((e, e.eigenvalue()))
}

/// Unbounded variant of [`eigenpair`] used to probe modes beyond `N`.
pub fn eigenfunction(j: usize, half_length: f64) -> Eigenfunction {
    Eigenfunction {
        index: j,
        half_length,
    }
}

/// Coefficients `(c_0, ..., c_N)` of `u = sum c_j e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(domain: &DomainSpec) -> Self {
        Self {
            coeffs: vec![0.0; domain.dim()],
        }
    }

    /// The constant function `value`.
    pub fn constant(value: f64, domain: &DomainSpec) -> Self {
        let mut f = Self::zeros(domain);
        f.coeffs[0] = value * domain.measure().sqrt();
        f
    }

    /// `amplitude * e_j`.
    pub fn mode(j: usize, amplitude: f64, domain: &DomainSpec) -> Result<Self> {
        if j > domain.modes {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: domain.modes,
            });
        }
        let mut f = Self::zeros(domain);
        f.coeffs[j] = amplitude;
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `int u dx = c_0 sqrt(2l)`.
    pub fn mass(&self, domain: &DomainSpec) -> f64 {
        self.coeffs[0] * domain.measure().sqrt()
    }

    pub fn mean(&self, domain: &DomainSpec) -> f64 {
        self.coeffs[0] / domain.measure().sqrt()
    }

    /// Zero-padded or truncated copy with `modes + 1` coefficients.
    pub fn resized(&self, modes: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(modes + 1, 0.0);
        Self { coeffs: c }
    }

    pub fn check_len(&self, domain: &DomainSpec) -> Result<()> {
        if self.coeffs.len() != domain.dim() {
            return Err(Error::LengthMismatch {
                expected: domain.dim(),
                actual: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Which derivatives [`Basis::synthesize`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DerivativeOrder {
    Value = 0,
    First = 1,
    Second = 2,
}

impl TryFrom<u8> for DerivativeOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Self::Value),
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            other => Err(Error::InvalidParameter(format!(
                "derivative order must be 0, 1 or 2, got {other}"
            ))),
        }
    }
}

/// Grid samples of `u` and optionally its derivatives, pressure and `Q = sqrt(1 + u_x^2)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollocationField {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Option<Vec<f64>>,
    pub uxx: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
}

impl CollocationField {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Fills `q` from `ux`.
    pub fn with_q(mut self) -> Self {
        if let Some(ux) = &self.ux {
            self.q = Some(ux.iter().map(|d| (1.0 + d * d).sqrt()).collect());
        }
        self
    }

    pub fn ux(&self) -> Result<&[f64]> {
        self.ux
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("collocation field lacks u_x".into()))
    }

    pub fn uxx(&self) -> Result<&[f64]> {
        self.uxx
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("collocation field lacks u_xx".into()))
    }
}

/// Basis tables sampled on the collocation grid.
///
/// `values[g * dim + j] = e_j(x_g)` and `slopes[g * dim + j] = e_j'(x_g)`.
#[derive(Debug, Clone)]
pub struct Basis {
    domain: DomainSpec,
    x: Vec<f64>,
    weight: f64,
    lambda: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Basis {
    pub fn new(domain: DomainSpec) -> Result<Self> {
        domain.validate()?;
        let dim = domain.dim();
        let g = domain.grid_len();
        let l = domain.half_length;
        let weight = domain.measure() / g as f64;
        let x: Vec<f64> = (0..g).map(|i| -l + (i as f64 + 0.5) * weight).collect();
        let lambda: Vec<f64> = (0..dim).map(|j| domain.eigenvalue(j)).collect();
        let mut values = vec![0.0; g * dim];
        let mut slopes = vec![0.0; g * dim];
        for (gi, &xg) in x.iter().enumerate() {
            for j in 0..dim {
                let e = eigenfunction(j, l);
                values[gi * dim + j] = e.value(xg);
                slopes[gi * dim + j] = e.derivative(xg);
            }
        }
        Ok(Self {
            domain,
            x,
            weight,
            lambda,
            values,
            slopes,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn grid_len(&self) -> usize {
        self.x.len()
    }

    /// Midpoint weight `h = 2l / G`, shared by all nodes.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    /// `out_g = sum_j c_j e_j(x_g)`.
    pub fn eval_values(&self, coeffs: &[f64], out: &mut [f64]) {
        eval_table(&self.values, self.dim(), coeffs, out);
    }

    /// `out_g = sum_j c_j e_j'(x_g)`.
    pub fn eval_slopes(&self, coeffs: &[f64], out: &mut [f64]) {
        eval_table(&self.slopes, self.dim(), coeffs, out);
    }

    /// `out_g = sum_j c_j e_j''(x_g) = -sum_j lambda_j c_j e_j(x_g)`.
    pub fn eval_curvatures(&self, coeffs: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        for ((s, c), l) in scratch.iter_mut().zip(coeffs).zip(&self.lambda) {
            *s = -l * c;
        }
        eval_table(&self.values, self.dim(), scratch, out);
    }

    /// `out_j = (v, e_j)` by the grid rule.
    pub fn test_values(&self, samples: &[f64], out: &mut [f64]) {
        test_table(&self.values, self.dim(), self.weight, samples, out);
    }

    /// `out_j = (v, e_j')` by the grid rule.
    pub fn test_slopes(&self, samples: &[f64], out: &mut [f64]) {
        test_table(&self.slopes, self.dim(), self.weight, samples, out);
    }

    /// Integral over the domain of grid samples.
    pub fn quadrature(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.grid_len() {
            return Err(Error::LengthMismatch {
                expected: self.grid_len(),
                actual: values.len(),
            });
        }
        Ok(self.integrate(values))
    }

    /// Unchecked variant of [`Basis::quadrature`].
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weight * values.iter().sum::<f64>()
    }

    /// Integral of `f(x_g)` over the grid.
    pub fn integrate_with<F: FnMut(usize) -> f64>(&self, mut f: F) -> f64 {
        self.weight * (0..self.grid_len()).map(&mut f).sum::<f64>()
    }

    /// Orthogonal projection of grid samples onto `V_N`.
    pub fn project(&self, samples: &CollocationField) -> Result<SpectralField> {
        self.project_samples(&samples.u)
    }

    pub fn project_samples(&self, samples: &[f64]) -> Result<SpectralField> {
        if samples.len() != self.grid_len() {
            return Err(Error::LengthMismatch {
                expected: self.grid_len(),
                actual: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("projection samples".into()));
        }
        let mut c = vec![0.0; self.dim()];
        self.test_values(samples, &mut c);
        Ok(SpectralField { coeffs: c })
    }

    /// Orthogonal projection of a function handle onto `V_N`.
    ///
    /// The handle is sampled on a composite 8-point Gauss–Legendre rule with
    /// `8 (N + 1)` panels, independent of the collocation grid, so smooth
    /// non-periodic data (e.g. polynomials) are projected to near machine
    /// precision.
    pub fn project_fn<F: Fn(f64) -> f64>(&self, f: F) -> Result<SpectralField> {
        let l = self.domain.half_length;
        let panels = 8 * self.dim();
        let (nodes, weights) = quad::gauss_legendre(8);
        let h = 2.0 * l / panels as f64;
        let basis: Vec<Eigenfunction> = (0..self.dim()).map(|j| eigenfunction(j, l)).collect();
        let mut c = vec![0.0; self.dim()];
        for p in 0..panels {
            let mid = -l + (p as f64 + 0.5) * h;
            for (xi, wi) in nodes.iter().zip(&weights) {
                let x = mid + 0.5 * h * xi;
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("projected function at x = {x}")));
                }
                let w = 0.5 * h * wi * v;
                for (cj, e) in c.iter_mut().zip(&basis) {
                    *cj += w * e.value(x);
                }
            }
        }
        Ok(SpectralField { coeffs: c })
    }

    /// Samples `u` and, depending on `order`, `u_x` and `u_xx` on the grid.
    pub fn synthesize(
        &self,
        field: &SpectralField,
        order: DerivativeOrder,
    ) -> Result<CollocationField> {
        field.check_len(&self.domain)?;
        if field.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients".into()));
        }
        let g = self.grid_len();
        let mut u = vec![0.0; g];
        self.eval_values(&field.coeffs, &mut u);
        let ux = if order >= DerivativeOrder::First {
            let mut v = vec![0.0; g];
            self.eval_slopes(&field.coeffs, &mut v);
            Some(v)
        } else {
            None
        };
        let uxx = if order >= DerivativeOrder::Second {
            let mut v = vec![0.0; g];
            let mut scratch = vec![0.0; self.dim()];
            self.eval_curvatures(&field.coeffs, &mut scratch, &mut v);
            Some(v)
        } else {
            None
        };
        Ok(CollocationField {
            x: self.x.clone(),
            u,
            ux,
            uxx,
            p: None,
            q: None,
        })
    }
}

fn eval_table(table: &[f64], dim: usize, coeffs: &[f64], out: &mut [f64]) {
    debug_assert_eq!(coeffs.len(), dim);
    for (o, row) in out.iter_mut().zip(table.chunks_exact(dim)) {
        *o = row.iter().zip(coeffs).map(|(a, b)| a * b).sum();
    }
}

fn test_table(table: &[f64], dim: usize, weight: f64, samples: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), dim);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (s, row) in samples.iter().zip(table.chunks_exact(dim)) {
        for (o, e) in out.iter_mut().zip(row) {
            *o += s * e;
        }
    }
    out.iter_mut().for_each(|o| *o *= weight);
}

/// `L^2`, `H^1` and `H^2` norms from Parseval's identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorms {
    pub l2: f64,
    /// `||u_x||_{L^2}`.
    pub dx_l2: f64,
    /// `||u_xx||_{L^2}`.
    pub dxx_l2: f64,
    pub h1: f64,
    pub h2: f64,
}

pub fn sobolev_norms(field: &SpectralField, domain: &DomainSpec) -> SobolevNorms {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (j, c) in field.coeffs.iter().enumerate() {
        let l = domain.eigenvalue(j);
        let c2 = c * c;
        s0 += c2;
        s1 += l * c2;
        s2 += l * l * c2;
    }
    SobolevNorms {
        l2: s0.sqrt(),
        dx_l2: s1.sqrt(),
        dxx_l2: s2.sqrt(),
        h1: (s0 + s1).sqrt(),
        h2: (s0 + s1 + s2).sqrt(),
    }
}
