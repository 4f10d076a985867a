//! Uniform slope bound from surface energy and curvature dissipation.
//!
//! With `f = u_x / Q` and `g = Q^{-1/2} = (1 - f^2)^{1/4}`:
//!
//! * `||g_x||^2 = (1/4) int f^2 u_xx^2 / Q^3 <= c2 / 4` where `c2 = int u_xx^2 / Q^3`,
//! * `||g||_inf <= 1`, so `||g||_{H^1} <= sqrt(2l + c2/4)`,
//! * `|g(x) - g(z)| <= ||g_x||_{L^2} |x - z|^{1/2}` (Cauchy–Schwarz; the
//!   constant is 1 on any interval), hence `K = HOLDER_EMBEDDING * sqrt(2l + c2/4)`.
//!
//! If `y = max |f|` then `(1/2) int_{-l}^{l} dx / (K^2 |x - l| + sqrt(1 - y^2)) <= c1 = int Q`,
//! and the left side blows up as `y -> 1`. The threshold `M(c1, K) < 1`
//! solving the equality therefore bounds `y`.

use serde::{Deserialize, Serialize};

use crate::spectral::{sobolev_norms, Basis, SpectralField};

/// Hölder-1/2 seminorm constant of `H^1(-l, l)`.
pub const HOLDER_EMBEDDING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBound {
    /// `max |u_x| / Q`.
    pub y_max: f64,
    /// `min Q^{-1/2}`.
    pub g_min: f64,
    /// `||Q^{-1/2}||_{H^1}`.
    pub g_h1: f64,
    pub h2: f64,
    /// `int Q`.
    pub c1: f64,
    /// `int u_xx^2 / Q^3`.
    pub c2: f64,
    pub k: f64,
    /// Threshold `M(c1, K)`.
    pub threshold: f64,
}

impl GradientBound {
    pub fn holds(&self) -> bool {
        self.y_max <= self.threshold
    }

    pub fn margin(&self) -> f64 {
        self.threshold - self.y_max
    }
}

/// `(1/2) int_{-l}^{l} dx / (K^2 (l - x) + sqrt(1 - y^2))` in closed form.
pub fn threshold_integral(y: f64, k: f64, half_length: f64) -> f64 {
    let s = (1.0 - y * y).max(0.0).sqrt();
    if s == 0.0 {
        return f64::INFINITY;
    }
    let k2 = k * k;
    if k2 == 0.0 {
        return half_length / s;
    }
    (2.0 * half_length * k2 / s).ln_1p() / (2.0 * k2)
}

/// Largest `y in [0, 1)` with `threshold_integral(y) <= c1`, by bisection.
pub fn slope_threshold(c1: f64, k: f64, half_length: f64) -> f64 {
    if threshold_integral(0.0, k, half_length) >= c1 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if threshold_integral(mid, k, half_length) <= c1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Slope-bound quantities of a field from its grid derivatives.
pub fn gradient_bound_quantities(
    coeffs: &SpectralField,
    ux: &[f64],
    uxx: &[f64],
    basis: &Basis,
) -> GradientBound {
    let l = basis.domain().half_length;
    let mut y_max = 0.0f64;
    let mut g_min = f64::INFINITY;
    let (mut c1, mut c2, mut g2, mut gx2) = (0.0, 0.0, 0.0, 0.0);
    for (d, dd) in ux.iter().zip(uxx) {
        let q = (1.0 + d * d).sqrt();
        let f = d / q;
        let g = q.powf(-0.5);
        let gx = -0.5 * f * dd / q.powf(1.5);
        y_max = y_max.max(f.abs());
        g_min = g_min.min(g);
        c1 += q;
        c2 += dd * dd / (q * q * q);
        g2 += g * g;
        gx2 += gx * gx;
    }
    let h = basis.weight();
    let (c1, c2) = (c1 * h, c2 * h);
    let k = HOLDER_EMBEDDING * (2.0 * l + 0.25 * c2).sqrt();
    GradientBound {
        y_max,
        g_min,
        g_h1: (h * (g2 + gx2)).sqrt(),
        h2: sobolev_norms(coeffs, basis.domain()).h2,
        c1,
        c2,
        k,
        threshold: slope_threshold(c1, k, l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{DerivativeOrder, DomainSpec};

    #[test]
    fn constant_field() {
        let b = Basis::new(DomainSpec::new(1.0, 4, 8).unwrap()).unwrap();
        let c = SpectralField::constant(0.8, b.domain());
        let f = b.synthesize(&c, DerivativeOrder::Second).unwrap();
        let q = gradient_bound_quantities(&c, f.ux.as_ref().unwrap(), f.uxx.as_ref().unwrap(), &b);
        assert_eq!(q.y_max, 0.0);
        assert!((q.g_min - 1.0).abs() < 1e-15);
        assert!((q.h2 - c.coeffs[0].abs()).abs() < 1e-15);
        assert!(q.holds());
    }

    #[test]
    fn threshold_monotone_in_c1_and_k() {
        let l = 1.0;
        let mut prev = 0.0;
        for c1 in [2.1, 2.5, 3.0, 4.0] {
            let m = slope_threshold(c1, 1.5, l);
            assert!(m > prev);
            prev = m;
        }
        let mut prev = 0.0;
        for k in [0.5, 1.0, 1.5, 2.0] {
            let m = slope_threshold(2.05, k, l);
            assert!(m >= prev, "k={k}: {m} < {prev}");
            prev = m;
        }
    }

    #[test]
    fn threshold_solves_the_equation() {
        let (c1, k, l) = (1.2, 0.8, 0.7);
        let m = slope_threshold(c1, k, l);
        assert!(m > 0.0 && m < 1.0);
        assert!((threshold_integral(m, k, l) - c1).abs() < 1e-9);
    }
}
