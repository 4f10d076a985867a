//! Reference computations that share no code with the crate: tanh-sinh
//! quadrature, central differences and the textbook eigenfunctions.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Tanh-sinh (double exponential) quadrature on `[a, b]`, refined by
/// halving the step until two levels agree to `1e-15` relative.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let term = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / s.cosh().powi(2);
        let y = s.tanh();
        // Distance from the endpoints, computed without cancellation.
        let x = if y >= 0.0 {
            b - r / (s.exp() * s.cosh())
        } else {
            a + r / ((-s).exp() * s.cosh())
        };
        let x = if t == 0.0 { c } else { x };
        if x <= a || x >= b {
            0.0
        } else {
            w * f(x)
        }
    };
    let t_max = 3.2;
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut prev = r * h * sum;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += term(t) + term(-t);
            k += 2;
        }
        let est = r * h * sum;
        if (est - prev).abs() <= 1e-15 * est.abs().max(1e-300) {
            return est;
        }
        prev = est;
    }
    prev
}

/// Fourth-order central difference.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Second-order central difference.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `e_0 = (2l)^{-1/2}`, `e_j = l^{-1/2} cos(sqrt(lambda_j) x + j pi / 2)`.
pub fn textbook_eigenfunction(j: usize, l: f64, x: f64) -> f64 {
    if j == 0 {
        return 1.0 / (2.0 * l).sqrt();
    }
    let k = j as f64 * PI / (2.0 * l);
    (k * x + j as f64 * PI / 2.0).cos() / l.sqrt()
}

pub fn textbook_eigenfunction_dx(j: usize, l: f64, x: f64) -> f64 {
    if j == 0 {
        return 0.0;
    }
    let k = j as f64 * PI / (2.0 * l);
    -k * (k * x + j as f64 * PI / 2.0).sin() / l.sqrt()
}

/// `sum_j c_j e_j(x)` evaluated pointwise.
pub fn series(coeffs: &[f64], l: f64, x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * textbook_eigenfunction(j, l, x))
        .sum()
}

pub fn series_dx(coeffs: &[f64], l: f64, x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * textbook_eigenfunction_dx(j, l, x))
        .sum()
}

/// `G(s) = int_s^a int_r^a dtau / m(tau) dr` by nested tanh-sinh.
pub fn entropy_density<M: Fn(f64) -> f64>(m: M, s: f64, a: f64) -> f64 {
    tanh_sinh(|r| tanh_sinh(|tau| 1.0 / m(tau), r, a), s, a)
}

/// Seed for randomized sampling: `CAPILLARY1D_SEED` when set.
pub fn seed() -> u64 {
    std::env::var("CAPILLARY1D_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5eed1d)
}
