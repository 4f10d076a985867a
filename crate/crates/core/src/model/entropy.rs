//! Entropy functions
//!
//! ```text
//! g(s) = -int_s^a dr / m(r),      G(s) = -int_s^a g(r) dr = int_s^a (r - s) / m(r) dr
//! ```
//!
//! For `eps = 0` the reciprocal mobility is `|s|^-n + eta` and both functions
//! have closed forms for every `n >= 1`. For `eps > 0` the two moments
//! `I0(s) = int_s^a 1/m` and `I1(s) = int_s^a r/m` are tabulated on a
//! log-spaced grid in `(0, a]` and completed by adaptive Simpson on the
//! partial segment, so `G = I1 - s I0` and `g = -I0`.

use crate::error::{Error, Result};
use crate::model::{mobility, ModelParams};
use crate::quad::adaptive_simpson;

const TABLE_LEN: usize = 4096;
/// Lower end of the table relative to `a`.
const TABLE_FLOOR: f64 = 1e-8;
const SEGMENT_TOL: f64 = 1e-15;
const TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
enum Repr {
    /// `1/m = |s|^-n + eta`.
    Power {
        n: f64,
        eta: f64,
    },
    /// `1/m = 1/mu`.
    Constant {
        mu: f64,
    },
    Table(Table),
}

#[derive(Debug, Clone)]
struct Table {
    params: ModelParams,
    s_min: f64,
    log_ratio: f64,
    nodes: Vec<f64>,
    /// `int_{nodes[k]}^a 1/m`.
    i0: Vec<f64>,
    /// `int_{nodes[k]}^a r/m`.
    i1: Vec<f64>,
}

/// `g_eps` and `G_eps` for a fixed parameter set and anchor `a`.
///
/// Immutable once built; share freely across threads.
#[derive(Debug, Clone)]
pub struct EntropyEval {
    anchor: f64,
    repr: Repr,
}

impl EntropyEval {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.check_anchor()?;
        let a = params.entropy_anchor;
        let repr = if let Some(mu) = params.constant_mobility {
            Repr::Constant { mu }
        } else if params.epsilon == 0.0 {
            if params.n < 1.0 {
                return Err(Error::InvalidParameter("n must be >= 1".into()));
            }
            Repr::Power {
                n: params.n,
                eta: params.eta,
            }
        } else {
            Repr::Table(Table::build(*params, a))
        };
        Ok(Self { anchor: a, repr })
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn closed_form(&self) -> bool {
        !matches!(self.repr, Repr::Table(_))
    }

    /// `g_eps(s)`; `-inf` where the integral diverges (`eps = 0`, `s <= 0`).
    pub fn derivative(&self, s: f64) -> f64 {
        let a = self.anchor;
        match &self.repr {
            Repr::Constant { mu } => -(a - s) / mu,
            Repr::Power { n, eta } => {
                if s <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                -(power_i0(*n, s, a) + eta * (a - s))
            }
            Repr::Table(t) => -t.moments(s).0,
        }
    }

    /// `G_eps(s)`; `+inf` where the integral diverges.
    pub fn density(&self, s: f64) -> f64 {
        let a = self.anchor;
        match &self.repr {
            Repr::Constant { mu } => 0.5 * (a - s) * (a - s) / mu,
            Repr::Power { n, eta } => {
                let tail = 0.5 * eta * (a - s) * (a - s);
                if s < 0.0 {
                    return f64::INFINITY;
                }
                if s == 0.0 {
                    return if *n < 2.0 {
                        a.powf(2.0 - n) / (2.0 - n) + tail
                    } else {
                        f64::INFINITY
                    };
                }
                power_j(*n, s, a) + tail
            }
            Repr::Table(t) => {
                let (i0, i1) = t.moments(s);
                (i1 - s * i0).max(0.0)
            }
        }
    }
}

/// `int_s^a r^-n dr` for `s > 0`.
fn power_i0(n: f64, s: f64, a: f64) -> f64 {
    if n == 1.0 {
        (a / s).ln()
    } else {
        (s.powf(1.0 - n) - a.powf(1.0 - n)) / (n - 1.0)
    }
}

/// `int_s^a (r - s) r^-n dr` for `s > 0`.
fn power_j(n: f64, s: f64, a: f64) -> f64 {
    if n == 1.0 {
        // a - s - s ln(a/s)
        return (a - s) - s * (a / s).ln();
    }
    if n == 2.0 {
        // ln(a/s) - (a - s)/a
        return (a / s).ln() - (a - s) / a;
    }
    if n == 3.0 {
        return (a - s) * (a - s) / (2.0 * a * a * s);
    }
    let first = (a.powf(2.0 - n) - s.powf(2.0 - n)) / (2.0 - n);
    (first - s * power_i0(n, s, a)).max(0.0)
}

impl Table {
    fn build(params: ModelParams, a: f64) -> Self {
        let s_min = a * TABLE_FLOOR;
        let log_ratio = (a / s_min).ln() / (TABLE_LEN - 1) as f64;
        let mut nodes: Vec<f64> = (0..TABLE_LEN)
            .map(|k| s_min * (k as f64 * log_ratio).exp())
            .collect();
        nodes[TABLE_LEN - 1] = a;
        let mut i0 = vec![0.0; TABLE_LEN];
        let mut i1 = vec![0.0; TABLE_LEN];
        let recip = |r: f64| 1.0 / mobility(r, &params);
        let weighted = |r: f64| r / mobility(r, &params);
        for k in (0..TABLE_LEN - 1).rev() {
            let (lo, hi) = (nodes[k], nodes[k + 1]);
            let tol = SEGMENT_TOL * (hi - lo);
            i0[k] = i0[k + 1] + adaptive_simpson(&recip, lo, hi, tol / params.epsilon);
            i1[k] = i1[k + 1] + adaptive_simpson(&weighted, lo, hi, tol);
        }
        Self {
            params,
            s_min,
            log_ratio,
            nodes,
            i0,
            i1,
        }
    }

    /// `(I0(s), I1(s))`; negative moments when `s > a`.
    fn moments(&self, s: f64) -> (f64, f64) {
        let p = self.params;
        let recip = |r: f64| 1.0 / mobility(r, &p);
        let weighted = |r: f64| r / mobility(r, &p);
        let a = *self.nodes.last().unwrap();
        if s >= a {
            let tol = TAIL_TOL * (1.0 + s - a);
            return (
                -adaptive_simpson(&recip, a, s, tol),
                -adaptive_simpson(&weighted, a, s, tol),
            );
        }
        if s < self.s_min {
            // Split at zero where |r|^n is not smooth.
            let tol = TAIL_TOL * (1.0 + self.s_min - s);
            let (mut i0, mut i1) = (self.i0[0], self.i1[0]);
            if s < 0.0 {
                i0 += adaptive_simpson(&recip, s, 0.0, tol)
                    + adaptive_simpson(&recip, 0.0, self.s_min, tol);
                i1 += adaptive_simpson(&weighted, s, 0.0, tol)
                    + adaptive_simpson(&weighted, 0.0, self.s_min, tol);
            } else {
                i0 += adaptive_simpson(&recip, s, self.s_min, tol);
                i1 += adaptive_simpson(&weighted, s, self.s_min, tol);
            }
            return (i0, i1);
        }
        let mut k = ((s / self.s_min).ln() / self.log_ratio).floor() as usize;
        k = k.min(TABLE_LEN - 2);
        while k > 0 && self.nodes[k] > s {
            k -= 1;
        }
        while k + 1 < TABLE_LEN - 1 && self.nodes[k + 1] <= s {
            k += 1;
        }
        let hi = self.nodes[k + 1];
        let tol = SEGMENT_TOL * (hi - s).max(1e-300);
        (
            self.i0[k + 1] + adaptive_simpson(&recip, s, hi, tol / p.epsilon),
            self.i1[k + 1] + adaptive_simpson(&weighted, s, hi, tol),
        )
    }
}
