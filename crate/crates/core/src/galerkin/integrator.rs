//! Explicit Runge–Kutta integrators for the coefficient ODE.
//!
//! The state vector may carry auxiliary running integrals after the
//! coefficients (cumulative dissipations). They are advanced by the same
//! stages but excluded from error control: only the first `controlled`
//! components enter the max-norm error estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest step the adaptive controller may take.
pub const DT_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    Rk4Fixed,
    /// Runge–Kutta–Fehlberg 4(5), propagating the fifth-order solution.
    #[default]
    Rkf45Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSpec {
    pub method: Method,
    /// Fixed step for `rk4-fixed`, initial step for `rkf45-adaptive`.
    pub dt: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    /// Sorted output times in `[0, t_end]`; the integrator lands on each exactly.
    pub snapshot_times: Vec<f64>,
}

impl IntegratorSpec {
    pub fn adaptive(t_end: f64, snapshots: usize) -> Self {
        Self {
            method: Method::Rkf45Adaptive,
            dt: None,
            rtol: 1e-8,
            atol: 1e-10,
            t_end,
            snapshot_times: uniform_times(t_end, snapshots),
        }
    }

    pub fn fixed(dt: f64, t_end: f64, snapshots: usize) -> Self {
        Self {
            method: Method::Rk4Fixed,
            dt: Some(dt),
            rtol: 0.0,
            atol: 0.0,
            t_end,
            snapshot_times: uniform_times(t_end, snapshots),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "T must be >= 0, got {}",
                self.t_end
            )));
        }
        match self.method {
            Method::Rk4Fixed => match self.dt {
                Some(dt) if dt > 0.0 && dt.is_finite() => {}
                _ => return Err(Error::InvalidIntegrator("rk4-fixed needs dt > 0".into())),
            },
            Method::Rkf45Adaptive => {
                if !(self.rtol > 0.0 && self.atol > 0.0) {
                    return Err(Error::InvalidIntegrator(
                        "rkf45-adaptive needs rtol > 0 and atol > 0".into(),
                    ));
                }
                if let Some(dt) = self.dt {
                    if dt.is_nan() || dt <= 0.0 {
                        return Err(Error::InvalidIntegrator(
                            "initial dt must be positive".into(),
                        ));
                    }
                }
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_end).contains(&t) {
                return Err(Error::InvalidIntegrator(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.t_end
                )));
            }
            if t < prev {
                return Err(Error::InvalidIntegrator(
                    "snapshot times must be sorted".into(),
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

/// `count + 1` equally spaced times `0, T/count, ..., T`.
pub fn uniform_times(t_end: f64, count: usize) -> Vec<f64> {
    let count = count.max(1);
    (0..=count)
        .map(|i| {
            if i == count {
                t_end
            } else {
                t_end * i as f64 / count as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub last_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub t: f64,
    pub y: Vec<f64>,
    pub stats: StepStats,
}

/// Right-hand side `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    /// Number of leading components under error control.
    fn controlled(&self) -> usize {
        self.dim()
    }
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

// Fehlberg 4(5) tableau.
const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [
        -8.0 / 27.0,
        2.0,
        -3544.0 / 2565.0,
        1859.0 / 4104.0,
        -11.0 / 40.0,
    ],
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -0.2,
    0.0,
];

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;

/// Stateful stepper: remembers the proposed adaptive step across calls.
#[derive(Debug, Clone)]
pub struct Stepper {
    spec: IntegratorSpec,
    proposed: Option<f64>,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
    y5: Vec<f64>,
}

impl Stepper {
    pub fn new(spec: IntegratorSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            proposed: spec.dt,
            spec,
            k: vec![vec![0.0; dim]; 6],
            tmp: vec![0.0; dim],
            y5: vec![0.0; dim],
        })
    }

    pub fn spec(&self) -> &IntegratorSpec {
        &self.spec
    }

    /// Advances `state` by one accepted step without passing `t_stop`.
    pub fn step<S: OdeSystem>(
        &mut self,
        sys: &mut S,
        state: &mut OdeState,
        t_stop: f64,
    ) -> Result<()> {
        match self.spec.method {
            Method::Rk4Fixed => self.step_rk4(sys, state, t_stop),
            Method::Rkf45Adaptive => self.step_rkf45(sys, state, t_stop),
        }
    }

    fn step_rk4<S: OdeSystem>(
        &mut self,
        sys: &mut S,
        state: &mut OdeState,
        t_stop: f64,
    ) -> Result<()> {
        let dt_nominal = self.spec.dt.expect("validated");
        let remaining = t_stop - state.t;
        // Absorb a sliver left by floating-point division of the interval.
        let dt = if remaining <= dt_nominal * (1.0 + 1e-9) {
            remaining
        } else {
            dt_nominal
        };
        let n = state.y.len();
        let t = state.t;
        let (k, tmp) = (&mut self.k, &mut self.tmp);
        sys.rhs(t, &state.y, &mut k[0])?;
        for i in 0..n {
            tmp[i] = state.y[i] + 0.5 * dt * k[0][i];
        }
        sys.rhs(t + 0.5 * dt, tmp, &mut k[1])?;
        for i in 0..n {
            tmp[i] = state.y[i] + 0.5 * dt * k[1][i];
        }
        sys.rhs(t + 0.5 * dt, tmp, &mut k[2])?;
        for i in 0..n {
            tmp[i] = state.y[i] + dt * k[2][i];
        }
        sys.rhs(t + dt, tmp, &mut k[3])?;
        for i in 0..n {
            state.y[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        state.t = if dt == remaining { t_stop } else { t + dt };
        state.stats.accepted += 1;
        state.stats.rhs_evals += 4;
        state.stats.last_dt = dt;
        Ok(())
    }

    fn initial_step<S: OdeSystem>(&mut self, sys: &mut S, state: &mut OdeState) -> Result<f64> {
        let nc = sys.controlled();
        sys.rhs(state.t, &state.y, &mut self.k[0])?;
        state.stats.rhs_evals += 1;
        let (mut d0, mut d1) = (0.0f64, 0.0f64);
        for i in 0..nc {
            let sc = self.spec.atol + self.spec.rtol * state.y[i].abs();
            d0 = d0.max(state.y[i].abs() / sc);
            d1 = d1.max(self.k[0][i].abs() / sc);
        }
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        Ok(h.max(DT_MIN))
    }

    fn step_rkf45<S: OdeSystem>(
        &mut self,
        sys: &mut S,
        state: &mut OdeState,
        t_stop: f64,
    ) -> Result<()> {
        let mut h = match self.proposed {
            Some(h) => h,
            None => self.initial_step(sys, state)?,
        };
        let n = state.y.len();
        let nc = sys.controlled();
        let t = state.t;
        sys.rhs(t, &state.y, &mut self.k[0])?;
        state.stats.rhs_evals += 1;
        loop {
            let remaining = t_stop - t;
            let clipped = h >= remaining * (1.0 - 1e-12);
            let dt = if clipped { remaining } else { h };
            for s in 1..6 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, a) in A[s][..s].iter().enumerate() {
                        acc += a * self.k[j][i];
                    }
                    self.tmp[i] = state.y[i] + dt * acc;
                }
                let (head, tail) = self.k.split_at_mut(s);
                let _ = head;
                sys.rhs(t + C[s] * dt, &self.tmp, &mut tail[0])?;
            }
            state.stats.rhs_evals += 5;
            let mut err = 0.0f64;
            for i in 0..n {
                let mut y5 = 0.0;
                let mut e = 0.0;
                for s in 0..6 {
                    y5 += B5[s] * self.k[s][i];
                    e += (B5[s] - B4[s]) * self.k[s][i];
                }
                self.y5[i] = state.y[i] + dt * y5;
                if i < nc {
                    let sc =
                        self.spec.atol + self.spec.rtol * state.y[i].abs().max(self.y5[i].abs());
                    let r = (dt * e).abs() / sc;
                    err = if r.is_nan() {
                        f64::INFINITY
                    } else {
                        err.max(r)
                    };
                }
            }
            if err <= 1.0 {
                state.y.copy_from_slice(&self.y5);
                state.t = if clipped { t_stop } else { t + dt };
                state.stats.accepted += 1;
                state.stats.last_dt = dt;
                let factor = if err == 0.0 {
                    MAX_GROWTH
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, MAX_GROWTH)
                };
                // A step clipped to land on an output time keeps the unclipped proposal.
                self.proposed = Some(if clipped {
                    h.max(dt * factor)
                } else {
                    dt * factor
                });
                return Ok(());
            }
            state.stats.rejected += 1;
            let factor = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, 1.0)
            } else {
                MIN_SHRINK
            };
            h = dt * factor;
            if h < DT_MIN {
                return Err(Error::StepUnderflow {
                    t,
                    dt: h,
                    dt_min: DT_MIN,
                    rejected: state.stats.rejected,
                });
            }
        }
    }
}
