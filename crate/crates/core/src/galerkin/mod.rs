//! The Faedo–Galerkin system `dc/dt = f(c)` and its time integration.

pub mod integrator;
mod rhs;

pub use integrator::{IntegratorSpec, Method, OdeState, OdeSystem, StepStats, Stepper, DT_MIN};
pub use rhs::{assemble_rhs, evaluate, RhsEval, Workspace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::{Basis, SpectralField};

/// Coefficient ODE augmented with running dissipation integrals.
///
/// State layout: `[c_0 .. c_N, int D, int D_entropy, int D_r (one per r)]`.
pub struct GalerkinSystem<'a> {
    basis: &'a Basis,
    params: ModelParams,
    r_values: Vec<f64>,
    ws: Workspace,
    eval: RhsEval,
}

impl<'a> GalerkinSystem<'a> {
    pub fn new(basis: &'a Basis, params: ModelParams, r_values: &[f64]) -> Self {
        Self {
            basis,
            params,
            r_values: r_values.to_vec(),
            ws: Workspace::new(basis),
            eval: RhsEval::default(),
        }
    }

    pub fn coeff_dim(&self) -> usize {
        self.basis.dim()
    }

    /// Evaluates at a coefficient vector and returns the full breakdown.
    pub fn evaluate(&mut self, coeffs: &[f64], t: f64) -> Result<&RhsEval> {
        evaluate(
            coeffs,
            &self.params,
            self.basis,
            &self.r_values,
            &mut self.ws,
            t,
            &mut self.eval,
        )?;
        Ok(&self.eval)
    }

    pub fn workspace(&self) -> &Workspace {
        &self.ws
    }
}

impl OdeSystem for GalerkinSystem<'_> {
    fn dim(&self) -> usize {
        self.basis.dim() + 2 + self.r_values.len()
    }

    fn controlled(&self) -> usize {
        self.basis.dim()
    }

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let nc = self.basis.dim();
        evaluate(
            &y[..nc],
            &self.params,
            self.basis,
            &self.r_values,
            &mut self.ws,
            t,
            &mut self.eval,
        )?;
        dy[..nc].copy_from_slice(&self.eval.dc);
        dy[nc] = self.eval.dissipation;
        dy[nc + 1] = self.eval.entropy_dissipation;
        dy[nc + 2..].copy_from_slice(&self.eval.weighted);
        Ok(())
    }
}

/// Solution state at an output time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub coeffs: SpectralField,
    /// `int_0^t int m(u) p_x^2`.
    pub dissipation_cum: f64,
    /// `int_0^t int u_xx^2 / Q^3 + delta u_xx^2`.
    pub entropy_dissipation_cum: f64,
    /// `int_0^t int m(u)^r p_x^2`, one per configured `r`.
    pub weighted_cum: Vec<f64>,
}

/// Callbacks invoked while a simulation runs.
pub trait Observer {
    /// Whether [`Observer::on_step`] should be called (it costs one extra
    /// right-hand-side evaluation per accepted step).
    fn wants_steps(&self) -> bool {
        false
    }
    fn on_step(&mut self, _t: f64, _coeffs: &[f64], _rhs: &RhsEval) {}
    fn on_snapshot(&mut self, _snapshot: &Snapshot) {}
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationOptions {
    pub r_values: Vec<f64>,
    /// Abort when `sup|u| >= a` at an accepted step.
    pub check_anchor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub snapshots: Vec<Snapshot>,
    pub r_values: Vec<f64>,
    pub stats: StepStats,
    pub flags: Vec<String>,
}

impl SimulationResult {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("at least the initial snapshot")
    }
}

/// Integrates the Galerkin system from `u0` to `spec.t_end`.
///
/// `u0` is expected to already be `P_N u_0`. Snapshots are recorded at every
/// `spec.snapshot_times` entry (the initial time is always included).
pub fn simulate(
    u0: &SpectralField,
    spec: &IntegratorSpec,
    params: &ModelParams,
    basis: &Basis,
    options: &SimulationOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<SimulationResult> {
    params.validate()?;
    u0.check_len(basis.domain())?;
    let mut sys = GalerkinSystem::new(basis, *params, &options.r_values);
    let dim = sys.dim();
    let mut stepper = Stepper::new(spec.clone(), dim)?;
    let nc = basis.dim();

    let mut flags = Vec::new();
    if params.eta == 0.0 && params.constant_mobility.is_none() {
        flags.push("eta = 0: mobility is unbounded".to_string());
    }
    if options.check_anchor {
        params.check_anchor()?;
    }

    let mut state = OdeState {
        t: 0.0,
        y: vec![0.0; dim],
        stats: StepStats::default(),
    };
    state.y[..nc].copy_from_slice(&u0.coeffs);

    let wants_steps = observers.iter().any(|o| o.wants_steps());
    let mut times: Vec<f64> = spec.snapshot_times.clone();
    if times.first() != Some(&0.0) {
        times.insert(0, 0.0);
    }
    let mut snapshots = Vec::with_capacity(times.len());
    let anchor = params.entropy_anchor;
    let check = |t: f64, sup: f64| -> Result<()> {
        if options.check_anchor && sup >= anchor {
            return Err(Error::AnchorViolation {
                t,
                sup_abs_u: sup,
                anchor,
            });
        }
        Ok(())
    };

    {
        let ev = sys.evaluate(&state.y[..nc], 0.0)?;
        check(0.0, ev.sup_abs_u)?;
        if wants_steps {
            let ev = ev.clone();
            for o in observers.iter_mut().filter(|o| o.wants_steps()) {
                o.on_step(0.0, &state.y[..nc], &ev);
            }
        }
    }

    for &t_out in &times {
        while state.t < t_out {
            stepper.step(&mut sys, &mut state, t_out)?;
            if options.check_anchor || wants_steps {
                let ev = sys.evaluate(&state.y[..nc], state.t)?;
                check(state.t, ev.sup_abs_u)?;
                if wants_steps {
                    let ev = ev.clone();
                    for o in observers.iter_mut().filter(|o| o.wants_steps()) {
                        o.on_step(state.t, &state.y[..nc], &ev);
                    }
                }
            }
        }
        let snap = Snapshot {
            t: state.t,
            coeffs: SpectralField {
                coeffs: state.y[..nc].to_vec(),
            },
            dissipation_cum: state.y[nc],
            entropy_dissipation_cum: state.y[nc + 1],
            weighted_cum: state.y[nc + 2..].to_vec(),
        };
        for o in observers.iter_mut() {
            o.on_snapshot(&snap);
        }
        snapshots.push(snap);
    }

    Ok(SimulationResult {
        snapshots,
        r_values: options.r_values.clone(),
        stats: state.stats,
        flags,
    })
}
