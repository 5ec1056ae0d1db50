use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::rhs::Dynamics;
use super::state::{FluidState, OdeState};

/// Classical four-stage Runge-Kutta step.
pub fn step_rk4<S: OdeState>(s: &S, dt: f64, rhs: impl Fn(&S) -> Result<S>) -> Result<S> {
    let k1 = rhs(s)?;
    let k2 = rhs(&s.add_scaled(0.5 * dt, &k1))?;
    let k3 = rhs(&s.add_scaled(0.5 * dt, &k2))?;
    let k4 = rhs(&s.add_scaled(dt, &k3))?;
    Ok(s
        .add_scaled(dt / 6.0, &k1)
        .add_scaled(dt / 3.0, &k2)
        .add_scaled(dt / 3.0, &k3)
        .add_scaled(dt / 6.0, &k4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub cfl: f64,
    pub t_end: f64,
    /// Interval between observations, in primitive time.
    pub cadence: f64,
    pub dealias: bool,
    /// Re-project the constraints every this many steps (0 = never).
    pub project_every: usize,
    /// Fixed step; refused when it breaks the CFL bound. `None` picks the
    /// largest admissible step that divides the cadence.
    pub dt: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            t_end: 10.0,
            cadence: 0.5,
            dealias: true,
            project_every: 0,
            dt: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::config(
                "integrator.cfl",
                format!("cfl must lie in (0, 1), got {}", self.cfl),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("integrator.t_end", "t_end must be finite and >= 0"));
        }
        if !(self.cadence > 0.0) {
            return Err(Error::config("integrator.cadence", "cadence must be > 0"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::config("integrator.dt", "dt must be > 0"));
            }
        }
        Ok(())
    }
}

/// Summary of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    pub observations: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_final: f64,
}

/// Integrate the primitive system from `state`, calling `observe` at `t = 0`
/// and every `cadence` until `t_end`.
///
/// The step is chosen per cadence interval as the largest value below the CFL
/// bound that divides the interval evenly, so observations land exactly on
/// the cadence grid.
pub fn run(
    dynamics: &Dynamics,
    mut state: FluidState,
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(&FluidState) -> Result<()>,
) -> Result<(FluidState, RunSummary)> {
    cfg.validate()?;
    let dx = dynamics.spectral().grid().dx();
    let t0 = state.t;
    let full = (cfg.t_end / cfg.cadence + 1e-9).floor() as usize;
    let mut targets: Vec<f64> = (1..=full).map(|k| t0 + k as f64 * cfg.cadence).collect();
    if cfg.t_end - full as f64 * cfg.cadence > 1e-9 * cfg.cadence {
        targets.push(t0 + cfg.t_end);
    }
    let mut summary = RunSummary {
        steps: 0,
        observations: 0,
        dt_min: f64::INFINITY,
        dt_max: 0.0,
        t_final: state.t,
    };
    let rhs = |s: &FluidState| dynamics.rhs_primitive(s);
    observe(&state)?;
    summary.observations += 1;
    for t_target in targets {
        let limit = cfg.cfl * dx / dynamics.max_speed(&state);
        let dt = match cfg.dt {
            Some(dt) if dt > limit => return Err(Error::Cfl { dt, limit }),
            Some(dt) => dt,
            None => {
                let span = t_target - state.t;
                span / (span / limit).ceil()
            }
        };
        let start = state.t;
        let substeps = ((t_target - start) / dt).round().max(1.0) as usize;
        for j in 0..substeps {
            let current = dynamics.max_speed(&state);
            if dt > cfg.cfl * dx / current * 1.05 {
                return Err(Error::Cfl {
                    dt,
                    limit: cfg.cfl * dx / current,
                });
            }
            state = step_rk4(&state, dt, rhs)?;
            // keep the clock free of accumulated round-off
            state.t = start + (j + 1) as f64 * dt;
            summary.steps += 1;
            if !state.is_finite() {
                return Err(Error::NonFinite { t: state.t });
            }
            if cfg.project_every > 0 && summary.steps % cfg.project_every == 0 {
                dynamics.project_constraints(&mut state)?;
            }
        }
        state.t = t_target;
        summary.dt_min = summary.dt_min.min(dt);
        summary.dt_max = summary.dt_max.max(dt);
        observe(&state)?;
        summary.observations += 1;
    }
    summary.t_final = state.t;
    Ok((state, summary))
}
