//! Plain gradient descent, one independent trajectory per member.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    member_gradients, member_values, row_inf_norms, snapshot, wants_snapshot, RunOutcome,
    SnakeConfig, SnakeState, Snapshot,
};
use crate::error::{Error, Result};
use crate::objective::ObjectiveFamily;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdConfig {
    pub eta: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        let s = SnakeConfig::default();
        GdConfig {
            eta: s.eta,
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            seed: s.seed,
        }
    }
}

impl From<&SnakeConfig> for GdConfig {
    fn from(s: &SnakeConfig) -> Self {
        GdConfig {
            eta: s.eta,
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            seed: s.seed,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.grad_tol >= 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grad_tol must be finite and non-negative, got {}",
                self.grad_tol
            )));
        }
        Ok(())
    }
}

fn descend(state: &mut SnakeState, gradients: &[f64], eta: f64) {
    let dim = state.dim();
    for m in 0..state.members() {
        let g = &gradients[m * dim..(m + 1) * dim];
        for (x, gx) in state.row_mut(m).iter_mut().zip(g) {
            *x -= eta * gx;
        }
    }
}

/// `θ_m ← θ_m − η ∇E_m(θ_m)` for every member.
pub fn gd_step<F: ObjectiveFamily + ?Sized>(
    state: &SnakeState,
    family: &F,
    eta: f64,
) -> Result<SnakeState> {
    state.check_shape(family)?;
    let gradients = member_gradients(family, state)?;
    let mut next = state.clone();
    descend(&mut next, &gradients, eta);
    next.iteration += 1;
    Ok(next)
}

pub fn gd_run<F: ObjectiveFamily + ?Sized>(
    family: &F,
    config: &GdConfig,
    init: Option<SnakeState>,
    snapshot_stride: usize,
) -> Result<RunOutcome> {
    let started = Instant::now();
    config.validate()?;
    let mut state = match init {
        Some(s) => s,
        None => SnakeState::random_for(family, config.seed)?,
    };
    state.check_shape(family)?;
    state.iteration = 0;
    let dim = state.dim();

    let mut snapshots = Vec::new();
    let (gradients, converged) = loop {
        if wants_snapshot(state.iteration, snapshot_stride) {
            snapshots.push(snapshot(family, &state)?);
        }
        let gradients = member_gradients(family, &state)?;
        let worst = row_inf_norms(&gradients, dim)
            .into_iter()
            .fold(0.0, f64::max);
        if worst < config.grad_tol {
            break (gradients, true);
        }
        if state.iteration >= config.max_iters {
            break (gradients, false);
        }
        descend(&mut state, &gradients, config.eta);
        state.iteration += 1;
    };

    let values = member_values(family, &state)?;
    if snapshots.last().map(|s| s.state.iteration) != Some(state.iteration) {
        snapshots.push(Snapshot {
            state: state.clone(),
            values: values.clone(),
        });
    }
    Ok(RunOutcome {
        grad_norms: row_inf_norms(&gradients, dim),
        converged,
        values,
        gradients,
        residuals: None,
        snapshots,
        state,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}
