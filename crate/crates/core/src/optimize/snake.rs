//! Implicit gradient-flow snake: each parameter track `r_i` moves by
//! `r_i ← (ηA + I)⁻¹ (r_i − η ∂E/∂r_i)`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::banded::EnvelopeCholesky;
use super::stiffness::{build_A, Boundary, StiffnessMatrix};
use super::{
    member_gradients, member_values, row_inf_norms, snapshot, wants_snapshot, RunOutcome,
    SnakeState,
};
use crate::error::{Error, Result};
use crate::objective::ObjectiveFamily;

/// Relative tolerance for the uniform-grid check on member labels.
const GRID_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnakeConfig {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    /// Decay rate of the stiffness, `A(t) = A₀·exp(−tΓ)`.
    pub gamma: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub boundary: Boundary,
    pub seed: u64,
}

impl Default for SnakeConfig {
    fn default() -> Self {
        SnakeConfig {
            alpha: 0.1,
            beta: 3.0,
            eta: 0.5,
            gamma: 0.0,
            max_iters: 2000,
            grad_tol: 1e-6,
            boundary: Boundary::Periodic,
            seed: 0,
        }
    }
}

impl SnakeConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("gamma", self.gamma),
            ("grad_tol", self.grad_tol),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite, got {value}"
                )));
            }
            if value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        if self.eta <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// Stiffness scale for the step that produces iterate `t` (`t ≥ 1`). The
/// first step uses the full `A₀`.
pub fn decay_factor(t: usize, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else {
        (-(t.saturating_sub(1) as f64) * gamma).exp()
    }
}

fn factor_system(a: &StiffnessMatrix, eta: f64) -> Result<EnvelopeCholesky> {
    EnvelopeCholesky::factor(&a.system_matrix(eta), a.size())
}

fn check_uniform_labels(labels: &[f64]) -> Result<()> {
    if labels.len() < 3 {
        return Ok(());
    }
    let span = (labels[labels.len() - 1] - labels[0]).abs();
    let step = labels[1] - labels[0];
    for w in labels.windows(2) {
        if ((w[1] - w[0]) - step).abs() > GRID_RTOL * span.max(1.0) {
            return Err(Error::InvalidGrid(
                "the snake needs uniformly spaced family parameters".into(),
            ));
        }
    }
    Ok(())
}

fn update_columns(state: &mut SnakeState, gradients: &[f64], chol: &EnvelopeCholesky, eta: f64) {
    let dim = state.dim();
    for i in 0..dim {
        let mut rhs: Vec<f64> = state
            .column(i)
            .iter()
            .enumerate()
            .map(|(m, r)| r - eta * gradients[m * dim + i])
            .collect();
        chol.solve_in_place(&mut rhs);
        state.set_column(i, &rhs);
    }
}

/// One implicit step with a given stiffness matrix. All columns share one
/// factorization of `ηA + I`.
pub fn snake_step<F: ObjectiveFamily + ?Sized>(
    state: &SnakeState,
    family: &F,
    a: &StiffnessMatrix,
    eta: f64,
) -> Result<SnakeState> {
    state.check_shape(family)?;
    if a.size() != state.members() {
        return Err(Error::LengthMismatch {
            expected: state.members(),
            found: a.size(),
        });
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "eta must be positive, got {eta}"
        )));
    }
    let gradients = member_gradients(family, state)?;
    let chol = factor_system(a, eta)?;
    let mut next = state.clone();
    update_columns(&mut next, &gradients, &chol, eta);
    next.iteration += 1;
    Ok(next)
}

/// Runs the snake until every member's gradient ∞-norm drops below
/// `grad_tol` or `max_iters` steps have been taken. With `init = None` the
/// start is drawn from the family's init box with `config.seed`.
pub fn snake_run<F: ObjectiveFamily + ?Sized>(
    family: &F,
    config: &SnakeConfig,
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
    check_uniform_labels(&family.labels())?;

    let members = state.members();
    let dim = state.dim();
    let a0 = build_A(config.alpha, config.beta, members, config.boundary)?;
    let fixed = if config.gamma == 0.0 {
        Some(factor_system(&a0, config.eta)?)
    } else {
        None
    };

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
        let t = state.iteration + 1;
        match &fixed {
            Some(chol) => update_columns(&mut state, &gradients, chol, config.eta),
            None => {
                let s = decay_factor(t, config.gamma);
                let a = build_A(config.alpha * s, config.beta * s, members, config.boundary)?;
                update_columns(
                    &mut state,
                    &gradients,
                    &factor_system(&a, config.eta)?,
                    config.eta,
                );
            }
        }
        state.iteration = t;
    };

    let values = member_values(family, &state)?;
    if snapshots.last().map(|s| s.state.iteration) != Some(state.iteration) {
        snapshots.push(super::Snapshot {
            state: state.clone(),
            values: values.clone(),
        });
    }

    // Equilibrium residual with the stiffness the next step would use.
    let s = decay_factor(state.iteration + 1, config.gamma);
    let a = build_A(config.alpha * s, config.beta * s, members, config.boundary)?;
    let mut residuals = vec![0.0f64; members];
    for i in 0..dim {
        let ar = a.apply(&state.column(i));
        for (m, res) in residuals.iter_mut().enumerate() {
            *res = res.max((ar[m] + gradients[m * dim + i]).abs());
        }
    }

    Ok(RunOutcome {
        grad_norms: row_inf_norms(&gradients, dim),
        converged,
        values,
        gradients,
        residuals: Some(residuals),
        snapshots,
        state,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{QuadraticFamily, StFamily};
    use crate::optimize::gd::{gd_run, GdConfig};

    fn zero_centers(m: usize) -> QuadraticFamily {
        QuadraticFamily::new(vec![vec![0.0]; m]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SnakeConfig::default().validate().is_ok());
        let bad = [
            SnakeConfig {
                eta: 0.0,
                ..Default::default()
            },
            SnakeConfig {
                alpha: -1.0,
                ..Default::default()
            },
            SnakeConfig {
                beta: f64::NAN,
                ..Default::default()
            },
            SnakeConfig {
                gamma: f64::INFINITY,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn zero_stiffness_step_is_gradient_descent() {
        let family = zero_centers(6);
        let state = SnakeState::from_rows(&vec![vec![1.0]; 6]).unwrap();
        let a = build_A(0.0, 0.0, 6, Boundary::Periodic).unwrap();
        let next = snake_step(&state, &family, &a, 0.5).unwrap();
        assert!(next.theta().iter().all(|&x| x == 0.5));
        assert_eq!(next.iteration, 1);
    }

    #[test]
    fn constant_snake_at_stationary_point_is_fixed() {
        let family = QuadraticFamily::new(vec![vec![0.3, -1.1]; 8]).unwrap();
        let state = SnakeState::from_rows(&vec![vec![0.3, -1.1]; 8]).unwrap();
        let a = build_A(0.1, 3.0, 8, Boundary::Periodic).unwrap();
        let next = snake_step(&state, &family, &a, 0.5).unwrap();
        assert!(next.max_abs_diff(&state) < 1e-15);
    }

    #[test]
    fn decay_schedule() {
        assert_eq!(decay_factor(1, 0.5), 1.0);
        assert!(decay_factor(3, 0.5) < decay_factor(2, 0.5));
        assert_eq!(decay_factor(2, 1e3), 0.0);
        assert_eq!(decay_factor(100, 0.0), 1.0);
    }

    #[test]
    fn rejects_nonuniform_labels() {
        let family = StFamily::new(vec![0.0, 1.0, 2.0, 3.5, 4.0]).unwrap();
        let err = snake_run(&family, &SnakeConfig::default(), None, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }

    #[test]
    fn large_decay_turns_into_gradient_descent() {
        let family = StFamily::uniform(21).unwrap();
        let config = SnakeConfig {
            gamma: 1e3,
            eta: 0.01,
            max_iters: 50,
            grad_tol: 0.0,
            ..Default::default()
        };
        let snake = snake_run(&family, &config, None, 1).unwrap();
        let after_first = snake.snapshots[1].state.clone();
        let gd = gd_run(
            &family,
            &GdConfig {
                eta: 0.01,
                max_iters: 49,
                grad_tol: 0.0,
                seed: 0,
            },
            Some(after_first),
            1,
        )
        .unwrap();
        for (s, g) in snake.snapshots[1..].iter().zip(&gd.snapshots) {
            assert!(s.state.max_abs_diff(&g.state) <= 1e-9);
        }
    }

    #[test]
    fn nonfinite_gradient_aborts() {
        let family = zero_centers(5);
        let mut init = SnakeState::from_rows(&vec![vec![1.0]; 5]).unwrap();
        init.row_mut(3)[0] = f64::NAN;
        let err = snake_run(&family, &SnakeConfig::default(), Some(init), 0).unwrap_err();
        assert!(matches!(
            err,
            Error::NonFinite {
                member: 3,
                iteration: 0,
                ..
            }
        ));
    }

    #[test]
    fn residual_reports_equilibrium() {
        let centers: Vec<Vec<f64>> = (0..12).map(|m| vec![(m as f64 * 0.5).sin()]).collect();
        let family = QuadraticFamily::new(centers).unwrap();
        let config = SnakeConfig {
            max_iters: 5000,
            ..Default::default()
        };
        let out = snake_run(&family, &config, None, 0).unwrap();
        let worst = out
            .residuals
            .clone()
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
        // The stiff snake is biased away from the member minima.
        assert!(!out.converged);
        assert!(out.max_grad_norm() > 1e-3);
    }
}
