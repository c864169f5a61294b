//! Collective (snake) and independent (gradient descent) optimizers over an
//! [`ObjectiveFamily`].

mod banded;
mod gd;
mod report;
mod snake;
mod stiffness;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::objective::ObjectiveFamily;

pub use banded::{residual_inf, EnvelopeCholesky};
pub use gd::{gd_run, gd_step, GdConfig};
pub use report::{trajectory_csv, MemberReport, RunReport};
pub use snake::{decay_factor, snake_run, snake_step, SnakeConfig};
pub use stiffness::{build_A, internal_energy, Boundary, StiffnessMatrix, MIN_MEMBERS};

/// The `M × K` parameter matrix, row `m` holding `θ(λ_m)`, plus the
/// iteration counter.
#[derive(Clone, Debug, PartialEq)]
pub struct SnakeState {
    members: usize,
    dim: usize,
    theta: Vec<f64>,
    pub iteration: usize,
}

impl SnakeState {
    /// Row-major `members × dim` parameters.
    pub fn new(members: usize, dim: usize, theta: Vec<f64>) -> Result<Self> {
        if members == 0 || dim == 0 {
            return Err(Error::InvalidConfig(
                "state must have at least one member and parameter".into(),
            ));
        }
        if theta.len() != members * dim {
            return Err(Error::LengthMismatch {
                expected: members * dim,
                found: theta.len(),
            });
        }
        Ok(SnakeState {
            members,
            dim,
            theta,
            iteration: 0,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    /// Uniform random parameters in `[low, high)`, drawn row by row from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn random(members: usize, dim: usize, low: f64, high: f64, seed: u64) -> Result<Self> {
        if !low.is_finite() || !high.is_finite() || low >= high {
            return Err(Error::InvalidConfig(format!(
                "empty init range [{low}, {high})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = (0..members * dim)
            .map(|_| rng.random_range(low..high))
            .collect();
        Self::new(members, dim, theta)
    }

    /// Seeded random init over the family's own init box.
    pub fn random_for<F: ObjectiveFamily + ?Sized>(family: &F, seed: u64) -> Result<Self> {
        let (low, high) = family.init_range();
        Self::random(family.members(), family.dim(), low, high, seed)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major parameters.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.theta[m * self.dim..(m + 1) * self.dim]
    }

    pub fn row_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.theta[m * self.dim..(m + 1) * self.dim]
    }

    /// Column `i`, the parameter track `r_i` across members.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.members)
            .map(|m| self.theta[m * self.dim + i])
            .collect()
    }

    pub fn set_column(&mut self, i: usize, values: &[f64]) {
        assert_eq!(values.len(), self.members);
        for (m, v) in values.iter().enumerate() {
            self.theta[m * self.dim + i] = *v;
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.theta.chunks(self.dim)
    }

    /// Largest element-wise difference to another state of the same shape.
    pub fn max_abs_diff(&self, other: &SnakeState) -> f64 {
        assert_eq!(self.theta.len(), other.theta.len());
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn check_shape<F: ObjectiveFamily + ?Sized>(&self, family: &F) -> Result<()> {
        if self.members != family.members() {
            return Err(Error::LengthMismatch {
                expected: family.members(),
                found: self.members,
            });
        }
        if self.dim != family.dim() {
            return Err(Error::LengthMismatch {
                expected: family.dim(),
                found: self.dim,
            });
        }
        Ok(())
    }
}

/// A recorded state together with its member values.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub state: SnakeState,
    pub values: Vec<f64>,
}

/// Result of an optimizer run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: SnakeState,
    pub converged: bool,
    /// Final member values.
    pub values: Vec<f64>,
    /// Final per-member gradients, row-major like the state.
    pub gradients: Vec<f64>,
    /// Final per-member gradient ∞-norms.
    pub grad_norms: Vec<f64>,
    /// Per-member ∞-norm of the snake equilibrium residual `A·r_i + ∂E/∂r_i`;
    /// `None` for gradient descent.
    pub residuals: Option<Vec<f64>>,
    /// Snapshots at iteration 0, every stride-th iteration, and the end.
    pub snapshots: Vec<Snapshot>,
    pub elapsed_seconds: f64,
}

impl RunOutcome {
    pub fn iterations(&self) -> usize {
        self.state.iteration
    }

    pub fn max_grad_norm(&self) -> f64 {
        self.grad_norms.iter().copied().fold(0.0, f64::max)
    }
}

/// Gradients of every member at the current state, evaluated in parallel.
pub(crate) fn member_gradients<F: ObjectiveFamily + ?Sized>(
    family: &F,
    state: &SnakeState,
) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..state.members())
        .into_par_iter()
        .map(|m| family.gradient(m, state.row(m)))
        .collect();
    for (m, g) in rows.iter().enumerate() {
        if g.len() != state.dim() {
            return Err(Error::LengthMismatch {
                expected: state.dim(),
                found: g.len(),
            });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "gradient",
                member: m,
                iteration: state.iteration,
            });
        }
    }
    Ok(rows.concat())
}

pub(crate) fn member_values<F: ObjectiveFamily + ?Sized>(
    family: &F,
    state: &SnakeState,
) -> Result<Vec<f64>> {
    let values: Vec<f64> = (0..state.members())
        .into_par_iter()
        .map(|m| family.value(m, state.row(m)))
        .collect();
    if let Some(m) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "value",
            member: m,
            iteration: state.iteration,
        });
    }
    Ok(values)
}

pub(crate) fn row_inf_norms(gradients: &[f64], dim: usize) -> Vec<f64> {
    gradients
        .chunks(dim)
        .map(|g| g.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
        .collect()
}

pub(crate) fn snapshot<F: ObjectiveFamily + ?Sized>(
    family: &F,
    state: &SnakeState,
) -> Result<Snapshot> {
    Ok(Snapshot {
        values: member_values(family, state)?,
        state: state.clone(),
    })
}

/// Snapshot policy shared by both optimizers: iteration 0, multiples of the
/// stride (0 disables), and the final state.
pub(crate) fn wants_snapshot(iteration: usize, stride: usize) -> bool {
    iteration == 0 || (stride > 0 && iteration.is_multiple_of(stride))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_shape_checks() {
        assert!(SnakeState::new(2, 2, vec![0.0; 3]).is_err());
        assert!(SnakeState::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        let s = SnakeState::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.column(1), vec![2.0, 4.0]);
        assert_eq!(s.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn random_init_is_seeded_and_bounded() {
        let a = SnakeState::random(10, 3, -4.0, 4.0, 7).unwrap();
        let b = SnakeState::random(10, 3, -4.0, 4.0, 7).unwrap();
        let c = SnakeState::random(10, 3, -4.0, 4.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.theta().iter().all(|x| (-4.0..4.0).contains(x)));
        assert!(SnakeState::random(2, 2, 1.0, 1.0, 0).is_err());
    }
}
