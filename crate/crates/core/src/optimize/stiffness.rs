//! The snake stiffness matrix `A`, the discrete form of `−α∂² + β∂⁴` along
//! the family axis.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_MEMBERS: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Differences wrap around, so the first and last members are neighbours.
    #[default]
    Periodic,
    /// Free ends: only the `M − 1` first and `M − 2` second differences that
    /// fit inside the track contribute.
    Clamped,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Clamped => "clamped",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "clamped" => Ok(Boundary::Clamped),
            other => Err(Error::InvalidConfig(format!(
                "unknown boundary {other:?} (expected periodic or clamped)"
            ))),
        }
    }
}

/// Symmetric positive semidefinite `M × M` matrix, stored dense row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StiffnessMatrix {
    size: usize,
    alpha: f64,
    beta: f64,
    boundary: Boundary,
    entries: Vec<f64>,
}

/// Builds `A` for `M` members.
///
/// Periodic rows are the circulant stencil `[β, −α−4β, 2α+6β, −α−4β, β]`.
/// Clamped `A` is `α·D₁ᵀD₁ + β·D₂ᵀD₂` with non-wrapping first and second
/// difference operators, which equals the periodic stencil away from the ends.
#[allow(non_snake_case)]
pub fn build_A(
    alpha: f64,
    beta: f64,
    members: usize,
    boundary: Boundary,
) -> Result<StiffnessMatrix> {
    if members < MIN_MEMBERS {
        return Err(Error::InvalidGrid(format!(
            "the snake needs at least {MIN_MEMBERS} members, got {members}"
        )));
    }
    if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "stiffness must be finite and non-negative (alpha = {alpha}, beta = {beta})"
        )));
    }
    let m = members;
    let mut entries = vec![0.0; m * m];
    match boundary {
        Boundary::Periodic => {
            let diag = 2.0 * alpha + 6.0 * beta;
            let first = -alpha - 4.0 * beta;
            for i in 0..m {
                entries[i * m + i] = diag;
                entries[i * m + (i + 1) % m] = first;
                entries[i * m + (i + m - 1) % m] = first;
                entries[i * m + (i + 2) % m] = beta;
                entries[i * m + (i + m - 2) % m] = beta;
            }
        }
        Boundary::Clamped => {
            // Integer-valued D₁ᵀD₁ and D₂ᵀD₂ first, so each entry is scaled
            // exactly once.
            let mut s1 = vec![0.0; m * m];
            let mut s2 = vec![0.0; m * m];
            for k in 0..m - 1 {
                let stencil = [(k, -1.0), (k + 1, 1.0)];
                for &(i, a) in &stencil {
                    for &(j, b) in &stencil {
                        s1[i * m + j] += a * b;
                    }
                }
            }
            for k in 0..m - 2 {
                let stencil = [(k, 1.0), (k + 1, -2.0), (k + 2, 1.0)];
                for &(i, a) in &stencil {
                    for &(j, b) in &stencil {
                        s2[i * m + j] += a * b;
                    }
                }
            }
            for (e, (a, b)) in entries.iter_mut().zip(s1.iter().zip(&s2)) {
                *e = alpha * a + beta * b;
            }
        }
    }
    Ok(StiffnessMatrix {
        size: m,
        alpha,
        beta,
        boundary,
        entries,
    })
}

impl StiffnessMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// `A·x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size);
        (0..self.size)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ·A·x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// The implicit-step system matrix `ηA + I`, row-major.
    pub fn system_matrix(&self, eta: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.entries.iter().map(|a| eta * a).collect();
        for i in 0..self.size {
            out[i * self.size + i] += 1.0;
        }
        out
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.entries)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }
}

/// `Σ α·|Δθ|² + β·|Δ²θ|²` summed over all parameter columns, with differences
/// taken along the member axis as the boundary mode prescribes.
pub fn internal_energy(
    theta: &crate::optimize::SnakeState,
    alpha: f64,
    beta: f64,
    boundary: Boundary,
) -> f64 {
    let m = theta.members();
    (0..theta.dim())
        .map(|i| {
            let col = theta.column(i);
            let (first, second): (Vec<f64>, Vec<f64>) = match boundary {
                Boundary::Periodic => (
                    (0..m).map(|k| col[(k + 1) % m] - col[k]).collect(),
                    (0..m)
                        .map(|k| col[(k + 2) % m] - 2.0 * col[(k + 1) % m] + col[k])
                        .collect(),
                ),
                Boundary::Clamped => (
                    col.windows(2).map(|w| w[1] - w[0]).collect(),
                    col.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect(),
                ),
            };
            alpha * first.iter().map(|d| d * d).sum::<f64>()
                + beta * second.iter().map(|d| d * d).sum::<f64>()
        })
        .sum()
}
