//! Families of objectives `E_m(θ)`, `m = 0..M`, over a shared parameter space
//! of dimension `K`. The collective optimizers only see this interface.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pauli::{uniform_grid, HamiltonianFamily};

pub trait ObjectiveFamily: Sync {
    /// Number of members `M`.
    fn members(&self) -> usize;
    /// Parameter dimension `K`.
    fn dim(&self) -> usize;
    /// The λ (or t) of member `m`.
    fn label(&self, m: usize) -> f64;
    fn value(&self, m: usize, theta: &[f64]) -> f64;
    fn gradient(&self, m: usize, theta: &[f64]) -> Vec<f64>;

    /// Box used for seeded random initialization.
    fn init_range(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn labels(&self) -> Vec<f64> {
        (0..self.members()).map(|m| self.label(m)).collect()
    }
}

/// `f(x; t) = ½(x⁴ − 16x² + t·x)`.
pub fn st_value(x: f64, t: f64) -> f64 {
    0.5 * (x.powi(4) - 16.0 * x * x + t * x)
}

/// `∂f/∂x = ½(4x³ − 32x + t)`.
pub fn st_gradient(x: f64, t: f64) -> f64 {
    0.5 * (4.0 * x.powi(3) - 32.0 * x + t)
}

/// Stationary points of the ST function for `0 ≤ t ≤ 6`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StStationary {
    /// Global minimum (negative root).
    pub global: f64,
    /// Local maximum separating the two basins.
    pub barrier: f64,
    /// Local minimum (positive root).
    pub local: f64,
}

/// Roots of `4x³ − 32x + t = 0`, by the trigonometric cubic formula followed
/// by Newton polishing.
pub fn st_stationary(t: f64) -> StStationary {
    // x³ + p·x + q = 0 with p = −8, q = t/4.
    let p = -8.0f64;
    let q = t / 4.0;
    let r = 2.0 * (-p / 3.0).sqrt();
    let phi = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt())
        .clamp(-1.0, 1.0)
        .acos()
        / 3.0;
    let mut roots: Vec<f64> = (0..3)
        .map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos())
        .map(|mut x| {
            for _ in 0..4 {
                let f = x * x * x + p * x + q;
                let df = 3.0 * x * x + p;
                if df != 0.0 {
                    x -= f / df;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    StStationary {
        global: roots[0],
        barrier: roots[1],
        local: roots[2],
    }
}

/// `(x_global, x_local)`, the two minimizers of the ST function at `t`.
pub fn st_minima(t: f64) -> (f64, f64) {
    let s = st_stationary(t);
    (s.global, s.local)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StBasin {
    Global,
    Local,
}

impl StBasin {
    pub fn name(self) -> &'static str {
        match self {
            StBasin::Global => "global",
            StBasin::Local => "local",
        }
    }
}

/// Basin of `x` under gradient flow at `t`: left of the barrier is global.
/// `None` at `t = 0`, where both minima are equally deep.
pub fn st_basin(x: f64, t: f64) -> Option<StBasin> {
    if t == 0.0 {
        return None;
    }
    Some(if x < st_stationary(t).barrier {
        StBasin::Global
    } else {
        StBasin::Local
    })
}

/// One-dimensional Styblinski–Tang members on a `t` grid.
#[derive(Clone, Debug)]
pub struct StFamily {
    t_grid: Vec<f64>,
}

impl StFamily {
    pub const DEFAULT_MEMBERS: usize = 61;

    pub fn new(t_grid: Vec<f64>) -> Result<Self> {
        if t_grid.is_empty() {
            return Err(Error::InvalidGrid("empty t grid".into()));
        }
        if t_grid.iter().any(|t| !(0.0..=6.0).contains(t)) {
            return Err(Error::InvalidGrid("t must lie in [0, 6]".into()));
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "t grid must be strictly increasing".into(),
            ));
        }
        Ok(StFamily { t_grid })
    }

    /// `m` uniform points on `[0, 6]`.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(uniform_grid(m, 0.0, 6.0)?)
    }

    pub fn t(&self, m: usize) -> f64 {
        self.t_grid[m]
    }
}

impl ObjectiveFamily for StFamily {
    fn members(&self) -> usize {
        self.t_grid.len()
    }

    fn dim(&self) -> usize {
        1
    }

    fn label(&self, m: usize) -> f64 {
        self.t_grid[m]
    }

    fn value(&self, m: usize, theta: &[f64]) -> f64 {
        st_value(theta[0], self.t_grid[m])
    }

    fn gradient(&self, m: usize, theta: &[f64]) -> Vec<f64> {
        vec![st_gradient(theta[0], self.t_grid[m])]
    }

    fn init_range(&self) -> (f64, f64) {
        (-4.0, 4.0)
    }
}

/// Variational energies `E_m(θ) = ⟨ψ(θ)|H(λ_m)|ψ(θ)⟩`.
#[derive(Clone, Debug)]
pub struct VqeFamily {
    family: HamiltonianFamily,
    ansatz: Ansatz,
}

impl VqeFamily {
    pub fn new(family: HamiltonianFamily, ansatz: Ansatz) -> Result<Self> {
        if family.n_qubits() != ansatz.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: family.n_qubits(),
                found: ansatz.n_qubits(),
            });
        }
        Ok(VqeFamily { family, ansatz })
    }

    pub fn family(&self) -> &HamiltonianFamily {
        &self.family
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }
}

impl ObjectiveFamily for VqeFamily {
    fn members(&self) -> usize {
        self.family.len()
    }

    fn dim(&self) -> usize {
        self.ansatz.n_params()
    }

    fn label(&self, m: usize) -> f64 {
        self.family.points()[m].lambda
    }

    fn value(&self, m: usize, theta: &[f64]) -> f64 {
        self.ansatz
            .energy_at(self.family.hamiltonian(m), theta)
            .expect("shapes validated at construction")
    }

    fn gradient(&self, m: usize, theta: &[f64]) -> Vec<f64> {
        self.ansatz
            .gradient(self.family.hamiltonian(m), theta)
            .expect("shapes validated at construction")
    }

    /// One period of a unit-Pauli factor's energy, `[−π/2, π/2)` per axis.
    fn init_range(&self) -> (f64, f64) {
        (-FRAC_PI_2, FRAC_PI_2)
    }
}

/// Convex test family `E_m(θ) = ½‖θ − c_m‖²`.
#[derive(Clone, Debug)]
pub struct QuadraticFamily {
    centers: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl QuadraticFamily {
    pub fn new(centers: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = centers.first() else {
            return Err(Error::InvalidGrid("no members".into()));
        };
        let k = first.len();
        if k == 0 || centers.iter().any(|c| c.len() != k) {
            return Err(Error::InvalidGrid(
                "centers must share a positive dimension".into(),
            ));
        }
        let labels = (0..centers.len()).map(|m| m as f64).collect();
        Ok(QuadraticFamily { centers, labels })
    }

    /// Same family with every center moved by `shift`.
    pub fn translated(&self, shift: f64) -> Self {
        QuadraticFamily {
            centers: self
                .centers
                .iter()
                .map(|c| c.iter().map(|x| x + shift).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

impl ObjectiveFamily for QuadraticFamily {
    fn members(&self) -> usize {
        self.centers.len()
    }

    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn label(&self, m: usize) -> f64 {
        self.labels[m]
    }

    fn value(&self, m: usize, theta: &[f64]) -> f64 {
        0.5 * theta
            .iter()
            .zip(&self.centers[m])
            .map(|(x, c)| (x - c).powi(2))
            .sum::<f64>()
    }

    fn gradient(&self, m: usize, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.centers[m])
            .map(|(x, c)| x - c)
            .collect()
    }
}
