//! Brute-force references: dense Hamiltonian matrices, exact ground energies,
//! and exhaustive grid scans of ansatz energy landscapes.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli};

pub const MAX_ORACLE_QUBITS: usize = 5;
pub const MAX_SCAN_PARAMS: usize = 3;
pub const MIN_SCAN_RESOLUTION: usize = 16;

/// A dense Hermitian matrix, dimension `2^n ≤ 32`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian {
    matrix: DMatrix<Complex64>,
}

impl DenseHermitian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Largest `|A − A†|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `⟨v|A|v⟩` for an amplitude vector `v`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(v);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }
}

fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match p {
        Pauli::I => [o, z, z, o],
        Pauli::X => [z, o, o, z],
        Pauli::Y => [z, -i, i, z],
        Pauli::Z => [o, z, z, -o],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// `Σᵢ cᵢ ⊗ₖ σₖ`, with qubit 0 as the leftmost Kronecker factor.
pub fn dense_matrix(h: &Hamiltonian) -> Result<DenseHermitian> {
    let n = h.n_qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_ORACLE_QUBITS,
        });
    }
    let dim = 1 << n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for term in h.terms() {
        let product = term
            .pauli
            .letters()
            .iter()
            .map(|&p| pauli_matrix(p))
            .reduce(|acc, m| acc.kronecker(&m))
            .expect("word is non-empty");
        matrix += product * Complex64::new(term.coeff, 0.0);
    }
    Ok(DenseHermitian { matrix })
}

/// Smallest eigenvalue of `h` by full Hermitian eigendecomposition.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64> {
    Ok(dense_matrix(h)?.eigenvalues()[0])
}

/// A point of an energy landscape grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub theta: Vec<f64>,
    pub energy: f64,
}

/// Energies on the uniform grid `[−π, π)^K`, `resolution` points per axis,
/// flattened with the last parameter varying fastest.
pub struct Landscape {
    resolution: usize,
    dim: usize,
    energies: Vec<f64>,
}

impl Landscape {
    pub fn scan(ansatz: &Ansatz, h: &Hamiltonian, resolution: usize) -> Result<Self> {
        let dim = ansatz.n_params();
        if dim > MAX_SCAN_PARAMS {
            return Err(Error::ScanDimension {
                dim,
                max: MAX_SCAN_PARAMS,
            });
        }
        if resolution < MIN_SCAN_RESOLUTION {
            return Err(Error::InvalidGrid(format!(
                "scan resolution {resolution} below {MIN_SCAN_RESOLUTION}"
            )));
        }
        // Surface shape errors before the parallel sweep.
        ansatz.energy_at(h, &vec![0.0; dim])?;
        let total = resolution.pow(dim as u32);
        let energies = (0..total)
            .into_par_iter()
            .map(|flat| {
                let theta = Self::theta_of(flat, resolution, dim);
                ansatz.energy_at(h, &theta).expect("shapes checked")
            })
            .collect();
        Ok(Landscape {
            resolution,
            dim,
            energies,
        })
    }

    fn axis_value(j: usize, resolution: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / resolution as f64
    }

    fn theta_of(mut flat: usize, resolution: usize, dim: usize) -> Vec<f64> {
        let mut theta = vec![0.0; dim];
        for slot in theta.iter_mut().rev() {
            *slot = Self::axis_value(flat % resolution, resolution);
            flat /= resolution;
        }
        theta
    }

    fn point(&self, flat: usize) -> GridPoint {
        GridPoint {
            theta: Self::theta_of(flat, self.resolution, self.dim),
            energy: self.energies[flat],
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Lowest grid energy; ties go to the first point in flat order.
    pub fn minimum(&self) -> GridPoint {
        let flat = (0..self.energies.len())
            .min_by(|&a, &b| self.energies[a].total_cmp(&self.energies[b]))
            .expect("grid is non-empty");
        self.point(flat)
    }

    /// Grid points strictly lower than all `3^K − 1` periodic neighbours,
    /// sorted by energy.
    pub fn local_minima(&self) -> Vec<GridPoint> {
        let res = self.resolution as isize;
        let offsets: Vec<Vec<isize>> = (0..3usize.pow(self.dim as u32))
            .map(|mut code| {
                (0..self.dim)
                    .map(|_| {
                        let d = (code % 3) as isize - 1;
                        code /= 3;
                        d
                    })
                    .collect()
            })
            .filter(|o: &Vec<isize>| o.iter().any(|&d| d != 0))
            .collect();
        let mut minima: Vec<GridPoint> = (0..self.energies.len())
            .filter(|&flat| {
                let mut idx = vec![0isize; self.dim];
                let mut rest = flat;
                for slot in idx.iter_mut().rev() {
                    *slot = (rest % self.resolution) as isize;
                    rest /= self.resolution;
                }
                let e = self.energies[flat];
                offsets.iter().all(|off| {
                    let neighbour = idx.iter().zip(off).fold(0usize, |acc, (&i, &d)| {
                        acc * self.resolution + (i + d).rem_euclid(res) as usize
                    });
                    e < self.energies[neighbour]
                })
            })
            .map(|flat| self.point(flat))
            .collect();
        minima.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        minima
    }
}

/// Minimum of the ansatz energy over the uniform grid `[−π, π)^K`.
pub fn grid_scan_min(ansatz: &Ansatz, h: &Hamiltonian, resolution: usize) -> Result<GridPoint> {
    Ok(Landscape::scan(ansatz, h, resolution)?.minimum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::builtin;
    use crate::pauli::h2_hamiltonian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_qubit_matrices() {
        let z = dense_matrix(&Hamiltonian::from_words(1, [(1.0, "Z")]).unwrap()).unwrap();
        assert_eq!(z.entry(0, 0), c(1.0));
        assert_eq!(z.entry(1, 1), c(-1.0));
        let xx = dense_matrix(&Hamiltonian::from_words(2, [(1.0, "XX")]).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx.entry(i, j), c(expected));
            }
        }
    }

    #[test]
    fn kronecker_sum() {
        let h = Hamiltonian::from_words(2, [(0.5, "ZI"), (0.5, "IZ")]).unwrap();
        let m = dense_matrix(&h).unwrap();
        for (k, d) in [1.0, 0.0, 0.0, -1.0].into_iter().enumerate() {
            assert_eq!(m.entry(k, k), c(d));
        }
        assert_eq!(m.hermiticity_error(), 0.0);
    }

    #[test]
    fn ground_energies() {
        let z = Hamiltonian::from_words(1, [(1.0, "Z")]).unwrap();
        assert!((ground_energy(&z).unwrap() + 1.0).abs() < 1e-12);
        let x = Hamiltonian::from_words(1, [(1.0, "X")]).unwrap();
        assert!((ground_energy(&x).unwrap() + 1.0).abs() < 1e-12);
        let h = h2_hamiltonian([0.0, 0.5, -0.5, 0.2, 0.3, 0.3]).unwrap();
        let expected = -0.2 - 1.36f64.sqrt();
        assert!((ground_energy(&h).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn too_many_qubits() {
        let h = Hamiltonian::from_words(6, [(1.0, "ZZZZZZ")]).unwrap();
        assert!(matches!(dense_matrix(&h), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn scan_limits() {
        let h2 = builtin("h2_ucc").unwrap();
        let h = Hamiltonian::zero(2).unwrap();
        assert!(grid_scan_min(&h2, &h, 8).is_err());
        let zero = grid_scan_min(&h2, &h, 64).unwrap();
        assert_eq!(zero.energy, 0.0);
        assert_eq!(zero.theta, vec![-PI]);
    }

    #[test]
    fn scan_finds_closed_form_minimum() {
        let h2 = builtin("h2_ucc").unwrap();
        let h = h2_hamiltonian([0.0, 0.5, -0.5, 0.2, 0.3, 0.3]).unwrap();
        let best = grid_scan_min(&h2, &h, 1024).unwrap();
        assert!((best.energy - (-0.2 - 1.36f64.sqrt())).abs() < 1e-4);
    }

    #[test]
    fn nonconvex_landscape_has_several_basins() {
        let nc = builtin("h2_nonconvex").unwrap();
        let h = h2_hamiltonian([0.0, 0.5, -0.5, 0.2, 0.3, 0.3]).unwrap();
        let land = Landscape::scan(&nc, &h, 256).unwrap();
        let minima = land.local_minima();
        assert!(minima.len() > 1, "{minima:?}");
        // The deepest basins sit on the particle-conserving axis θ₂ = 0.
        assert_eq!(minima[0].theta[1], 0.0);
    }
}
