//! Envelope (skyline) Cholesky factorization for the symmetric positive
//! definite systems `(ηA + I)·x = b`.
//!
//! Row `i` of the lower factor is stored from its first structural nonzero up
//! to the diagonal. Fill-in never leaves this envelope, so the periodic
//! pentadiagonal case costs `O(M)` per solve apart from the two wrap-around
//! rows, which are dense.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    size: usize,
    first: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl EnvelopeCholesky {
    /// Factors the row-major `n × n` matrix. Only the lower triangle is read.
    pub fn factor(matrix: &[f64], n: usize) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: matrix.len(),
            });
        }
        let first: Vec<usize> = (0..n)
            .map(|i| (0..i).find(|&j| matrix[i * n + j] != 0.0).unwrap_or(i))
            .collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let fi = first[i];
            let mut row = vec![0.0; i + 1 - fi];
            for j in fi..=i {
                let fj = if j == i { fi } else { first[j] };
                let start = fi.max(fj);
                let mut s = matrix[i * n + j];
                for k in start..j {
                    let ljk = if j == i { row[k - fi] } else { rows[j][k - fj] };
                    s -= row[k - fi] * ljk;
                }
                if j < i {
                    row[j - fi] = s / rows[j][j - first[j]];
                } else {
                    if !s.is_finite() || s <= 0.0 {
                        return Err(Error::Solve(format!(
                            "matrix is not positive definite (pivot {s} at row {i})"
                        )));
                    }
                    row[i - fi] = s.sqrt();
                }
            }
            rows.push(row);
        }
        Ok(EnvelopeCholesky {
            size: n,
            first,
            rows,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of stored factor entries.
    pub fn envelope_len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    fn l(&self, i: usize, k: usize) -> f64 {
        self.rows[i][k - self.first[i]]
    }

    /// Solves in place: on return `b` holds `x`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.size);
        for i in 0..self.size {
            let fi = self.first[i];
            let mut s = b[i];
            for k in fi..i {
                s -= self.l(i, k) * b[k];
            }
            b[i] = s / self.l(i, i);
        }
        for i in (0..self.size).rev() {
            b[i] /= self.l(i, i);
            let xi = b[i];
            for k in self.first[i]..i {
                b[k] -= self.l(i, k) * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// `‖M·x − b‖∞` for a row-major square matrix.
pub fn residual_inf(matrix: &[f64], x: &[f64], b: &[f64]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let ax: f64 = matrix[i * n..(i + 1) * n]
                .iter()
                .zip(x)
                .map(|(a, v)| a * v)
                .sum();
            (ax - b[i]).abs()
        })
        .fold(0.0, f64::max)
}
