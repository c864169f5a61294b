//! Dense statevector simulation.
//!
//! Basis index `i` encodes the bits `b₀b₁…b_{n−1}` with qubit 0 as the most
//! significant bit, so `|01⟩` is index 1 and `|0011⟩` is index 3.
//! Conventions: `Rz(φ) = exp(−iφZ/2)`, `Rx(φ) = exp(−iφX/2)`, and Pauli
//! exponentials use the full angle, `exp(−iθP)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli, PauliString};

/// Statevectors beyond this size are outside what the dense simulator is for.
pub const MAX_SIM_QUBITS: usize = 24;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// `i^k` for `k` mod 4.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

impl StateVector {
    /// Computational basis state from a bitstring such as `"01"`.
    pub fn basis_state(bits: &str) -> Result<Self> {
        let n = bits.chars().count();
        if n == 0 {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        if n > MAX_SIM_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: MAX_SIM_QUBITS,
            });
        }
        let mut index = 0usize;
        for (position, ch) in bits.chars().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidAnsatz(format!(
                        "bitstring {bits:?} has {ch:?} at position {position}"
                    )))
                }
            };
            index = index << 1 | bit;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits: n, amps })
    }

    /// Builds a state from raw amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        Ok(StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    /// `P|self⟩`.
    pub fn apply_pauli(&self, pauli: &PauliString) -> Result<StateVector> {
        self.check_width(pauli.n_qubits())?;
        let (x, z) = (pauli.x_mask() as usize, pauli.z_mask() as usize);
        let phase = i_pow(pauli.y_count());
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &amp) in self.amps.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[b ^ x] = phase * sign * amp;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `exp(−iθP)|self⟩ = cos θ·|self⟩ − i·sin θ·P|self⟩`, in place.
    pub fn apply_pauli_exponential_mut(&mut self, pauli: &PauliString, theta: f64) -> Result<()> {
        self.check_width(pauli.n_qubits())?;
        let (x, z) = (pauli.x_mask() as usize, pauli.z_mask() as usize);
        let (s, c) = theta.sin_cos();
        let kick = -I * s * i_pow(pauli.y_count());
        if x == 0 {
            // Diagonal word: each amplitude picks up cos θ ∓ i sin θ.
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let sign = if (b & z).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                *amp *= c + kick * sign;
            }
            return Ok(());
        }
        for b in 0..self.amps.len() {
            let partner = b ^ x;
            if partner < b {
                continue;
            }
            let sign_b = if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let sign_p = if (partner & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let (ab, ap) = (self.amps[b], self.amps[partner]);
            // (Pψ)[partner] = phase·sign_b·ψ[b] and vice versa.
            self.amps[b] = c * ab + kick * sign_p * ap;
            self.amps[partner] = c * ap + kick * sign_b * ab;
        }
        Ok(())
    }

    pub fn apply_pauli_exponential(&self, pauli: &PauliString, theta: f64) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_pauli_exponential_mut(pauli, theta)?;
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩`. The imaginary part vanishes for Hermitian `P` and is dropped.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        self.check_width(pauli.n_qubits())?;
        let (x, z) = (pauli.x_mask() as usize, pauli.z_mask() as usize);
        let phase = i_pow(pauli.y_count());
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &amp) in self.amps.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += self.amps[b ^ x].conj() * amp * sign;
        }
        let value = phase * acc;
        debug_assert!(
            value.im.abs() <= 1e-10 * (1.0 + value.re.abs()),
            "expectation of a Pauli word has imaginary part {}",
            value.im
        );
        Ok(value.re)
    }

    /// `Σᵢ cᵢ⟨ψ|Pᵢ|ψ⟩`.
    pub fn energy(&self, hamiltonian: &Hamiltonian) -> Result<f64> {
        self.check_width(hamiltonian.n_qubits())?;
        hamiltonian
            .terms()
            .iter()
            .map(|t| Ok(t.coeff * self.expectation(&t.pauli)?))
            .sum()
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[b | bit]);
            self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_gate_mut(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::InvalidConfig(format!(
                    "gate {gate:?} addresses qubit {q} of a {}-qubit state",
                    self.n_qubits
                )));
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        match gate {
            Gate::H(q) => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[h, h], [h, -h]]);
            }
            Gate::Rx(q, phi) => {
                let (s, c) = (phi / 2.0).sin_cos();
                let c = Complex64::new(c, 0.0);
                self.apply_single(q, [[c, -I * s], [-I * s, c]]);
            }
            Gate::Rz(q, phi) => {
                let (s, c) = (phi / 2.0).sin_cos();
                self.apply_single(
                    q,
                    [[Complex64::new(c, -s), zero], [zero, Complex64::new(c, s)]],
                );
            }
            Gate::Cnot { control, target } => {
                if control == target {
                    return Err(Error::InvalidConfig(format!(
                        "CNOT control and target are both qubit {control}"
                    )));
                }
                let cbit = 1usize << (self.n_qubits - 1 - control);
                let tbit = 1usize << (self.n_qubits - 1 - target);
                for b in 0..self.amps.len() {
                    if b & cbit != 0 && b & tbit == 0 {
                        self.amps.swap(b, b | tbit);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_gate(&self, gate: Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_circuit(&self, gates: &[Gate]) -> Result<StateVector> {
        let mut out = self.clone();
        for &g in gates {
            out.apply_gate_mut(g)?;
        }
        Ok(out)
    }
}

/// Elementary gates used to compile Pauli exponentials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn qubits(self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }
}

/// Compiles `exp(−iθP)` into basis changes, a CNOT parity ladder, and one
/// `Rz(2θ)` on the last active qubit.
///
/// X letters are rotated with `H` and Y letters with `Rx(π/2)`, which maps
/// each onto Z; the ladder then accumulates the Z-parity on the last active
/// qubit. Only the `Rz` carries the parameter.
pub fn pauli_exponential_circuit(pauli: &PauliString, theta: f64) -> Result<Vec<Gate>> {
    use std::f64::consts::FRAC_PI_2;

    let active: Vec<(usize, Pauli)> = pauli
        .letters()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| p != Pauli::I)
        .collect();
    let Some(&(last, _)) = active.last() else {
        return Err(Error::InvalidAnsatz(
            "identity word only contributes a global phase".into(),
        ));
    };

    let mut gates = Vec::new();
    for &(q, p) in &active {
        match p {
            Pauli::X => gates.push(Gate::H(q)),
            Pauli::Y => gates.push(Gate::Rx(q, FRAC_PI_2)),
            _ => {}
        }
    }
    let ladder: Vec<Gate> = active
        .windows(2)
        .map(|w| Gate::Cnot {
            control: w[0].0,
            target: w[1].0,
        })
        .collect();
    gates.extend(ladder.iter().copied());
    gates.push(Gate::Rz(last, 2.0 * theta));
    gates.extend(ladder.iter().rev().copied());
    for &(q, p) in &active {
        match p {
            Pauli::X => gates.push(Gate::H(q)),
            Pauli::Y => gates.push(Gate::Rx(q, -FRAC_PI_2)),
            _ => {}
        }
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    use super::*;

    fn word(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amps(state: &StateVector, expected: &[Complex64]) {
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} != {e}");
        }
    }

    #[test]
    fn basis_state_encoding() {
        let s = StateVector::basis_state("01").unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
        let s = StateVector::basis_state("111").unwrap();
        assert_eq!(s.amplitudes()[7], c(1.0, 0.0));
        let s = StateVector::basis_state("0011").unwrap();
        assert_eq!(s.amplitudes().len(), 16);
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));
        assert!(StateVector::basis_state("").is_err());
        assert!(StateVector::basis_state("012").is_err());
    }

    #[test]
    fn xy_exponential_on_reference() {
        let r = StateVector::basis_state("01").unwrap();
        let xy = word("XY");
        assert_amps(
            &r.apply_pauli_exponential(&xy, 0.0).unwrap(),
            r.amplitudes(),
        );
        let half = r.apply_pauli_exponential(&xy, FRAC_PI_2).unwrap();
        assert_amps(&half, &[c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.)]);
        let quarter = r.apply_pauli_exponential(&xy, FRAC_PI_4).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_amps(&quarter, &[c(0., 0.), c(h, 0.), c(-h, 0.), c(0., 0.)]);
        assert!(r.apply_pauli_exponential(&word("X"), 0.1).is_err());
    }

    #[test]
    fn diagonal_exponential() {
        let r = StateVector::basis_state("01").unwrap();
        // Z on qubit 1 of |01⟩ has eigenvalue −1.
        let out = r.apply_pauli_exponential(&word("IZ"), 0.3).unwrap();
        assert!((out.amplitudes()[1] - Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn expectations() {
        let r = StateVector::basis_state("01").unwrap();
        assert_eq!(r.expectation(&word("ZI")).unwrap(), 1.0);
        assert_eq!(r.expectation(&word("IZ")).unwrap(), -1.0);
        assert_eq!(r.expectation(&word("II")).unwrap(), 1.0);
        let psi = r.apply_pauli_exponential(&word("XY"), FRAC_PI_8).unwrap();
        let xx = psi.expectation(&word("XX")).unwrap();
        assert!((xx + FRAC_PI_4.sin()).abs() < 1e-12);
        assert!(r.expectation(&word("Z")).is_err());
    }

    #[test]
    fn energies() {
        let r = StateVector::basis_state("01").unwrap();
        let h = Hamiltonian::from_words(2, [(1.0, "ZI")]).unwrap();
        assert_eq!(r.energy(&h).unwrap(), 1.0);
        assert_eq!(r.energy(&Hamiltonian::zero(2).unwrap()).unwrap(), 0.0);
        let h2 = crate::pauli::h2_hamiltonian([0.0, 0.5, -0.5, 0.2, 0.3, 0.3]).unwrap();
        assert!((r.energy(&h2).unwrap() - 0.8).abs() < 1e-12);
        assert!(r.energy(&Hamiltonian::zero(3).unwrap()).is_err());
    }

    #[test]
    fn elementary_gates() {
        let zero = StateVector::basis_state("0").unwrap();
        let plus = zero.apply_gate(Gate::H(0)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_amps(&plus, &[c(h, 0.), c(h, 0.)]);
        let s = StateVector::basis_state("10").unwrap();
        let out = s
            .apply_gate(Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        assert_amps(&out, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert!(s.apply_gate(Gate::H(2)).is_err());
        assert!(s
            .apply_gate(Gate::Cnot {
                control: 1,
                target: 1
            })
            .is_err());
        // Rx(π) = −iX.
        let flipped = zero.apply_gate(Gate::Rx(0, std::f64::consts::PI)).unwrap();
        assert_amps(&flipped, &[c(0., 0.), c(0., -1.)]);
    }

    #[test]
    fn decomposition_matches_direct_exponential() {
        let r = StateVector::basis_state("01").unwrap();
        for theta in [0.0, 0.3, -1.2, 2.5] {
            let gates = pauli_exponential_circuit(&word("XY"), theta).unwrap();
            let a = r.apply_circuit(&gates).unwrap();
            let b = r.apply_pauli_exponential(&word("XY"), theta).unwrap();
            assert!(a.fidelity(&b) >= 1.0 - 1e-10);
        }
        assert!(pauli_exponential_circuit(&word("II"), 0.1).is_err());
    }
}
