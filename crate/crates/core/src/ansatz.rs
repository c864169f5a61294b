//! Parameterized ansatzes `|ψ(θ)⟩ = U(θ)|ref⟩` built from Pauli exponentials,
//! with energies and parameter-shift gradients.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliString};
use crate::simulator::StateVector;

/// One factor `exp(−i·θ[param]·scale·P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzGate {
    pub generator: PauliString,
    pub param: usize,
    pub scale: f64,
}

impl AnsatzGate {
    pub fn new(generator: &str, param: usize, scale: f64) -> Result<Self> {
        Ok(AnsatzGate {
            generator: generator.parse()?,
            param,
            scale,
        })
    }
}

/// Gates are applied in list order, so the first gate is the rightmost
/// factor of the operator product.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    n_qubits: usize,
    reference: String,
    gates: Vec<AnsatzGate>,
    n_params: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `exp(−iθ X₀Y₁)` on `|01⟩`.
    H2Ucc,
    /// `exp(−iθ₂ X₀Y₂)·exp(−iθ₁ X₀Y₁)` on `|111⟩`.
    LihUcc,
    /// `exp(−iθ₃ X₀X₁X₂Y₃)·exp(−iθ₂ X₁Y₃)·exp(−iθ₁ X₀Y₂)` on `|0011⟩`.
    HehpUcc,
    /// `exp(−iθ₂(2X₀ + 1.5X₁))·exp(−iθ₁ X₀Y₁)` on `|01⟩`.
    H2Nonconvex,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::H2Ucc,
        Builtin::LihUcc,
        Builtin::HehpUcc,
        Builtin::H2Nonconvex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::H2Ucc => "h2_ucc",
            Builtin::LihUcc => "lih_ucc",
            Builtin::HehpUcc => "hehp_ucc",
            Builtin::H2Nonconvex => "h2_nonconvex",
        }
    }

    pub fn ansatz(self) -> Ansatz {
        let gate = |p: &str, i, s| AnsatzGate::new(p, i, s).expect("builtin word");
        let (reference, gates) = match self {
            Builtin::H2Ucc => ("01", vec![gate("XY", 0, 1.0)]),
            Builtin::LihUcc => ("111", vec![gate("XYI", 0, 1.0), gate("XIY", 1, 1.0)]),
            Builtin::HehpUcc => (
                "0011",
                vec![
                    gate("XIYI", 0, 1.0),
                    gate("IXIY", 1, 1.0),
                    gate("XXXY", 2, 1.0),
                ],
            ),
            // X₀ and X₁ commute, so exp(−iθ(aX₀ + bX₁)) splits exactly.
            Builtin::H2Nonconvex => (
                "01",
                vec![gate("XY", 0, 1.0), gate("XI", 1, 2.0), gate("IX", 1, 1.5)],
            ),
        };
        Ansatz::new(reference, gates).expect("builtin ansatz is valid")
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownAnsatz(s.to_string()))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn builtin(name: &str) -> Result<Ansatz> {
    Ok(name.parse::<Builtin>()?.ansatz())
}

impl Ansatz {
    pub fn new(reference: &str, gates: Vec<AnsatzGate>) -> Result<Self> {
        let n_qubits = reference.chars().count();
        if n_qubits == 0 || reference.chars().any(|c| c != '0' && c != '1') {
            return Err(Error::InvalidAnsatz(format!(
                "reference {reference:?} must be a non-empty bitstring"
            )));
        }
        if gates.is_empty() {
            return Err(Error::InvalidAnsatz("ansatz has no gates".into()));
        }
        for g in &gates {
            if g.generator.n_qubits() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    found: g.generator.n_qubits(),
                });
            }
            if g.generator.is_identity() {
                return Err(Error::InvalidAnsatz(
                    "identity generator only adds a global phase".into(),
                ));
            }
            if g.scale == 0.0 || !g.scale.is_finite() {
                return Err(Error::InvalidAnsatz(format!(
                    "gate {} has invalid scale {}",
                    g.generator, g.scale
                )));
            }
        }
        let n_params = gates.iter().map(|g| g.param).max().unwrap_or(0) + 1;
        if let Some(unused) = (0..n_params).find(|&i| !gates.iter().any(|g| g.param == i)) {
            return Err(Error::InvalidAnsatz(format!(
                "parameter {unused} is not used by any gate"
            )));
        }
        Ok(Ansatz {
            n_qubits,
            reference: reference.to_string(),
            gates,
            n_params,
        })
    }

    /// Same gates on a different reference bitstring.
    pub fn with_reference(&self, reference: &str) -> Result<Self> {
        Self::new(reference, self.gates.clone())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn gates(&self) -> &[AnsatzGate] {
        &self.gates
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::LengthMismatch {
                expected: self.n_params,
                found: theta.len(),
            });
        }
        Ok(())
    }

    fn check_hamiltonian(&self, h: &Hamiltonian) -> Result<()> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                found: h.n_qubits(),
            });
        }
        Ok(())
    }

    /// Per-gate rotation angles `θ[param]·scale`.
    fn gate_angles(&self, theta: &[f64]) -> Vec<f64> {
        self.gates
            .iter()
            .map(|g| theta[g.param] * g.scale)
            .collect()
    }

    fn state_from_angles(&self, angles: &[f64]) -> StateVector {
        let mut state = StateVector::basis_state(&self.reference).expect("validated reference");
        for (g, &a) in self.gates.iter().zip(angles) {
            state
                .apply_pauli_exponential_mut(&g.generator, a)
                .expect("validated width");
        }
        state
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        self.check_theta(theta)?;
        Ok(self.state_from_angles(&self.gate_angles(theta)))
    }

    pub fn energy_at(&self, h: &Hamiltonian, theta: &[f64]) -> Result<f64> {
        self.check_hamiltonian(h)?;
        self.prepare(theta)?.energy(h)
    }

    /// Analytic gradient by the parameter-shift rule.
    ///
    /// For a unit-Pauli factor `exp(−iφP)` the energy is a first harmonic in
    /// `2φ`, so `∂E/∂φ = E(φ + π/4) − E(φ − π/4)` exactly. Shared parameters
    /// sum `scale·∂E/∂φ` over their gates.
    pub fn gradient(&self, h: &Hamiltonian, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_hamiltonian(h)?;
        self.check_theta(theta)?;
        let base = self.gate_angles(theta);
        let mut grad = vec![0.0; self.n_params];
        let mut angles = base.clone();
        for (k, g) in self.gates.iter().enumerate() {
            angles[k] = base[k] + FRAC_PI_4;
            let plus = self.state_from_angles(&angles).energy(h)?;
            angles[k] = base[k] - FRAC_PI_4;
            let minus = self.state_from_angles(&angles).energy(h)?;
            angles[k] = base[k];
            grad[g.param] += g.scale * (plus - minus);
        }
        Ok(grad)
    }

    /// Central finite differences with step `step`; a cross-check for
    /// [`Ansatz::gradient`].
    pub fn gradient_fd(&self, h: &Hamiltonian, theta: &[f64], step: f64) -> Result<Vec<f64>> {
        self.check_hamiltonian(h)?;
        self.check_theta(theta)?;
        let mut shifted = theta.to_vec();
        (0..self.n_params)
            .map(|j| {
                shifted[j] = theta[j] + step;
                let plus = self.energy_at(h, &shifted)?;
                shifted[j] = theta[j] - step;
                let minus = self.energy_at(h, &shifted)?;
                shifted[j] = theta[j];
                Ok((plus - minus) / (2.0 * step))
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AnsatzFile = serde_json::from_str(text).map_err(|e| Error::json("<input>", e))?;
        let ansatz = Ansatz::new(
            &file.reference,
            file.gates
                .iter()
                .map(|g| {
                    Ok(AnsatzGate {
                        generator: PauliString::parse(&g.pauli, file.n_qubits)?,
                        param: g.param,
                        scale: g.scale,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        if ansatz.n_qubits != file.n_qubits {
            return Err(Error::LengthMismatch {
                expected: file.n_qubits,
                found: ansatz.n_qubits,
            });
        }
        Ok(ansatz)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::json(path, source),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let file = AnsatzFile {
            n_qubits: self.n_qubits,
            reference: self.reference.clone(),
            gates: self
                .gates
                .iter()
                .map(|g| GateFile {
                    pauli: g.generator.to_string(),
                    param: g.param,
                    scale: g.scale,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("ansatz serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnsatzFile {
    n_qubits: usize,
    reference: String,
    gates: Vec<GateFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateFile {
    pauli: String,
    param: usize,
    #[serde(default = "unit_scale")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}
