//! Pauli words, real-weighted Pauli-sum Hamiltonians, and λ-indexed families of them.
//!
//! A word has one letter per qubit; the letter at position `k` acts on qubit `k`
//! (leftmost = qubit 0). Families are read from and written to the JSON layout
//!
//! ```json
//! {"n_qubits": 2, "parameter_name": "bond_length_au",
//!  "points": [{"lambda": 0.25, "terms": [{"coeff": 0.71, "pauli": "II"}]}]}
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Words are stored as bit masks, so this is a hard ceiling.
pub const MAX_QUBITS: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Pauli operators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    /// Parses `text` as a word on exactly `n_qubits` qubits.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let found = text.chars().count();
        if found != n_qubits {
            return Err(Error::LengthMismatch {
                expected: n_qubits,
                found,
            });
        }
        text.parse()
    }

    pub fn from_letters(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        if letters.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: letters.len(),
                max: MAX_QUBITS,
            });
        }
        Ok(PauliString { letters })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_letters(vec![Pauli::I; n_qubits])
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    fn mask_of(&self, pred: impl Fn(Pauli) -> bool) -> u64 {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| pred(p))
            .fold(0, |mask, (k, _)| mask | 1 << (n - 1 - k))
    }

    /// Basis-index bits flipped by the word (X and Y letters). Qubit 0 is the
    /// most significant bit.
    pub fn x_mask(&self) -> u64 {
        self.mask_of(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Basis-index bits that pick up a sign (Z and Y letters).
    pub fn z_mask(&self) -> u64 {
        self.mask_of(|p| matches!(p, Pauli::Z | Pauli::Y))
    }

    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .enumerate()
            .map(|(position, ch)| {
                Pauli::from_char(ch).ok_or_else(|| Error::IllegalPauli {
                    word: text.to_string(),
                    ch,
                    position,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters
            .iter()
            .try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// `H = Σ cᵢ Pᵢ` with real coefficients.
///
/// Terms are kept merged (one entry per word), sorted by word, and free of
/// exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidFamily("n_qubits must be positive".into()));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut grouped: BTreeMap<PauliString, Vec<f64>> = BTreeMap::new();
        for term in terms {
            if term.pauli.n_qubits() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    found: term.pauli.n_qubits(),
                });
            }
            if !term.coeff.is_finite() {
                return Err(Error::InvalidFamily(format!(
                    "non-finite coefficient for {}",
                    term.pauli
                )));
            }
            grouped.entry(term.pauli).or_default().push(term.coeff);
        }
        // Summing in sorted order makes the merge independent of file order.
        let terms = grouped
            .into_iter()
            .filter_map(|(pauli, mut coeffs)| {
                coeffs.sort_by(f64::total_cmp);
                let coeff: f64 = coeffs.iter().sum();
                (coeff != 0.0).then_some(Term { coeff, pauli })
            })
            .collect();
        Ok(Hamiltonian { n_qubits, terms })
    }

    /// Convenience constructor from `(coeff, word)` pairs.
    pub fn from_words<'a>(
        n_qubits: usize,
        words: impl IntoIterator<Item = (f64, &'a str)>,
    ) -> Result<Self> {
        let terms = words
            .into_iter()
            .map(|(coeff, word)| {
                Ok(Term {
                    coeff,
                    pauli: PauliString::parse(word, n_qubits)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, terms)
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, [])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn coeff_of(&self, word: &str) -> f64 {
        self.terms
            .iter()
            .find(|t| t.pauli.to_string() == word)
            .map_or(0.0, |t| t.coeff)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n_qubits,
            self.terms.iter().map(|t| Term {
                coeff: t.coeff * factor,
                pauli: t.pauli.clone(),
            }),
        )
    }

    /// `H + shift·I`.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let identity = Term {
            coeff: shift,
            pauli: PauliString::identity(self.n_qubits)?,
        };
        Self::new(
            self.n_qubits,
            self.terms.iter().cloned().chain(std::iter::once(identity)),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyPoint {
    pub lambda: f64,
    pub hamiltonian: Hamiltonian,
}

/// Hamiltonians `H(λ)` on a strictly increasing λ grid, all on the same qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFamily {
    parameter_name: String,
    n_qubits: usize,
    points: Vec<FamilyPoint>,
}

impl HamiltonianFamily {
    pub fn new(parameter_name: impl Into<String>, mut points: Vec<FamilyPoint>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidFamily("family has no points".into()));
        };
        let n_qubits = first.hamiltonian.n_qubits();
        if let Some(bad) = points.iter().find(|p| p.hamiltonian.n_qubits() != n_qubits) {
            return Err(Error::InvalidFamily(format!(
                "inconsistent qubit counts: {} and {} (at lambda {})",
                n_qubits,
                bad.hamiltonian.n_qubits(),
                bad.lambda
            )));
        }
        if let Some(bad) = points.iter().find(|p| !p.lambda.is_finite()) {
            return Err(Error::InvalidFamily(format!(
                "non-finite lambda {}",
                bad.lambda
            )));
        }
        points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        if let Some(w) = points.windows(2).find(|w| w[1].lambda <= w[0].lambda) {
            return Err(Error::InvalidFamily(format!(
                "lambda values must be strictly increasing (repeated {})",
                w[0].lambda
            )));
        }
        Ok(HamiltonianFamily {
            parameter_name: parameter_name.into(),
            n_qubits,
            points,
        })
    }

    pub fn parameter_name(&self) -> &str {
        &self.parameter_name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn points(&self) -> &[FamilyPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn hamiltonian(&self, m: usize) -> &Hamiltonian {
        &self.points[m].hamiltonian
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::json(path, source),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text).map_err(|e| Error::json("<input>", e))?;
        file.into_family()
    }

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            n_qubits: self.n_qubits,
            parameter_name: self.parameter_name.clone(),
            points: self
                .points
                .iter()
                .map(|p| PointFile {
                    lambda: p.lambda,
                    terms: p
                        .hamiltonian
                        .terms()
                        .iter()
                        .map(|t| TermFile {
                            coeff: t.coeff,
                            pauli: t.pauli.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("family serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    n_qubits: usize,
    #[serde(default = "default_parameter_name")]
    parameter_name: String,
    points: Vec<PointFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    lambda: f64,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    coeff: f64,
    pauli: String,
}

fn default_parameter_name() -> String {
    "lambda".into()
}

impl FamilyFile {
    fn into_family(self) -> Result<HamiltonianFamily> {
        let n = self.n_qubits;
        let points = self
            .points
            .into_iter()
            .map(|p| {
                let terms = p
                    .terms
                    .into_iter()
                    .map(|t| {
                        Ok(Term {
                            coeff: t.coeff,
                            pauli: PauliString::parse(&t.pauli, n)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FamilyPoint {
                    lambda: p.lambda,
                    hamiltonian: Hamiltonian::new(n, terms)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        HamiltonianFamily::new(self.parameter_name, points)
    }
}

/// `M` uniformly spaced points from `min` to `max` inclusive.
pub fn uniform_grid(m: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {m}"
        )));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidGrid(format!(
            "need finite lambda_min < lambda_max, got [{min}, {max}]"
        )));
    }
    let step = (max - min) / (m - 1) as f64;
    Ok((0..m)
        .map(|i| {
            if i == m - 1 {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

/// Words of the two-qubit molecular-hydrogen Hamiltonian, in coefficient order
/// `c₀·II + c₁·ZI + c₂·IZ + c₃·ZZ + c₄·XX + c₅·YY`.
pub const H2_WORDS: [&str; 6] = ["II", "ZI", "IZ", "ZZ", "XX", "YY"];

pub fn h2_hamiltonian(c: [f64; 6]) -> Result<Hamiltonian> {
    Hamiltonian::from_words(2, c.into_iter().zip(H2_WORDS))
}

/// Coefficients of the bundled synthetic H₂-like family at `lambda` on the
/// uniform grid `grid = (M, lambda_min, lambda_max)`.
///
/// With `a = c₁ − c₂` and `b = c₄ + c₅`, the one-parameter UCC energy is
/// `c₀ − c₃ − R·cos 2(θ − θ*)`, so the functions are written in terms of the
/// optimal angle `θ*(λ)` and amplitude `R(λ)`:
///
/// * `u = (λ − λ_min) / (M·δ)` with `δ` the grid step,
/// * `θ*(λ) = 0.1 + 0.2·(1 − cos 2πu)`,
/// * `R(λ) = 0.45 + 0.15·tanh(λ − 1.2)`,
/// * `a = −R·cos 2θ*`, `b = R·sin 2θ*`,
/// * `K(λ) = 0.6·(1 − e^{−(λ − 1.4)})² − 1` (Morse-like well),
/// * `c₃ = 0.15 + 0.05·e^{−λ}`, `z = 0.05·e^{−λ/2}`, `w = 0.02·e^{−λ}`,
/// * `c = (K + c₃, z + a/2, z − a/2, c₃, b/2 + w, b/2 − w)`.
///
/// `θ*` is periodic over the grid's wrap-around, so a periodic snake has
/// almost no equilibrium bias on this family. `θ*` stays near 0, making the
/// reference `|01⟩` a good starting point.
pub fn synth_h2_coefficients(lambda: f64, m: usize, lambda_min: f64, lambda_max: f64) -> [f64; 6] {
    let period = (lambda_max - lambda_min) * m as f64 / (m - 1) as f64;
    let u = (lambda - lambda_min) / period;
    let theta_opt = 0.1 + 0.2 * (1.0 - (2.0 * PI * u).cos());
    let amplitude = 0.45 + 0.15 * (lambda - 1.2).tanh();
    let a = -amplitude * (2.0 * theta_opt).cos();
    let b = amplitude * (2.0 * theta_opt).sin();
    let well = 0.6 * (1.0 - (-(lambda - 1.4)).exp()).powi(2) - 1.0;
    let c3 = 0.15 + 0.05 * (-lambda).exp();
    let z = 0.05 * (-0.5 * lambda).exp();
    let w = 0.02 * (-lambda).exp();
    [
        well + c3,
        z + a / 2.0,
        z - a / 2.0,
        c3,
        b / 2.0 + w,
        b / 2.0 - w,
    ]
}

/// Lowest eigenvalue of the `{|01⟩, |10⟩}` block and of the `{|00⟩, |11⟩}`
/// block of the six-term H₂ Hamiltonian.
pub fn h2_block_minima(c: [f64; 6]) -> (f64, f64) {
    let single = c[0] - c[3] - (c[1] - c[2]).hypot(c[4] + c[5]);
    let paired = c[0] + c[3] - (c[1] + c[2]).hypot(c[4] - c[5]);
    (single, paired)
}

/// The bundled synthetic family on `M` uniform points of `[lambda_min, lambda_max]`.
///
/// Fails if the grid is invalid or if any point's ground state would leave
/// the single-excitation block the UCC ansatz explores.
pub fn synth_h2_family(m: usize, lambda_min: f64, lambda_max: f64) -> Result<HamiltonianFamily> {
    if m < 5 {
        return Err(Error::InvalidGrid(format!(
            "synthetic family needs at least 5 points, got {m}"
        )));
    }
    let points = uniform_grid(m, lambda_min, lambda_max)?
        .into_iter()
        .map(|lambda| {
            let c = synth_h2_coefficients(lambda, m, lambda_min, lambda_max);
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "non-finite coefficients at lambda {lambda}"
                )));
            }
            let (single, paired) = h2_block_minima(c);
            if single >= paired {
                return Err(Error::InvalidGrid(format!(
                    "ground state leaves the single-excitation block at lambda {lambda}"
                )));
            }
            Ok(FamilyPoint {
                lambda,
                hamiltonian: h2_hamiltonian(c)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HamiltonianFamily::new("bond_length_au", points)
}

/// Default grid of the bundled family: 54 points on [0.25, 2.85].
pub fn default_h2_family() -> HamiltonianFamily {
    synth_h2_family(54, 0.25, 2.85).expect("default grid is valid")
}
