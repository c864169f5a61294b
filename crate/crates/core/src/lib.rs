//! Collective variational eigensolver: Pauli-string Hamiltonian families, a
//! statevector simulator, UCC ansatzes, brute-force oracles, and the snake
//! optimizer that minimizes a whole family of energies at once.

pub mod ansatz;
pub mod error;
pub mod objective;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod simulator;

pub use ansatz::{builtin, Ansatz, AnsatzGate, Builtin};
pub use error::{Error, Result};
pub use objective::{
    st_basin, st_gradient, st_minima, st_stationary, st_value, ObjectiveFamily, QuadraticFamily,
    StBasin, StFamily, StStationary, VqeFamily,
};
pub use optimize::{
    build_A, decay_factor, gd_run, gd_step, internal_energy, residual_inf, snake_run, snake_step,
    trajectory_csv, Boundary, EnvelopeCholesky, GdConfig, MemberReport, RunOutcome, RunReport,
    SnakeConfig, SnakeState, Snapshot, StiffnessMatrix,
};
pub use oracle::{
    dense_matrix, grid_scan_min, ground_energy, DenseHermitian, GridPoint, Landscape,
};
pub use pauli::{
    default_h2_family, h2_hamiltonian, synth_h2_family, uniform_grid, FamilyPoint, Hamiltonian,
    HamiltonianFamily, Pauli, PauliString, Term,
};
pub use simulator::{pauli_exponential_circuit, Gate, StateVector};
