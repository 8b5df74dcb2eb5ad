//! Entanglement witnesses for thermal spin chains.
//!
//! The relative entropy `S(ρ‖σ)` between a target state and its closest
//! separable state bounds the distance from the target to any separable
//! state. A thermal state `ρ*` that is strictly closer to the target than that
//! bound is certified entangled. Every relative entropy in the crate can be
//! obtained two ways: from spectral decompositions, or from two-point
//! measurement work statistics of a driven protocol through the
//! Jarzynski–Tasaki equality.
//!
//! Modules, bottom up:
//!
//! * [`operator`]: dense complex operators on qubit registers.
//! * [`spin`]: XXZ chain Hamiltonians and driving schedules.
//! * [`thermo`]: Gibbs states, partition functions and relative entropy.
//! * [`work`]: unitary evolution, transition probabilities, work statistics.
//! * [`witness`]: reference states, witness evaluation and parameter sweeps.
//! * [`open_system`]: effective Hamiltonians for a subsystem coupled to a bath.
//!
//! Units: `ħ = k_B = 1`, natural logarithms throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod open_system;
pub mod operator;
pub mod random;
pub mod spin;
pub mod thermo;
pub mod work;
pub mod witness;

pub use error::{Error, Result};
pub use operator::{
    dicke_state, embed_pauli, hermitian_function, partial_trace, spectral_decompose,
    DensityMatrix, HermitianOperator, PauliAxis, QubitRegister, SpectralDecomposition,
    StateVector, UnitaryOperator,
};
pub use spin::{build_dm_term, build_xxz, Boundary, DMParams, DrivingSchedule, XXZParams};
pub use thermo::{relative_entropy, thermal_state, ThermalSpec};
pub use witness::{Route, WitnessReport, WitnessState};

/// Scientific notation with 17 significant digits, enough to round-trip any
/// `f64`. Used for every number written to CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
