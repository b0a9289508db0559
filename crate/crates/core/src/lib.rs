//! Networks of bosonic qudit neurons with weak excitatory couplings.
//!
//! Each neuron is a bosonic mode with occupation `Y_j`; the energy
//!
//! ```text
//! H = Σ_j ε_j Y_j − Σ_{j,k} W_jk Y_j Y_k
//! ```
//!
//! is lowered when coupled neurons are excited together. Exciting a few
//! neurons strongly can close the gaps of the others ([`critical`]), after
//! which exponentially many patterns fit into a small energy window. An
//! input layer lets the network respond to stimuli ([`dynamics`]), and
//! [`coherent`] covers the classical limit.
//!
//! The model algebra is generic over [`Scalar`] (`f32`, `f64`,
//! [`BigRational`]); the time evolution is generic over [`Real`].

pub mod coherent;
pub mod critical;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod modelfile;
pub mod network;
pub mod presets;
pub mod scalar;

pub use num_bigint::BigUint;
pub use num_complex::Complex;
pub use num_rational::BigRational;

pub use coherent::{
    classical_gap, distance_sq, overlap_amplitude, overlap_sq, pack_patterns, ClassicalPattern, PackOptions, Packing,
};
pub use critical::{
    decoherence_bound, effective_threshold, entropy_estimate, enumerate_patterns, gap_between, pattern_count,
    search_critical_splits, solve_critical_split, thermalization_time, CriticalSolution, EnumerateOptions,
    PatternLibrary, SolveOptions,
};
pub use dynamics::{
    analytic_response_critical, analytic_response_ground, evolve_exact, evolve_meanfield, recall_fidelity,
    CoherentConfig, EvolutionResult, Initial,
};
pub use error::{Error, ErrorClass, Result};
pub use fock::{build_basis, coherent_state, FockBasis, QuantumState, SparseOperator};
pub use modelfile::{parse_model, write_model, ModelFile};
pub use network::{
    build_hamiltonian, energy_of_number_state, frozen_reduction, InputLayer, InputPattern, NetworkModel, Reduction,
};
pub use scalar::{Real, Scalar};

pub type Model = NetworkModel<f64>;
pub type ModelF32 = NetworkModel<f32>;
pub type ExactModel = NetworkModel<BigRational>;
pub type Solution = CriticalSolution<f64>;
pub type ExactSolution = CriticalSolution<BigRational>;
pub type Stimulus = InputPattern<f64>;
pub type State = QuantumState<f64>;
pub type Operator = SparseOperator<f64>;
pub type Evolution = EvolutionResult<f64>;
pub type Pattern = ClassicalPattern<f64>;
