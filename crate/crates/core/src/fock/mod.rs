//! Truncated bosonic Fock space: basis enumeration, ladder and number
//! operators, and states over the basis.

mod basis;
mod operator;
mod state;

pub use basis::{build_basis, BasisDump, FockBasis, DEFAULT_DIMENSION_LIMIT};
pub use operator::{ladder_operators, number_operator, OperatorDump, SparseOperator};
pub use state::{poisson_tail, required_cap, CoherentTruncation, QuantumState, COHERENT_TAIL_BOUND};

use std::sync::Arc;

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

/// Coherent state over `basis`; see [`QuantumState::coherent`].
pub fn coherent_state<F: Real>(
    basis: &Arc<FockBasis>,
    alphas: &[Complex<F>],
) -> Result<(QuantumState<F>, CoherentTruncation)> {
    QuantumState::coherent(basis.clone(), alphas)
}
