//! Bundled example models.

use crate::modelfile::parse_model;
use crate::network::NetworkModel;
use crate::scalar::Scalar;

/// JSON text of the six-neuron example with three critically excited neurons.
pub const MATRIX_G_JSON: &str = include_str!("../data/matrix_g.json");

/// Six neurons whose first three, excited to `(1, 3, 2)·10¹⁰`, render the
/// last three gapless. Exact when `T` is rational.
pub fn matrix_g<T: Scalar>() -> NetworkModel<T> {
    parse_model(MATRIX_G_JSON).expect("bundled model is valid")
}

/// Excitation levels `(1, 3, 2)·10¹⁰` of the critical state of [`matrix_g`].
pub fn matrix_g_excitations<T: Scalar>() -> Vec<T> {
    ["1e10", "3e10", "2e10"].iter().map(|s| T::parse_literal(s).unwrap()).collect()
}
