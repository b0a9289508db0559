use std::sync::Arc;

use num_complex::Complex;
use num_traits::Float;

use super::krylov::Krylov;
use super::{check_times, EvolutionResult};
use crate::error::{check_len, Error, Result};
use crate::fock::{FockBasis, QuantumState};
use crate::network::{build_hamiltonian, InputPattern, NetworkModel};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Krylov subspace dimension.
    pub krylov_dimension: usize,
    /// Local error estimate allowed per unit time.
    pub tolerance: f64,
    /// Norm drift allowed per unit time before aborting.
    pub max_drift_rate: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { krylov_dimension: 24, tolerance: 1e-10, max_drift_rate: 1e-8 }
    }
}

/// Input stimulus as a product of the output-layer vacuum and input-layer
/// coherent states with real amplitudes `√X_j`.
pub fn stimulus_state<F: Real>(basis: &Arc<FockBasis>, stimulus: &InputPattern<F>) -> Result<QuantumState<F>> {
    let n = stimulus.len();
    check_len(2 * n, basis.mode_count(), "basis modes for stimulus")?;
    let mut alphas = vec![Complex::new(F::zero(), F::zero()); 2 * n];
    for (a, x) in alphas[n..].iter_mut().zip(stimulus.values()) {
        *a = Complex::new(Float::sqrt(*x), F::zero());
    }
    QuantumState::coherent(Arc::clone(basis), &alphas).map(|(state, _)| state)
}

/// Unitary evolution of `initial` under the model Hamiltonian, sampled at
/// `times`.
pub fn evolve_exact<F: Real>(
    model: &NetworkModel<F>,
    basis: &Arc<FockBasis>,
    initial: &QuantumState<F>,
    times: &[F],
) -> Result<EvolutionResult<F>> {
    evolve_exact_with(model, basis, initial, times, &ExactOptions::default())
}

pub fn evolve_exact_with<F: Real>(
    model: &NetworkModel<F>,
    basis: &Arc<FockBasis>,
    initial: &QuantumState<F>,
    times: &[F],
    options: &ExactOptions,
) -> Result<EvolutionResult<F>> {
    if model.input_layer().is_none() {
        return Err(Error::invalid("exact evolution needs a model with an input layer"));
    }
    let n = model.n();
    check_len(2 * n, basis.mode_count(), "basis modes")?;
    if initial.basis().caps() != basis.caps() {
        return Err(Error::invalid("initial state lives on a different basis"));
    }
    let norm = initial.norm_sqr();
    if Float::abs(norm - F::one()) > F::of(1e-10) {
        return Err(Error::invalid(format!("initial state not normalized (norm² = {norm})")));
    }
    if options.krylov_dimension < 2 {
        return Err(Error::invalid("krylov dimension must be at least 2"));
    }
    check_times(times)?;

    let h = build_hamiltonian(model, basis)?;
    let krylov = Krylov { h: &h, dimension: options.krylov_dimension, tolerance: F::of(options.tolerance) };
    let mut psi = initial.amplitudes().to_vec();
    let mut result = EvolutionResult::with_capacity(times.len());
    let mut t = F::zero();
    let min_tau = F::of(1e-12);
    for &target in times {
        while t < target {
            let remaining = target - t;
            if remaining <= F::epsilon() * F::of(16.0) * target {
                break;
            }
            let step = krylov
                .step(&mut psi, remaining, min_tau.min(remaining))
                .ok_or(Error::StepUnderflow { time: t.as_f64(), last_stable_step: min_tau.as_f64() })?;
            t = t + step.tau;
            result.steps += 1;
        }
        t = target;
        let norm_sqr = psi.iter().fold(F::zero(), |acc, c| acc + c.norm_sqr());
        let drift = Float::abs(F::one() - norm_sqr);
        if drift.as_f64() > options.max_drift_rate * t.as_f64().max(1.0) {
            return Err(Error::NormDrift { time: t.as_f64(), drift: drift.as_f64(), limit: options.max_drift_rate });
        }
        let mut occupations = vec![F::zero(); 2 * n];
        for (i, c) in psi.iter().enumerate() {
            let p = c.norm_sqr();
            if p == F::zero() {
                continue;
            }
            for (acc, &k) in occupations.iter_mut().zip(basis.state(i)) {
                if k != 0 {
                    *acc = *acc + p * F::of(k as f64);
                }
            }
        }
        result.times.push(t);
        result.y_expect.push(occupations[..n].to_vec());
        result.x_expect.push(occupations[n..].to_vec());
        result.norm_drift.push(drift);
        result.energy.push(h.expectation(&psi).re);
    }
    Ok(result)
}
