use std::sync::Arc;

use num_complex::Complex;
use num_traits::Float;

use super::exact::{evolve_exact_with, stimulus_state, ExactOptions};
use super::meanfield::{evolve_meanfield_with, CoherentConfig, MeanFieldOptions};
use super::EvolutionResult;
use crate::critical::CriticalSolution;
use crate::error::{check_len, Error, Result};
use crate::fock::{FockBasis, DEFAULT_DIMENSION_LIMIT};
use crate::network::{frozen_reduction, InputPattern, NetworkModel};
use crate::scalar::Real;

/// State of the output layer before the stimulus arrives.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial<F> {
    /// All output neurons unexcited.
    Ground,
    /// Excited neurons at their critical levels, the rest unexcited.
    Critical(CriticalSolution<F>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecallOptions {
    /// Occupation cap for every simulated mode of the exact engine.
    pub cap: u32,
    pub dimension_limit: u128,
    pub exact: ExactOptions,
    pub meanfield: MeanFieldOptions,
}

impl Default for RecallOptions {
    fn default() -> Self {
        RecallOptions {
            cap: 6,
            dimension_limit: DEFAULT_DIMENSION_LIMIT,
            exact: ExactOptions::default(),
            meanfield: MeanFieldOptions::default(),
        }
    }
}

/// A recall trajectory together with the modes that were held fixed.
#[derive(Debug, Clone)]
pub struct RecallRun<F> {
    pub n: usize,
    /// Original indices of the simulated channels.
    pub active: Vec<usize>,
    /// Output occupations held fixed as c-numbers.
    pub frozen: Vec<(usize, F)>,
    /// Stimulus on every channel, zero on excited neurons.
    pub stimulus: InputPattern<F>,
    pub result: EvolutionResult<F>,
}

impl<F: Real> RecallRun<F> {
    /// Output occupations on all `n` neurons at sample `i`.
    pub fn y_full(&self, i: usize) -> Vec<F> {
        let mut y = vec![F::zero(); self.n];
        for (m, v) in &self.frozen {
            y[*m] = *v;
        }
        for (&m, v) in self.active.iter().zip(&self.result.y_expect[i]) {
            y[m] = *v;
        }
        y
    }

    /// Input occupations on all `n` channels at sample `i`.
    pub fn x_full(&self, i: usize) -> Vec<F> {
        let mut x = vec![F::zero(); self.n];
        for (&m, v) in self.active.iter().zip(&self.result.x_expect[i]) {
            x[m] = *v;
        }
        x
    }

    /// Output response on the non-excited neurons at sample `i`, with
    /// excited neurons reported as zero.
    pub fn response(&self, i: usize) -> Vec<F> {
        let mut y = vec![F::zero(); self.n];
        let excited: Vec<usize> = self.frozen.iter().filter(|(_, v)| *v > F::zero()).map(|(m, _)| *m).collect();
        for (m, v) in self.y_full(i).into_iter().enumerate() {
            if !excited.contains(&m) {
                y[m] = v;
            }
        }
        y
    }
}

fn effective_stimulus<F: Real>(model: &NetworkModel<F>, initial: &Initial<F>, stimulus: &InputPattern<F>) -> Result<InputPattern<F>> {
    check_len(model.n(), stimulus.len(), "stimulus length")?;
    let mut x = stimulus.values().to_vec();
    if let Initial::Critical(s) = initial {
        if s.n() != model.n() {
            return Err(Error::DimensionMismatch { expected: model.n(), actual: s.n(), context: "critical solution size" });
        }
        for &a in &s.excited {
            x[a] = F::zero();
        }
    }
    if x.iter().all(|v| *v == F::zero()) {
        return Err(Error::invalid("stimulus is zero on every non-excited neuron"));
    }
    InputPattern::new(x)
}

/// Exact recall run. Excited neurons are replaced by c-numbers; channels with
/// no stimulus carry no quanta and are dropped, which is exact because the
/// Hamiltonian conserves the number of quanta per channel.
pub fn recall_exact<F: Real>(
    model: &NetworkModel<F>,
    initial: &Initial<F>,
    stimulus: &InputPattern<F>,
    times: &[F],
    options: &RecallOptions,
) -> Result<RecallRun<F>> {
    if model.input_layer().is_none() {
        return Err(Error::invalid("recall needs a model with an input layer"));
    }
    let stimulus = effective_stimulus(model, initial, stimulus)?;
    let mut frozen: Vec<(usize, F)> = match initial {
        Initial::Critical(s) => s.frozen(),
        Initial::Ground => Vec::new(),
    };
    for (j, &x) in stimulus.values().iter().enumerate() {
        if x == F::zero() && !frozen.iter().any(|(m, _)| *m == j) {
            frozen.push((j, F::zero()));
        }
    }
    frozen.sort_by_key(|(m, _)| *m);
    let reduction = frozen_reduction(model, &frozen)?;
    let active = reduction.kept.clone();
    let caps = vec![options.cap; 2 * active.len()];
    let basis = Arc::new(FockBasis::with_limit(&caps, options.dimension_limit)?);
    let local = InputPattern::new(active.iter().map(|&j| stimulus.values()[j]).collect())?;
    let state = stimulus_state(&basis, &local)?;
    let result = evolve_exact_with(&reduction.model, &basis, &state, times, &options.exact)?;
    Ok(RecallRun { n: model.n(), active, frozen, stimulus, result })
}

/// Mean-field recall run on the full model, excited neurons carrying
/// amplitude `√ξ`.
pub fn recall_meanfield<F: Real>(
    model: &NetworkModel<F>,
    initial: &Initial<F>,
    stimulus: &InputPattern<F>,
    times: &[F],
    options: &RecallOptions,
) -> Result<RecallRun<F>> {
    if model.input_layer().is_none() {
        return Err(Error::invalid("recall needs a model with an input layer"));
    }
    let stimulus = effective_stimulus(model, initial, stimulus)?;
    let n = model.n();
    let mut a = vec![Complex::new(F::zero(), F::zero()); n];
    if let Initial::Critical(s) = initial {
        for (&m, xi) in s.excited.iter().zip(&s.xi) {
            a[m] = Complex::new(Float::sqrt(*xi), F::zero());
        }
    }
    let b = stimulus.values().iter().map(|x| Complex::new(Float::sqrt(*x), F::zero())).collect();
    let config = CoherentConfig::new(a, b)?;
    let result = evolve_meanfield_with(model, &config, times, &options.meanfield)?;
    Ok(RecallRun { n, active: (0..n).collect(), frozen: Vec::new(), stimulus, result })
}
