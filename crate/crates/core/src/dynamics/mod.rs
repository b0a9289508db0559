//! Response of the network to input stimuli.
//!
//! Two engines share [`EvolutionResult`]: exact unitary evolution on a
//! truncated Fock space ([`evolve_exact`]) and the classical mean-field
//! limit ([`evolve_meanfield`]). Times are in units of `ħ/ε`.

mod analytic;
mod exact;
mod krylov;
mod meanfield;
mod recall;

pub use analytic::{
    analytic_response_critical, analytic_response_ground, default_time_grid, ground_frequency, ground_peak_fraction,
    rabi_period, recall_fidelity,
};
pub use exact::{evolve_exact, evolve_exact_with, stimulus_state, ExactOptions};
pub use meanfield::{evolve_meanfield, evolve_meanfield_with, CoherentConfig, MeanFieldOptions};
pub use recall::{recall_exact, recall_meanfield, Initial, RecallOptions, RecallRun};

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult<F> {
    pub times: Vec<F>,
    /// `Y_j(t)` per sample.
    pub y_expect: Vec<Vec<F>>,
    /// `X_j(t)` per sample.
    pub x_expect: Vec<Vec<F>>,
    /// `|1 − ⟨ψ|ψ⟩|` for the exact engine, relative total-occupation drift
    /// for the mean-field engine.
    pub norm_drift: Vec<F>,
    /// `⟨H⟩`, or the classical energy function for mean-field runs.
    pub energy: Vec<F>,
    /// Integration steps taken.
    pub steps: usize,
}

impl<F: Real> EvolutionResult<F> {
    pub(crate) fn with_capacity(n: usize) -> Self {
        EvolutionResult {
            times: Vec::with_capacity(n),
            y_expect: Vec::with_capacity(n),
            x_expect: Vec::with_capacity(n),
            norm_drift: Vec::with_capacity(n),
            energy: Vec::with_capacity(n),
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `Y_j + X_j` per sample and channel.
    pub fn channel_totals(&self) -> Vec<Vec<F>> {
        self.y_expect
            .iter()
            .zip(&self.x_expect)
            .map(|(y, x)| y.iter().zip(x).map(|(a, b)| *a + *b).collect())
            .collect()
    }

    /// `Y_mode(t)` over all samples.
    pub fn y_series(&self, mode: usize) -> Vec<F> {
        self.y_expect.iter().map(|y| y[mode]).collect()
    }

    pub fn x_series(&self, mode: usize) -> Vec<F> {
        self.x_expect.iter().map(|x| x[mode]).collect()
    }

    /// Largest `Y_mode` and the time it is reached.
    pub fn peak_y(&self, mode: usize) -> Option<(F, F)> {
        self.times
            .iter()
            .zip(&self.y_expect)
            .map(|(t, y)| (*t, y[mode]))
            .fold(None, |best, (t, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((t, v)),
            })
    }

    /// Largest drift of a per-sample quantity from its first value,
    /// divided by the elapsed time (at least one).
    pub fn drift_rate(series: &[F], times: &[F]) -> F {
        let Some(&first) = series.first() else { return F::zero() };
        let t0 = times.first().copied().unwrap_or(F::zero());
        series
            .iter()
            .zip(times)
            .map(|(v, t)| Float::abs(*v - first) / (*t - t0).max(F::one()))
            .fold(F::zero(), |a, b| a.max(b))
    }
}

pub(crate) fn check_times<F: Real>(times: &[F]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("no sample times requested"));
    }
    let mut prev = F::zero();
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(Error::invalid("sample times must be finite, nonnegative and nondecreasing"));
        }
        prev = t;
    }
    Ok(())
}
