//! Critically excited states.
//!
//! A split of the neurons into an excited set `A` and a gapless set `J` is
//! critical when excitation levels `ξ_α ≥ 0` on `A` solve
//!
//! ```text
//! ε_j − 2 Σ_{α∈A} W_jα ξ_α = 0     for every j ∈ J,
//! ```
//!
//! i.e. every neuron in `J` has zero effective threshold. Patterns are then
//! occupation assignments on `J`; their energy above the reference state is
//! the purely quadratic `Σ_{j,k∈J} W_jk y_j y_k`.

mod estimators;
mod patterns;

pub use estimators::{decoherence_bound, entropy_estimate, thermalization_time};
pub use patterns::{
    enumerate_patterns, gap_between, pattern_count, EnumerateOptions, PatternIter, PatternLibrary,
    DEFAULT_ENUMERATION_LIMIT,
};

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::linalg::{min_norm_nonnegative, nnls, rank, Matrix};
use crate::network::NetworkModel;
use crate::scalar::{two, Scalar};

/// Largest model searched exhaustively by [`search_critical_splits`].
pub const SEARCH_LIMIT: usize = 24;

/// A solved critical split.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSolution<T> {
    /// Highly excited neurons, ascending.
    pub excited: Vec<usize>,
    /// Neurons rendered gapless, ascending.
    pub gapless: Vec<usize>,
    /// Excitation level per excited neuron, aligned with `excited`.
    pub xi: Vec<T>,
    /// `max_j |ε_j − 2 Σ_α W_jα ξ_α|` over the gapless set.
    pub residual: T,
    /// Effective threshold per gapless neuron.
    pub effective_gaps: Vec<T>,
    /// Effective threshold per excited neuron (diagnostic only).
    pub excited_gaps: Vec<T>,
    /// Dimension of the solution set of the linear system.
    pub degeneracy: usize,
}

impl<T: Scalar> CriticalSolution<T> {
    pub fn n(&self) -> usize {
        self.excited.len() + self.gapless.len()
    }

    /// Full-length occupation vector with `ξ` on the excited set, zero elsewhere.
    pub fn reference_occupations(&self) -> Vec<T> {
        let mut y = vec![T::zero(); self.n()];
        for (&a, x) in self.excited.iter().zip(&self.xi) {
            y[a] = x.clone();
        }
        y
    }

    /// Full occupation vector of the reference state with `pattern` on the
    /// gapless set.
    pub fn compose(&self, pattern: &[T]) -> Result<Vec<T>> {
        check_len(self.gapless.len(), pattern.len(), "pattern on gapless set")?;
        let mut y = self.reference_occupations();
        for (&j, v) in self.gapless.iter().zip(pattern) {
            y[j] = v.clone();
        }
        Ok(y)
    }

    /// `(mode, ξ)` pairs for [`crate::network::frozen_reduction`].
    pub fn frozen(&self) -> Vec<(usize, T)> {
        self.excited.iter().copied().zip(self.xi.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Acceptance threshold on the residual, relative to `max |ε|`.
    pub tolerance: f64,
    /// Round `ξ` to integers and re-check the residual.
    pub integer: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: 1e-9, integer: false }
    }
}

/// `ε_j − 2 Σ_{k≠j} W_jk y_k`.
pub fn effective_threshold<T: Scalar>(model: &NetworkModel<T>, y: &[T], mode: usize) -> Result<T> {
    check_len(model.n(), y.len(), "excitation levels")?;
    if mode >= model.n() {
        return Err(Error::invalid(format!("mode {mode} out of range")));
    }
    if y.iter().any(|v| *v < T::zero()) {
        return Err(Error::invalid("excitation levels must be nonnegative"));
    }
    Ok(effective_threshold_unchecked(model, y, mode))
}

fn effective_threshold_unchecked<T: Scalar>(model: &NetworkModel<T>, y: &[T], mode: usize) -> T {
    let mut pull = T::zero();
    for (k, (w, yk)) in model.weight_row(mode).iter().zip(y).enumerate() {
        if k != mode && !w.is_zero() && !yk.is_zero() {
            pull = pull + w.clone() * yk.clone();
        }
    }
    model.thresholds()[mode].clone() - two::<T>() * pull
}

/// Solves for excitation levels on the complement of `gapless` that make
/// every neuron in `gapless` gapless.
pub fn solve_critical_split<T: Scalar>(
    model: &NetworkModel<T>,
    gapless: &[usize],
    options: &SolveOptions,
) -> Result<CriticalSolution<T>> {
    let n = model.n();
    let mut in_gapless = vec![false; n];
    for &j in gapless {
        if j >= n {
            return Err(Error::invalid(format!("mode {j} out of range for {n} neurons")));
        }
        if in_gapless[j] {
            return Err(Error::invalid(format!("mode {j} listed twice")));
        }
        in_gapless[j] = true;
    }
    if gapless.is_empty() {
        return Err(Error::invalid("gapless set must be nonempty"));
    }
    let excited: Vec<usize> = (0..n).filter(|&j| !in_gapless[j]).collect();
    if excited.is_empty() {
        return Err(Error::invalid("excited set is empty: gapless set must be a proper subset"));
    }
    let mut gapless = gapless.to_vec();
    gapless.sort_unstable();

    let a: Matrix<T> = gapless
        .iter()
        .map(|&j| excited.iter().map(|&alpha| two::<T>() * model.weight(j, alpha).clone()).collect())
        .collect();
    let b: Vec<T> = gapless.iter().map(|&j| model.thresholds()[j].clone()).collect();

    let scale = model.thresholds().iter().map(|e| e.abs()).fold(T::zero(), T::max_of);
    let scale = if scale.is_zero() { T::one() } else { scale };
    let tolerance = T::of(options.tolerance) * scale;

    let degeneracy = excited.len() - rank(&a);
    let mut xi = if degeneracy == 0 {
        nnls(&a, &b).x
    } else {
        let slack = if T::is_exact() { T::zero() } else { tolerance.clone() / two::<T>() };
        min_norm_nonnegative(&a, &b, &slack).unwrap_or_else(|| nnls(&a, &b).x)
    };
    if options.integer {
        xi = xi.iter().map(Scalar::round_nearest).collect();
    }

    let mut y = vec![T::zero(); n];
    for (&alpha, x) in excited.iter().zip(&xi) {
        y[alpha] = x.clone();
    }
    let effective_gaps: Vec<T> = gapless.iter().map(|&j| effective_threshold_unchecked(model, &y, j)).collect();
    let residual = effective_gaps.iter().map(|g| g.abs()).fold(T::zero(), T::max_of);
    if residual > tolerance {
        return Err(Error::Infeasible { residual: residual.as_f64(), tolerance: tolerance.as_f64() });
    }
    let excited_gaps = excited.iter().map(|&a| effective_threshold_unchecked(model, &y, a)).collect();
    Ok(CriticalSolution { excited, gapless, xi, residual, effective_gaps, excited_gaps, degeneracy })
}

/// Every feasible split with at most `max_excited` excited neurons, ordered
/// by excited-set size, then residual, then excited set.
pub fn search_critical_splits<T: Scalar>(
    model: &NetworkModel<T>,
    max_excited: usize,
    options: &SolveOptions,
) -> Result<Vec<CriticalSolution<T>>> {
    let n = model.n();
    if n > SEARCH_LIMIT {
        return Err(Error::SearchSpace { n, limit: SEARCH_LIMIT });
    }
    if max_excited == 0 || max_excited >= n {
        return Err(Error::invalid(format!("max_excited must lie in 1..={}, got {max_excited}", n - 1)));
    }
    let candidates: Vec<Vec<usize>> = (1..=max_excited)
        .flat_map(|size| (0..n).combinations(size))
        .map(|excited| (0..n).filter(|j| !excited.contains(j)).collect())
        .collect();
    let results: Vec<Result<CriticalSolution<T>>> = candidates
        .par_iter()
        .map(|gapless: &Vec<usize>| solve_critical_split(model, gapless, options))
        .collect();
    let mut found = Vec::new();
    for r in results {
        match r {
            Ok(s) => found.push(s),
            Err(Error::Infeasible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| {
        a.excited
            .len()
            .cmp(&b.excited.len())
            .then(a.residual.partial_cmp(&b.residual).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.excited.cmp(&b.excited))
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{matrix_g, matrix_g_excitations};
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lowered_threshold() {
        let m = NetworkModel::<f64>::uniform(5, 0.01).unwrap();
        let y = [30.0, 0.0, 0.0, 0.0, 0.0];
        for j in 1..5 {
            assert!((effective_threshold(&m, &y, j).unwrap() - (1.0 - 0.01 * 30.0)).abs() < 1e-15);
        }
        assert_eq!(effective_threshold(&m, &[0.0; 5], 2).unwrap(), 1.0);
        let g = q(1, 100);
        let m = NetworkModel::uniform(5, g).unwrap();
        let mut y = vec![BigRational::zero(); 5];
        y[0] = q(100, 1);
        assert!(effective_threshold(&m, &y, 3).unwrap().is_zero());
        assert!(effective_threshold(&m, &y[..4], 3).is_err());
    }

    #[test]
    fn matrix_g_split_exact() {
        let m = matrix_g::<BigRational>();
        let s = solve_critical_split(&m, &[3, 4, 5], &SolveOptions::default()).unwrap();
        assert_eq!(s.excited, vec![0, 1, 2]);
        assert_eq!(s.xi, matrix_g_excitations::<BigRational>());
        assert!(s.residual.is_zero());
        assert!(s.effective_gaps.iter().all(Zero::is_zero));
        assert_eq!(s.degeneracy, 0);
        // 17 − 2·(2·1.5 + 4·1.0)
        assert_eq!(s.excited_gaps[0], q(3, 1));
    }

    #[test]
    fn uniform_single_excited() {
        let g = 1e-3;
        let m = NetworkModel::<f64>::uniform(6, g).unwrap();
        let s = solve_critical_split(&m, &[1, 2, 3, 4, 5], &SolveOptions::default()).unwrap();
        assert_eq!(s.excited, vec![0]);
        assert!((s.xi[0] - 1.0 / g).abs() < 1e-9);
    }

    #[test]
    fn split_preconditions() {
        let m = NetworkModel::<f64>::uniform(2, 0.1).unwrap();
        assert!(matches!(solve_critical_split(&m, &[0, 1], &SolveOptions::default()), Err(Error::Invalid(_))));
        assert!(solve_critical_split(&m, &[], &SolveOptions::default()).is_err());
        assert!(solve_critical_split(&m, &[2], &SolveOptions::default()).is_err());
        assert!(solve_critical_split(&m, &[1, 1], &SolveOptions::default()).is_err());
    }

    #[test]
    fn infeasible_when_uncoupled() {
        let m = NetworkModel::new(vec![1.0, 2.0, 3.0], vec![vec![0.0; 3]; 3]).unwrap();
        let err = solve_critical_split(&m, &[1, 2], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        assert!(search_critical_splits(&m, 2, &SolveOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn degenerate_split_min_norm() {
        let g = q(1, 1000);
        let m = NetworkModel::uniform(4, g).unwrap();
        let s = solve_critical_split(&m, &[2, 3], &SolveOptions::default()).unwrap();
        assert_eq!(s.degeneracy, 1);
        assert_eq!(s.xi, vec![q(500, 1), q(500, 1)]);
        let mf = NetworkModel::<f64>::uniform(4, 1e-3).unwrap();
        let s = solve_critical_split(&mf, &[2, 3], &SolveOptions::default()).unwrap();
        assert!((s.xi[0] - 500.0).abs() < 1e-6 && (s.xi[1] - 500.0).abs() < 1e-6);
    }

    #[test]
    fn integer_rounding_rechecks_residual() {
        // ξ = 1/(2·0.3) is not an integer
        let m = NetworkModel::<f64>::new(vec![1.0, 1.0], vec![vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        let opts = SolveOptions { integer: true, ..Default::default() };
        assert!(matches!(solve_critical_split(&m, &[1], &opts), Err(Error::Infeasible { .. })));
        let m = NetworkModel::<f64>::uniform(3, 0.25).unwrap();
        let s = solve_critical_split(&m, &[1, 2], &opts).unwrap();
        assert_eq!(s.xi, vec![4.0]);
    }

    #[test]
    fn search_uniform_four() {
        let m = NetworkModel::<f64>::uniform(4, 0.01).unwrap();
        let found = search_critical_splits(&m, 1, &SolveOptions::default()).unwrap();
        assert_eq!(found.len(), 4);
        for (i, s) in found.iter().enumerate() {
            assert_eq!(s.excited, vec![i]);
            assert!((s.xi[0] - 100.0).abs() < 1e-9);
        }
        let all = search_critical_splits(&m, 3, &SolveOptions::default()).unwrap();
        // every one of the 14 proper splits of a uniform model is critical
        assert_eq!(all.len(), 14);
        assert!(all.windows(2).all(|w| w[0].excited.len() <= w[1].excited.len()));
    }

    #[test]
    fn search_limits() {
        let m = NetworkModel::<f64>::uniform(25, 0.01).unwrap();
        assert!(matches!(search_critical_splits(&m, 1, &SolveOptions::default()), Err(Error::SearchSpace { .. })));
        let m = NetworkModel::<f64>::uniform(3, 0.01).unwrap();
        assert!(search_critical_splits(&m, 3, &SolveOptions::default()).is_err());
    }

    #[test]
    fn matrix_g_search_contains_reference_split() {
        let m = matrix_g::<f64>();
        let found = search_critical_splits(&m, 3, &SolveOptions::default()).unwrap();
        let s = found.iter().find(|s| s.excited == vec![0, 1, 2]).expect("split {1,2,3} present");
        for (x, e) in s.xi.iter().zip([1e10, 3e10, 2e10]) {
            assert!((x - e).abs() / e < 1e-9);
        }
    }
}
