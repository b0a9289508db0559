use num_bigint::BigUint;

use super::CriticalSolution;
use crate::error::{check_len, Error, Result};
use crate::network::NetworkModel;
use crate::scalar::{two, Scalar};

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// `Σ_{j,k∈J} W_jk y_j y_k` for a pattern `y` on the gapless set `J`, the
/// energy distance `|E(ξ) − E(ξ + y)|` from the reference state.
pub fn gap_between<T: Scalar>(model: &NetworkModel<T>, solution: &CriticalSolution<T>, pattern: &[T]) -> Result<T> {
    check_len(solution.gapless.len(), pattern.len(), "pattern on gapless set")?;
    if solution.n() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), actual: solution.n(), context: "solution size" });
    }
    if pattern.iter().any(|v| *v < T::zero()) {
        return Err(Error::invalid("pattern occupations must be nonnegative"));
    }
    let mut gap = T::zero();
    for (a, &j) in solution.gapless.iter().enumerate() {
        for (b, &k) in solution.gapless.iter().enumerate() {
            let w = model.weight(j, k);
            if !w.is_zero() {
                gap = gap + w.clone() * pattern[a].clone() * pattern[b].clone();
            }
        }
    }
    Ok(gap)
}

/// `(d + 1)^m`, the number of occupation patterns with levels `0..=d`.
pub fn pattern_count(m: usize, d: u32) -> BigUint {
    num_traits::pow(BigUint::from(d) + 1u32, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Largest `(d + 1)^m` enumerated eagerly.
    pub limit: u128,
    /// Past the limit, hand back a library with a lazy iterator and no count
    /// instead of failing.
    pub lazy: bool,
    /// Keep the patterns themselves, not just the count.
    pub keep_patterns: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { limit: DEFAULT_ENUMERATION_LIMIT, lazy: false, keep_patterns: false }
    }
}

/// Patterns on the gapless set of a critical split whose gap stays within a
/// budget.
#[derive(Debug, Clone)]
pub struct PatternLibrary<T> {
    pub reference: CriticalSolution<T>,
    pub max_level: u32,
    pub gap_budget: T,
    /// Exact count of admissible patterns, absent for lazy libraries.
    pub count: Option<BigUint>,
    /// `(d + 1)^m`.
    pub closed_form: BigUint,
    /// `d² Σ_{j,k∈J} W_jk ≤ budget`, in which case every pattern is admissible.
    pub bound_holds: bool,
    pub patterns: Option<Vec<Vec<u32>>>,
    gapless_weights: Vec<Vec<T>>,
}

impl<T: Scalar> PatternLibrary<T> {
    /// Admissible patterns in lexicographic order.
    pub fn iter(&self) -> PatternIter<'_, T> {
        PatternIter::new(&self.gapless_weights, self.max_level, self.gap_budget.clone())
    }
}

/// Enumerates the patterns `y ∈ {0..=d}^m` on the gapless set of `solution`
/// with `gap_between ≤ budget`.
pub fn enumerate_patterns<T: Scalar>(
    model: &NetworkModel<T>,
    solution: &CriticalSolution<T>,
    max_level: u32,
    gap_budget: T,
    options: &EnumerateOptions,
) -> Result<PatternLibrary<T>> {
    if solution.n() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), actual: solution.n(), context: "solution size" });
    }
    if max_level == 0 {
        return Err(Error::invalid("max occupation level must be at least 1"));
    }
    if gap_budget < T::zero() {
        return Err(Error::invalid("gap budget must be nonnegative"));
    }
    let gapless_weights: Vec<Vec<T>> = solution
        .gapless
        .iter()
        .map(|&j| solution.gapless.iter().map(|&k| model.weight(j, k).clone()).collect())
        .collect();
    let m = solution.gapless.len();
    let closed_form = pattern_count(m, max_level);
    let total_weight = gapless_weights.iter().flatten().fold(T::zero(), |acc, w| acc + w.clone());
    let d = T::from_u32(max_level).expect("level fits the scalar");
    let bound_holds = d.clone() * d * total_weight <= gap_budget;

    let mut library = PatternLibrary {
        reference: solution.clone(),
        max_level,
        gap_budget,
        count: None,
        closed_form: closed_form.clone(),
        bound_holds,
        patterns: None,
        gapless_weights,
    };
    let within_limit = closed_form <= BigUint::from(options.limit);
    if within_limit {
        let mut count = 0u64;
        let mut kept = options.keep_patterns.then(Vec::new);
        for p in library.iter() {
            count += 1;
            if let Some(kept) = kept.as_mut() {
                kept.push(p);
            }
        }
        library.count = Some(BigUint::from(count));
        library.patterns = kept;
    } else if bound_holds && !options.keep_patterns {
        library.count = Some(closed_form);
    } else if !options.lazy {
        return Err(Error::EnumerationLimit {
            requested: u128::try_from(&closed_form).unwrap_or(u128::MAX),
            limit: options.limit,
        });
    }
    Ok(library)
}

/// Depth-first walk over `{0..=d}^m` in lexicographic order. Since all
/// weights and levels are nonnegative the gap only grows along a branch,
/// so a prefix over budget prunes its subtree and every larger level at the
/// same depth.
pub struct PatternIter<'a, T> {
    weights: &'a [Vec<T>],
    max_level: u32,
    budget: T,
    levels: Vec<u32>,
    next_level: Vec<u32>,
    /// `partial[p]` is the gap of `levels[..p]`.
    partial: Vec<T>,
    depth: usize,
    done: bool,
}

impl<'a, T: Scalar> PatternIter<'a, T> {
    fn new(weights: &'a [Vec<T>], max_level: u32, budget: T) -> Self {
        let m = weights.len();
        PatternIter {
            weights,
            max_level,
            budget,
            levels: vec![0; m],
            next_level: vec![0; m.max(1)],
            partial: vec![T::zero(); m + 1],
            depth: 0,
            done: m == 0,
        }
    }

    fn increment(&self, p: usize, v: u32) -> T {
        if v == 0 {
            return T::zero();
        }
        let row = &self.weights[p];
        let mut cross = T::zero();
        for (w, &y) in row[..p].iter().zip(&self.levels[..p]) {
            if y != 0 && !w.is_zero() {
                cross = cross + w.clone() * T::from_u32(y).expect("level fits");
            }
        }
        let v = T::from_u32(v).expect("level fits");
        two::<T>() * v.clone() * cross + row[p].clone() * v.clone() * v
    }
}

impl<T: Scalar> Iterator for PatternIter<'_, T> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let m = self.levels.len();
        loop {
            if self.done {
                return None;
            }
            if self.depth == m {
                self.depth -= 1;
                return Some(self.levels.clone());
            }
            let p = self.depth;
            let v = self.next_level[p];
            if v > self.max_level {
                if p == 0 {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            let gap = self.partial[p].clone() + self.increment(p, v);
            if gap > self.budget {
                self.next_level[p] = self.max_level + 1;
                continue;
            }
            self.levels[p] = v;
            self.next_level[p] = v + 1;
            self.partial[p + 1] = gap;
            self.depth += 1;
            if self.depth < m {
                self.next_level[self.depth] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{solve_critical_split, SolveOptions};
    use crate::presets::matrix_g;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn brute_force(model: &NetworkModel<f64>, s: &CriticalSolution<f64>, d: u32, budget: f64) -> Vec<Vec<u32>> {
        let m = s.gapless.len();
        let mut out = Vec::new();
        let total = (d as usize + 1).pow(m as u32);
        for mut code in 0..total {
            let mut y = vec![0u32; m];
            for slot in y.iter_mut().rev() {
                *slot = (code % (d as usize + 1)) as u32;
                code /= d as usize + 1;
            }
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            if gap_between(model, s, &yf).unwrap() <= budget {
                out.push(y);
            }
        }
        out
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(pattern_count(5, 1), BigUint::from(32u32));
        assert_eq!(pattern_count(0, 3), BigUint::from(1u32));
        assert_eq!(pattern_count(40, 9), num_traits::pow(BigUint::from(10u32), 40));
    }

    #[test]
    fn matrix_g_gap() {
        let m = matrix_g::<BigRational>();
        let s = solve_critical_split(&m, &[3, 4, 5], &SolveOptions::default()).unwrap();
        let one = BigRational::from_integer(1.into());
        let gap = gap_between(&m, &s, &[one.clone(), one.clone(), one]).unwrap();
        // 2·(9 + 2 + 1)·5e-11
        assert_eq!(gap, BigRational::new(12.into(), 10_000_000_000i64.into()));
        let m = matrix_g::<f64>();
        let s = solve_critical_split(&m, &[3, 4, 5], &SolveOptions::default()).unwrap();
        assert!((gap_between(&m, &s, &[1.0, 1.0, 1.0]).unwrap() - 1.2e-9).abs() < 1e-22);
    }

    #[test]
    fn uniform_all_patterns_under_bound() {
        let model = NetworkModel::<f64>::uniform(6, 1e-4).unwrap();
        let s = solve_critical_split(&model, &[1, 2, 3, 4, 5], &SolveOptions::default()).unwrap();
        let opts = EnumerateOptions { keep_patterns: true, ..Default::default() };
        let lib = enumerate_patterns(&model, &s, 1, 0.01, &opts).unwrap();
        assert!(lib.bound_holds);
        assert_eq!(lib.count, Some(BigUint::from(32u32)));
        assert_eq!(lib.patterns.as_ref().unwrap().len(), 32);
    }

    #[test]
    fn matrix_g_single_excitations() {
        let model = matrix_g::<f64>();
        let s = solve_critical_split(&model, &[3, 4, 5], &SolveOptions::default()).unwrap();
        let opts = EnumerateOptions { keep_patterns: true, ..Default::default() };
        let lib = enumerate_patterns(&model, &s, 1, 1e-12, &opts).unwrap();
        // the vacuum and the three single excitations carry no gap at all
        assert_eq!(lib.count, Some(BigUint::from(4u32)));
        let lib = enumerate_patterns(&model, &s, 1, 1.2e-9, &opts).unwrap();
        assert_eq!(lib.count, Some(BigUint::from(8u32)));
    }

    #[test]
    fn limit_behaviour() {
        let model = NetworkModel::<f64>::uniform(30, 1e-6).unwrap();
        let s = solve_critical_split(&model, &(1..30).collect::<Vec<_>>(), &SolveOptions::default()).unwrap();
        let opts = EnumerateOptions { limit: 1000, ..Default::default() };
        // bound holds, so the closed form is reported without enumeration
        let lib = enumerate_patterns(&model, &s, 1, 1.0, &opts).unwrap();
        assert_eq!(lib.count, Some(pattern_count(29, 1)));
        let err = enumerate_patterns(&model, &s, 1, 1e-6, &opts).unwrap_err();
        assert!(matches!(err, Error::EnumerationLimit { limit: 1000, .. }));
        let lazy = EnumerateOptions { lazy: true, ..opts };
        let lib = enumerate_patterns(&model, &s, 1, 1e-6, &lazy).unwrap();
        assert_eq!(lib.count, None);
        let first: Vec<Vec<u32>> = lib.iter().take(3).collect();
        assert_eq!(first[0], vec![0; 29]);
        assert_eq!(first.len(), 3);
    }

    proptest! {
        #[test]
        fn pruned_walk_matches_brute_force(
            n in 3usize..6,
            seed in proptest::collection::vec(0u32..5, 36),
            d in 1u32..3,
            budget in 0.0f64..40.0,
        ) {
            let mut w = vec![vec![0.0; n]; n];
            for j in 0..n {
                for k in (j + 1)..n {
                    let v = seed[j * 6 + k] as f64;
                    w[j][k] = v;
                    w[k][j] = v;
                }
            }
            w[0][1] = w[0][1].max(1.0);
            w[1][0] = w[0][1];
            let thresholds = (0..n).map(|j| 2.0 * w[j][0]).map(|e| if e == 0.0 { 1.0 } else { e }).collect();
            let model = NetworkModel::new(thresholds, w).unwrap();
            let s = CriticalSolution {
                excited: vec![0],
                gapless: (1..n).collect(),
                xi: vec![1.0],
                residual: 0.0,
                effective_gaps: vec![0.0; n - 1],
                excited_gaps: vec![0.0],
                degeneracy: 0,
            };
            let opts = EnumerateOptions { keep_patterns: true, ..Default::default() };
            let lib = enumerate_patterns(&model, &s, d, budget, &opts).unwrap();
            let expected = brute_force(&model, &s, d, budget);
            prop_assert_eq!(lib.count.clone(), Some(BigUint::from(expected.len())));
            prop_assert_eq!(lib.patterns.unwrap(), expected);
        }
    }
}
