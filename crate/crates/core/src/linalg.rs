//! Small dense linear algebra over any [`Scalar`]: elimination, rank,
//! nonnegative least squares and least-distance programming.
//!
//! Everything here avoids square roots so rational models are solved
//! exactly. Matrices are row-major `Vec<Vec<T>>`.

use crate::scalar::{sum, Scalar};

pub type Matrix<T> = Vec<Vec<T>>;

fn max_abs<T: Scalar>(a: &[Vec<T>]) -> T {
    a.iter().flatten().map(|v| v.abs()).fold(T::zero(), T::max_of)
}

/// Pivot threshold for rank decisions: zero for exact types.
fn pivot_tolerance<T: Scalar>(scale: &T, size: usize) -> T {
    T::precision() * T::of(64.0 * size.max(1) as f64) * scale.clone()
}

pub fn mat_vec<T: Scalar>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| sum(row.iter().zip(x).map(|(r, v)| r.clone() * v.clone())))
        .collect()
}

pub fn transpose<T: Scalar>(a: &[Vec<T>]) -> Matrix<T> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|c| a.iter().map(|row| row[c].clone()).collect()).collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// `None` when `a` is singular to working precision.
pub fn solve_square<T: Scalar>(mut a: Matrix<T>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let tol = pivot_tolerance(&max_abs(&a), n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= tol {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset of rows, greedily in
/// order.
pub fn independent_rows<T: Scalar>(a: &[Vec<T>]) -> Vec<usize> {
    let cols = a.first().map_or(0, Vec::len);
    let tol = pivot_tolerance(&max_abs(a), cols.max(a.len()));
    // reduced rows with their pivot column
    let mut echelon: Vec<(usize, Vec<T>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut r = row.clone();
        for (p, e) in &echelon {
            if r[*p].is_zero() {
                continue;
            }
            let factor = r[*p].clone() / e[*p].clone();
            for k in 0..cols {
                r[k] = r[k].clone() - factor.clone() * e[k].clone();
            }
        }
        let best = (0..cols).max_by(|&x, &y| r[x].abs().partial_cmp(&r[y].abs()).unwrap_or(std::cmp::Ordering::Equal));
        if let Some(p) = best {
            if r[p].abs() > tol {
                echelon.push((p, r));
                chosen.push(i);
            }
        }
    }
    chosen
}

pub fn rank<T: Scalar>(a: &[Vec<T>]) -> usize {
    independent_rows(a).len()
}

/// Minimum-norm solution `Aᵀ(A Aᵀ)⁻¹ b` over a maximal independent row
/// subset. Exact for consistent systems; for inconsistent ones the dropped
/// rows are ignored and show up in the residual.
pub fn min_norm_solution<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Vec<T> {
    let cols = a.first().map_or(0, Vec::len);
    let rows = independent_rows(a);
    if rows.is_empty() {
        return vec![T::zero(); cols];
    }
    let ar: Matrix<T> = rows.iter().map(|&i| a[i].clone()).collect();
    let br: Vec<T> = rows.iter().map(|&i| b[i].clone()).collect();
    let gram: Matrix<T> = ar
        .iter()
        .map(|r1| ar.iter().map(|r2| sum(r1.iter().zip(r2).map(|(x, y)| x.clone() * y.clone()))).collect())
        .collect();
    let mu = solve_square(gram, br).unwrap_or_else(|| vec![T::zero(); rows.len()]);
    (0..cols)
        .map(|c| sum(ar.iter().zip(&mu).map(|(r, m)| r[c].clone() * m.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T> {
    pub x: Vec<T>,
    /// `‖A x − b‖²`.
    pub residual_sq: T,
    pub iterations: usize,
}

/// `min ‖A x − b‖` subject to `x ≥ 0` (Lawson–Hanson active set).
///
/// Columns are rescaled by their largest magnitude before solving, so the
/// result does not depend on the units of individual unknowns.
pub fn nnls<T: Scalar>(a: &[Vec<T>], b: &[T]) -> NnlsSolution<T> {
    let n = a.first().map_or(0, Vec::len);
    let col_scale: Vec<T> = (0..n)
        .map(|c| {
            let s = a.iter().map(|r| r[c].abs()).fold(T::zero(), T::max_of);
            if s.is_zero() {
                T::one()
            } else {
                s
            }
        })
        .collect();
    let scaled: Matrix<T> = a
        .iter()
        .map(|row| row.iter().zip(&col_scale).map(|(v, s)| v.clone() / s.clone()).collect())
        .collect();
    let (z, iterations) = lawson_hanson(&scaled, b);
    let x: Vec<T> = z.into_iter().zip(&col_scale).map(|(v, s)| v / s.clone()).collect();
    let r = mat_vec(a, &x);
    let residual_sq = sum(r.into_iter().zip(b).map(|(ax, bi)| {
        let d = ax - bi.clone();
        d.clone() * d
    }));
    NnlsSolution { x, residual_sq, iterations }
}

fn lawson_hanson<T: Scalar>(a: &[Vec<T>], b: &[T]) -> (Vec<T>, usize) {
    let n = a.first().map_or(0, Vec::len);
    let at = transpose(a);
    let b_scale = b.iter().map(|v| v.abs()).fold(T::zero(), T::max_of);
    let w_tol = pivot_tolerance(&(max_abs(a) * b_scale.clone() + b_scale), a.len().max(n));
    let mut x = vec![T::zero(); n];
    let mut passive = vec![false; n];
    let mut excluded = vec![false; n];
    let max_iter = 30 * n.max(1) + 30;
    let mut iterations = 0;

    let gradient = |x: &[T]| -> Vec<T> {
        let ax = mat_vec(a, x);
        let r: Vec<T> = b.iter().zip(ax).map(|(bi, v)| bi.clone() - v).collect();
        mat_vec(&at, &r)
    };

    let mut w = gradient(&x);
    while iterations < max_iter {
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !excluded[j] && w[j] > w_tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(t) = candidate else { break };
        passive[t] = true;
        let mut first = true;
        loop {
            iterations += 1;
            let z = passive_least_squares(a, b, &passive);
            // round-off can make the entering coefficient nonpositive
            let z = match z {
                Some(z) if !(first && z[t] <= T::zero()) => z,
                _ => {
                    passive[t] = false;
                    excluded[t] = true;
                    break;
                }
            };
            first = false;
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > T::zero()) {
                x = z;
                break;
            }
            // step back to the feasible boundary
            let mut alpha: Option<T> = None;
            for j in (0..n).filter(|&j| passive[j] && z[j] <= T::zero()) {
                let ratio = x[j].clone() / (x[j].clone() - z[j].clone());
                alpha = Some(match alpha {
                    Some(a0) if a0 <= ratio => a0,
                    _ => ratio,
                });
            }
            let alpha = alpha.expect("some passive coefficient is nonpositive");
            for j in 0..n {
                x[j] = x[j].clone() + alpha.clone() * (z[j].clone() - x[j].clone());
            }
            let x_tol = pivot_tolerance(&x.iter().map(|v| v.abs()).fold(T::zero(), T::max_of), n);
            for j in 0..n {
                if passive[j] && x[j] <= x_tol {
                    passive[j] = false;
                    x[j] = T::zero();
                }
            }
            if iterations >= max_iter {
                break;
            }
        }
        w = gradient(&x);
    }
    (x, iterations)
}

/// Unconstrained least squares restricted to the passive columns, via the
/// normal equations.
fn passive_least_squares<T: Scalar>(a: &[Vec<T>], b: &[T], passive: &[bool]) -> Option<Vec<T>> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let gram: Matrix<T> = cols
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| sum(a.iter().map(|row| row[i].clone() * row[j].clone())))
                .collect()
        })
        .collect();
    let rhs: Vec<T> = cols
        .iter()
        .map(|&i| sum(a.iter().zip(b).map(|(row, bi)| row[i].clone() * bi.clone())))
        .collect();
    let sol = solve_square(gram, rhs)?;
    let mut z = vec![T::zero(); passive.len()];
    for (c, v) in cols.into_iter().zip(sol) {
        z[c] = v;
    }
    Some(z)
}

/// `min ‖x‖` subject to `G x ≥ h`, by the Lawson–Hanson reduction to
/// [`nnls`]. `None` when the constraints are infeasible.
pub fn least_distance<T: Scalar>(g: &[Vec<T>], h: &[T]) -> Option<Vec<T>> {
    let m = g.len();
    let n = g.first().map_or(0, Vec::len);
    // E = [Gᵀ; hᵀ], f = e_{n+1}
    let mut e: Matrix<T> = transpose(g);
    e.push(h.to_vec());
    let mut f = vec![T::zero(); n];
    f.push(T::one());
    let u = nnls(&e, &f).x;
    let eu = mat_vec(&e, &u);
    let r: Vec<T> = eu.into_iter().zip(&f).map(|(v, fi)| v - fi.clone()).collect();
    let norm_sq = sum(r.iter().map(|v| v.clone() * v.clone()));
    let tol = pivot_tolerance(&T::one(), m + n);
    let last = r[n].clone();
    if norm_sq <= tol || last.abs() <= tol {
        return None;
    }
    Some(r[..n].iter().map(|v| -(v.clone()) / last.clone()).collect())
}

/// Minimum-norm `x ≥ 0` with `|A x − b| ≤ slack` componentwise. Tries the
/// unconstrained minimum-norm solution first.
pub fn min_norm_nonnegative<T: Scalar>(a: &[Vec<T>], b: &[T], slack: &T) -> Option<Vec<T>> {
    let candidate = min_norm_solution(a, b);
    if candidate.iter().all(|v| *v >= T::zero()) {
        return Some(candidate);
    }
    let n = a.first().map_or(0, Vec::len);
    let mut g = Vec::with_capacity(2 * a.len() + n);
    let mut h = Vec::with_capacity(2 * a.len() + n);
    for (row, bi) in a.iter().zip(b) {
        g.push(row.clone());
        h.push(bi.clone() - slack.clone());
        g.push(row.iter().map(|v| -(v.clone())).collect());
        h.push(-(bi.clone()) - slack.clone());
    }
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        g.push(e);
        h.push(T::zero());
    }
    least_distance(&g, &h).map(|x| x.into_iter().map(|v| if v < T::zero() { T::zero() } else { v }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    #[test]
    fn exact_square_solve() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(3)]];
        let x = solve_square(a, vec![qi(3), qi(5)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        assert!(solve_square(vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]], vec![qi(1), qi(2)]).is_none());
    }

    #[test]
    fn rank_of_repeated_rows() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(rank(&a), 2);
        assert_eq!(independent_rows(&a), vec![0, 2]);
        assert_eq!(rank::<f64>(&[vec![0.0, 0.0]]), 0);
    }

    #[test]
    fn nnls_clamps_negative_direction() {
        // unconstrained solution is (2, -1); constrained optimum puts x2 = 0
        let a: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let b = vec![2.0, -1.0, 1.0];
        let s = nnls(&a, &b);
        assert!((s.x[0] - 1.5).abs() < 1e-12 && s.x[1] == 0.0, "{:?}", s.x);
    }

    #[test]
    fn nnls_exact_consistent() {
        let a = vec![vec![qi(1), qi(6), qi(3)], vec![qi(3), qi(4), qi(8)], vec![qi(10), qi(7), qi(6)]];
        let b = vec![qi(25), qi(31), qi(43)];
        let s = nnls(&a, &b);
        assert_eq!(s.x, vec![qi(1), qi(3), qi(2)]);
        assert_eq!(s.residual_sq, qi(0));
    }

    /// Brute-force oracle: all passive subsets, solve, keep feasible optimum.
    fn nnls_brute(a: &[Vec<f64>], b: &[f64]) -> f64 {
        let n = a[0].len();
        let mut best = b.iter().map(|v| v * v).sum::<f64>();
        for mask in 1u32..(1 << n) {
            let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let passive: Vec<bool> = (0..n).map(|j| mask & (1 << j) != 0).collect();
            if let Some(z) = passive_least_squares(a, b, &passive) {
                if cols.iter().all(|&j| z[j] >= 0.0) {
                    let r: f64 = mat_vec(a, &z).iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
                    best = best.min(r);
                }
            }
        }
        best
    }

    #[test]
    fn nnls_matches_subset_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(2..6);
            let n = rng.gen_range(1..5);
            let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = nnls(&a, &b);
            assert!(s.x.iter().all(|&v| v >= 0.0));
            let oracle = nnls_brute(&a, &b);
            assert!((s.residual_sq - oracle).abs() < 1e-10 * (1.0 + oracle), "{} vs {oracle}", s.residual_sq);
        }
    }

    #[test]
    fn min_norm_with_active_bound() {
        let a = vec![vec![qi(1), qi(1), qi(0)], vec![qi(0), qi(1), qi(1)]];
        let b = vec![qi(1), q(1, 10)];
        let x = min_norm_nonnegative(&a, &b, &qi(0)).unwrap();
        assert_eq!(x, vec![q(9, 10), q(1, 10), qi(0)]);

        let af: Vec<Vec<f64>> = vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]];
        let x = min_norm_nonnegative(&af, &[1.0, 0.1], &1e-12).unwrap();
        assert!((x[0] - 0.9).abs() < 1e-9 && (x[1] - 0.1).abs() < 1e-9 && x[2].abs() < 1e-9, "{x:?}");
    }

    #[test]
    fn min_norm_of_symmetric_split() {
        let a = vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]];
        let x = min_norm_nonnegative(&a, &[qi(1), qi(1)], &qi(0)).unwrap();
        assert_eq!(x, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn least_distance_infeasible() {
        // x >= 1 and -x >= 0
        let g = vec![vec![qi(1)], vec![qi(-1)]];
        assert!(least_distance(&g, &[qi(1), qi(0)]).is_none());
        let x = least_distance(&g, &[qi(1), qi(-3)]).unwrap();
        assert_eq!(x, vec![qi(1)]);
    }
}
