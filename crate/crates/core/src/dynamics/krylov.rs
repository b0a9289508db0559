//! Lanczos approximation of `exp(−iHτ) ψ` for Hermitian sparse `H`.

use num_complex::Complex;
use num_traits::Float;

use crate::fock::SparseOperator;
use crate::scalar::Real;

/// Eigen-decomposition of the real symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (`e[i]` couples `i` and `i + 1`), by
/// implicit QL with Wilkinson shifts. Returns eigenvalues and the
/// eigenvector matrix, eigenvectors stored as columns.
pub(crate) fn tridiagonal_eigen<F: Real>(d: &[F], e: &[F]) -> (Vec<F>, Vec<Vec<F>>) {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<F> = (0..n).map(|i| if i + 1 < n { e[i] } else { F::zero() }).collect();
    let mut z: Vec<Vec<F>> = (0..n).map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect();
    let two = F::one() + F::one();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = Float::abs(d[m]) + Float::abs(d[m + 1]);
                if Float::abs(e[m]) <= F::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 100 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(F::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (F::one(), F::one(), F::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == F::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = F::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = F::zero();
        }
    }
    (d, z)
}

fn dot<F: Real>(a: &[Complex<F>], b: &[Complex<F>]) -> Complex<F> {
    a.iter().zip(b).fold(Complex::new(F::zero(), F::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<F: Real>(a: &[Complex<F>]) -> F {
    a.iter().fold(F::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Outcome of one propagation step.
pub(crate) struct Step<F> {
    pub tau: F,
    #[allow(dead_code)]
    pub error: F,
}

pub(crate) struct Krylov<'a, F> {
    pub h: &'a SparseOperator<F>,
    pub dimension: usize,
    /// Admissible error estimate per unit time.
    pub tolerance: F,
}

impl<F: Real> Krylov<'_, F> {
    /// Whether the subspace built so far already meets the tolerance for a
    /// full step of `tau`.
    fn converged(&self, alpha: &[F], beta: &[F], residual: F, tau: F) -> bool {
        let (lambda, z) = tridiagonal_eigen(alpha, beta);
        let k = alpha.len();
        let last = (0..k).fold(Complex::new(F::zero(), F::zero()), |acc, l| {
            acc + Complex::from_polar(z[0][l] * z[k - 1][l], -lambda[l] * tau)
        });
        residual * last.norm() <= self.tolerance * tau
    }

    /// Advances `psi` by at most `tau_max`, shrinking the step until the
    /// a-posteriori error estimate `β_m |e_mᵀ exp(−iTτ) e_1|` is within
    /// tolerance. `None` if no admissible step above `min_tau` exists.
    pub fn step(&self, psi: &mut [Complex<F>], tau_max: F, min_tau: F) -> Option<Step<F>> {
        let beta0 = norm(psi);
        if beta0 == F::zero() {
            return Some(Step { tau: tau_max, error: F::zero() });
        }
        let len = psi.len();
        let inv = F::one() / beta0;
        let mut basis: Vec<Vec<Complex<F>>> = vec![psi.iter().map(|c| c * inv).collect()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut residual = F::zero();
        let scale = self.h.max_abs().max(F::one());
        let mut w = vec![Complex::new(F::zero(), F::zero()); len];
        for j in 0..self.dimension.min(len) {
            self.h.apply_into(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                *wi = *wi - vi * a;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi = *wi - vi * b;
                }
            }
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi = *wi - vi * c;
                }
            }
            alpha.push(a);
            let b = norm(&w);
            if b <= F::epsilon() * scale * F::of(8.0) {
                break;
            }
            if j + 1 == self.dimension.min(len) || (j >= 2 && self.converged(&alpha, &beta, b * beta0, tau_max)) {
                residual = b;
                break;
            }
            beta.push(b);
            let inv = F::one() / b;
            basis.push(w.iter().map(|c| c * inv).collect());
        }
        let k = alpha.len();
        let (lambda, z) = tridiagonal_eigen(&alpha, &beta[..k - 1]);
        let coefficients = |tau: F| -> Vec<Complex<F>> {
            let phases: Vec<Complex<F>> =
                (0..k).map(|l| Complex::from_polar(z[0][l], -lambda[l] * tau)).collect();
            (0..k)
                .map(|i| phases.iter().zip(&z[i]).fold(Complex::new(F::zero(), F::zero()), |acc, (p, zi)| acc + p * *zi))
                .collect()
        };
        let mut tau = tau_max;
        loop {
            let c = coefficients(tau);
            let error = residual * beta0 * c[k - 1].norm();
            if error <= self.tolerance * tau || residual == F::zero() {
                for x in psi.iter_mut() {
                    *x = Complex::new(F::zero(), F::zero());
                }
                for (ci, v) in c.iter().zip(&basis) {
                    let ci = ci * beta0;
                    for (x, vi) in psi.iter_mut().zip(v) {
                        *x = *x + vi * ci;
                    }
                }
                return Some(Step { tau, error });
            }
            tau = tau / (F::one() + F::one());
            if tau < min_tau {
                return None;
            }
        }
    }
}
