use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::basis::FockBasis;
use super::operator::SparseOperator;
use crate::error::{check_len, Error, Result};
use crate::scalar::Real;

/// Largest admissible Poisson weight outside a mode's cap.
pub const COHERENT_TAIL_BOUND: f64 = 1e-8;

/// Complex amplitude vector over a shared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<F> {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex<F>>,
}

/// Truncation report of a coherent-state construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTruncation {
    /// `P(y_j > cap_j)` for each mode.
    pub mode_tails: Vec<f64>,
    /// Bound on the discarded weight, `1 − Π (1 − tail_j)`.
    pub bound: f64,
    /// Observed `1 − Σ|c|²` before renormalization.
    pub deficit: f64,
}

impl<F: Real> QuantumState<F> {
    pub fn from_amplitudes(basis: Arc<FockBasis>, amplitudes: Vec<Complex<F>>) -> Result<Self> {
        check_len(basis.dimension(), amplitudes.len(), "amplitude vector")?;
        Ok(QuantumState { basis, amplitudes })
    }

    /// The number eigenstate `|y_1, .., y_m⟩`.
    pub fn number_state(basis: Arc<FockBasis>, occupation: &[u32]) -> Result<Self> {
        check_len(basis.mode_count(), occupation.len(), "occupation vector")?;
        let idx = basis
            .index(occupation)
            .ok_or_else(|| Error::invalid(format!("occupation {occupation:?} exceeds caps {:?}", basis.caps())))?;
        let mut amplitudes = vec![Complex::zero(); basis.dimension()];
        amplitudes[idx] = Complex::one();
        Ok(QuantumState { basis, amplitudes })
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let zeros = vec![0; basis.mode_count()];
        Self::number_state(basis, &zeros).expect("vacuum is always inside the basis")
    }

    /// Product coherent state `Π_j e^{−|α_j|²/2} α_j^{y_j}/√(y_j!)`,
    /// renormalized over the truncated basis.
    pub fn coherent(basis: Arc<FockBasis>, alphas: &[Complex<F>]) -> Result<(Self, CoherentTruncation)> {
        check_len(basis.mode_count(), alphas.len(), "coherent amplitudes")?;
        let mut mode_tails = Vec::with_capacity(alphas.len());
        for (mode, (alpha, &cap)) in alphas.iter().zip(basis.caps()).enumerate() {
            let lambda = alpha.norm_sqr().as_f64();
            if !lambda.is_finite() {
                return Err(Error::invalid(format!("non-finite amplitude on mode {mode}")));
            }
            let tail = poisson_tail(lambda, cap);
            if tail >= COHERENT_TAIL_BOUND {
                return Err(Error::Truncation {
                    mode,
                    cap,
                    tail,
                    required_cap: required_cap(lambda, COHERENT_TAIL_BOUND),
                });
            }
            mode_tails.push(tail);
        }
        // per-mode Fock coefficients
        let tables: Vec<Vec<Complex<F>>> = alphas
            .iter()
            .zip(basis.caps())
            .map(|(alpha, &cap)| {
                let mut c = Vec::with_capacity(cap as usize + 1);
                let lead = F::of((-alpha.norm_sqr().as_f64() / 2.0).exp());
                c.push(Complex::new(lead, F::zero()));
                for k in 1..=cap as usize {
                    let prev = c[k - 1];
                    c.push(prev * alpha / F::of((k as f64).sqrt()));
                }
                c
            })
            .collect();
        let mut amplitudes = Vec::with_capacity(basis.dimension());
        for s in basis.states() {
            let amp = s.iter().zip(&tables).fold(Complex::<F>::one(), |acc, (&y, t)| acc * t[y as usize]);
            amplitudes.push(amp);
        }
        let mut state = QuantumState { basis, amplitudes };
        let norm_sqr = state.norm_sqr();
        let deficit = 1.0 - norm_sqr.as_f64();
        state.scale(Complex::new(F::one() / norm_sqr.sqrt(), F::zero()));
        let bound = 1.0 - mode_tails.iter().fold(1.0, |acc, t| acc * (1.0 - t));
        Ok((state, CoherentTruncation { mode_tails, bound, deficit }))
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex<F>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<F>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<F>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> F {
        self.amplitudes.iter().fold(F::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn scale(&mut self, factor: Complex<F>) {
        self.amplitudes.iter_mut().for_each(|a| *a = *a * factor);
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<F>> {
        if self.basis != other.basis {
            return Err(Error::invalid("inner product across different bases"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn apply(&self, op: &SparseOperator<F>) -> Result<Self> {
        check_len(self.basis.dimension(), op.dimension(), "operator dimension")?;
        Ok(QuantumState { basis: self.basis.clone(), amplitudes: op.apply(&self.amplitudes) })
    }

    pub fn expectation(&self, op: &SparseOperator<F>) -> Result<Complex<F>> {
        check_len(self.basis.dimension(), op.dimension(), "operator dimension")?;
        Ok(op.expectation(&self.amplitudes))
    }

    /// `⟨Ŷ_j⟩` for every mode, read directly off the basis.
    pub fn mean_occupations(&self) -> Vec<F> {
        let mut out = vec![F::zero(); self.basis.mode_count()];
        for (s, a) in self.basis.states().zip(&self.amplitudes) {
            let w = a.norm_sqr();
            if w.is_zero() {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(s) {
                *o = *o + w * F::of(y as f64);
            }
        }
        out
    }
}

/// `P(Y > cap)` for `Y ~ Poisson(lambda)`, summed term by term in log space.
pub fn poisson_tail(lambda: f64, cap: u32) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_fact = (1..=cap as u64 + 1).map(|k| (k as f64).ln()).sum::<f64>();
    let mut k = cap as u64 + 1;
    let mut total = 0.0;
    loop {
        let term = (-lambda + k as f64 * ln_lambda - ln_fact).exp();
        total += term;
        if k as f64 > lambda && term < total * 1e-17 {
            break;
        }
        if k > cap as u64 + 100_000 {
            break;
        }
        k += 1;
        ln_fact += (k as f64).ln();
    }
    total.min(1.0)
}

/// Smallest cap with Poisson tail below `bound`.
pub fn required_cap(lambda: f64, bound: f64) -> u32 {
    let mut cap = lambda.ceil() as u32;
    while poisson_tail(lambda, cap) >= bound {
        cap += 1;
    }
    // step back while still admissible
    while cap > 0 && poisson_tail(lambda, cap - 1) < bound {
        cap -= 1;
    }
    cap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, ladder_operators, number_operator};

    type C = Complex<f64>;

    /// Poisson tail by explicit complement of the head sum.
    fn tail_oracle(lambda: f64, cap: u32) -> f64 {
        let mut term = (-lambda).exp();
        let mut head = term;
        for k in 1..=cap {
            term *= lambda / k as f64;
            head += term;
        }
        1.0 - head
    }

    #[test]
    fn poisson_tail_matches_head_complement() {
        for &(l, c) in &[(0.5, 3u32), (1.0, 4), (2.0, 6), (0.25, 2)] {
            let a = poisson_tail(l, c);
            let b = tail_oracle(l, c);
            assert!((a - b).abs() < 1e-13, "{l} {c}: {a} vs {b}");
        }
        assert_eq!(poisson_tail(0.0, 0), 0.0);
    }

    #[test]
    fn required_cap_is_minimal() {
        let cap = required_cap(0.5, 1e-8);
        assert!(poisson_tail(0.5, cap) < 1e-8);
        assert!(poisson_tail(0.5, cap - 1) >= 1e-8);
        assert_eq!(required_cap(0.0, 1e-8), 0);
    }

    #[test]
    fn zero_amplitude_is_vacuum() {
        let b = Arc::new(build_basis(2, &[3, 3]).unwrap());
        let (s, t) = QuantumState::<f64>::coherent(b.clone(), &[C::zero(), C::zero()]).unwrap();
        assert_eq!(s, QuantumState::vacuum(b));
        assert_eq!(t.bound, 0.0);
        assert_eq!(s.amplitudes()[0], C::one());
    }

    #[test]
    fn poisson_mean() {
        let b = Arc::new(build_basis(1, &[20]).unwrap());
        let (s, t) = QuantumState::<f64>::coherent(b.clone(), &[C::new(1.0, 0.0)]).unwrap();
        let n = number_operator::<f64>(&b, 0).unwrap();
        let mean = s.expectation(&n).unwrap();
        assert!((mean.re - 1.0).abs() < 1e-8);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        assert!(t.deficit <= t.bound + 1e-15);
        assert_eq!(s.mean_occupations()[0], mean.re);
    }

    #[test]
    fn eigenvector_of_annihilation() {
        let b = Arc::new(build_basis(2, &[24, 24]).unwrap());
        let alphas = [C::new(0.7, -0.4), C::new(-0.2, 1.1)];
        let (s, _) = QuantumState::<f64>::coherent(b.clone(), &alphas).unwrap();
        for (j, alpha) in alphas.iter().enumerate() {
            let (a, _) = ladder_operators::<f64>(&b, j).unwrap();
            let out = s.apply(&a).unwrap();
            let resid: f64 = out
                .amplitudes()
                .iter()
                .zip(s.amplitudes())
                .map(|(x, y)| (x - alpha * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-6, "mode {j}: {resid}");
        }
    }

    #[test]
    fn tail_violation_names_required_cap() {
        let b = Arc::new(build_basis(1, &[6]).unwrap());
        let err = QuantumState::<f64>::coherent(b, &[C::new(0.5f64.sqrt(), 0.0)]).unwrap_err();
        match err {
            Error::Truncation { mode, cap, required_cap, .. } => {
                assert_eq!((mode, cap), (0, 6));
                assert_eq!(required_cap, self::required_cap(0.5, COHERENT_TAIL_BOUND));
                assert!(required_cap > 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn number_state_bounds() {
        let b = Arc::new(build_basis(2, &[1, 2]).unwrap());
        assert!(QuantumState::<f64>::number_state(b.clone(), &[2, 0]).is_err());
        let s = QuantumState::<f64>::number_state(b, &[1, 2]).unwrap();
        assert_eq!(s.mean_occupations(), vec![1.0, 2.0]);
    }

    #[test]
    fn f32_coherent_state() {
        let b = Arc::new(build_basis(1, &[16]).unwrap());
        let (s, _) = QuantumState::<f32>::coherent(b, &[Complex::new(0.5f32, 0.5)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
        assert!((s.mean_occupations()[0] - 0.5).abs() < 1e-5);
    }
}
