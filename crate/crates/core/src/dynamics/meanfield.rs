use num_complex::Complex;
use num_traits::Float;

use super::{check_times, EvolutionResult};
use crate::error::{check_len, Error, Result};
use crate::network::NetworkModel;
use crate::scalar::Real;

/// Classical configuration: one complex amplitude per output and per input
/// mode, with `Y_j = |a_j|²` and `X_j = |b_j|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentConfig<F> {
    pub a: Vec<Complex<F>>,
    pub b: Vec<Complex<F>>,
}

impl<F: Real> CoherentConfig<F> {
    pub fn new(a: Vec<Complex<F>>, b: Vec<Complex<F>>) -> Result<Self> {
        check_len(a.len(), b.len(), "input amplitudes")?;
        if a.iter().chain(&b).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(CoherentConfig { a, b })
    }

    /// Real amplitudes `√Y_j`, `√X_j`.
    pub fn from_occupations(y: &[F], x: &[F]) -> Result<Self> {
        if y.iter().chain(x).any(|v| *v < F::zero()) {
            return Err(Error::invalid("occupations must be nonnegative"));
        }
        let amp = |v: &F| Complex::new(Float::sqrt(*v), F::zero());
        Self::new(y.iter().map(amp).collect(), x.iter().map(amp).collect())
    }

    pub fn total_occupation(&self) -> F {
        self.a.iter().chain(&self.b).fold(F::zero(), |acc, c| acc + c.norm_sqr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldOptions {
    /// Starting step; derived from the fastest frequency when absent.
    pub initial_step: Option<f64>,
    /// Total-occupation drift allowed per unit time.
    pub max_drift_rate: f64,
    /// Smallest step tried before giving up.
    pub min_step: f64,
    /// Integrate once at the initial step without halving.
    pub fixed_step: bool,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        MeanFieldOptions { initial_step: None, max_drift_rate: 1e-8, min_step: 1e-7, fixed_step: false }
    }
}

struct Flow<'a, F> {
    model: &'a NetworkModel<F>,
    hop: F,
    input_gap: F,
}

impl<F: Real> Flow<'_, F> {
    /// `(ȧ, ḃ)` from `i ȧ_j = (ε_j − 2 Σ_k W_jk |a_k|²) a_j + (q/2) b_j` and
    /// `i ḃ_j = ε_x b_j + (q/2) a_j`.
    fn rate(&self, a: &[Complex<F>], b: &[Complex<F>], da: &mut [Complex<F>], db: &mut [Complex<F>]) {
        let minus_i = Complex::new(F::zero(), -F::one());
        let two = F::one() + F::one();
        let occ: Vec<F> = a.iter().map(|c| c.norm_sqr()).collect();
        for j in 0..a.len() {
            let pull = self.model.weight_row(j).iter().zip(&occ).fold(F::zero(), |acc, (w, y)| acc + *w * *y);
            let field = self.model.thresholds()[j] - two * pull;
            da[j] = minus_i * (a[j] * field + b[j] * self.hop);
            db[j] = minus_i * (b[j] * self.input_gap + a[j] * self.hop);
        }
    }

    fn energy(&self, a: &[Complex<F>], b: &[Complex<F>]) -> F {
        let occ: Vec<F> = a.iter().map(|c| c.norm_sqr()).collect();
        let mut e = self.model.energy(&occ).unwrap_or_else(|_| F::nan());
        let two = F::one() + F::one();
        for (aj, bj) in a.iter().zip(b) {
            e = e + self.input_gap * bj.norm_sqr() + two * self.hop * (bj.conj() * aj).re;
        }
        e
    }

    fn rk4(&self, a: &mut [Complex<F>], b: &mut [Complex<F>], h: F) {
        let n = a.len();
        let zero = Complex::new(F::zero(), F::zero());
        let two = F::one() + F::one();
        let six = F::of(6.0);
        let mut ka = vec![vec![zero; n]; 4];
        let mut kb = vec![vec![zero; n]; 4];
        let mut ta = vec![zero; n];
        let mut tb = vec![zero; n];
        let (ka0, rest) = ka.split_first_mut().unwrap();
        let (kb0, restb) = kb.split_first_mut().unwrap();
        self.rate(a, b, ka0, kb0);
        let mut prev_a = ka0.clone();
        let mut prev_b = kb0.clone();
        for (s, (kai, kbi)) in rest.iter_mut().zip(restb.iter_mut()).enumerate() {
            let c = if s < 2 { h / two } else { h };
            for j in 0..n {
                ta[j] = a[j] + prev_a[j] * c;
                tb[j] = b[j] + prev_b[j] * c;
            }
            self.rate(&ta, &tb, kai, kbi);
            prev_a.clone_from(kai);
            prev_b.clone_from(kbi);
        }
        for j in 0..n {
            a[j] = a[j] + (ka0[j] + (rest[0][j] + rest[1][j]) * two + rest[2][j]) * (h / six);
            b[j] = b[j] + (kb0[j] + (restb[0][j] + restb[1][j]) * two + restb[2][j]) * (h / six);
        }
    }
}

enum Attempt<F> {
    Done(EvolutionResult<F>),
    Drift { time: F, drift: F },
}

/// Classical mean-field evolution by fourth-order Runge–Kutta, halving the
/// step until the total occupation drifts less than allowed.
pub fn evolve_meanfield<F: Real>(
    model: &NetworkModel<F>,
    initial: &CoherentConfig<F>,
    times: &[F],
) -> Result<EvolutionResult<F>> {
    evolve_meanfield_with(model, initial, times, &MeanFieldOptions::default())
}

pub fn evolve_meanfield_with<F: Real>(
    model: &NetworkModel<F>,
    initial: &CoherentConfig<F>,
    times: &[F],
    options: &MeanFieldOptions,
) -> Result<EvolutionResult<F>> {
    let n = model.n();
    check_len(n, initial.a.len(), "output amplitudes")?;
    check_len(n, initial.b.len(), "input amplitudes")?;
    check_times(times)?;
    let (coupling, input_gap) = model.input_layer().map_or((F::zero(), F::zero()), |l| (l.coupling, l.input_gap));
    let flow = Flow { model, hop: coupling / (F::one() + F::one()), input_gap };

    let mut h = match options.initial_step {
        Some(h) if h > 0.0 => F::of(h),
        Some(h) => return Err(Error::invalid(format!("initial step must be positive, got {h}"))),
        None => {
            let occ: Vec<F> = initial.a.iter().map(|c| c.norm_sqr()).collect();
            let mut fastest = Float::abs(input_gap) + flow.hop;
            for j in 0..n {
                let pull = model.weight_row(j).iter().zip(&occ).fold(F::zero(), |acc, (w, y)| acc + *w * *y);
                let field = Float::abs(model.thresholds()[j]) + F::of(2.0) * pull + flow.hop;
                fastest = fastest.max(field);
            }
            F::of(0.02) / fastest.max(F::of(0.1))
        }
    };
    loop {
        match integrate(&flow, initial, times, h, options.max_drift_rate) {
            Attempt::Done(result) => return Ok(result),
            Attempt::Drift { time, drift } => {
                if options.fixed_step {
                    return Err(Error::NormDrift { time: time.as_f64(), drift: drift.as_f64(), limit: options.max_drift_rate });
                }
                let next = h / (F::one() + F::one());
                if next.as_f64() < options.min_step {
                    return Err(Error::StepUnderflow { time: time.as_f64(), last_stable_step: h.as_f64() });
                }
                h = next;
            }
        }
    }
}

fn integrate<F: Real>(flow: &Flow<'_, F>, initial: &CoherentConfig<F>, times: &[F], h: F, rate: f64) -> Attempt<F> {
    let mut a = initial.a.clone();
    let mut b = initial.b.clone();
    let total0 = initial.total_occupation();
    let mut t = F::zero();
    let mut result = EvolutionResult::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > F::zero() {
            let steps = Float::ceil(span / h).to_usize().unwrap_or(usize::MAX).max(1);
            let dt = span / F::of(steps as f64);
            for _ in 0..steps {
                flow.rk4(&mut a, &mut b, dt);
            }
            result.steps += steps;
        }
        t = target;
        let total = a.iter().chain(&b).fold(F::zero(), |acc, c| acc + c.norm_sqr());
        let drift = if total0 > F::zero() { Float::abs(F::one() - total / total0) } else { total };
        if !drift.is_finite() || drift.as_f64() > rate * t.as_f64().max(1.0) {
            return Attempt::Drift { time: t, drift };
        }
        result.times.push(t);
        result.y_expect.push(a.iter().map(|c| c.norm_sqr()).collect());
        result.x_expect.push(b.iter().map(|c| c.norm_sqr()).collect());
        result.norm_drift.push(drift);
        result.energy.push(flow.energy(&a, &b));
    }
    Attempt::Done(result)
}
