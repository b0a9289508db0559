//! Classical patterns carried by coherent states.
//!
//! A pattern assigns an amplitude `α_j = √Y_j e^{iθ_j}` to every gapless
//! neuron. Two patterns are told apart when `Σ_j |α_j − α'_j|²` exceeds a
//! distance threshold, their squared overlap then being at most
//! `exp(−threshold)`.

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{check_len, Error, Result};
use crate::network::NetworkModel;
use crate::scalar::Real;

/// Excursions are bounded by `|α_j|² ≤ κ/g`.
pub const DEFAULT_KAPPA: f64 = 0.01;

/// Default distinguishability threshold on `Σ|Δα|²`; the residual squared
/// overlap is `e^{−1}`.
pub const DEFAULT_DISTANCE_THRESHOLD: f64 = 1.0;

/// Largest reduced level `Σ_j (k_re² + k_im²)` counted by [`pack_patterns`].
pub const PACKING_LEVEL_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPattern<F> {
    alphas: Vec<Complex<F>>,
}

impl<F: Real> ClassicalPattern<F> {
    pub fn new(alphas: Vec<Complex<F>>) -> Result<Self> {
        if alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(ClassicalPattern { alphas })
    }

    /// Also enforces the small-excursion bound `|α_j|² ≤ κ/g`.
    pub fn bounded(alphas: Vec<Complex<F>>, g: F, kappa: F) -> Result<Self> {
        if !(g > F::zero()) || !(kappa > F::zero()) {
            return Err(Error::invalid("g and kappa must be positive"));
        }
        let limit = kappa / g;
        if let Some((j, a)) = alphas.iter().enumerate().find(|(_, a)| a.norm_sqr() > limit) {
            return Err(Error::invalid(format!("|α[{j}]|² = {} exceeds κ/g = {limit}", a.norm_sqr())));
        }
        Self::new(alphas)
    }

    pub fn from_real(alphas: &[F]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Complex::new(a, F::zero())).collect())
    }

    pub fn alphas(&self) -> &[Complex<F>] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `Y_j = |α_j|²`.
    pub fn occupations(&self) -> Vec<F> {
        self.alphas.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `Σ_j |α_j − α'_j|²`.
pub fn distance_sq<F: Real>(p: &ClassicalPattern<F>, other: &ClassicalPattern<F>) -> Result<F> {
    check_len(p.len(), other.len(), "pattern length")?;
    Ok(p.alphas.iter().zip(&other.alphas).fold(F::zero(), |acc, (a, b)| acc + (a - b).norm_sqr()))
}

/// `exp(−Σ_j |α_j − α'_j|²)`, the squared modulus of the coherent-state
/// overlap.
pub fn overlap_sq<F: Real>(p: &ClassicalPattern<F>, other: &ClassicalPattern<F>) -> Result<F> {
    Ok(Float::exp(-distance_sq(p, other)?))
}

/// `⟨α|α'⟩ = Π_j exp(−|α_j|²/2 − |α'_j|²/2 + α_j* α'_j)`.
pub fn overlap_amplitude<F: Real>(p: &ClassicalPattern<F>, other: &ClassicalPattern<F>) -> Result<Complex<F>> {
    check_len(p.len(), other.len(), "pattern length")?;
    let half = F::one() / (F::one() + F::one());
    let exponent = p.alphas.iter().zip(&other.alphas).fold(Complex::new(F::zero(), F::zero()), |acc, (a, b)| {
        acc + a.conj() * b - Complex::new((a.norm_sqr() + b.norm_sqr()) * half, F::zero())
    });
    Ok(exponent.exp())
}

/// `Σ_{j,k} W_jk |α_j|²|α_k|²` over a model on the gapless neurons.
pub fn classical_gap<F: Real>(model: &NetworkModel<F>, p: &ClassicalPattern<F>) -> Result<F> {
    check_len(model.n(), p.len(), "pattern on gapless set")?;
    let y = p.occupations();
    let mut gap = F::zero();
    for (j, yj) in y.iter().enumerate() {
        for (w, yk) in model.weight_row(j).iter().zip(&y) {
            gap = gap + *w * *yj * *yk;
        }
    }
    Ok(gap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackOptions {
    pub kappa: f64,
    /// Number of patterns returned alongside the count.
    pub sample_limit: usize,
}

impl Default for PackOptions {
    fn default() -> Self {
        PackOptions { kappa: DEFAULT_KAPPA, sample_limit: 16 }
    }
}

#[derive(Debug, Clone)]
pub struct Packing {
    /// Number of grid patterns inside the region.
    pub count: BigUint,
    /// Grid pitch `√threshold` per real coordinate.
    pub pitch: f64,
    /// Bound on `Σ_j |α_j|²/pitch²` from the gap budget.
    pub total_level: u64,
    /// Bound on `|α_j|²/pitch²` from the excursion bound.
    pub mode_level: u64,
    /// The first patterns, ordered mode by mode by level then grid coordinates.
    pub samples: Vec<ClassicalPattern<f64>>,
}

fn floor_level(x: f64) -> u64 {
    if x.is_infinite() {
        return u64::MAX;
    }
    (x * (1.0 + 1e-12)).floor() as u64
}

/// Patterns on the grid `α_j ∈ √threshold · (ℤ + iℤ)` for the uniform
/// model with coupling `g` on `mode_count` gapless neurons, inside the ball
/// `(g/2)(Σ_j |α_j|²)² ≤ budget` and the excursion bound. Distinct grid
/// points are at squared distance at least `threshold`, so every pair is
/// distinguishable. The ball lies inside `classical_gap ≤ budget`, so the
/// count is a lower bound.
pub fn pack_patterns(g: f64, mode_count: usize, gap_budget: f64, threshold: f64, options: &PackOptions) -> Result<Packing> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::invalid(format!("g must be positive, got {g}")));
    }
    if mode_count == 0 {
        return Err(Error::invalid("mode count must be positive"));
    }
    if !(gap_budget >= 0.0 && gap_budget.is_finite()) {
        return Err(Error::invalid(format!("gap budget must be nonnegative, got {gap_budget}")));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::invalid(format!("distance threshold must be positive, got {threshold}")));
    }
    if !(options.kappa > 0.0) {
        return Err(Error::invalid("kappa must be positive"));
    }
    let pitch = threshold.sqrt();
    let total_level = floor_level((2.0 * gap_budget / g).sqrt() / threshold);
    let mode_level = floor_level(options.kappa / g / threshold);
    let reach = mode_level.min(total_level);
    if reach > PACKING_LEVEL_LIMIT {
        return Err(Error::EnumerationLimit { requested: reach as u128, limit: PACKING_LEVEL_LIMIT as u128 });
    }
    let reach = reach as usize;
    let total = total_level.min(reach as u64 * mode_count as u64) as usize;

    // lattice points per mode at each squared radius
    let mut per_mode = vec![0u64; reach + 1];
    let side = (reach as f64).sqrt() as i64 + 1;
    let mut points: Vec<(u64, i64, i64)> = Vec::new();
    for a in -side..=side {
        for b in -side..=side {
            let r = (a * a + b * b) as usize;
            if r <= reach {
                per_mode[r] += 1;
                points.push((r as u64, a, b));
            }
        }
    }
    points.sort_unstable();

    let shells: Vec<(usize, BigUint)> =
        per_mode.iter().enumerate().filter(|(_, c)| **c > 0).map(|(r, c)| (r, BigUint::from(*c))).collect();
    let mut dist: Vec<BigUint> = vec![BigUint::zero(); total + 1];
    dist[0] = BigUint::one();
    for _ in 0..mode_count {
        let mut next = vec![BigUint::zero(); total + 1];
        for (s, ways) in dist.iter().enumerate() {
            if ways.is_zero() {
                continue;
            }
            for (r, c) in &shells {
                if s + r > total {
                    break;
                }
                next[s + r] += ways * c;
            }
        }
        dist = next;
    }
    let count = dist.iter().fold(BigUint::zero(), |acc, c| acc + c);

    let mut samples = Vec::new();
    let mut current = Vec::with_capacity(mode_count);
    collect_samples(&points, mode_count, total as u64, pitch, options.sample_limit, &mut current, &mut samples);
    Ok(Packing { count, pitch, total_level, mode_level, samples })
}

fn collect_samples(
    points: &[(u64, i64, i64)],
    modes: usize,
    remaining: u64,
    pitch: f64,
    limit: usize,
    current: &mut Vec<Complex<f64>>,
    out: &mut Vec<ClassicalPattern<f64>>,
) {
    if out.len() >= limit {
        return;
    }
    if current.len() == modes {
        out.push(ClassicalPattern { alphas: current.clone() });
        return;
    }
    for &(r, a, b) in points {
        if r > remaining || out.len() >= limit {
            break;
        }
        current.push(Complex::new(a as f64 * pitch, b as f64 * pitch));
        collect_samples(points, modes, remaining - r, pitch, limit, current, out);
        current.pop();
    }
}
