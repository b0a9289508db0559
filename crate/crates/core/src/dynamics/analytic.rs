use num_traits::Float;

use crate::error::{Error, Result};
use crate::network::InputPattern;
use crate::scalar::Real;

fn check_q<F: Real>(q: F) -> Result<()> {
    if q > F::zero() && q.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("q must be positive, got {q}")))
    }
}

/// `Y_j(t) = X_j sin²(qt/2)`: response of gapless neurons.
pub fn analytic_response_critical<F: Real>(x: &InputPattern<F>, q: F, t: F) -> Result<Vec<F>> {
    check_q(q)?;
    let s = Float::sin(q * t / (F::one() + F::one()));
    Ok(x.values().iter().map(|&xj| xj * s * s).collect())
}

/// `Y_j(t) = X_j q²/(1+q²) sin²(t√(1+q²)/2)`: response of unexcited
/// neurons with unit threshold.
pub fn analytic_response_ground<F: Real>(x: &InputPattern<F>, q: F, t: F) -> Result<Vec<F>> {
    check_q(q)?;
    let amplitude = ground_peak_fraction(q);
    let s = Float::sin(t * ground_frequency(q) / (F::one() + F::one()));
    Ok(x.values().iter().map(|&xj| xj * amplitude * s * s).collect())
}

/// `q²/(1+q²)`.
pub fn ground_peak_fraction<F: Real>(q: F) -> F {
    q * q / (F::one() + q * q)
}

/// `√(1+q²)`.
pub fn ground_frequency<F: Real>(q: F) -> F {
    Float::sqrt(F::one() + q * q)
}

/// One Rabi period `π/q` of the critical response.
pub fn rabi_period<F: Real>(q: F) -> F {
    F::of(std::f64::consts::PI) / q
}

/// `points` evenly spaced times over `[0, π/q]`.
pub fn default_time_grid<F: Real>(q: F, points: usize) -> Result<Vec<F>> {
    check_q(q)?;
    if points < 2 {
        return Err(Error::invalid("time grid needs at least two points"));
    }
    let end = rabi_period(q);
    let last = F::of((points - 1) as f64);
    Ok((0..points).map(|i| if i + 1 == points { end } else { end * F::of(i as f64) / last }).collect())
}

/// Cosine similarity of `y` and `x` over the stimulated modes, clamped to
/// `[0, 1]`.
pub fn recall_fidelity<F: Real>(y: &[F], x: &InputPattern<F>) -> Result<F> {
    crate::error::check_len(x.len(), y.len(), "response vector")?;
    let (mut dot, mut yy, mut xx) = (F::zero(), F::zero(), F::zero());
    for (&yj, &xj) in y.iter().zip(x.values()) {
        if xj > F::zero() {
            dot = dot + yj * xj;
            yy = yy + yj * yj;
            xx = xx + xj * xj;
        }
    }
    if xx == F::zero() {
        return Err(Error::invalid("stimulus is zero on every mode"));
    }
    if yy == F::zero() {
        return Ok(F::zero());
    }
    let c = dot / (Float::sqrt(yy) * Float::sqrt(xx));
    Ok(c.max(F::zero()).min(F::one()))
}
