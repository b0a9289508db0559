//! Order-of-magnitude scaling laws in the coupling `g`.

use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Patterns per neuron for a threshold-scale gap budget, `∝ 1/√g`.
pub fn entropy_estimate(g: f64) -> Result<f64> {
    positive("g", g)?;
    Ok(1.0 / g.sqrt())
}

/// Decoherence time scale at occupation `n`, `∝ 1/(g n²)`.
pub fn decoherence_bound(g: f64, n: f64) -> Result<f64> {
    positive("g", g)?;
    positive("occupation", n)?;
    Ok(1.0 / (g * n * n))
}

/// Thermalization time at temperature `t`, `∝ 1/(g² T)`.
pub fn thermalization_time(g: f64, temperature: f64) -> Result<f64> {
    positive("g", g)?;
    positive("temperature", temperature)?;
    Ok(1.0 / (g * g * temperature))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling() {
        assert_eq!(entropy_estimate(1e-4).unwrap(), 100.0);
        assert!((entropy_estimate(1e-6).unwrap() / entropy_estimate(1e-4).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(decoherence_bound(0.01, 10.0).unwrap(), 1.0);
        assert!((thermalization_time(1e-3, 2.0).unwrap() - 5e5).abs() < 1e-6);
        assert!(entropy_estimate(0.0).is_err());
        assert!(decoherence_bound(0.1, -1.0).is_err());
        assert!(thermalization_time(f64::NAN, 1.0).is_err());
    }
}
