//! Scalar abstractions.
//!
//! Model algebra (energies, thresholds, critical splits, pattern gaps) is
//! written once against [`Scalar`] and instantiated for `f64`, `f32` and
//! exact [`BigRational`]. The time-evolution engines need transcendental
//! functions and work over [`Real`] (`f32`/`f64`).

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// An ordered field element usable for the network algebra.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Relative precision used for rank and sign decisions. Zero for exact types.
    fn precision() -> Self;

    /// Nearest integer, ties away from zero.
    fn round_nearest(&self) -> Self;

    /// Whether the value is an exact representation (rationals) rather than
    /// a floating point approximation.
    fn is_exact() -> bool;

    /// Conversion from `f64`. Panics on non-finite input.
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("non-finite scalar {x}"))
    }

    /// Conversion to `f64`, saturating to infinities on overflow.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Parses a decimal literal (`"1.5"`, `"-2e-10"`) or a fraction (`"3/7"`).
    fn parse_literal(text: &str) -> Option<Self>;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Floating point scalar for the dynamics engines.
pub trait Real: Scalar + Float + Default {}

impl Real for f32 {}
impl Real for f64 {}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn precision() -> Self {
                <$t>::EPSILON
            }
            fn round_nearest(&self) -> Self {
                <$t>::round(*self)
            }
            fn is_exact() -> bool {
                false
            }
            fn parse_literal(text: &str) -> Option<Self> {
                let text = text.trim();
                if let Some((p, q)) = text.split_once('/') {
                    let p: $t = p.trim().parse().ok()?;
                    let q: $t = q.trim().parse().ok()?;
                    return (q != 0.0).then(|| p / q);
                }
                text.parse().ok()
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn precision() -> Self {
        BigRational::zero()
    }

    fn round_nearest(&self) -> Self {
        self.round()
    }

    fn is_exact() -> bool {
        true
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p = parse_decimal_exact(p.trim())?;
            let q = parse_decimal_exact(q.trim())?;
            return (!q.is_zero()).then(|| p / q);
        }
        parse_decimal_exact(text)
    }
}

/// Exact value of a decimal literal with optional exponent.
fn parse_decimal_exact(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        BigRational::from_integer(numer * scale)
    } else {
        BigRational::new(numer, scale)
    })
}

/// `|a - b| <= tol`, for any scalar.
pub fn within<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

/// Sum of an iterator of scalars.
pub fn sum<T: Scalar>(items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

pub(crate) fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

pub(crate) fn half<T: Scalar>() -> T {
    T::one() / two::<T>()
}
