//! Distance scalars and float tolerance.
//!
//! Distances are stored as `f64` by default. Comparisons that decide
//! topology (strict four-point inequalities, duplicate detection) go through
//! [`Tolerance`], which scales an absolute epsilon by the magnitude of the
//! values involved. The same algorithms can run on [`BigRational`] values,
//! in which case every comparison is exact and the tolerance is ignored.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default comparison epsilon.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Relative/absolute float tolerance: `eps * max(1, |magnitude|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    epsilon: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { epsilon: DEFAULT_EPSILON }
    }
}

impl Tolerance {
    /// Panics if `epsilon` is negative or not finite.
    pub fn new(epsilon: f64) -> Self {
        assert!(
            epsilon.is_finite() && epsilon >= 0.0,
            "tolerance must be a finite non-negative number"
        );
        Tolerance { epsilon }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Absolute slack allowed around values of the given magnitude.
    pub fn slack(&self, magnitude: f64) -> f64 {
        self.epsilon * magnitude.abs().max(1.0)
    }

    /// `a < b` with a margin larger than the slack.
    pub fn clearly_less(&self, a: f64, b: f64) -> bool {
        b - a > self.slack(a.abs().max(b.abs()))
    }

    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }
}

/// A value type usable as a distance.
pub trait Distance:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Add<Output = Self> + Sub<Output = Self>
{
    /// True when comparisons are exact and [`Tolerance`] is ignored.
    const EXACT: bool;

    fn zero() -> Self;

    fn to_f64(&self) -> f64;

    /// Converts a finite float without rounding.
    fn from_f64(value: f64) -> Option<Self>;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// `self < other` by more than the tolerance (strictly, when exact).
    fn clearly_less(&self, other: &Self, tol: &Tolerance) -> bool;

    /// Equal up to the tolerance (exactly equal, when exact).
    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool;
}

impl Distance for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn clearly_less(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.clearly_less(*self, *other)
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.approx_eq(*self, *other)
    }
}

impl Distance for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn clearly_less(&self, other: &Self, _tol: &Tolerance) -> bool {
        self < other
    }

    fn approx_eq(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }
}

/// Parses a plain decimal literal (`12`, `0.25`, `3.5e-2`) into an exact
/// rational. Returns `None` for anything else, including `inf`/`nan`.
pub fn parse_decimal_exact(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}
