//! Working-precision record shared by every evaluation.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest supported number of decimal working digits.
pub const MIN_DIGITS: u32 = 20;
/// Default decimal working digits.
pub const DEFAULT_DIGITS: u32 = 50;
/// Default ceiling on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 200_000;

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 32;

/// Decimal working precision, relative truncation tolerance `10^tol_exp` and
/// a ceiling on series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
    tol_exp: i32,
    max_terms: usize,
}

impl Precision {
    pub fn new(digits: u32, tol_exp: i32, max_terms: usize) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::InvalidPrecision(format!(
                "digits must be at least {MIN_DIGITS}, got {digits}"
            )));
        }
        if i64::from(tol_exp) < 10 - i64::from(digits) {
            return Err(Error::InvalidPrecision(format!(
                "truncation tolerance 1e{tol_exp} is below 1e{} for {digits} digits",
                10 - i64::from(digits)
            )));
        }
        if tol_exp >= 0 {
            return Err(Error::InvalidPrecision(format!(
                "truncation tolerance 1e{tol_exp} must be below one"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidPrecision("max_terms must be positive".into()));
        }
        Ok(Self {
            digits,
            tol_exp,
            max_terms,
        })
    }

    /// Tightest admissible tolerance for the given digits.
    pub fn with_digits(digits: u32) -> Result<Self> {
        Self::new(digits, 10 - digits as i32, DEFAULT_MAX_TERMS)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn tol_exp(&self) -> i32 {
        self.tol_exp
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Binary precision used for every `Float`.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Elevated binary precision for cancellation-heavy kernels (series
    /// extrapolation).
    pub fn extended_bits(&self) -> u32 {
        2 * self.bits() + 64
    }

    /// Same settings at a different number of digits, keeping the tolerance
    /// offset from the digit count.
    pub fn rescaled(&self, digits: u32) -> Result<Self> {
        let offset = self.tol_exp + self.digits as i32;
        Self::new(digits, offset - digits as i32, self.max_terms)
    }

    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    /// Parse a decimal string exactly to working precision.
    pub fn parse(&self, text: &str) -> Result<Float> {
        match Float::parse(text.trim()) {
            Ok(v) => Ok(Float::with_val(self.bits(), v)),
            Err(e) => Err(Error::InvalidInput(format!("cannot parse {text:?} as a real: {e}"))),
        }
    }

    pub fn pow10(&self, exponent: i32) -> Float {
        Float::with_val(self.bits(), 10).pow(exponent)
    }

    /// Relative tolerance for truncating series.
    pub fn tolerance(&self) -> Float {
        self.pow10(self.tol_exp)
    }

    /// Radius around nonpositive integers treated as gamma poles, `10^(5-digits)`.
    pub fn pole_radius(&self) -> Float {
        self.pow10(5 - self.digits as i32)
    }

    /// Tolerance for algebraic identities, `10^(10-digits)`.
    pub fn identity_tolerance(&self) -> Float {
        self.pow10(10 - self.digits as i32)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::with_digits(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

/// Decimal rendering of a real at `digits` significant digits.
pub fn decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Short rendering used inside error messages.
pub(crate) fn short(x: &Float) -> String {
    decimal(x, 20)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_digits_and_loose_tolerances() {
        assert!(Precision::new(19, -10, 10).is_err());
        assert!(Precision::new(30, -21, 10).is_err());
        assert!(Precision::new(30, -20, 0).is_err());
        assert!(Precision::new(30, -20, 10).is_ok());
    }

    #[test]
    fn bits_cover_requested_digits() {
        let p = Precision::with_digits(50).unwrap();
        assert!(p.bits() >= 166 + GUARD_BITS);
        assert_eq!(p.tol_exp(), -40);
    }

    #[test]
    fn rescale_keeps_offset() {
        let p = Precision::new(50, -30, 1000).unwrap();
        let q = p.rescaled(70).unwrap();
        assert_eq!(q.tol_exp(), -50);
        assert_eq!(q.max_terms(), 1000);
    }
}
