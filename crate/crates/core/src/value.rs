//! Structured loop-integral results.

use std::fmt;

use num_rational::Rational64;
use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::SignedLogReal;
use crate::precision::short;

/// `constant + slope * D` with a rational slope.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub constant: Float,
    pub slope: Rational64,
}

impl Affine {
    pub fn new(constant: Float, slope: Rational64) -> Self {
        Self { constant, slope }
    }

    pub fn constant(constant: Float) -> Self {
        Self::new(constant, Rational64::from_integer(0))
    }

    pub fn zero(bits: u32) -> Self {
        Self::constant(Float::with_val(bits, 0))
    }

    /// `slope * D` with no constant part.
    pub fn of_dim(bits: u32, numer: i64, denom: i64) -> Self {
        Self::new(Float::with_val(bits, 0), Rational64::new(numer, denom))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            constant: Float::with_val(self.constant.prec(), &self.constant + &other.constant),
            slope: self.slope + other.slope,
        }
    }

    pub fn at(&self, dim: &Float) -> Float {
        let slope = Float::with_val(dim.prec(), *self.slope.numer()) / *self.slope.denom();
        slope * dim + &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && *self.slope.numer() == 0
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = short(&self.constant);
        match (*self.slope.numer(), *self.slope.denom()) {
            (0, _) => write!(f, "{c}"),
            (n, 1) => write!(f, "{c} + {n}*D"),
            (n, d) => write!(f, "{c} + {n}/{d}*D"),
        }
    }
}

/// Qualitative markers attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    /// Obtained by a two-point delta-shift extrapolation.
    Extrapolated,
    /// A non-terminating series sat within 0.05 of its convergence boundary.
    SlowConvergence,
    /// Requested digits are too few for the check to be meaningful.
    ReducedPrecision,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::Extrapolated => "extrapolated",
            Flag::SlowConvergence => "slow-convergence",
            Flag::ReducedPrecision => "reduced-precision",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Series bookkeeping carried alongside a value.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Total number of series terms evaluated.
    pub terms: usize,
    /// Absolute truncation bound on the coefficient.
    pub tail_bound: Float,
    pub flags: Vec<Flag>,
}

impl Diagnostics {
    pub fn new(bits: u32) -> Self {
        Self {
            terms: 0,
            tail_bound: Float::with_val(bits, 0),
            flags: Vec::new(),
        }
    }

    pub fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    /// Combine with `other`, whose tail bound is scaled by `|weight|`.
    pub fn absorb(&mut self, other: &Diagnostics, weight: &Float) {
        self.terms += other.terms;
        let scaled = Float::with_val(self.tail_bound.prec(), weight.abs_ref()) * &other.tail_bound;
        self.tail_bound += scaled;
        for f in &other.flags {
            self.flag(*f);
        }
    }
}

/// Integral value `coefficient * pi^pi_exponent * (p^2)^p2_exponent`, with a
/// possibly unresolved `(-1)^phase_exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopValue {
    pub coefficient: SignedLogReal,
    pub pi_exponent: Affine,
    pub p2_exponent: Affine,
    pub phase_exponent: Affine,
    pub dim: Float,
    pub diagnostics: Diagnostics,
}

impl LoopValue {
    pub fn new(coefficient: SignedLogReal, pi_exponent: Affine, p2_exponent: Affine, dim: &Float) -> Self {
        let bits = dim.prec();
        Self {
            coefficient,
            pi_exponent,
            p2_exponent,
            phase_exponent: Affine::zero(bits),
            dim: dim.clone(),
            diagnostics: Diagnostics::new(bits),
        }
    }

    pub fn with_diagnostics(mut self, diagnostics: Diagnostics) -> Self {
        self.diagnostics = diagnostics;
        self
    }

    pub fn with_phase(mut self, phase: Affine) -> Self {
        self.phase_exponent = phase;
        self
    }

    /// Product: coefficients multiply, every exponent record adds.
    pub fn mul(&self, other: &LoopValue) -> Result<LoopValue> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput(format!(
                "cannot multiply values at D = {} and D = {}",
                short(&self.dim),
                short(&other.dim)
            )));
        }
        let mut diagnostics = self.diagnostics.clone();
        diagnostics.terms += other.diagnostics.terms;
        let bits = self.dim.prec();
        let a = self.coefficient.to_real();
        let b = other.coefficient.to_real();
        diagnostics.tail_bound = Float::with_val(bits, a.abs_ref()) * &other.diagnostics.tail_bound
            + Float::with_val(bits, b.abs_ref()) * &self.diagnostics.tail_bound;
        for f in &other.diagnostics.flags {
            diagnostics.flag(*f);
        }
        Ok(LoopValue {
            coefficient: self.coefficient.mul(&other.coefficient),
            pi_exponent: self.pi_exponent.add(&other.pi_exponent),
            p2_exponent: self.p2_exponent.add(&other.p2_exponent),
            phase_exponent: self.phase_exponent.add(&other.phase_exponent),
            dim: self.dim.clone(),
            diagnostics,
        })
    }

    pub fn coefficient_real(&self) -> Float {
        self.coefficient.to_real()
    }

    pub fn pi_exponent_value(&self) -> Float {
        self.pi_exponent.at(&self.dim)
    }

    pub fn p2_exponent_value(&self) -> Float {
        self.p2_exponent.at(&self.dim)
    }

    /// Full numeric value at the given `p^2`; fails while a non-integer
    /// `(-1)` power is pending.
    pub fn value(&self, p2: &Float) -> Result<Float> {
        let bits = self.dim.prec();
        let phase = self.phase_exponent.at(&self.dim);
        let rounded = Float::with_val(bits, phase.round_ref());
        let gap = Float::with_val(bits, &phase - &rounded).abs();
        if gap > Float::with_val(bits, 1e-30) {
            return Err(Error::NonIntegerPhase {
                exponent: short(&phase),
            });
        }
        let pi = Float::with_val(bits, Constant::Pi);
        let log = Float::with_val(bits, pi.ln_ref()) * self.pi_exponent_value()
            + Float::with_val(bits, p2.ln_ref()) * self.p2_exponent_value();
        let mut v = self
            .coefficient
            .mul(&SignedLogReal::from_parts(crate::numerics::Sign::Positive, log));
        if rounded.to_f64().rem_euclid(2.0) == 1.0 {
            v = v.neg();
        }
        Ok(v.to_real())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_adds_exponents() {
        let bits = 128;
        let d = Float::with_val(bits, 4.6);
        let two = SignedLogReal::from_real(&Float::with_val(bits, 2));
        let a = LoopValue::new(
            two.clone(),
            Affine::of_dim(bits, 1, 2),
            Affine::constant(Float::with_val(bits, -1)),
            &d,
        );
        let b = LoopValue::new(two, Affine::of_dim(bits, 1, 1), Affine::of_dim(bits, 1, 2), &d);
        let c = a.mul(&b).unwrap();
        assert!((c.coefficient_real().to_f64() - 4.0).abs() < 1e-30);
        assert_eq!(c.pi_exponent.slope, Rational64::new(3, 2));
        let p2 = c.p2_exponent_value();
        assert!((p2.to_f64() - 1.3).abs() < 1e-12);
    }

    #[test]
    fn value_needs_integer_phase() {
        let bits = 128;
        let d = Float::with_val(bits, 3);
        let one = SignedLogReal::one(bits);
        let v = LoopValue::new(one, Affine::of_dim(bits, 1, 2), Affine::zero(bits), &d)
            .with_phase(Affine::of_dim(bits, 1, 2));
        assert!(v.value(&Float::with_val(bits, 1)).is_err());
    }

    #[test]
    fn affine_display() {
        let a = Affine::new(Float::with_val(64, -5), Rational64::new(1, 1));
        assert_eq!(a.to_string(), "-5.0000000000000000000 + 1*D");
    }
}
