//! Sign/log-magnitude arithmetic, gamma and Pochhammer evaluation with pole
//! bookkeeping, and the Pochhammer continuation identity
//! `(a)_n = (-1)^n / (1-a)_{-n}`.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{short, Precision};

/// Integer-index Pochhammer symbols longer than this are evaluated through
/// gamma ratios instead of explicit products.
const PRODUCT_LIMIT: i64 = 4096;

/// Sign of a [`SignedLogReal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    fn of(x: &Float) -> Sign {
        match x.cmp0() {
            Some(Ordering::Less) => Sign::Negative,
            Some(Ordering::Greater) => Sign::Positive,
            _ => Sign::Zero,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
            Sign::Zero => Sign::Zero,
        }
    }
}

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Products and quotients only add or subtract logarithms, so long gamma
/// products never overflow or lose relative accuracy. The log-magnitude is
/// meaningless when the sign is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedLogReal {
    sign: Sign,
    log_magnitude: Float,
}

impl SignedLogReal {
    pub fn zero(bits: u32) -> Self {
        Self {
            sign: Sign::Zero,
            log_magnitude: Float::with_val(bits, 0),
        }
    }

    pub fn one(bits: u32) -> Self {
        Self {
            sign: Sign::Positive,
            log_magnitude: Float::with_val(bits, 0),
        }
    }

    pub fn from_parts(sign: Sign, log_magnitude: Float) -> Self {
        Self { sign, log_magnitude }
    }

    pub fn from_real(x: &Float) -> Self {
        let sign = Sign::of(x);
        let log_magnitude = if sign == Sign::Zero {
            Float::with_val(x.prec(), 0)
        } else {
            Float::with_val(x.prec(), x.abs_ref()).ln()
        };
        Self { sign, log_magnitude }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn log_magnitude(&self) -> &Float {
        &self.log_magnitude
    }

    pub fn prec(&self) -> u32 {
        self.log_magnitude.prec()
    }

    /// Plain value at the stored precision.
    pub fn to_real(&self) -> Float {
        let bits = self.prec();
        match self.sign {
            Sign::Zero => Float::with_val(bits, 0),
            Sign::Positive => self.log_magnitude.clone().exp(),
            Sign::Negative => -self.log_magnitude.clone().exp(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            sign: self.sign.flip(),
            log_magnitude: self.log_magnitude.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sign = self.sign.times(other.sign);
        if sign == Sign::Zero {
            return Self::zero(self.prec());
        }
        Self {
            sign,
            log_magnitude: Float::with_val(self.prec(), &self.log_magnitude + &other.log_magnitude),
        }
    }

    /// Quotient, `None` when dividing by zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let sign = self.sign.times(other.sign);
        if sign == Sign::Zero {
            return Some(Self::zero(self.prec()));
        }
        Some(Self {
            sign,
            log_magnitude: Float::with_val(self.prec(), &self.log_magnitude - &other.log_magnitude),
        })
    }

    pub fn recip(&self) -> Option<Self> {
        Self::one(self.prec()).div(self)
    }

    /// Sum via log-sum-exp with explicit sign handling.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let bits = self.prec();
        let (big, small) = if self.log_magnitude >= other.log_magnitude {
            (self, other)
        } else {
            (other, self)
        };
        let gap = Float::with_val(bits, &small.log_magnitude - &big.log_magnitude).exp();
        if big.sign == small.sign {
            let log_magnitude = Float::with_val(bits, &big.log_magnitude + gap.ln_1p());
            Self {
                sign: big.sign,
                log_magnitude,
            }
        } else {
            let rest = Float::with_val(bits, 1 - gap);
            if rest.is_zero() {
                return Self::zero(bits);
            }
            Self {
                sign: big.sign,
                log_magnitude: Float::with_val(bits, &big.log_magnitude + rest.ln()),
            }
        }
    }

    /// `base^exponent` for a strictly positive base.
    pub fn positive_power(base: &Float, exponent: &Float) -> Self {
        let bits = base.prec().max(exponent.prec());
        debug_assert!(base.cmp0() == Some(Ordering::Greater));
        let log_magnitude = Float::with_val(bits, base.ln_ref()) * exponent;
        Self {
            sign: Sign::Positive,
            log_magnitude,
        }
    }
}

impl fmt::Display for SignedLogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", short(&self.to_real()))
    }
}

/// Result of a gamma or Pochhammer evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaEval {
    Value(SignedLogReal),
    /// Singular evaluation; carries the offending nonpositive-integer argument.
    Pole {
        argument: Float,
    },
}

impl GammaEval {
    pub fn is_pole(&self) -> bool {
        matches!(self, GammaEval::Pole { .. })
    }

    pub fn value(&self) -> Option<&SignedLogReal> {
        match self {
            GammaEval::Value(v) => Some(v),
            GammaEval::Pole { .. } => None,
        }
    }

    /// Finite value or [`Error::Pole`].
    pub fn finite(self) -> Result<SignedLogReal> {
        match self {
            GammaEval::Value(v) => Ok(v),
            GammaEval::Pole { argument } => Err(Error::Pole {
                argument: short(&argument),
            }),
        }
    }

    /// Plain value or [`Error::Pole`].
    pub fn real(self) -> Result<Float> {
        self.finite().map(|v| v.to_real())
    }

    /// `1/self`; a pole becomes exact zero and zero becomes a pole at `at`.
    fn reciprocal(self, bits: u32, at: Float) -> GammaEval {
        match self {
            GammaEval::Pole { .. } => GammaEval::Value(SignedLogReal::zero(bits)),
            GammaEval::Value(v) => match v.recip() {
                Some(r) => GammaEval::Value(r),
                None => GammaEval::Pole { argument: at },
            },
        }
    }
}

/// Nearest integer to `x` when it lies within `radius`.
pub fn near_integer(x: &Float, radius: &Float) -> Option<i64> {
    if !x.is_finite() {
        return None;
    }
    let rounded = Float::with_val(x.prec(), x.round_ref());
    let gap = Float::with_val(x.prec(), x - &rounded).abs();
    if gap <= *radius {
        rounded.to_f64().is_finite().then(|| rounded.to_f64() as i64)
    } else {
        None
    }
}

/// Nonpositive integer within the pole radius of `prec`.
pub fn nonpositive_integer(x: &Float, prec: &Precision) -> Option<i64> {
    near_integer(x, &prec.pole_radius()).filter(|k| *k <= 0)
}

/// `sin(pi x)` with exact reduction about the nearest integer.
pub fn sin_pi(x: &Float) -> Float {
    let bits = x.prec();
    let rounded = Float::with_val(bits, x.round_ref());
    let frac = Float::with_val(bits, x - &rounded);
    let pi = Float::with_val(bits, Constant::Pi);
    let s = (frac * pi).sin();
    let odd = rounded.to_f64().rem_euclid(2.0) == 1.0;
    if odd {
        -s
    } else {
        s
    }
}

/// `cos(pi x)` with exact reduction about the nearest integer.
pub fn cos_pi(x: &Float) -> Float {
    let bits = x.prec();
    let rounded = Float::with_val(bits, x.round_ref());
    let frac = Float::with_val(bits, x - &rounded);
    let pi = Float::with_val(bits, Constant::Pi);
    let c = (frac * pi).cos();
    let odd = rounded.to_f64().rem_euclid(2.0) == 1.0;
    if odd {
        -c
    } else {
        c
    }
}

/// `Gamma(x)` as sign and `ln|Gamma(x)|`.
///
/// Arguments within `10^(5-digits)` of a nonpositive integer return
/// [`GammaEval::Pole`]. Negative arguments go through the reflection
/// identity `Gamma(x) = pi / (sin(pi x) Gamma(1-x))`.
pub fn gamma_signed(x: &Float, prec: &Precision) -> GammaEval {
    let bits = prec.bits();
    let x = Float::with_val(bits, x);
    if let Some(k) = nonpositive_integer(&x, prec) {
        return GammaEval::Pole {
            argument: Float::with_val(bits, k),
        };
    }
    if x.cmp0() == Some(Ordering::Less) {
        let reflected = Float::with_val(bits, 1 - &x).ln_gamma();
        let sine = sin_pi(&x);
        let log_pi = Float::with_val(bits, Constant::Pi).ln();
        let log_sine = Float::with_val(bits, sine.abs_ref()).ln();
        let log_magnitude = log_pi - log_sine - reflected;
        return GammaEval::Value(SignedLogReal::from_parts(Sign::of(&sine), log_magnitude));
    }
    GammaEval::Value(SignedLogReal::from_parts(Sign::Positive, x.ln_gamma()))
}

/// Pochhammer symbol `(a)_n = Gamma(a+n)/Gamma(a)`.
///
/// Integer `n` uses the finite product (or reciprocal product for negative
/// `n`), valid for every real `a`. Otherwise the gamma ratio is taken with
/// pole logic: numerator pole only gives a pole marker, denominator pole only
/// gives exact zero, both is [`Error::DoublePole`].
pub fn pochhammer(a: &Float, n: &Float, prec: &Precision) -> Result<GammaEval> {
    if let Some(k) = near_integer(n, &prec.pole_radius()) {
        if k.abs() <= PRODUCT_LIMIT {
            return Ok(pochhammer_int(a, k, prec));
        }
    }
    let bits = prec.bits();
    let top = Float::with_val(bits, a + n);
    let num = gamma_signed(&top, prec);
    let den = gamma_signed(a, prec);
    match (num, den) {
        (GammaEval::Pole { .. }, GammaEval::Pole { .. }) => {
            if let Some(k) = near_integer(n, &prec.pole_radius()) {
                return Ok(pochhammer_int(a, k, prec));
            }
            Err(Error::DoublePole {
                a: short(a),
                n: short(n),
            })
        }
        (GammaEval::Pole { argument }, _) => Ok(GammaEval::Pole { argument }),
        (_, GammaEval::Pole { .. }) => Ok(GammaEval::Value(SignedLogReal::zero(bits))),
        (GammaEval::Value(p), GammaEval::Value(q)) => {
            Ok(GammaEval::Value(p.div(&q).expect("gamma values are nonzero")))
        }
    }
}

/// Integer-index Pochhammer symbol as an explicit product.
pub fn pochhammer_int(a: &Float, n: i64, prec: &Precision) -> GammaEval {
    let bits = prec.bits();
    let radius = prec.pole_radius();
    let mut product = Float::with_val(bits, 1);
    if n >= 0 {
        for m in 0..n {
            let factor = Float::with_val(bits, a + m);
            if Float::with_val(bits, factor.abs_ref()) <= radius {
                return GammaEval::Value(SignedLogReal::zero(bits));
            }
            product *= factor;
        }
        GammaEval::Value(SignedLogReal::from_real(&product))
    } else {
        for m in 1..=(-n) {
            let factor = Float::with_val(bits, a - m);
            if Float::with_val(bits, factor.abs_ref()) <= radius {
                return GammaEval::Pole {
                    argument: Float::with_val(bits, a + n),
                };
            }
            product *= factor;
        }
        let value = SignedLogReal::from_real(&product).recip().expect("nonzero product");
        GammaEval::Value(value)
    }
}

/// `(a)_n` through the continuation identity `(-1)^n / (1-a)_{-n}`.
///
/// Agrees with [`pochhammer`] wherever both are finite; zero and pole
/// markers of the inner symbol swap roles.
pub fn pochhammer_ac(a: &Float, n: i64, prec: &Precision) -> GammaEval {
    let bits = prec.bits();
    let reflected = Float::with_val(bits, 1 - a);
    let inner = pochhammer_int(&reflected, -n, prec);
    let at = Float::with_val(bits, a + n);
    match inner.reciprocal(bits, at) {
        GammaEval::Value(v) if n % 2 != 0 => GammaEval::Value(v.neg()),
        other => other,
    }
}

/// Phase-stripped continuation `1/(1-a)_{-n}` of `(a)_n` for arbitrary real
/// `n`. The dropped factor is `(-1)^n`; callers account for it.
pub fn pochhammer_continued(a: &Float, n: &Float, prec: &Precision) -> Result<GammaEval> {
    let bits = prec.bits();
    let reflected = Float::with_val(bits, 1 - a);
    let index = Float::with_val(bits, -n);
    let inner = pochhammer(&reflected, &index, prec)?;
    Ok(inner.reciprocal(bits, Float::with_val(bits, a + n)))
}

/// `prod Gamma(nums) / prod Gamma(dens)`; a numerator pole is
/// [`Error::Pole`] unless a denominator pole cancels it, which is
/// [`Error::DoublePole`]. A denominator pole alone gives exact zero.
pub fn gamma_ratio(nums: &[Float], dens: &[Float], prec: &Precision) -> Result<SignedLogReal> {
    let bits = prec.bits();
    let mut value = SignedLogReal::one(bits);
    let mut pole = None;
    let mut zero = false;
    for x in nums {
        match gamma_signed(x, prec) {
            GammaEval::Pole { argument } => pole = Some(argument),
            GammaEval::Value(v) => value = value.mul(&v),
        }
    }
    for x in dens {
        match gamma_signed(x, prec) {
            GammaEval::Pole { .. } => zero = true,
            GammaEval::Value(v) => value = value.div(&v).expect("gamma values are nonzero"),
        }
    }
    match (pole, zero) {
        (Some(a), true) => Err(Error::DoublePole {
            a: short(&a),
            n: "gamma ratio".into(),
        }),
        (Some(argument), false) => Err(Error::Pole {
            argument: short(&argument),
        }),
        (None, true) => Ok(SignedLogReal::zero(bits)),
        (None, false) => Ok(value),
    }
}

/// Running product of Pochhammer factors where some factors are continued
/// through `(a)_n -> (-1)^n/(1-a)_{-n}` and the dropped `(-1)` exponents are
/// collected for a final pairing check.
#[derive(Debug, Clone)]
pub struct ContinuedProduct {
    value: SignedLogReal,
    phase: Float,
    zeros: u32,
    pole: Option<String>,
    prec: Precision,
}

impl ContinuedProduct {
    pub fn new(prec: &Precision) -> Self {
        Self {
            value: SignedLogReal::one(prec.bits()),
            phase: prec.float(0),
            zeros: 0,
            pole: None,
            prec: *prec,
        }
    }

    fn absorb(&mut self, factor: GammaEval, invert: bool) -> Result<()> {
        match (factor, invert) {
            (GammaEval::Pole { .. }, true) => self.zeros += 1,
            (GammaEval::Pole { argument }, false) => self.pole = Some(short(&argument)),
            (GammaEval::Value(v), true) if v.is_zero() => {
                self.pole = Some("vanishing Pochhammer factor in a denominator".into())
            }
            (GammaEval::Value(v), false) if v.is_zero() => self.zeros += 1,
            (GammaEval::Value(v), true) => self.value = self.value.div(&v).expect("nonzero"),
            (GammaEval::Value(v), false) => self.value = self.value.mul(&v),
        }
        Ok(())
    }

    /// Multiply by `(a)_n` evaluated directly.
    pub fn times(&mut self, a: &Float, n: &Float) -> Result<&mut Self> {
        let f = pochhammer(a, n, &self.prec)?;
        self.absorb(f, false)?;
        Ok(self)
    }

    /// Divide by `(a)_n` evaluated directly.
    pub fn over(&mut self, a: &Float, n: &Float) -> Result<&mut Self> {
        let f = pochhammer(a, n, &self.prec)?;
        self.absorb(f, true)?;
        Ok(self)
    }

    /// Multiply by the continued `(a)_n`; adds `n` to the phase exponent.
    pub fn times_continued(&mut self, a: &Float, n: &Float) -> Result<&mut Self> {
        let f = pochhammer_continued(a, n, &self.prec)?;
        self.absorb(f, false)?;
        self.phase += n;
        Ok(self)
    }

    /// Divide by the continued `(a)_n`; subtracts `n` from the phase exponent.
    pub fn over_continued(&mut self, a: &Float, n: &Float) -> Result<&mut Self> {
        let f = pochhammer_continued(a, n, &self.prec)?;
        self.absorb(f, true)?;
        self.phase -= n;
        Ok(self)
    }

    pub fn times_value(&mut self, v: &SignedLogReal) -> &mut Self {
        self.value = self.value.mul(v);
        self
    }

    /// Collected exponent of `(-1)`.
    pub fn phase(&self) -> &Float {
        &self.phase
    }

    /// Value without a phase check.
    pub fn unpaired(self) -> Result<SignedLogReal> {
        if let Some(argument) = self.pole {
            return Err(Error::Pole { argument });
        }
        if self.zeros > 0 {
            return Ok(SignedLogReal::zero(self.prec.bits()));
        }
        Ok(self.value)
    }

    /// Value after checking the collected phase equals `expected` up to an
    /// even integer.
    pub fn paired(self, expected: &Float) -> Result<SignedLogReal> {
        let gap = Float::with_val(self.prec.bits(), &self.phase - expected);
        let half = Float::with_val(self.prec.bits(), &gap / 2);
        match near_integer(&half, &self.prec.identity_tolerance()) {
            Some(_) => self.unpaired(),
            None => Err(Error::UnpairedPhase { exponent: short(&gap) }),
        }
    }
}
