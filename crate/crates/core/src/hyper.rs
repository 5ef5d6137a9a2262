//! Generalized hypergeometric series at unit argument.
//!
//! Convergent non-terminating series are summed by extrapolating partial
//! sums in the known algebraic tail form `S_N - S ~ N^{-s} P(1/N)`, where
//! `s` is the convergence margin; two extrapolations of different order give
//! the tail bound.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{gamma_signed, nonpositive_integer, pochhammer_int, GammaEval, SignedLogReal};
use crate::precision::{short, Precision};
use crate::value::{Diagnostics, Flag};

/// Margins at or below this value flag a result as slowly convergent.
pub const SLOW_MARGIN: f64 = 0.05;

const MIN_ORDER: usize = 12;
const MAX_ATTEMPTS: usize = 10;

/// Parameter lists of `pFq(numerators; denominators | 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfqParams {
    pub numerators: Vec<Float>,
    pub denominators: Vec<Float>,
}

impl PfqParams {
    pub fn new(numerators: Vec<Float>, denominators: Vec<Float>) -> Self {
        Self {
            numerators,
            denominators,
        }
    }

    /// `(p, q)` of `pFq`.
    pub fn order(&self) -> (usize, usize) {
        (self.numerators.len(), self.denominators.len())
    }

    /// Index of the last nonzero term when some numerator is a nonpositive
    /// integer.
    pub fn termination(&self, prec: &Precision) -> Option<u64> {
        self.numerators
            .iter()
            .filter_map(|a| nonpositive_integer(a, prec))
            .map(|k| (-k) as u64)
            .min()
    }
}

/// How a unit-argument series behaves.
#[derive(Debug, Clone, PartialEq)]
pub enum Convergence {
    /// Finite polynomial with last nonzero index `M`.
    Terminating(u64),
    /// Infinite series with positive margin.
    Convergent(Float),
    /// Infinite series with nonpositive margin.
    Divergent(Float),
}

/// `s = sum(denominators) - sum(numerators)`.
pub fn convergence_margin(p: &PfqParams) -> Float {
    let bits = p
        .numerators
        .iter()
        .chain(&p.denominators)
        .map(Float::prec)
        .max()
        .unwrap_or(64);
    let mut s = Float::with_val(bits, 0);
    for b in &p.denominators {
        s += b;
    }
    for a in &p.numerators {
        s -= a;
    }
    s
}

pub fn classify(p: &PfqParams, prec: &Precision) -> Convergence {
    if let Some(m) = p.termination(prec) {
        return Convergence::Terminating(m);
    }
    let s = convergence_margin(p);
    if s.cmp0() == Some(Ordering::Greater) {
        Convergence::Convergent(s)
    } else {
        Convergence::Divergent(s)
    }
}

/// Series sum with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: Float,
    pub terms: usize,
    /// Absolute bound on the neglected remainder.
    pub tail_bound: Float,
    pub flags: Vec<Flag>,
}

impl SeriesValue {
    fn exact(value: Float, terms: usize) -> Self {
        let bits = value.prec();
        Self {
            value,
            terms,
            tail_bound: Float::with_val(bits, 0),
            flags: Vec::new(),
        }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut d = Diagnostics::new(self.value.prec());
        d.terms = self.terms;
        d.tail_bound = self.tail_bound.clone();
        for f in &self.flags {
            d.flag(*f);
        }
        d
    }
}

fn check_shape(p: &PfqParams) -> Result<()> {
    let (num, den) = p.order();
    if num != den + 1 {
        return Err(Error::InvalidInput(format!(
            "unit-argument series needs p = q + 1, got {num}F{den}"
        )));
    }
    Ok(())
}

/// Denominator that vanishes within the first `last` ratio steps.
fn denominator_pole<'a>(p: &'a PfqParams, last: Option<u64>, prec: &Precision) -> Option<&'a Float> {
    p.denominators.iter().find(|b| match nonpositive_integer(b, prec) {
        Some(k) => last.is_none_or(|m| ((-k) as u64) < m),
        None => false,
    })
}

/// Terms `t_0..t_{count-1}` via the term-ratio recurrence.
fn series_terms(p: &PfqParams, count: usize, bits: u32) -> Vec<Float> {
    let num: Vec<Float> = p.numerators.iter().map(|a| Float::with_val(bits, a)).collect();
    let den: Vec<Float> = p.denominators.iter().map(|b| Float::with_val(bits, b)).collect();
    let mut out = Vec::with_capacity(count);
    let mut t = Float::with_val(bits, 1);
    for m in 0..count {
        out.push(t.clone());
        for a in &num {
            t *= Float::with_val(bits, a + m as u32);
        }
        for b in &den {
            t /= Float::with_val(bits, b + m as u32);
        }
        t /= (m + 1) as u32;
    }
    out
}

/// `pFq(... | 1)` by direct summation when terminating, otherwise by
/// algebraic-tail extrapolation of the partial sums.
pub fn pfq_unit(p: &PfqParams, prec: &Precision) -> Result<SeriesValue> {
    check_shape(p)?;
    match classify(p, prec) {
        Convergence::Terminating(m) => {
            if let Some(b) = denominator_pole(p, Some(m), prec) {
                return Err(Error::DenominatorPole { parameter: short(b) });
            }
            let count = m as usize + 1;
            if count > prec.max_terms() {
                return Err(Error::MaxTermsExceeded {
                    max_terms: prec.max_terms(),
                });
            }
            let bits = prec.extended_bits();
            let mut sum = Float::with_val(bits, 0);
            for t in series_terms(p, count, bits) {
                sum += t;
            }
            Ok(SeriesValue::exact(Float::with_val(prec.bits(), sum), count))
        }
        Convergence::Divergent(s) => Err(Error::NonConvergent { margin: short(&s) }),
        Convergence::Convergent(s) => {
            if let Some(b) = denominator_pole(p, None, prec) {
                return Err(Error::DenominatorPole { parameter: short(b) });
            }
            let mut result = sum_infinite(p, &s, prec)?;
            if s <= SLOW_MARGIN {
                result.flags.push(Flag::SlowConvergence);
            }
            Ok(result)
        }
    }
}

fn largest_parameter(p: &PfqParams) -> f64 {
    p.numerators
        .iter()
        .chain(&p.denominators)
        .map(|x| x.to_f64().abs())
        .fold(1.0, f64::max)
}

fn sum_infinite(p: &PfqParams, s: &Float, prec: &Precision) -> Result<SeriesValue> {
    let tol = prec.tolerance();
    let scale_floor = largest_parameter(p);
    let mut order = MIN_ORDER.max(prec.digits() as usize / 2);
    let mut previous: Option<Float> = None;
    for attempt in 0..MAX_ATTEMPTS {
        let start = (2 * order).max((8.0 * scale_floor).ceil() as usize);
        let count = start + order + 1;
        if count > prec.max_terms() {
            break;
        }
        let (estimate, scale, direct) = extrapolate(p, s, start, order, prec);
        if attempt == 0 {
            if let Some(direct) = direct {
                return Ok(direct);
            }
        }
        if let Some(prev) = previous {
            let gap = Float::with_val(prec.bits(), &estimate - &prev).abs();
            let size = Float::with_val(prec.bits(), estimate.abs_ref()).max(&scale);
            if gap <= Float::with_val(prec.bits(), &size * &tol) {
                let floor = size * prec.pow10(-(prec.digits() as i32));
                return Ok(SeriesValue {
                    value: estimate,
                    terms: count,
                    tail_bound: gap.max(&floor),
                    flags: Vec::new(),
                });
            }
        }
        previous = Some(estimate);
        order = order * 3 / 2;
    }
    Err(Error::MaxTermsExceeded {
        max_terms: prec.max_terms(),
    })
}

/// Extrapolated limit from partial sums `S_N`, `N = start..=start+order`,
/// the largest partial-sum magnitude, and the plain partial sum when the
/// direct stopping rule already holds.
fn extrapolate(
    p: &PfqParams,
    s: &Float,
    start: usize,
    order: usize,
    prec: &Precision,
) -> (Float, Float, Option<SeriesValue>) {
    let end = start + order;
    let spread = ((end * end) as f64 / order as f64).log2().max(1.0);
    let bits = prec.extended_bits() + (order as f64 * spread).ceil() as u32;
    let terms = series_terms(p, end, bits);

    let tol = prec.tolerance();
    let s_work = Float::with_val(bits, s);
    let mut partial = Vec::with_capacity(end + 1);
    let mut sum = Float::with_val(bits, 0);
    partial.push(sum.clone());
    let mut small_run = 0;
    let mut direct = None;
    for (m, t) in terms.iter().enumerate() {
        sum += t;
        partial.push(sum.clone());
        if direct.is_some() {
            continue;
        }
        let size = Float::with_val(bits, sum.abs_ref()) * &tol;
        let mag = Float::with_val(bits, t.abs_ref());
        if mag < size {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            // Algebraic tail: remainder ~ |t_m| m / s, inflated by two.
            let tail = Float::with_val(bits, &mag * (m + 1) as u32) / &s_work * 2u32;
            if tail < size {
                direct = Some(SeriesValue {
                    value: Float::with_val(prec.bits(), &sum),
                    terms: m + 1,
                    tail_bound: Float::with_val(prec.bits(), tail),
                    flags: Vec::new(),
                });
            }
        }
    }

    let nodes: Vec<Float> = (start..=end).map(|n| Float::with_val(bits, n).recip()).collect();
    let weights: Vec<Float> = (start..=end).map(|n| Float::with_val(bits, n).pow(&s_work)).collect();
    let scaled: Vec<Float> = (start..=end)
        .zip(&weights)
        .map(|(n, w)| Float::with_val(bits, &partial[n] * w))
        .collect();
    let top = divided_difference(scaled, &nodes);
    let bottom = divided_difference(weights, &nodes);
    let largest = partial.iter().fold(Float::with_val(prec.bits(), 0), |acc, x| {
        acc.max(&Float::with_val(prec.bits(), x.abs_ref()))
    });
    (Float::with_val(prec.bits(), top / bottom), largest, direct)
}

/// Highest-order divided difference of `values` over `nodes`.
fn divided_difference(mut values: Vec<Float>, nodes: &[Float]) -> Float {
    let n = values.len();
    for k in 1..n {
        for q in (k..n).rev() {
            let step = Float::with_val(values[q].prec(), &nodes[q] - &nodes[q - k]);
            let diff = Float::with_val(values[q].prec(), &values[q] - &values[q - 1]);
            values[q] = diff / step;
        }
    }
    values.pop().expect("at least one node")
}

/// Gauss summation `2F1(a, b; c | 1) = G(c)G(c-a-b) / (G(c-a)G(c-b))`.
///
/// Terminating cases use the Chu-Vandermonde product `(c-b)_n / (c)_n`.
pub fn gauss_2f1_unit(a: &Float, b: &Float, c: &Float, prec: &Precision) -> Result<GammaEval> {
    let bits = prec.bits();
    let terminating = [(a, b), (b, a)]
        .into_iter()
        .filter_map(|(x, other)| nonpositive_integer(x, prec).map(|k| (-k, other)))
        .min_by_key(|(n, _)| *n);
    if let Some((n, other)) = terminating {
        let shifted = Float::with_val(bits, c - other);
        let top = pochhammer_int(&shifted, n, prec);
        let bottom = pochhammer_int(c, n, prec);
        let bottom = bottom.finite()?;
        if bottom.is_zero() {
            return Err(Error::DenominatorPole { parameter: short(c) });
        }
        let top = top.finite()?;
        return Ok(GammaEval::Value(top.div(&bottom).expect("nonzero")));
    }
    let excess = Float::with_val(bits, c - a) - b;
    let cma = Float::with_val(bits, c - a);
    let cmb = Float::with_val(bits, c - b);
    let num = [gamma_signed(c, prec), gamma_signed(&excess, prec)];
    let den = [gamma_signed(&cma, prec), gamma_signed(&cmb, prec)];
    let num_pole = num.iter().find(|g| g.is_pole()).cloned();
    let den_pole = den.iter().any(GammaEval::is_pole);
    match (num_pole, den_pole) {
        (Some(_), true) => Err(Error::DoublePole {
            a: format!("{}, {}", short(a), short(b)),
            n: short(c),
        }),
        (Some(pole), false) => Ok(pole),
        (None, true) => Ok(GammaEval::Value(SignedLogReal::zero(bits))),
        (None, false) => {
            let mut v = SignedLogReal::one(bits);
            for g in num {
                v = v.mul(&g.finite()?);
            }
            for g in den {
                v = v.div(&g.finite()?).expect("finite gammas are nonzero");
            }
            Ok(GammaEval::Value(v))
        }
    }
}

/// Cancel every numerator/denominator pair equal within `10^(5-digits)`.
pub fn coalesce(p: &PfqParams, prec: &Precision) -> PfqParams {
    let radius = prec.pole_radius();
    let mut denominators: Vec<Option<Float>> = p.denominators.iter().cloned().map(Some).collect();
    let mut numerators = Vec::new();
    for a in &p.numerators {
        let hit = denominators.iter().position(|b| match b {
            Some(b) => Float::with_val(a.prec(), a - b).abs() <= radius,
            None => false,
        });
        match hit {
            Some(k) => denominators[k] = None,
            None => numerators.push(a.clone()),
        }
    }
    PfqParams::new(numerators, denominators.into_iter().flatten().collect())
}

/// Coalesce, then sum: Gauss closed form for a `2F1`, series otherwise.
pub fn sum_reduced(p: &PfqParams, prec: &Precision) -> Result<SeriesValue> {
    check_shape(p)?;
    let reduced = coalesce(p, prec);
    if reduced.order() == (2, 1) {
        match classify(&reduced, prec) {
            Convergence::Divergent(s) => return Err(Error::NonConvergent { margin: short(&s) }),
            Convergence::Terminating(m) => {
                if let Some(b) = denominator_pole(&reduced, Some(m), prec) {
                    return Err(Error::DenominatorPole { parameter: short(b) });
                }
            }
            Convergence::Convergent(_) => {
                if let Some(b) = denominator_pole(&reduced, None, prec) {
                    return Err(Error::DenominatorPole { parameter: short(b) });
                }
            }
        }
        let [a, b] = [&reduced.numerators[0], &reduced.numerators[1]];
        let v = gauss_2f1_unit(a, b, &reduced.denominators[0], prec)?.real()?;
        return Ok(SeriesValue::exact(v, 0));
    }
    pfq_unit(&reduced, prec)
}

/// Double series
/// `sum_m (a)_m (b)_m (c)_m (d)_m / ((x)_m (y)_m (z)_m m!) 4F3(a+m, b+m, e, f; w, x+m, y+m | 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterSumSpec {
    /// `a, b, c, d`; `a` and `b` also shift the inner series.
    pub outer_numerators: [Float; 4],
    /// `x, y, z`; `x` and `y` also shift the inner series.
    pub outer_denominators: [Float; 3],
    /// `e, f`.
    pub inner_numerators: [Float; 2],
    /// `w`.
    pub inner_denominator: Float,
}

impl OuterSumSpec {
    /// Inner `4F3` at outer index `m`.
    pub fn inner(&self, m: u64) -> PfqParams {
        let [a, b, _, _] = &self.outer_numerators;
        let [x, y, _] = &self.outer_denominators;
        let [e, f] = &self.inner_numerators;
        let shift = |v: &Float| Float::with_val(v.prec(), v + m);
        PfqParams::new(
            vec![shift(a), shift(b), e.clone(), f.clone()],
            vec![self.inner_denominator.clone(), shift(x), shift(y)],
        )
    }

    /// Last surviving outer index, if the outer sum terminates.
    pub fn outer_termination(&self, prec: &Precision) -> Option<u64> {
        self.outer_numerators
            .iter()
            .filter_map(|a| nonpositive_integer(a, prec))
            .map(|k| (-k) as u64)
            .min()
    }

    fn inner_termination(&self, prec: &Precision) -> Option<u64> {
        self.inner_numerators
            .iter()
            .filter_map(|a| nonpositive_integer(a, prec))
            .map(|k| (-k) as u64)
            .min()
    }

    /// The same double series with summation order exchanged:
    /// `sum_k (a)_k (b)_k (e)_k (f)_k / ((w)_k (x)_k (y)_k k!) 4F3(a+k, b+k, c, d; x+k, y+k, z | 1)`.
    pub fn swapped(&self) -> OuterSumSpec {
        let [a, b, c, d] = self.outer_numerators.clone();
        let [x, y, z] = self.outer_denominators.clone();
        let [e, f] = self.inner_numerators.clone();
        OuterSumSpec {
            outer_numerators: [a, b, e, f],
            outer_denominators: [x, y, self.inner_denominator.clone()],
            inner_numerators: [c, d],
            inner_denominator: z,
        }
    }
}

/// Terms of `prod (n_i)_m / (prod (d_i)_m m!)` for `m = 0..=last`; `None`
/// once the numerator product vanishes.
fn outer_coefficients(numerators: &[Float], denominators: &[Float], last: u64, prec: &Precision) -> Result<Vec<Float>> {
    let bits = prec.extended_bits();
    let radius = prec.pole_radius();
    let mut out = Vec::new();
    let mut c = Float::with_val(bits, 1);
    for m in 0..=last {
        out.push(Float::with_val(prec.bits(), &c));
        if m == last {
            break;
        }
        let mut zero = false;
        for a in numerators {
            let f = Float::with_val(bits, a + m);
            if Float::with_val(bits, f.abs_ref()) <= radius {
                zero = true;
            }
            c *= f;
        }
        if zero {
            break;
        }
        for b in denominators {
            let f = Float::with_val(bits, b + m);
            if Float::with_val(bits, f.abs_ref()) <= radius {
                return Err(Error::DenominatorPole { parameter: short(b) });
            }
            c /= f;
        }
        c /= (m + 1) as u32;
    }
    Ok(out)
}

/// Sum of an [`OuterSumSpec`]. A terminating outer index gives a finite sum
/// of inner series; otherwise a terminating `e` or `f` allows the exchanged
/// order. Anything else is [`Error::InvalidSpec`].
pub fn outer_sum(spec: &OuterSumSpec, prec: &Precision) -> Result<SeriesValue> {
    let (spec, last) = match spec.outer_termination(prec) {
        Some(m) => (spec.clone(), m),
        None => match spec.inner_termination(prec) {
            Some(k) => (spec.swapped(), k),
            None => {
                return Err(Error::InvalidSpec(
                    "no outer numerator parameter is a nonpositive integer".into(),
                ))
            }
        },
    };
    if last as usize + 1 > prec.max_terms() {
        return Err(Error::MaxTermsExceeded {
            max_terms: prec.max_terms(),
        });
    }
    let coefficients = outer_coefficients(&spec.outer_numerators, &spec.outer_denominators, last, prec)?;
    let bits = prec.bits();
    let mut total = Float::with_val(bits, 0);
    let mut diagnostics = Diagnostics::new(bits);
    for (m, c) in coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let inner = sum_reduced(&spec.inner(m as u64), prec)?;
        total += Float::with_val(bits, c * &inner.value);
        diagnostics.absorb(&inner.diagnostics(), c);
        diagnostics.terms += 1;
    }
    Ok(SeriesValue {
        value: total,
        terms: diagnostics.terms,
        tail_bound: diagnostics.tail_bound,
        flags: diagnostics.flags,
    })
}
