//! The one-loop bubble and the two-loop master self-energy.
//!
//! The master integral with exponents `(g, h, i, j, l)` is
//! `pi^D (p^2)^Omega [C1 F1 + C2 F2 + C3 F3]`, where each `Fn` is an outer
//! sum over `4F3(... | 1)` and each `Cn` a Pochhammer product. The
//! continued coefficients come from mapping every Pochhammer symbol with a
//! dimension-dependent index through `(a)_n -> (-1)^n/(1-a)_{-n}`; the
//! collected phase is checked to be `(-1)^(-D)` before it is cancelled
//! against `(-pi)^D`.

use rug::Float;

use crate::appell::{extrapolate_pair, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::hyper::{gauss_2f1_unit, outer_sum, OuterSumSpec, SeriesValue};
use crate::numerics::{gamma_ratio, near_integer, ContinuedProduct, SignedLogReal};
use crate::precision::{short, Precision};
use crate::value::{Affine, Diagnostics, LoopValue};

/// Propagator exponents of the master diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterExponents {
    pub g: Float,
    pub h: Float,
    pub i: Float,
    pub j: Float,
    pub l: Float,
}

impl MasterExponents {
    pub fn new(g: Float, h: Float, i: Float, j: Float, l: Float) -> Self {
        Self { g, h, i, j, l }
    }

    /// Every exponent equal to `-1`: the physical master diagram.
    pub fn all_minus_one(prec: &Precision) -> Self {
        let m = prec.float(-1);
        Self::new(m.clone(), m.clone(), m.clone(), m.clone(), m)
    }

    pub fn from_slice(values: &[Float]) -> Result<Self> {
        match values {
            [g, h, i, j, l] => Ok(Self::new(g.clone(), h.clone(), i.clone(), j.clone(), l.clone())),
            _ => Err(Error::InvalidInput(format!(
                "master diagram needs 5 exponents (g,h,i,j,l), got {}",
                values.len()
            ))),
        }
    }

    pub fn as_array(&self) -> [&Float; 5] {
        [&self.g, &self.h, &self.i, &self.j, &self.l]
    }

    /// `(h, g, j, i, l)`, the image under `q -> p - q`, `k -> p - k`.
    pub fn reflected(&self) -> Self {
        Self::new(
            self.h.clone(),
            self.g.clone(),
            self.j.clone(),
            self.i.clone(),
            self.l.clone(),
        )
    }

    /// `(i, j, g, h, l)`, the image under `k <-> q`.
    pub fn exchanged(&self) -> Self {
        Self::new(
            self.i.clone(),
            self.j.clone(),
            self.g.clone(),
            self.h.clone(),
            self.l.clone(),
        )
    }

    pub fn sigmas(&self, dim: &Float) -> SigmaSet {
        let bits = dim.prec();
        let half = Float::with_val(bits, dim / 2u32);
        let sigma = Float::with_val(bits, &self.i + &self.j) + &self.l + &half;
        let sigma_prime = Float::with_val(bits, &self.g + &self.h) + &half;
        let omega = Float::with_val(bits, &sigma + &sigma_prime);
        SigmaSet {
            sigma,
            sigma_prime,
            omega,
        }
    }

    fn check_negative_integers(&self, prec: &Precision) -> Result<()> {
        for (name, x) in ["g", "h", "i", "j", "l"].iter().zip(self.as_array()) {
            match near_integer(x, &prec.pole_radius()) {
                Some(k) if k < 0 => {}
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "exponent {name} = {} must be a negative integer",
                        short(x)
                    )))
                }
            }
        }
        Ok(())
    }
}

/// `sigma = i+j+l+D/2`, `sigma' = g+h+D/2`, `Omega = sigma + sigma'`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSet {
    pub sigma: Float,
    pub sigma_prime: Float,
    pub omega: Float,
}

fn half(dim: &Float) -> Float {
    Float::with_val(dim.prec(), dim / 2u32)
}

/// `1 + x`.
fn inc(x: &Float) -> Float {
    Float::with_val(x.prec(), x + 1u32)
}

fn neg(x: &Float) -> Float {
    Float::with_val(x.prec(), -x)
}

/// `-(2x + D/2)`.
fn twice_down(x: &Float, dim: &Float) -> Float {
    neg(&(Float::with_val(x.prec(), x * 2u32) + half(dim)))
}

/// The pair sorted so that the bubble is bitwise symmetric in `e, f`.
fn ordered<'a>(e: &'a Float, f: &'a Float) -> (&'a Float, &'a Float) {
    if e <= f {
        (e, f)
    } else {
        (f, e)
    }
}

/// One-loop bubble `int d^Dq (q^2)^e ((q-p)^2)^f` in positive dimension:
/// `pi^(D/2) (p^2)^sigma1 (-e)_sigma1 (-f)_sigma1 / (-sigma1)_{2 sigma1 + D/2}`.
pub fn bubble(e: &Float, f: &Float, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    let (e, f) = ordered(e, f);
    let bits = prec.bits();
    let sigma1 = Float::with_val(bits, e + f) + half(dim);
    let mut prod = ContinuedProduct::new(prec);
    prod.times_continued(&inc(&sigma1), &twice_down(&sigma1, dim))?;
    prod.over_continued(&inc(e), &neg(&sigma1))?;
    prod.over_continued(&inc(f), &neg(&sigma1))?;
    let coefficient = prod.paired(&neg(&half(dim)))?;
    let p2 = Affine::new(Float::with_val(bits, e + f), num_rational::Rational64::new(1, 2));
    Ok(LoopValue::new(coefficient, Affine::of_dim(bits, 1, 2), p2, dim))
}

/// The bubble as a literal gamma ratio,
/// `(-pi)^(D/2) (p^2)^sigma1 (1+sigma1)_{-2 sigma1 - D/2} / ((1+e)_{-sigma1} (1+f)_{-sigma1})`,
/// with the `(-1)^(D/2)` kept pending.
pub fn bubble_ndim(e: &Float, f: &Float, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    let (e, f) = ordered(e, f);
    let bits = prec.bits();
    let sigma1 = Float::with_val(bits, e + f) + half(dim);
    let mut prod = ContinuedProduct::new(prec);
    prod.times(&inc(&sigma1), &twice_down(&sigma1, dim))?;
    prod.over(&inc(e), &neg(&sigma1))?;
    prod.over(&inc(f), &neg(&sigma1))?;
    let coefficient = prod.unpaired()?;
    let p2 = Affine::new(Float::with_val(bits, e + f), num_rational::Rational64::new(1, 2));
    Ok(LoopValue::new(coefficient, Affine::of_dim(bits, 1, 2), p2, dim).with_phase(Affine::of_dim(bits, 1, 2)))
}

/// Coefficient groups shared by both conventions.
struct Groups<'a> {
    me: &'a MasterExponents,
    s: SigmaSet,
    dim: &'a Float,
}

impl Groups<'_> {
    fn standard(&self, prod: &mut ContinuedProduct, u: &Float, v: &Float, continued: bool) -> Result<()> {
        let s = &self.s.sigma;
        let top = twice_down(s, self.dim);
        if continued {
            prod.times_continued(&inc(s), &top)?;
            prod.over_continued(&inc(u), &neg(s))?;
            prod.over_continued(&inc(v), &neg(s))?;
        } else {
            prod.times(&inc(s), &top)?;
            prod.over(&inc(u), &neg(s))?;
            prod.over(&inc(v), &neg(s))?;
        }
        Ok(())
    }

    /// `(1+x)_{-2x-D/2} / ((1+a)_{-x} (1+b)_{-x})`.
    fn second(&self, prod: &mut ContinuedProduct, x: &Float, a: &Float, b: &Float, continued: bool) -> Result<()> {
        let top = twice_down(x, self.dim);
        if continued {
            prod.times_continued(&inc(x), &top)?;
            prod.over_continued(&inc(a), &neg(x))?;
            prod.over_continued(&inc(b), &neg(x))?;
        } else {
            prod.times(&inc(x), &top)?;
            prod.over(&inc(a), &neg(x))?;
            prod.over(&inc(b), &neg(x))?;
        }
        Ok(())
    }

    /// `(-1)^t (-sigma)_t / (1+w-sigma)_t`. Continued: the phase-free
    /// `(-sigma)_t / (sigma-w-t)_t`, equal to it at integer `t`.
    fn ratio(
        &self,
        prod: &mut ContinuedProduct,
        t: &Float,
        w: &Float,
        continued: bool,
        prec: &Precision,
    ) -> Result<()> {
        let s = &self.s.sigma;
        prod.times(&neg(s), t)?;
        if continued {
            let base = Float::with_val(s.prec(), s - w) - t;
            prod.over(&base, t)?;
        } else {
            let base = Float::with_val(s.prec(), inc(w) - s);
            prod.over(&base, t)?;
            match near_integer(t, &prec.pole_radius()) {
                Some(k) if k % 2 != 0 => {
                    prod.times_value(&SignedLogReal::from_real(&prec.float(-1)));
                }
                Some(_) => {}
                None => return Err(Error::NonIntegerPhase { exponent: short(t) }),
            }
        }
        Ok(())
    }

    fn coefficient(&self, n: usize, continued: bool, prec: &Precision) -> Result<SignedLogReal> {
        let me = self.me;
        let s = &self.s;
        let bits = prec.bits();
        let mut prod = ContinuedProduct::new(prec);
        match n {
            1 => {
                self.standard(&mut prod, &me.i, &me.l, continued)?;
                let g_sigma = Float::with_val(bits, &me.g + &s.sigma);
                self.second(&mut prod, &s.omega, &g_sigma, &me.h, continued)?;
            }
            2 => {
                self.standard(&mut prod, &me.i, &me.j, continued)?;
                self.ratio(&mut prod, &me.l, &me.j, continued, prec)?;
                let shifted = Float::with_val(bits, &s.sigma_prime + &me.l);
                let g_l = Float::with_val(bits, &me.g + &me.l);
                self.second(&mut prod, &shifted, &g_l, &me.h, continued)?;
            }
            3 => {
                self.standard(&mut prod, &me.j, &me.l, continued)?;
                self.ratio(&mut prod, &me.i, &me.l, continued, prec)?;
                let shifted = Float::with_val(bits, &s.omega - &me.i);
                let h_shift = Float::with_val(bits, &me.h + &s.sigma) - &me.i;
                self.second(&mut prod, &shifted, &me.g, &h_shift, continued)?;
            }
            _ => return Err(Error::InvalidInput(format!("coefficient index {n} is not 1, 2 or 3"))),
        }
        if continued {
            prod.paired(&neg(self.dim))
        } else {
            prod.unpaired()
        }
    }
}

/// Literal coefficients `C1, C2, C3`, including the `(-1)^l` and `(-1)^i`
/// phases of `C2` and `C3`.
pub fn master_coefficients_preac(me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<[SignedLogReal; 3]> {
    let groups = Groups {
        me,
        s: me.sigmas(dim),
        dim,
    };
    Ok([
        groups.coefficient(1, false, prec)?,
        groups.coefficient(2, false, prec)?,
        groups.coefficient(3, false, prec)?,
    ])
}

/// Continued coefficients `C1^AC, C2^AC, C3^AC` with the `(-1)^D` phase
/// already paired against `(-pi)^D`.
pub fn master_coefficients_ac(me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<[SignedLogReal; 3]> {
    let groups = Groups {
        me,
        s: me.sigmas(dim),
        dim,
    };
    Ok([
        groups.coefficient(1, true, prec)?,
        groups.coefficient(2, true, prec)?,
        groups.coefficient(3, true, prec)?,
    ])
}

/// Outer-sum structure of `Fn`.
pub fn master_series_spec(n: usize, me: &MasterExponents, dim: &Float) -> Result<OuterSumSpec> {
    let bits = dim.prec();
    let s = me.sigmas(dim);
    let hd = half(dim);
    let f = |x: Float| x;
    let (sig, sp, om) = (&s.sigma, &s.sigma_prime, &s.omega);
    let w = |v: &Float| Float::with_val(bits, v);
    let spec = match n {
        1 => OuterSumSpec {
            outer_numerators: [neg(&me.j), neg(sig), inc(&me.h), w(sp) - &me.g],
            outer_denominators: [w(&inc(&me.h)) - om, neg(&me.g) - sig, w(&inc(&me.i)) - sig],
            inner_numerators: [f(Float::with_val(bits, 1 - w(om)) - &hd), neg(om)],
            inner_denominator: w(&inc(&me.l)) - sig,
        },
        2 => OuterSumSpec {
            outer_numerators: [neg(&me.l), w(sig) - &me.j - &me.l, inc(&me.h), w(sp) - &me.g],
            outer_denominators: [w(&inc(&me.h)) - sp - &me.l, neg(&me.g) - &me.l, w(&inc(&me.i)) - sig],
            inner_numerators: [Float::with_val(bits, 1 - w(sp)) - &me.l - &hd, neg(sp) - &me.l],
            inner_denominator: Float::with_val(bits, 1 - w(&me.l)) + sig,
        },
        3 => OuterSumSpec {
            outer_numerators: [
                neg(&me.i),
                w(sig) - &me.i - &me.l,
                w(&inc(&me.h)) + sig - &me.i,
                w(om) - &me.g - &me.i,
            ],
            outer_denominators: [
                w(&inc(om)) - &me.i,
                w(om) - &me.i + &hd,
                Float::with_val(bits, 1 - w(&me.i)) + sig,
            ],
            inner_numerators: [inc(&me.g), w(sp) - &me.h],
            inner_denominator: w(&inc(&me.j)) - sig,
        },
        _ => return Err(Error::InvalidInput(format!("series index {n} is not 1, 2 or 3"))),
    };
    Ok(spec)
}

/// The series `Fn` as a terminating outer sum of unit-argument `4F3`.
pub fn master_f_series(n: usize, me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<SeriesValue> {
    outer_sum(&master_series_spec(n, me, dim)?, prec)
}

fn assemble_direct(me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    let bits = prec.bits();
    let coefficients = master_coefficients_ac(me, dim, prec)?;
    let mut total = SignedLogReal::zero(bits);
    let mut diagnostics = Diagnostics::new(bits);
    for (n, c) in coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let series = master_f_series(n + 1, me, dim, prec)?;
        diagnostics.absorb(&series.diagnostics(), &c.to_real());
        total = total.add(&c.mul(&SignedLogReal::from_real(&series.value)));
    }
    let constant = Float::with_val(bits, &me.g + &me.h) + &me.i + &me.j + &me.l;
    let p2 = Affine::new(constant, num_rational::Rational64::from_integer(1));
    Ok(LoopValue::new(total, Affine::of_dim(bits, 1, 1), p2, dim).with_diagnostics(diagnostics))
}

/// Master integral for any exponents whose series terminate; `l` may be
/// non-integer. A pole at integer `l` is resolved by evaluating at
/// `l + delta` and `l + 2 delta` and extrapolating linearly.
pub fn assemble_master_general(me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    match assemble_direct(me, dim, prec) {
        Err(e @ (Error::Pole { .. } | Error::DoublePole { .. } | Error::DenominatorPole { .. })) => {
            if near_integer(&me.l, &prec.pole_radius()).is_none() {
                return Err(e);
            }
            let shifted = |k: u32| {
                let mut m = me.clone();
                m.l = Float::with_val(prec.bits(), &me.l + prec.float(DEFAULT_DELTA) * k);
                m
            };
            let near = assemble_direct(&shifted(1), dim, prec)?;
            let far = assemble_direct(&shifted(2), dim, prec)?;
            let mut out = extrapolate_pair(near, &far);
            out.p2_exponent = assemble_p2(me, prec);
            Ok(out)
        }
        other => other,
    }
}

fn assemble_p2(me: &MasterExponents, prec: &Precision) -> Affine {
    let constant = Float::with_val(prec.bits(), &me.g + &me.h) + &me.i + &me.j + &me.l;
    Affine::new(constant, num_rational::Rational64::from_integer(1))
}

/// Master integral `pi^D (p^2)^Omega [C1^AC F1 + C2^AC F2 + C3^AC F3]` for
/// negative-integer exponents.
pub fn assemble_master(me: &MasterExponents, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    me.check_negative_integers(prec)?;
    assemble_master_general(me, dim, prec)
}

fn check_dim(dim: &Float, prec: &Precision) -> Result<()> {
    if !(*dim > 2 && *dim < 6) {
        return Err(Error::InvalidInput(format!("D = {} outside (2, 6)", short(dim))));
    }
    if let Some(k) = near_integer(dim, &prec.pole_radius()) {
        if k % 2 == 0 {
            return Err(Error::Pole {
                argument: format!("D = {k}"),
            });
        }
    }
    Ok(())
}

/// Gauss summation of `2F1(a, b; c | 1)` as a signed value.
fn gauss(a: &Float, b: &Float, c: &Float, prec: &Precision) -> Result<SignedLogReal> {
    gauss_2f1_unit(a, b, c, prec)?.finite()
}

/// All-`-1` master integral written as three Gauss-summable `2F1` terms.
pub fn master_2f1_form(dim: &Float, prec: &Precision) -> Result<LoopValue> {
    check_dim(dim, prec)?;
    let bits = prec.bits();
    let me = MasterExponents::all_minus_one(prec);
    let SigmaSet {
        sigma: s,
        sigma_prime: sp,
        omega: om,
    } = me.sigmas(dim);
    let hd = half(dim);
    let w = |v: &Float| Float::with_val(bits, v);
    let one = prec.float(1);

    let prefactor = gamma_ratio(&[inc(&s), inc(&s), neg(&s)], &[w(&s) + &hd], prec)?;
    let t1 = gamma_ratio(&[inc(&sp), inc(&om), neg(&om)], &[1 - w(&s), w(&om) + &hd], prec)?.mul(&gauss(
        &one,
        &(1 - w(&om) - &hd),
        &(1 - w(&s)),
        prec,
    )?);
    let t2 = gamma_ratio(&[inc(&sp), w(&sp), 1 - w(&sp)], &[w(&sp) - 1u32 + &hd], prec)?.mul(&gauss(
        &one,
        &(2 - w(&sp) - &hd),
        &prec.float(2),
        prec,
    )?);
    let t3 = gamma_ratio(
        &[w(&om) + 2u32, inc(&sp), neg(&om) - 1u32],
        &[neg(&s), inc(&om) + &hd],
        prec,
    )?
    .mul(&gauss(&one, &inc(&s), &(inc(&om) + &hd), prec)?);
    let bracket = t1.add(&t2.neg()).add(&t3.neg());
    let p2 = Affine::new(prec.float(-5), num_rational::Rational64::from_integer(1));
    Ok(LoopValue::new(
        prefactor.mul(&bracket),
        Affine::of_dim(bits, 1, 1),
        p2,
        dim,
    ))
}

/// Closed form of the all-`-1` master integral,
/// `pi^D (p^2)^(D-5) G(D/2-2)^2 G(2-D/2) G(D/2-1) / G(D-2)
///  * [G(3-D/2) G(D/2-1) / G(D-3) - G(D-3) G(5-D) / (G(3-D/2) G(3D/2-5))]`.
pub fn master_closed_form(dim: &Float, prec: &Precision) -> Result<LoopValue> {
    check_dim(dim, prec)?;
    let bits = prec.bits();
    let d = |a: i32, num: i32, den: u32| Float::with_val(bits, dim * num) / den + a;
    let prefactor = gamma_ratio(
        &[d(-2, 1, 2), d(-2, 1, 2), d(2, -1, 2), d(-1, 1, 2)],
        &[d(-2, 1, 1)],
        prec,
    )?;
    let first = gamma_ratio(&[d(3, -1, 2), d(-1, 1, 2)], &[d(-3, 1, 1)], prec)?;
    let second = gamma_ratio(&[d(-3, 1, 1), d(5, -1, 1)], &[d(3, -1, 2), d(-5, 3, 2)], prec)?;
    let bracket = first.add(&second.neg());
    let p2 = Affine::new(prec.float(-5), num_rational::Rational64::from_integer(1));
    Ok(LoopValue::new(
        prefactor.mul(&bracket),
        Affine::of_dim(bits, 1, 1),
        p2,
        dim,
    ))
}

/// The bracket of [`master_closed_form`] alone; it vanishes like `eps^3`
/// at `D = 4 - 2 eps`.
pub fn master_closed_form_bracket(dim: &Float, prec: &Precision) -> Result<SignedLogReal> {
    let bits = prec.bits();
    let d = |a: i32, num: i32, den: u32| Float::with_val(bits, dim * num) / den + a;
    let first = gamma_ratio(&[d(3, -1, 2), d(-1, 1, 2)], &[d(-3, 1, 1)], prec)?;
    let second = gamma_ratio(&[d(-3, 1, 1), d(5, -1, 1)], &[d(3, -1, 2), d(-5, 3, 2)], prec)?;
    Ok(first.add(&second.neg()))
}
