//! Appell `F4` and the one-loop triangle in its four hypergeometric
//! representations.
//!
//! The triangle with exponents `(i, j, l)` on the propagators carrying
//! `q^2`, `r^2` and `p^2` is a combination of `F4` functions whose variables
//! are ratios of the three invariants. Only kinematics where every
//! non-terminating `F4` of a representation lies inside
//! `sqrt|x| + sqrt|y| < 1` can be evaluated in that representation.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::error::{Error, Result};
use crate::hyper::SeriesValue;
use crate::numerics::{near_integer, nonpositive_integer, ContinuedProduct, SignedLogReal};
use crate::precision::{short, Precision};
use crate::value::{Affine, Diagnostics, Flag, LoopValue};

/// Default shift used to approach integer exponents.
pub const DEFAULT_DELTA: f64 = 1e-3;

/// `F4(alpha, beta; gamma1, gamma2 | x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct F4Params {
    pub alpha: Float,
    pub beta: Float,
    pub gamma1: Float,
    pub gamma2: Float,
    pub x: Float,
    pub y: Float,
}

impl F4Params {
    pub fn termination(&self, prec: &Precision) -> Option<u64> {
        [&self.alpha, &self.beta]
            .into_iter()
            .filter_map(|a| nonpositive_integer(a, prec))
            .map(|k| (-k) as u64)
            .min()
    }

    /// `sqrt|x| + sqrt|y|`.
    pub fn radius(&self) -> Float {
        radius(&self.x, &self.y)
    }
}

fn radius(x: &Float, y: &Float) -> Float {
    let sx = Float::with_val(x.prec(), x.abs_ref()).sqrt();
    let sy = Float::with_val(y.prec(), y.abs_ref()).sqrt();
    sx + sy
}

/// Double series summed along anti-diagonals `a + b = n`.
///
/// Each diagonal is built from the previous one: `T(a, b)` from
/// `T(a-1, b)` for `a >= 1` and `T(0, n)` from `T(0, n-1)`.
pub fn f4(p: &F4Params, prec: &Precision) -> Result<SeriesValue> {
    let last = p.termination(prec);
    for g in [&p.gamma1, &p.gamma2] {
        if let Some(k) = nonpositive_integer(g, prec) {
            if last.is_none_or(|m| ((-k) as u64) < m) {
                return Err(Error::DenominatorPole { parameter: short(g) });
            }
        }
    }
    if last.is_none() && p.radius() >= 1 {
        return Err(Error::OutsideRegion(format!(
            "sqrt|x| + sqrt|y| = {} for x = {}, y = {}",
            short(&p.radius()),
            short(&p.x),
            short(&p.y)
        )));
    }

    let bits = prec.extended_bits();
    let tol = prec.tolerance();
    let w = |v: &Float| Float::with_val(bits, v);
    let (alpha, beta, g1, g2, x, y) = (w(&p.alpha), w(&p.beta), w(&p.gamma1), w(&p.gamma2), w(&p.x), w(&p.y));

    let mut diagonal = vec![Float::with_val(bits, 1)];
    let mut sum = Float::with_val(bits, 1);
    let mut terms = 1usize;
    let mut previous_size = Float::with_val(bits, 1);
    let mut small_run = 0;
    let mut n: u64 = 0;
    loop {
        if Some(n) == last {
            let value = Float::with_val(prec.bits(), &sum);
            return Ok(SeriesValue {
                tail_bound: Float::with_val(prec.bits(), 0),
                value,
                terms,
                flags: Vec::new(),
            });
        }
        n += 1;
        terms += n as usize + 1;
        if terms > prec.max_terms() {
            return Err(Error::MaxTermsExceeded {
                max_terms: prec.max_terms(),
            });
        }
        let growth = Float::with_val(bits, &alpha + (n - 1)) * Float::with_val(bits, &beta + (n - 1));
        let mut next = Vec::with_capacity(n as usize + 1);
        let first = Float::with_val(bits, &diagonal[0] * &growth) * &y / (Float::with_val(bits, &g2 + (n - 1)) * n);
        next.push(first);
        for a in 1..=n {
            let t = Float::with_val(bits, &diagonal[(a - 1) as usize] * &growth) * &x
                / (Float::with_val(bits, &g1 + (a - 1)) * a);
            next.push(t);
        }
        diagonal = next;

        let mut size = Float::with_val(bits, 0);
        for t in &diagonal {
            sum += t;
            size += Float::with_val(bits, t.abs_ref());
        }
        if last.is_some() {
            continue;
        }
        let threshold = Float::with_val(bits, sum.abs_ref()) * &tol;
        if size < threshold {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && size.is_zero() {
            return Ok(SeriesValue {
                value: Float::with_val(prec.bits(), &sum),
                terms,
                tail_bound: Float::with_val(prec.bits(), 0),
                flags: Vec::new(),
            });
        }
        if small_run >= 3 && previous_size > 0 {
            let ratio = Float::with_val(bits, &size / &previous_size);
            if ratio < 1 {
                let tail = Float::with_val(bits, &size * &ratio) / (1 - ratio) * 2u32;
                if tail < threshold {
                    return Ok(SeriesValue {
                        value: Float::with_val(prec.bits(), &sum),
                        terms,
                        tail_bound: Float::with_val(prec.bits(), tail),
                        flags: Vec::new(),
                    });
                }
            }
        }
        previous_size = size;
    }
}

/// Squared external momenta `p^2`, `q^2` and `r^2 = (q-p)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    pub p2: Float,
    pub q2: Float,
    pub r2: Float,
}

impl Kinematics {
    pub fn new(p2: Float, q2: Float, r2: Float) -> Result<Self> {
        for (name, v) in [("p2", &p2), ("q2", &q2), ("r2", &r2)] {
            if !(v.is_finite() && *v > 0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {}",
                    short(v)
                )));
            }
        }
        Ok(Self { p2, q2, r2 })
    }

    fn get(&self, m: Momentum) -> &Float {
        match m {
            Momentum::P => &self.p2,
            Momentum::Q => &self.q2,
            Momentum::R => &self.r2,
        }
    }

    fn ratio(&self, num: Momentum, den: Momentum) -> Float {
        Float::with_val(self.p2.prec(), self.get(num) / self.get(den))
    }
}

/// Triangle exponents; `sigma = i + j + l + D/2` is always recomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleExponents {
    pub i: Float,
    pub j: Float,
    pub l: Float,
}

impl TriangleExponents {
    pub fn new(i: Float, j: Float, l: Float) -> Self {
        Self { i, j, l }
    }

    pub fn sigma(&self, dim: &Float) -> Float {
        let half = Float::with_val(dim.prec(), dim / 2u32);
        half + &self.i + &self.j + &self.l
    }
}

/// Which hypergeometric solution is used for the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleRep {
    FourTerm,
    ThreeTermUnprimed,
    ThreeTermPrimed,
    ThreeTermDoublePrimed,
}

impl TriangleRep {
    pub const ALL: [TriangleRep; 4] = [
        TriangleRep::FourTerm,
        TriangleRep::ThreeTermUnprimed,
        TriangleRep::ThreeTermPrimed,
        TriangleRep::ThreeTermDoublePrimed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TriangleRep::FourTerm => "four-term",
            TriangleRep::ThreeTermUnprimed => "three-term",
            TriangleRep::ThreeTermPrimed => "three-term-primed",
            TriangleRep::ThreeTermDoublePrimed => "three-term-double-primed",
        }
    }

    pub fn term_count(self) -> usize {
        match self {
            TriangleRep::FourTerm => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for TriangleRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TriangleRep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriangleRep::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown representation {s:?}; expected four-term, three-term, three-term-primed or three-term-double-primed"
                ))
            })
    }
}

/// How the Pochhammer symbols of the coefficients are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// Every non-integer-index symbol continued through
    /// `(a)_n -> (-1)^n/(1-a)_{-n}`; the collected phase pairs with
    /// `(-pi)^(D/2)` to leave `pi^(D/2)`. Valid for negative exponents in
    /// positive dimension.
    #[default]
    Continued,
    /// Symbols taken literally as gamma ratios, with `(-pi)^(D/2)` kept as
    /// a pending phase. Momentum-ratio signs need integer exponents.
    Ndim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Momentum {
    P,
    Q,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    I,
    J,
    L,
    Sigma,
}

#[derive(Debug, Clone, Copy)]
enum Coefficient {
    /// `(1+sigma)_{-2sigma-D/2} / ((1+u)_{-sigma}(1+v)_{-sigma})`.
    Standard(Sym, Sym),
    /// Standard part times `(-x)^t (-sigma)_t / (1+w-sigma)_t` where `x` is
    /// the momentum ratio raised to `t`.
    Ratio { u: Sym, v: Sym, t: Sym, w: Sym },
    /// `(1-l-D/2)_{2l+D/2} / ((1+i)_{l+D/2}(1+j)_{l+D/2})`.
    Fourth,
}

/// One `Lambda * F4` term.
struct Term {
    /// Factors `(m^2)^(sign * power)`.
    monomial: Vec<(Momentum, Sym, i8)>,
    coefficient: Coefficient,
    x: (Momentum, Momentum),
    y: (Momentum, Momentum),
    params: [Float; 4],
}

struct Values {
    i: Float,
    j: Float,
    l: Float,
    sigma: Float,
    half_d: Float,
}

impl Values {
    fn new(te: &TriangleExponents, dim: &Float, bits: u32) -> Self {
        let w = |v: &Float| Float::with_val(bits, v);
        Self {
            i: w(&te.i),
            j: w(&te.j),
            l: w(&te.l),
            sigma: w(&te.sigma(dim)),
            half_d: Float::with_val(bits, dim / 2u32),
        }
    }

    fn get(&self, s: Sym) -> &Float {
        match s {
            Sym::I => &self.i,
            Sym::J => &self.j,
            Sym::L => &self.l,
            Sym::Sigma => &self.sigma,
        }
    }

    /// `c + sum of signed symbols`.
    fn lin(&self, c: i32, parts: &[(i8, Sym)]) -> Float {
        let mut v = Float::with_val(self.i.prec(), c);
        for (sign, s) in parts {
            if *sign > 0 {
                v += self.get(*s);
            } else {
                v -= self.get(*s);
            }
        }
        v
    }
}

fn terms(rep: TriangleRep, v: &Values) -> Vec<Term> {
    use Momentum::{P, Q, R};
    use Sym::{Sigma as S, I, J, L};
    let pd = |x: Float| Float::with_val(x.prec(), x + &v.half_d);
    let row1 = Term {
        monomial: vec![(P, S, 1)],
        coefficient: Coefficient::Standard(I, J),
        x: (R, P),
        y: (Q, P),
        params: [
            v.lin(0, &[(-1, L)]),
            v.lin(0, &[(-1, S)]),
            v.lin(1, &[(1, I), (-1, S)]),
            v.lin(1, &[(1, J), (-1, S)]),
        ],
    };
    let row2 = Term {
        monomial: vec![(Q, S, 1), (P, J, 1), (Q, J, -1)],
        coefficient: Coefficient::Ratio { u: I, v: L, t: J, w: L },
        x: (R, P),
        y: (Q, P),
        params: [
            v.lin(0, &[(-1, J)]),
            v.lin(0, &[(-1, J), (-1, L), (1, S)]),
            v.lin(1, &[(1, I), (-1, S)]),
            v.lin(1, &[(-1, J), (1, S)]),
        ],
    };
    let row3 = || Term {
        monomial: vec![(R, S, 1), (P, I, 1), (R, I, -1)],
        coefficient: Coefficient::Ratio { u: J, v: L, t: I, w: L },
        x: (R, P),
        y: (Q, P),
        params: [
            v.lin(0, &[(-1, I)]),
            v.lin(0, &[(-1, I), (-1, L), (1, S)]),
            v.lin(1, &[(-1, I), (1, S)]),
            v.lin(1, &[(1, J), (-1, S)]),
        ],
    };
    match rep {
        TriangleRep::FourTerm => vec![
            row1,
            row2,
            row3(),
            Term {
                monomial: vec![
                    (Q, S, 1),
                    (R, S, 1),
                    (P, S, -1),
                    (P, I, 1),
                    (R, I, -1),
                    (P, J, 1),
                    (Q, J, -1),
                ],
                coefficient: Coefficient::Fourth,
                x: (R, P),
                y: (Q, P),
                params: [
                    pd(v.lin(0, &[(1, L)])),
                    pd(v.lin(0, &[(1, S)])),
                    v.lin(1, &[(-1, I), (1, S)]),
                    v.lin(1, &[(-1, J), (1, S)]),
                ],
            },
        ],
        TriangleRep::ThreeTermUnprimed => vec![
            row1,
            row2,
            Term {
                monomial: vec![(R, S, 1), (Q, I, 1), (R, I, -1)],
                coefficient: Coefficient::Ratio { u: J, v: L, t: I, w: J },
                x: (R, Q),
                y: (P, Q),
                params: [
                    v.lin(0, &[(-1, I)]),
                    v.lin(0, &[(-1, I), (-1, J), (1, S)]),
                    v.lin(1, &[(-1, I), (1, S)]),
                    v.lin(1, &[(1, L), (-1, S)]),
                ],
            },
        ],
        TriangleRep::ThreeTermPrimed => vec![
            Term {
                monomial: vec![(Q, S, 1)],
                coefficient: Coefficient::Standard(I, L),
                x: (R, Q),
                y: (P, Q),
                params: [
                    v.lin(0, &[(-1, J)]),
                    v.lin(0, &[(-1, S)]),
                    v.lin(1, &[(1, I), (-1, S)]),
                    v.lin(1, &[(1, L), (-1, S)]),
                ],
            },
            Term {
                monomial: vec![(P, S, 1), (Q, L, 1), (P, L, -1)],
                coefficient: Coefficient::Ratio { u: I, v: J, t: L, w: J },
                x: (R, Q),
                y: (P, Q),
                params: [
                    v.lin(0, &[(-1, L)]),
                    v.lin(0, &[(-1, J), (-1, L), (1, S)]),
                    v.lin(1, &[(1, I), (-1, S)]),
                    v.lin(1, &[(-1, L), (1, S)]),
                ],
            },
            row3(),
        ],
        TriangleRep::ThreeTermDoublePrimed => vec![
            Term {
                monomial: vec![(R, S, 1)],
                coefficient: Coefficient::Standard(J, L),
                x: (Q, R),
                y: (P, R),
                params: [
                    v.lin(0, &[(-1, I)]),
                    v.lin(0, &[(-1, S)]),
                    v.lin(1, &[(1, J), (-1, S)]),
                    v.lin(1, &[(1, L), (-1, S)]),
                ],
            },
            Term {
                monomial: vec![(P, S, 1), (R, L, 1), (P, L, -1)],
                coefficient: Coefficient::Ratio { u: I, v: J, t: L, w: I },
                x: (Q, R),
                y: (P, R),
                params: [
                    v.lin(0, &[(-1, L)]),
                    v.lin(0, &[(-1, I), (-1, L), (1, S)]),
                    v.lin(1, &[(1, J), (-1, S)]),
                    v.lin(1, &[(-1, L), (1, S)]),
                ],
            },
            Term {
                monomial: vec![(Q, S, 1), (P, J, 1), (Q, J, -1)],
                coefficient: Coefficient::Ratio { u: I, v: L, t: J, w: L },
                x: (Q, P),
                y: (R, P),
                params: [
                    v.lin(0, &[(-1, J)]),
                    v.lin(0, &[(-1, J), (-1, L), (1, S)]),
                    v.lin(1, &[(-1, J), (1, S)]),
                    v.lin(1, &[(1, I), (-1, S)]),
                ],
            },
        ],
    }
}

/// Region report for one term of a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TermRegion {
    pub term: usize,
    pub x: Float,
    pub y: Float,
    /// `sqrt|x| + sqrt|y|`.
    pub radius: Float,
    pub admissible: bool,
}

/// Per-term variables of `rep` at `kin` and whether each lies inside the
/// convergence region. Termination is not considered here.
pub fn region_check(kin: &Kinematics, rep: TriangleRep) -> Vec<TermRegion> {
    let bits = kin.p2.prec();
    let zero = Float::with_val(bits, 0);
    let v = Values {
        i: zero.clone(),
        j: zero.clone(),
        l: zero.clone(),
        sigma: zero.clone(),
        half_d: zero,
    };
    terms(rep, &v)
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let x = kin.ratio(t.x.0, t.x.1);
            let y = kin.ratio(t.y.0, t.y.1);
            let radius = radius(&x, &y);
            TermRegion {
                term: n + 1,
                admissible: radius < 1,
                x,
                y,
                radius,
            }
        })
        .collect()
}

/// Whether every term of `rep` terminates or lies inside its region.
pub fn representation_admissible(
    rep: TriangleRep,
    te: &TriangleExponents,
    kin: &Kinematics,
    dim: &Float,
    prec: &Precision,
) -> bool {
    let v = Values::new(te, dim, prec.bits());
    terms(rep, &v).iter().all(|t| {
        let p = f4_params(t, kin);
        p.termination(prec).is_some() || p.radius() < 1
    })
}

fn f4_params(t: &Term, kin: &Kinematics) -> F4Params {
    let [alpha, beta, gamma1, gamma2] = t.params.clone();
    F4Params {
        alpha,
        beta,
        gamma1,
        gamma2,
        x: kin.ratio(t.x.0, t.x.1),
        y: kin.ratio(t.y.0, t.y.1),
    }
}

fn coefficient(c: Coefficient, v: &Values, convention: Convention, prec: &Precision) -> Result<SignedLogReal> {
    let bits = prec.bits();
    let one = |x: &Float| Float::with_val(bits, x + 1u32);
    let neg = |x: &Float| Float::with_val(bits, -x);
    let mut prod = ContinuedProduct::new(prec);
    let continued = convention == Convention::Continued;
    let standard = |prod: &mut ContinuedProduct, u: Sym, w: Sym| -> Result<()> {
        let s = &v.sigma;
        let top = Float::with_val(bits, s * 2u32) + &v.half_d;
        let neg_top = neg(&top);
        if continued {
            prod.times_continued(&one(s), &neg_top)?;
            prod.over_continued(&one(v.get(u)), &neg(s))?;
            prod.over_continued(&one(v.get(w)), &neg(s))?;
        } else {
            prod.times(&one(s), &neg_top)?;
            prod.over(&one(v.get(u)), &neg(s))?;
            prod.over(&one(v.get(w)), &neg(s))?;
        }
        Ok(())
    };
    match c {
        Coefficient::Standard(a, b) => standard(&mut prod, a, b)?,
        Coefficient::Ratio { u, v: w2, t, w } => {
            standard(&mut prod, u, w2)?;
            let s = &v.sigma;
            let t_val = v.get(t);
            prod.times(&neg(s), t_val)?;
            if continued {
                // (-1)^t / (1+w-sigma)_t = 1 / (sigma-w-t)_t
                let base = Float::with_val(bits, s - v.get(w)) - t_val;
                prod.over(&base, t_val)?;
            } else {
                let base = Float::with_val(bits, one(v.get(w)) - s);
                prod.over(&base, t_val)?;
                match near_integer(t_val, &prec.pole_radius()) {
                    Some(k) if k % 2 != 0 => {
                        prod.times_value(&SignedLogReal::from_real(&Float::with_val(bits, -1)));
                    }
                    Some(_) => {}
                    None => return Err(Error::NonIntegerPhase { exponent: short(t_val) }),
                }
            }
        }
        Coefficient::Fourth => {
            let lh = Float::with_val(bits, &v.l + &v.half_d);
            let two_lh = Float::with_val(bits, &v.l * 2u32) + &v.half_d;
            let base = Float::with_val(bits, 1 - &lh);
            if continued {
                prod.times_continued(&base, &two_lh)?;
                prod.over_continued(&one(&v.i), &lh)?;
                prod.over_continued(&one(&v.j), &lh)?;
            } else {
                prod.times(&base, &two_lh)?;
                prod.over(&one(&v.i), &lh)?;
                prod.over(&one(&v.j), &lh)?;
            }
        }
    }
    if continued {
        prod.paired(&neg(&v.half_d))
    } else {
        prod.unpaired()
    }
}

fn monomial(t: &Term, v: &Values, kin: &Kinematics, bits: u32) -> SignedLogReal {
    let mut log = Float::with_val(bits, 0);
    for (m, s, sign) in &t.monomial {
        let l = Float::with_val(bits, kin.get(*m).ln_ref()) * v.get(*s);
        if *sign > 0 {
            log += l;
        } else {
            log -= l;
        }
    }
    SignedLogReal::from_parts(crate::numerics::Sign::Positive, log)
}

fn evaluate(
    rep: TriangleRep,
    convention: Convention,
    te: &TriangleExponents,
    kin: &Kinematics,
    dim: &Float,
    prec: &Precision,
) -> Result<LoopValue> {
    let bits = prec.bits();
    let v = Values::new(te, dim, bits);
    let mut total = SignedLogReal::zero(bits);
    let mut diagnostics = Diagnostics::new(bits);
    for (n, t) in terms(rep, &v).iter().enumerate() {
        let params = f4_params(t, kin);
        if params.termination(prec).is_none() && params.radius() >= 1 {
            return Err(Error::OutsideRegion(format!(
                "{rep} term {} has sqrt|x| + sqrt|y| = {}",
                n + 1,
                short(&params.radius())
            )));
        }
        let lambda = coefficient(t.coefficient, &v, convention, prec)?.mul(&monomial(t, &v, kin, bits));
        if lambda.is_zero() {
            continue;
        }
        let series = f4(&params, prec)?;
        let weight = lambda.to_real();
        diagnostics.absorb(&series.diagnostics(), &weight);
        total = total.add(&lambda.mul(&SignedLogReal::from_real(&series.value)));
    }
    let mut value =
        LoopValue::new(total, Affine::of_dim(bits, 1, 2), Affine::zero(bits), dim).with_diagnostics(diagnostics);
    if convention == Convention::Ndim {
        value = value.with_phase(Affine::of_dim(bits, 1, 2));
    }
    Ok(value)
}

/// Triangle in the chosen representation and convention. In the continued
/// convention a pole at integer exponents is resolved by shifting those
/// exponents by `delta` and extrapolating `2 f(delta) - f(2 delta)`.
pub fn triangle(
    rep: TriangleRep,
    convention: Convention,
    te: &TriangleExponents,
    kin: &Kinematics,
    dim: &Float,
    prec: &Precision,
) -> Result<LoopValue> {
    match evaluate(rep, convention, te, kin, dim, prec) {
        Err(e @ (Error::Pole { .. } | Error::DoublePole { .. } | Error::DenominatorPole { .. }))
            if convention == Convention::Continued =>
        {
            let radius = prec.pole_radius();
            let integer = |x: &Float| near_integer(x, &radius).is_some();
            if !(integer(&te.i) || integer(&te.j) || integer(&te.l)) {
                return Err(e);
            }
            let shift = |k: u32| {
                let delta = prec.float(DEFAULT_DELTA) * k;
                let s = |x: &Float| {
                    if integer(x) {
                        Float::with_val(prec.bits(), x + &delta)
                    } else {
                        x.clone()
                    }
                };
                TriangleExponents::new(s(&te.i), s(&te.j), s(&te.l))
            };
            let near = evaluate(rep, convention, &shift(1), kin, dim, prec)?;
            let far = evaluate(rep, convention, &shift(2), kin, dim, prec)?;
            Ok(extrapolate_pair(near, &far))
        }
        other => other,
    }
}

/// `2 near - far` on the coefficient, flagged as extrapolated.
pub(crate) fn extrapolate_pair(near: LoopValue, far: &LoopValue) -> LoopValue {
    let mut out = near;
    let two = SignedLogReal::from_real(&Float::with_val(out.dim.prec(), 2));
    out.coefficient = out.coefficient.mul(&two).add(&far.coefficient.neg());
    out.diagnostics.terms += far.diagnostics.terms;
    out.diagnostics.flag(Flag::Extrapolated);
    out
}

/// Four-term solution in the continued convention.
pub fn triangle_4term(te: &TriangleExponents, kin: &Kinematics, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    triangle(TriangleRep::FourTerm, Convention::Continued, te, kin, dim, prec)
}

/// One of the three-term solutions in the continued convention.
pub fn triangle_3term(
    set: TriangleRep,
    te: &TriangleExponents,
    kin: &Kinematics,
    dim: &Float,
    prec: &Precision,
) -> Result<LoopValue> {
    if set == TriangleRep::FourTerm {
        return Err(Error::InvalidInput("four-term is not a three-term set".into()));
    }
    triangle(set, Convention::Continued, te, kin, dim, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::with_digits(40).unwrap()
    }

    fn kin(prec: &Precision, p2: f64, q2: f64, r2: f64) -> Kinematics {
        Kinematics::new(prec.float(p2), prec.float(q2), prec.float(r2)).unwrap()
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.abs_ref())).to_f64()
    }

    fn params(prec: &Precision, a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> F4Params {
        F4Params {
            alpha: prec.float(a),
            beta: prec.float(b),
            gamma1: prec.float(c),
            gamma2: prec.float(d),
            x: prec.float(x),
            y: prec.float(y),
        }
    }

    #[test]
    fn f4_at_origin() {
        let prec = p();
        let v = f4(&params(&prec, 0.3, 1.7, 2.1, 0.4, 0.0, 0.0), &prec).unwrap();
        assert_eq!(v.value, 1);
    }

    #[test]
    fn f4_terminating_first_order() {
        let prec = p();
        let (b, c, d, x, y) = (1.7, 2.1, 0.4, 3.0, 5.0);
        let v = f4(&params(&prec, -1.0, b, c, d, x, y), &prec).unwrap();
        let expected = 1.0 - b * x / c - b * y / d;
        assert!((v.value.to_f64() - expected).abs() < 1e-12);
    }

    #[test]
    fn region_examples() {
        let prec = p();
        let r = region_check(&kin(&prec, 1.0, 0.04, 0.09), TriangleRep::FourTerm);
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|t| t.admissible));
        let r = region_check(&kin(&prec, 1.0, 4.0, 0.09), TriangleRep::FourTerm);
        assert!(r.iter().all(|t| !t.admissible));
        let r = region_check(&kin(&prec, 1.0, 25.0, 4.0), TriangleRep::ThreeTermUnprimed);
        assert!((r[2].x.to_f64() - 0.16).abs() < 1e-15);
        assert!((r[2].y.to_f64() - 0.04).abs() < 1e-15);
        assert!(r[2].admissible);
    }

    #[test]
    fn outside_region_is_an_error() {
        let prec = p();
        let te = TriangleExponents::new(prec.float(-1.1), prec.float(-0.9), prec.float(-1.05));
        let e = triangle_4term(&te, &kin(&prec, 1.0, 4.0, 0.09), &prec.float(4.6), &prec);
        assert!(matches!(e, Err(Error::OutsideRegion(_))));
    }

    #[test]
    fn four_term_exchange_symmetry() {
        let prec = p();
        let d = prec.float(4.6);
        let a = TriangleExponents::new(prec.float(-1.1), prec.float(-0.9), prec.float(-1.05));
        let b = TriangleExponents::new(prec.float(-0.9), prec.float(-1.1), prec.float(-1.05));
        let va = triangle_4term(&a, &kin(&prec, 1.0, 0.04, 0.09), &d, &prec).unwrap();
        let vb = triangle_4term(&b, &kin(&prec, 1.0, 0.09, 0.04), &d, &prec).unwrap();
        assert!(rel(&va.coefficient_real(), &vb.coefficient_real()) < 1e-30);
    }

    #[test]
    fn ndim_ratio_phase_needs_integer_exponent() {
        let prec = p();
        let te = TriangleExponents::new(prec.float(0.5), prec.float(1.5), prec.float(2.0));
        let r = triangle(
            TriangleRep::ThreeTermUnprimed,
            Convention::Ndim,
            &te,
            &kin(&prec, 1.0, 0.04, 0.09),
            &prec.float(-7.3),
            &prec,
        );
        assert!(matches!(r, Err(Error::NonIntegerPhase { .. })));
    }
}
