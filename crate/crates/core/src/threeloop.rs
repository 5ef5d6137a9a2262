//! Three-loop two-point diagram built by inserting a one-loop bubble into
//! the `l` line of the master diagram.

use num_rational::Rational64;
use rug::Float;

use crate::error::{Error, Result};
use crate::hyper::{pfq_unit, PfqParams};
use crate::master::{assemble_master_general, bubble, MasterExponents};
use crate::numerics::{cos_pi, gamma_ratio, SignedLogReal};
use crate::precision::{short, Precision};
use crate::value::{Affine, LoopValue};

/// Dimensions within `1e-3` of which the closed form is singular.
pub const SINGULAR_DIMENSIONS: [(i64, i64); 10] = [
    (2, 1),
    (5, 2),
    (8, 3),
    (3, 1),
    (10, 3),
    (4, 1),
    (14, 3),
    (5, 1),
    (16, 3),
    (6, 1),
];

const SINGULAR_RADIUS: f64 = 1e-3;

/// Exponents `(e, f)` of the inserted bubble and `(g, h, i, j)` of the
/// remaining master lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLoopExponents {
    pub e: Float,
    pub f: Float,
    pub g: Float,
    pub h: Float,
    pub i: Float,
    pub j: Float,
}

impl ThreeLoopExponents {
    pub fn all_minus_one(prec: &Precision) -> Self {
        let m = prec.float(-1);
        Self {
            e: m.clone(),
            f: m.clone(),
            g: m.clone(),
            h: m.clone(),
            i: m.clone(),
            j: m,
        }
    }

    pub fn from_slice(values: &[Float]) -> Result<Self> {
        match values {
            [e, f, g, h, i, j] => Ok(Self {
                e: e.clone(),
                f: f.clone(),
                g: g.clone(),
                h: h.clone(),
                i: i.clone(),
                j: j.clone(),
            }),
            _ => Err(Error::InvalidInput(format!(
                "three-loop diagram needs 6 exponents (e,f,g,h,i,j), got {}",
                values.len()
            ))),
        }
    }

    /// Master exponents with `l` replaced by the bubble's `sigma1 = e+f+D/2`.
    pub fn master_exponents(&self, dim: &Float) -> MasterExponents {
        let bits = dim.prec();
        let l = Float::with_val(bits, &self.e + &self.f) + Float::with_val(bits, dim / 2u32);
        MasterExponents::new(self.g.clone(), self.h.clone(), self.i.clone(), self.j.clone(), l)
    }
}

/// Bubble coefficient times the master series evaluated at `l = sigma1`.
pub fn compose_threeloop(te: &ThreeLoopExponents, dim: &Float, prec: &Precision) -> Result<LoopValue> {
    let bits = prec.bits();
    let inner = bubble(&te.e, &te.f, dim, prec)?;
    let outer = assemble_master_general(&te.master_exponents(dim), dim, prec)?;
    let mut out = inner.mul(&outer)?;
    let constant = Float::with_val(bits, &te.e + &te.f) + &te.g + &te.h + &te.i + &te.j;
    out.p2_exponent = Affine::new(constant, Rational64::new(3, 2));
    Ok(out)
}

fn check_dim(dim: &Float) -> Result<()> {
    if !(*dim > 2 && *dim < 6) {
        return Err(Error::InvalidInput(format!("D = {} outside (2, 6)", short(dim))));
    }
    for (n, d) in SINGULAR_DIMENSIONS {
        let gap = Float::with_val(dim.prec(), dim - Float::with_val(dim.prec(), n) / d).abs();
        if gap < SINGULAR_RADIUS {
            let at = if d == 1 { n.to_string() } else { format!("{n}/{d}") };
            return Err(Error::Pole {
                argument: format!("D = {} is within {SINGULAR_RADIUS} of {at}", short(dim)),
            });
        }
    }
    Ok(())
}

/// Closed form of the all-`-1` three-loop diagram,
/// `2 pi^(3D/2) (p^2)^(3D/2-6) G(D/2-1)^3 G(5-3D/2) / (D-3)
///  * { cos(pi D) G(2-D/2) G(3-D)
///      - G(D/2-1) / ((3D/2-4) G(2D-5)) 3F2(1, D-2, 3D/2-4; 2D-5, 3D/2-3 | 1) }`.
pub fn threeloop_closed_form(dim: &Float, prec: &Precision) -> Result<LoopValue> {
    check_dim(dim)?;
    let bits = prec.bits();
    let d = |a: i32, num: i32, den: u32| Float::with_val(bits, dim * num) / den + a;
    let g1 = d(-1, 1, 2);
    let prefactor = gamma_ratio(&[g1.clone(), g1.clone(), g1.clone(), d(5, -3, 2)], &[], prec)?
        .mul(&SignedLogReal::from_real(&(prec.float(2) / d(-3, 1, 1))));
    let first = gamma_ratio(&[d(2, -1, 2), d(3, -1, 1)], &[], prec)?.mul(&SignedLogReal::from_real(&cos_pi(dim)));
    let series = pfq_unit(
        &PfqParams::new(
            vec![prec.float(1), d(-2, 1, 1), d(-4, 3, 2)],
            vec![d(-5, 2, 1), d(-3, 3, 2)],
        ),
        prec,
    )?;
    let second =
        gamma_ratio(&[g1], &[d(-5, 2, 1)], prec)?.mul(&SignedLogReal::from_real(&(series.value.clone() / d(-4, 3, 2))));
    let bracket = first.add(&second.neg());
    let coefficient = prefactor.mul(&bracket);
    let scale = Float::with_val(bits, coefficient.to_real().abs());
    let mut diagnostics = series.diagnostics();
    diagnostics.tail_bound = scale * &series.tail_bound;
    let p2 = Affine::new(prec.float(-6), Rational64::new(3, 2));
    Ok(LoopValue::new(coefficient, Affine::of_dim(bits, 3, 2), p2, dim).with_diagnostics(diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.abs_ref())).to_f64()
    }

    #[test]
    fn composition_matches_closed_form() {
        let prec = Precision::with_digits(40).unwrap();
        let te = ThreeLoopExponents::all_minus_one(&prec);
        for d in [36u32, 42] {
            let dim = prec.float(d) / 10u32;
            let a = compose_threeloop(&te, &dim, &prec).unwrap();
            let c = threeloop_closed_form(&dim, &prec).unwrap();
            assert!(rel(&a.coefficient_real(), &c.coefficient_real()) < 1e-25, "D = {dim}");
            assert_eq!(a.pi_exponent, c.pi_exponent);
            assert!(rel(&a.p2_exponent_value(), &c.p2_exponent_value()) < 1e-30);
        }
    }

    #[test]
    fn singular_dimensions_rejected() {
        let prec = Precision::with_digits(30).unwrap();
        for d in [4.0, 10.0 / 3.0, 4.0005, 5.0 / 2.0] {
            assert!(matches!(
                threeloop_closed_form(&prec.float(d), &prec),
                Err(Error::Pole { .. })
            ));
        }
        assert!(threeloop_closed_form(&prec.float(4.01), &prec).is_ok());
    }
}
