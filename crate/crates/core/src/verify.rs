//! Cross-validation suites: every check compares two independent routes to
//! the same number and reports the worst relative disagreement.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::appell::{triangle, Convention, Kinematics, TriangleExponents, TriangleRep};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hyper::{gauss_2f1_unit, pfq_unit, sum_reduced, PfqParams};
use crate::master::{assemble_master, bubble, master_2f1_form, master_closed_form, MasterExponents};
use crate::numerics::{gamma_ratio, near_integer, pochhammer_ac};
use crate::precision::{decimal, Precision};
use crate::threeloop::{compose_threeloop, threeloop_closed_form, ThreeLoopExponents};
use crate::value::Flag;

/// Closed-form grid: ten dimensions in `(3.1, 4.9)` without `D = 4`.
pub const MASTER_DIMS: [&str; 10] = ["3.2", "3.35", "3.5", "3.65", "3.8", "4.15", "4.3", "4.45", "4.6", "4.8"];
/// Admissible dimensions for the three-loop composition.
pub const THREELOOP_DIMS: [&str; 10] = ["3.4", "3.5", "3.6", "3.7", "3.8", "3.9", "4.1", "4.2", "4.3", "4.4"];
pub const BUBBLE_DIMS: [&str; 3] = ["3", "3.5", "4.4"];
/// `D = 4 - 2 eps` offsets for the finite four-dimensional limit.
pub const EPSILONS: [&str; 3] = ["1e-2", "1e-3", "1e-4"];
/// Dimension at which the exchange catalog is evaluated.
pub const SYMMETRY_DIM: &str = "5.5";
/// Fixed `(g, h, i, j, l)` catalog for the exchange symmetries.
pub const SYMMETRY_CATALOG: [[i32; 5]; 12] = [
    [-1, -1, -1, -1, -1],
    [-1, -1, -1, -1, -2],
    [-1, -1, -1, -1, -3],
    [-1, -1, -1, -2, -1],
    [-1, -1, -2, -1, -1],
    [-1, -1, -2, -2, -1],
    [-1, -2, -1, -1, -1],
    [-2, -1, -1, -1, -1],
    [-1, -2, -2, -1, -1],
    [-2, -2, -1, -1, -1],
    [-1, -1, -1, -2, -2],
    [-2, -1, -1, -2, -1],
];

/// Target of the finite `D -> 4` limit as a coefficient of `pi^4`: `6 zeta(3)`.
pub fn six_zeta3(prec: &Precision) -> Float {
    Float::with_val(prec.bits(), 3u32).zeta() * 6u32
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped(_) => "skipped",
        }
    }
}

/// Result of one check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Comparisons actually carried out.
    pub cases: usize,
    pub worst_relative_error: Option<Float>,
    pub tolerance: Float,
    pub warnings: Vec<Flag>,
    /// Cases skipped for failed preconditions, with reasons.
    pub skipped: Vec<String>,
    /// Cases that errored or exceeded the tolerance.
    pub failures: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let worst = match &self.worst_relative_error {
            Some(e) => decimal(e, 3),
            None => "-".into(),
        };
        write!(
            f,
            "{:<8} {:<28} cases={:<6} worst={:<12} tol={}",
            self.status.name(),
            self.name,
            self.cases,
            worst,
            decimal(&self.tolerance, 2)
        )?;
        if let Status::Skipped(reason) = &self.status {
            write!(f, " ({reason})")?;
        }
        if !self.skipped.is_empty() {
            write!(f, " skipped={}", self.skipped.len())?;
        }
        for w in &self.warnings {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Named group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Representations,
    Master,
    Threeloop,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Representations => "representations",
            Suite::Master => "master",
            Suite::Threeloop => "threeloop",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Identities,
            Suite::Representations,
            Suite::Master,
            Suite::Threeloop,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown suite {s:?}; expected identities, representations, master, threeloop or all"
            ))
        })
    }
}

/// Case counts and seed for the randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub pochhammer: usize,
    pub gauss: usize,
    pub coalescence: usize,
    pub representations: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            pochhammer: 10_000,
            gauss: 200,
            coalescence: 100,
            representations: 50,
            seed: 20_240_601,
        }
    }
}

/// Run every check of `suite`.
pub fn run(suite: Suite, prec: &Precision, sampling: &Sampling, exec: Execution) -> Vec<Check> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Identities {
        out.push(pochhammer_ac_check(sampling.pochhammer, sampling.seed, prec, exec));
        out.push(gauss_check(sampling.gauss, sampling.seed, prec, exec));
        out.push(coalescence_check(sampling.coalescence, sampling.seed, prec, exec));
    }
    if all || suite == Suite::Representations {
        let samples = triangle_samples(sampling.representations, sampling.seed, prec, exec);
        out.push(representation_check(&samples, prec));
        out.push(three_term_consistency_check(&samples, prec));
    }
    if all || suite == Suite::Master {
        let dims = parse_dims(&MASTER_DIMS, prec);
        out.push(bubble_quadrature_check(&parse_dims(&BUBBLE_DIMS, prec), prec, exec));
        out.push(master_closed_form_check(&dims, prec, exec));
        out.push(master_2f1_check(&dims, prec, exec));
        out.push(epsilon_limit_check(&parse_dims(&EPSILONS, prec), prec));
        out.push(symmetry_check(
            &SYMMETRY_CATALOG,
            &prec.parse(SYMMETRY_DIM).expect("constant"),
            prec,
            exec,
        ));
    }
    if all || suite == Suite::Threeloop {
        out.push(threeloop_check(&parse_dims(&THREELOOP_DIMS, prec), prec, exec));
    }
    out
}

fn parse_dims(dims: &[&str], prec: &Precision) -> Vec<Float> {
    dims.iter().map(|d| prec.parse(d).expect("constant")).collect()
}

/// `|a - b| / |b|`, or `|a|` when `b` vanishes.
pub fn relative_error(a: &Float, b: &Float) -> Float {
    let bits = a.prec().max(b.prec());
    let diff = Float::with_val(bits, a - b).abs();
    if b.is_zero() {
        diff
    } else {
        diff / Float::with_val(bits, b.abs_ref())
    }
}

/// Stated tolerance, loosened to `10^(10-digits)` when the working
/// precision cannot reach it.
fn effective_tolerance(stated: f64, prec: &Precision, warnings: &mut Vec<Flag>) -> Float {
    let stated = prec.float(stated);
    let floor = prec.identity_tolerance();
    if floor > stated {
        warnings.push(Flag::ReducedPrecision);
        floor
    } else {
        stated
    }
}

enum Case {
    Compared(Float, String),
    Skipped(String),
    Failed(String),
}

fn collect(name: &str, cases: Vec<Case>, tolerance: Float, warnings: Vec<Flag>) -> Check {
    let mut worst: Option<Float> = None;
    let mut compared = 0;
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    for (n, c) in cases.into_iter().enumerate() {
        match c {
            Case::Compared(e, label) => {
                compared += 1;
                if e > tolerance || e.is_nan() {
                    failures.push(format!("case {n}{label}: relative error {}", decimal(&e, 3)));
                }
                if worst.as_ref().is_none_or(|w| e > *w || e.is_nan()) {
                    worst = Some(e);
                }
            }
            Case::Skipped(reason) => skipped.push(format!("case {n}: {reason}")),
            Case::Failed(reason) => failures.push(format!("case {n}: {reason}")),
        }
    }
    let status = if !failures.is_empty() {
        Status::Fail
    } else if compared == 0 {
        Status::Skipped("no case met its preconditions".into())
    } else {
        Status::Pass
    };
    Check {
        name: name.into(),
        status,
        cases: compared,
        worst_relative_error: worst,
        tolerance,
        warnings,
        skipped,
        failures,
    }
}

fn compare(a: Result<Float>, b: Result<Float>) -> Case {
    match (a, b) {
        (Ok(a), Ok(b)) => Case::Compared(relative_error(&a, &b), String::new()),
        (Err(e), _) | (_, Err(e)) => Case::Failed(e.to_string()),
    }
}

fn generic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let x: f64 = rng.gen_range(lo..hi);
        if (x - x.round()).abs() > 1e-3 {
            return x;
        }
    }
}

/// `(a)_n = (-1)^n / (1-a)_{-n}` against `G(a+n)/G(a)`.
pub fn pochhammer_ac_check(cases: usize, seed: u64, prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-15, prec, &mut warnings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(f64, i64)> = (0..cases)
        .map(|_| (generic(&mut rng, -10.0, 10.0), rng.gen_range(-12..=12)))
        .collect();
    let results = exec.map(&inputs, |&(a, n)| {
        let a = prec.float(a);
        let via_ac = pochhammer_ac(&a, n, prec).real();
        let shifted = Float::with_val(prec.bits(), &a + n);
        let via_gamma = gamma_ratio(&[shifted], &[a], prec).map(|v| v.to_real());
        compare(via_ac, via_gamma)
    });
    collect("pochhammer-continuation", results, tol, warnings)
}

/// Gauss summation against extrapolated partial sums, margin above `0.3`.
pub fn gauss_check(cases: usize, seed: u64, prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-15, prec, &mut warnings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a55);
    let inputs: Vec<[f64; 3]> = (0..cases)
        .map(|_| {
            let a = generic(&mut rng, -3.0, 3.0);
            let b = generic(&mut rng, -3.0, 3.0);
            loop {
                let c = a + b + rng.gen_range(0.3..3.0);
                if c > 0.0 || (c - c.round()).abs() > 1e-2 {
                    return [a, b, c];
                }
            }
        })
        .collect();
    let results = exec.map(&inputs, |&[a, b, c]| {
        let (a, b, c) = (prec.float(a), prec.float(b), prec.float(c));
        let closed = gauss_2f1_unit(&a, &b, &c, prec).and_then(|g| g.real());
        let series = pfq_unit(&PfqParams::new(vec![a, b], vec![c]), prec).map(|s| s.value);
        compare(closed, series)
    });
    collect("gauss-summation", results, tol, warnings)
}

/// A `pFq` with an inserted equal parameter pair against its coalesced
/// form, which for a `2F1` is summed in closed form.
pub fn coalescence_check(cases: usize, seed: u64, prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-15, prec, &mut warnings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0a1);
    let inputs: Vec<(Vec<f64>, Vec<f64>)> = (0..cases)
        .map(|n| {
            let q = 1 + n % 2;
            let mut num: Vec<f64> = (0..=q).map(|_| generic(&mut rng, -2.0, 2.0)).collect();
            let mut den: Vec<f64> = (0..q).map(|_| generic(&mut rng, 0.5, 3.0)).collect();
            let excess: f64 = den.iter().sum::<f64>() - num.iter().sum::<f64>();
            let want = rng.gen_range(0.4..2.0);
            den[0] += want - excess;
            if den[0] <= 0.0 && (den[0] - den[0].round()).abs() < 1e-2 {
                den[0] += 0.5;
            }
            let pair = generic(&mut rng, 0.2, 4.0);
            num.insert(rng.gen_range(0..=num.len()), pair);
            den.insert(rng.gen_range(0..=den.len()), pair);
            (num, den)
        })
        .collect();
    let results = exec.map(&inputs, |(num, den)| {
        let p = PfqParams::new(
            num.iter().map(|x| prec.float(*x)).collect(),
            den.iter().map(|x| prec.float(*x)).collect(),
        );
        compare(
            pfq_unit(&p, prec).map(|s| s.value),
            sum_reduced(&p, prec).map(|s| s.value),
        )
    });
    collect("coalescence", results, tol, warnings)
}

struct RepSample {
    te: [i32; 3],
    dim: f64,
    q2: f64,
    r2: f64,
}

/// Triangle values of every converging representation at one sample point.
#[derive(Debug, Clone)]
pub struct TriangleSample {
    pub label: String,
    pub values: Vec<(TriangleRep, Float)>,
}

/// Random triangle samples at which at least two representations
/// converge; at most `20 * samples` points are drawn. Samples use
/// nonnegative-integer exponents in negative dimension, read in the literal
/// convention, so that all three-term sets terminate.
pub fn triangle_samples(samples: usize, seed: u64, prec: &Precision, exec: Execution) -> Vec<TriangleSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e1a);
    let mut out = Vec::new();
    let mut drawn = 0;
    while out.len() < samples && drawn < 20 * samples {
        let batch = (samples - out.len()).max(1);
        drawn += batch;
        let inputs: Vec<RepSample> = (0..batch)
            .map(|_| RepSample {
                te: [rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3)],
                dim: generic(&mut rng, -9.0, -1.0) * 2.0,
                q2: rng.gen_range(0.01..0.2),
                r2: rng.gen_range(0.01..0.2),
            })
            .collect();
        let found = exec.map(&inputs, |s| {
            let te = TriangleExponents::new(prec.float(s.te[0]), prec.float(s.te[1]), prec.float(s.te[2]));
            let kin = Kinematics::new(prec.float(1), prec.float(s.q2), prec.float(s.r2)).ok()?;
            let dim = prec.float(s.dim);
            let values: Vec<(TriangleRep, Float)> = TriangleRep::ALL
                .iter()
                .filter_map(|&rep| {
                    triangle(rep, Convention::Ndim, &te, &kin, &dim, prec)
                        .ok()
                        .map(|v| (rep, v.coefficient_real()))
                })
                .collect();
            (values.len() >= 2).then(|| TriangleSample {
                label: format!("(i,j,l)={:?} D={:.4} q2={:.4} r2={:.4}", s.te, s.dim, s.q2, s.r2),
                values,
            })
        });
        out.extend(found.into_iter().flatten());
    }
    out.truncate(samples);
    out
}

fn sample_cases(samples: &[TriangleSample], reference: TriangleRep, others: &[TriangleRep]) -> Vec<Case> {
    let mut cases = Vec::new();
    for s in samples {
        let Some((_, r)) = s.values.iter().find(|(rep, _)| *rep == reference) else {
            cases.push(Case::Skipped(format!("{}: {reference} does not converge", s.label)));
            continue;
        };
        for (rep, v) in s.values.iter().filter(|(rep, _)| others.contains(rep)) {
            cases.push(Case::Compared(relative_error(v, r), format!(" {} {rep}", s.label)));
        }
    }
    cases
}

const THREE_TERM: [TriangleRep; 3] = [
    TriangleRep::ThreeTermUnprimed,
    TriangleRep::ThreeTermPrimed,
    TriangleRep::ThreeTermDoublePrimed,
];

/// Four-term solution against every converging three-term set.
pub fn representation_check(samples: &[TriangleSample], prec: &Precision) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-20, prec, &mut warnings);
    let mut cases = sample_cases(samples, TriangleRep::FourTerm, &THREE_TERM);
    if samples.is_empty() {
        cases.push(Case::Skipped("no sample with two converging representations".into()));
    }
    collect("triangle-four-vs-three-term", cases, tol, warnings)
}

/// Primed and double-primed three-term sets against the unprimed set.
pub fn three_term_consistency_check(samples: &[TriangleSample], prec: &Precision) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-20, prec, &mut warnings);
    let cases = sample_cases(samples, TriangleRep::ThreeTermUnprimed, &THREE_TERM[1..]);
    collect("triangle-three-term-sets", cases, tol, warnings)
}

/// Double-exponential quadrature of `f(u, 1-u)` over `[0, 1]`; both
/// arguments are supplied separately so endpoint singularities keep full
/// relative precision.
pub fn tanh_sinh<F>(f: F, prec: &Precision) -> Float
where
    F: Fn(&Float, &Float) -> Float,
{
    let bits = prec.bits();
    let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
    let quarter_pi = Float::with_val(bits, &half_pi / 2u32);
    let tiny = prec.pow10(-(prec.digits() as i32) - 10);
    let goal = prec.pow10(-(prec.digits() as i32) / 2 - 5);
    let node = |t: &Float| -> (Float, Float, Float) {
        let s = Float::with_val(bits, t.sinh_ref()) * &half_pi;
        let e = Float::with_val(bits, (s.clone() * 2u32).exp());
        let lower = Float::with_val(bits, 1u32) / (Float::with_val(bits, &e + 1u32));
        let upper = Float::with_val(bits, &e / Float::with_val(bits, &e + 1u32));
        let cosh = Float::with_val(bits, s.cosh_ref());
        let w = Float::with_val(bits, t.cosh_ref()) * &quarter_pi / cosh.square();
        (upper, lower, w)
    };
    let mut previous: Option<Float> = None;
    let mut sum = Float::with_val(bits, 0);
    let mut h = Float::with_val(bits, 1u32);
    for level in 0..(bits as usize / 8 + 4) {
        let step = if level == 0 { 1 } else { 2 };
        let start = if level == 0 { 0 } else { 1 };
        let mut k = start;
        loop {
            let t = Float::with_val(bits, &h * k as u32);
            let (u, v, w) = node(&t);
            if v.is_zero() {
                break;
            }
            let mut term = Float::with_val(bits, f(&u, &v) + f(&v, &u)) * &w;
            if k == 0 {
                term /= 2u32;
            }
            let small = Float::with_val(bits, term.abs_ref()) < Float::with_val(bits, sum.abs_ref()) * &tiny;
            sum += term;
            if small && k > 4 {
                break;
            }
            k += step;
        }
        let current = Float::with_val(bits, &sum * &h);
        if let Some(p) = &previous {
            if relative_error(&current, p) < goal && level > 3 {
                return current;
            }
        }
        previous = Some(current);
        h /= 2u32;
    }
    previous.expect("at least one level")
}

/// Bubble at `e = f = -1` against `G(2-D/2) int_0^1 [u(1-u)]^(D/2-2) du`.
pub fn bubble_quadrature_check(dims: &[Float], prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-12, prec, &mut warnings);
    let results = exec.map(dims, |dim| {
        let m = prec.float(-1);
        let value = bubble(&m, &m, dim, prec).map(|b| b.coefficient_real());
        let power = Float::with_val(prec.bits(), dim / 2u32) - 2u32;
        let integral = tanh_sinh(|u, v| Float::with_val(prec.bits(), u * v).pow(&power), prec);
        let front = Float::with_val(prec.bits(), 2u32) - Float::with_val(prec.bits(), dim / 2u32);
        let oracle = gamma_ratio(&[front], &[], prec).map(|g| g.to_real() * integral);
        compare(value, oracle)
    });
    collect("bubble-quadrature", results, tol, warnings)
}

/// Assembled master series against the closed gamma form.
pub fn master_closed_form_check(dims: &[Float], prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-25, prec, &mut warnings);
    let me = MasterExponents::all_minus_one(prec);
    let results = exec.map(dims, |dim| {
        compare(
            assemble_master(&me, dim, prec).map(|v| v.coefficient_real()),
            master_closed_form(dim, prec).map(|v| v.coefficient_real()),
        )
    });
    collect("master-closed-form", results, tol, warnings)
}

/// Intermediate `2F1` form against the closed gamma form.
pub fn master_2f1_check(dims: &[Float], prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-25, prec, &mut warnings);
    let results = exec.map(dims, |dim| {
        compare(
            master_2f1_form(dim, prec).map(|v| v.coefficient_real()),
            master_closed_form(dim, prec).map(|v| v.coefficient_real()),
        )
    });
    collect("master-2f1-form", results, tol, warnings)
}

/// Polynomial extrapolation to zero through `(x_k, y_k)`.
pub fn richardson_zero(points: &[(Float, Float)]) -> Float {
    let bits = points.first().map_or(64, |p| p.1.prec());
    let mut total = Float::with_val(bits, 0);
    for (k, (xk, yk)) in points.iter().enumerate() {
        let mut w = Float::with_val(bits, 1u32);
        for (m, (xm, _)) in points.iter().enumerate() {
            if m != k {
                w *= Float::with_val(bits, xm / Float::with_val(bits, xm - xk));
            }
        }
        total += w * yk;
    }
    total
}

/// Master closed form at `D = 4 - 2 eps`, extrapolated to `eps = 0`.
pub fn epsilon_limit(epsilons: &[Float], prec: &Precision) -> Result<Float> {
    let points = epsilons
        .iter()
        .map(|eps| {
            let dim = Float::with_val(prec.bits(), 4u32) - Float::with_val(prec.bits(), eps * 2u32);
            master_closed_form(&dim, prec).map(|v| (eps.clone(), v.coefficient_real()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson_zero(&points))
}

/// Finite `D -> 4` limit of the master integral against `6 zeta(3)`. The
/// closed form loses about `3 log10(1/eps)` digits to cancellation near
/// `D = 4`, which is flagged when little precision is left.
pub fn epsilon_limit_check(epsilons: &[Float], prec: &Precision) -> Check {
    let mut warnings = Vec::new();
    let smallest = epsilons.iter().map(|e| e.to_f64().abs()).fold(f64::INFINITY, f64::min);
    let lost = (3.0 * -smallest.log10()).ceil() as i64;
    if prec.digits() as i64 - lost < 15 {
        warnings.push(Flag::ReducedPrecision);
    }
    let tol = prec.float(1e-6);
    let case = compare(epsilon_limit(epsilons, prec), Ok(six_zeta3(prec)));
    collect("epsilon-limit", vec![case], tol, warnings)
}

fn precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::NonConvergent { .. }
            | Error::InvalidSpec(_)
            | Error::Pole { .. }
            | Error::DoublePole { .. }
            | Error::DenominatorPole { .. }
    )
}

/// Outcome of the exchange symmetries on one catalog set.
#[derive(Debug, Clone)]
pub struct SymmetryOutcome {
    pub set: [i32; 5],
    /// Relative error against each image that could be evaluated, by name.
    pub compared: Vec<(&'static str, Float)>,
    /// Images, or the set itself, that failed a series precondition.
    pub skipped: Vec<String>,
    pub errors: Vec<String>,
}

impl SymmetryOutcome {
    /// The set produced no comparison at all.
    pub fn is_skipped(&self) -> bool {
        self.compared.is_empty() && self.errors.is_empty()
    }
}

/// Evaluate `(g,h,i,j,l) -> (h,g,j,i,l)` and `(g,h,i,j,l) -> (i,j,g,h,l)`
/// on every catalog set.
pub fn symmetry_catalog(catalog: &[[i32; 5]], dim: &Float, prec: &Precision, exec: Execution) -> Vec<SymmetryOutcome> {
    exec.map(catalog, |set| {
        let v: Vec<Float> = set.iter().map(|x| prec.float(*x)).collect();
        let me = MasterExponents::from_slice(&v).expect("five exponents");
        let mut out = SymmetryOutcome {
            set: *set,
            compared: Vec::new(),
            skipped: Vec::new(),
            errors: Vec::new(),
        };
        let base = match assemble_master(&me, dim, prec) {
            Ok(b) => b.coefficient_real(),
            Err(e) if precondition(&e) => {
                out.skipped.push(format!("set: {e}"));
                return out;
            }
            Err(e) => {
                out.errors.push(format!("set: {e}"));
                return out;
            }
        };
        for (name, image) in [("reflection", me.reflected()), ("exchange", me.exchanged())] {
            match assemble_master(&image, dim, prec) {
                Ok(x) => out.compared.push((name, relative_error(&x.coefficient_real(), &base))),
                Err(e) if precondition(&e) => out.skipped.push(format!("{name}: {e}")),
                Err(e) => out.errors.push(format!("{name}: {e}")),
            }
        }
        out
    })
}

/// Exchange invariances on a catalog of exponent sets; a set whose own
/// series or both image series fail their preconditions is skipped.
pub fn symmetry_check(catalog: &[[i32; 5]], dim: &Float, prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-20, prec, &mut warnings);
    let mut cases = Vec::new();
    for o in symmetry_catalog(catalog, dim, prec, exec) {
        let label = format!("{:?}", o.set);
        if o.is_skipped() {
            cases.push(Case::Skipped(format!("{label}: {}", o.skipped.join("; "))));
            continue;
        }
        for (name, e) in o.compared {
            cases.push(Case::Compared(e, format!(" {label} {name}")));
        }
        for r in o.skipped {
            cases.push(Case::Skipped(format!("{label} {r}")));
        }
        for r in o.errors {
            cases.push(Case::Failed(format!("{label} {r}")));
        }
    }
    collect("master-exchange-symmetry", cases, tol, warnings)
}

/// Bubble insertion into the master series against the three-loop closed form.
pub fn threeloop_check(dims: &[Float], prec: &Precision, exec: Execution) -> Check {
    let mut warnings = Vec::new();
    let tol = effective_tolerance(1e-20, prec, &mut warnings);
    let te = ThreeLoopExponents::all_minus_one(prec);
    let results = exec.map(dims, |dim| {
        compare(
            compose_threeloop(&te, dim, prec).map(|v| v.coefficient_real()),
            threeloop_closed_form(dim, prec).map(|v| v.coefficient_real()),
        )
    });
    collect("threeloop-composition", results, tol, warnings)
}

/// Whether `x` lies within the pole radius of an integer.
pub fn is_near_integer(x: &Float, prec: &Precision) -> bool {
    near_integer(x, &prec.pole_radius()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::with_digits(40).unwrap()
    }

    #[test]
    fn richardson_exact_on_quadratics() {
        let prec = p();
        let pts: Vec<(Float, Float)> = [1u32, 2, 3]
            .iter()
            .map(|&x| {
                let x = prec.float(x);
                let y = Float::with_val(prec.bits(), x.square_ref()) * 3u32 - Float::with_val(prec.bits(), &x * 2u32)
                    + 5u32;
                (x, y)
            })
            .collect();
        assert!((richardson_zero(&pts).to_f64() - 5.0).abs() < 1e-30);
    }

    #[test]
    fn quadrature_handles_endpoint_singularity() {
        let prec = p();
        let half = prec.float(-0.5);
        let v = tanh_sinh(|u, w| Float::with_val(prec.bits(), u * w).pow(&half), &prec);
        let pi = Float::with_val(prec.bits(), Constant::Pi);
        assert!(relative_error(&v, &pi).to_f64() < 1e-30);
    }

    #[test]
    fn small_identity_suite_passes() {
        let prec = p();
        let s = Sampling {
            pochhammer: 200,
            gauss: 10,
            coalescence: 10,
            representations: 0,
            seed: 7,
        };
        for c in run(Suite::Identities, &prec, &s, Execution::Sequential) {
            assert_eq!(c.status, Status::Pass, "{c} {:?}", c.failures);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["identities", "representations", "master", "threeloop", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().name(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn low_digits_flag_epsilon_limit() {
        let prec = Precision::with_digits(20).unwrap();
        let c = epsilon_limit_check(&parse_dims(&EPSILONS, &prec), &prec);
        assert!(c.warnings.contains(&Flag::ReducedPrecision));
    }
}
