use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use ndim_core::appell::{
    representation_admissible, triangle, triangle_4term, Convention, Kinematics, TriangleExponents, TriangleRep,
};
use ndim_core::{Error, Precision};

/// Double-exponential nodes on `[0, 1]` as `(x, 1 - x, weight)`.
fn nodes(h: f64) -> Vec<(f64, f64, f64)> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();
    let mut k = 0i64;
    loop {
        let t = k as f64 * h;
        let s = half_pi * t.sinh();
        let e = (2.0 * s).exp();
        let lower = 1.0 / (1.0 + e);
        let upper = e / (1.0 + e);
        let w = h * half_pi * t.cosh() / (2.0 * s.cosh().powi(2));
        if lower < 1e-300 || w < 1e-300 {
            break;
        }
        if k == 0 {
            out.push((0.5, 0.5, w));
        } else {
            out.push((upper, lower, w));
            out.push((lower, upper, w));
        }
        k += 1;
    }
    out
}

/// Feynman-parameter form of the triangle coefficient,
/// `G(S-D/2) / (G(n1)G(n2)G(n3)) int_simplex x1^(n1-1) x2^(n2-1) x3^(n3-1) / Q^(S-D/2)`
/// with `n = (-i, -j, -l)`, `S = n1+n2+n3` and `Q = x1 x2 p2 + x1 x3 q2 + x2 x3 r2`.
fn feynman_parameter_oracle(i: f64, j: f64, l: f64, dim: f64, p2: f64, q2: f64, r2: f64) -> f64 {
    let (n1, n2, n3) = (-i, -j, -l);
    let power = n1 + n2 + n3 - dim / 2.0;
    let gamma = |x: f64| libm_gamma(x);
    let pre = gamma(power) / (gamma(n1) * gamma(n2) * gamma(n3));
    let grid = nodes(1.0 / 64.0);
    let mut total = 0.0;
    for &(u, u_c, wu) in &grid {
        for &(t, t_c, wt) in &grid {
            let x1 = u;
            let x2 = u_c * t;
            let x3 = u_c * t_c;
            let q = x1 * x2 * p2 + x1 * x3 * q2 + x2 * x3 * r2;
            let f = x1.powf(n1 - 1.0) * x2.powf(n2 - 1.0) * x3.powf(n3 - 1.0) * u_c / q.powf(power);
            if f.is_finite() {
                total += wu * wt * f;
            }
        }
    }
    pre * total
}

/// Lanczos gamma, accurate to about 1e-15 for the arguments used here.
fn libm_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * libm_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (k, c) in C.iter().enumerate().skip(1) {
            a += c / (x + k as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn four_term_matches_feynman_parameters() {
    let prec = Precision::with_digits(30).unwrap();
    for (i, j, l, dim, q2, r2) in [
        (-1.1, -0.9, -1.05, 4.6, 0.04, 0.09),
        (-1.3, -1.2, -0.7, 4.6, 0.04, 0.09),
        (-0.8, -1.15, -0.95, 3.7, 0.12, 0.05),
    ] {
        let te = TriangleExponents::new(prec.float(i), prec.float(j), prec.float(l));
        let kin = Kinematics::new(prec.float(1), prec.float(q2), prec.float(r2)).unwrap();
        let v = triangle_4term(&te, &kin, &prec.float(dim), &prec)
            .unwrap()
            .coefficient_real()
            .to_f64();
        let oracle = feynman_parameter_oracle(i, j, l, dim, 1.0, q2, r2);
        assert!(rel(v, oracle) < 1e-9, "({i}, {j}, {l}) at D = {dim}: {v} vs {oracle}");
    }
}

#[test]
fn four_term_at_integer_exponents() {
    let prec = Precision::with_digits(30).unwrap();
    let m = prec.float(-1);
    let te = TriangleExponents::new(m.clone(), m.clone(), m);
    let kin = Kinematics::new(prec.float(1), prec.float(0.04), prec.float(0.09)).unwrap();
    match triangle_4term(&te, &kin, &prec.float(4.6), &prec) {
        Ok(v) => {
            let oracle = feynman_parameter_oracle(-1.0, -1.0, -1.0, 4.6, 1.0, 0.04, 0.09);
            let tol = if v.diagnostics.flags.contains(&ndim_core::Flag::Extrapolated) {
                1e-5
            } else {
                1e-9
            };
            assert!(rel(v.coefficient_real().to_f64(), oracle) < tol);
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn four_term_outside_region() {
    let prec = Precision::with_digits(30).unwrap();
    let te = TriangleExponents::new(prec.float(-1.1), prec.float(-0.9), prec.float(-1.05));
    let kin = Kinematics::new(prec.float(1), prec.float(4), prec.float(0.09)).unwrap();
    let r = triangle_4term(&te, &kin, &prec.float(4.6), &prec);
    assert!(matches!(r, Err(Error::OutsideRegion(_))), "{r:?}");
}

/// Wherever two or more representations are admissible at generic
/// exponents in physical dimension, they must agree.
#[test]
fn generic_cross_representation_agreement() {
    let prec = Precision::with_digits(40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut qualifying = 0;
    for _ in 0..50 {
        let g = |rng: &mut ChaCha8Rng| prec.float(rng.gen_range(-1.6..-0.4));
        let te = TriangleExponents::new(g(&mut rng), g(&mut rng), g(&mut rng));
        let dim = prec.float(rng.gen_range(3.2..5.6));
        let kin = Kinematics::new(
            prec.float(rng.gen_range(0.05..3.0)),
            prec.float(rng.gen_range(0.05..3.0)),
            prec.float(rng.gen_range(0.05..3.0)),
        )
        .unwrap();
        let values: Vec<Float> = TriangleRep::ALL
            .iter()
            .filter(|&&rep| representation_admissible(rep, &te, &kin, &dim, &prec))
            .filter_map(|&rep| triangle(rep, Convention::Continued, &te, &kin, &dim, &prec).ok())
            .map(|v| v.coefficient_real())
            .collect();
        if values.len() >= 2 {
            qualifying += 1;
            for v in &values[1..] {
                let d = Float::with_val(prec.bits(), v - &values[0]).abs()
                    / Float::with_val(prec.bits(), values[0].abs_ref());
                assert!(d <= prec.identity_tolerance());
            }
        }
    }
    println!("{qualifying} of 50 generic samples admit two or more representations");
}
