//! The `eval`, `verify` and `sweep` commands.

use rug::ops::Pow;
use rug::Float;

use ndim_core::appell::{triangle, Convention, Kinematics, TriangleExponents, TriangleRep};
use ndim_core::exec::Execution;
use ndim_core::master::{
    assemble_master_general, bubble, bubble_ndim, master_2f1_form, master_closed_form, MasterExponents,
};
use ndim_core::precision::decimal;
use ndim_core::threeloop::{compose_threeloop, threeloop_closed_form, ThreeLoopExponents};
use ndim_core::verify::{self, relative_error, Check, Sampling, Suite};
use ndim_core::{Error, LoopValue, Precision};

use crate::report::{Comparison, ErrorEntry, Kind, Report, Row};
use crate::settings::{grid_parts, Config, Form, Inputs, Target};

type Result<T> = std::result::Result<T, Error>;

/// Everything needed to evaluate one target at a given `D`.
#[derive(Clone)]
struct Problem {
    target: Target,
    form: Form,
    exponents: Vec<Float>,
    p2: Float,
    kinematics: Option<Kinematics>,
    rep: TriangleRep,
    convention: Convention,
}

impl Problem {
    fn evaluate(&self, dim: &Float, prec: &Precision) -> Result<LoopValue> {
        let x = &self.exponents;
        match (self.target, self.form) {
            (Target::Bubble, Form::Series) => match self.convention {
                Convention::Continued => bubble(&x[0], &x[1], dim, prec),
                Convention::Ndim => bubble_ndim(&x[0], &x[1], dim, prec),
            },
            (Target::Triangle, Form::Series) => {
                let te = TriangleExponents::new(x[0].clone(), x[1].clone(), x[2].clone());
                let kin = self.kinematics.as_ref().expect("triangle kinematics resolved");
                triangle(self.rep, self.convention, &te, kin, dim, prec)
            }
            (Target::Master, Form::Series) => assemble_master_general(&MasterExponents::from_slice(x)?, dim, prec),
            (Target::Master, Form::Closed) => master_closed_form(dim, prec),
            (Target::Master, Form::Gauss) => master_2f1_form(dim, prec),
            (Target::Threeloop, Form::Series) => compose_threeloop(&ThreeLoopExponents::from_slice(x)?, dim, prec),
            (Target::Threeloop, Form::Closed) => threeloop_closed_form(dim, prec),
            (t, f) => Err(Error::InvalidInput(format!(
                "form {} is not available for {t}",
                f.name()
            ))),
        }
    }

    /// Closed form to compare a series evaluation against, when one exists.
    fn oracle(&self) -> Option<Form> {
        let all_minus_one = self.exponents.iter().all(|e| *e == -1);
        match (self.target, self.form) {
            (Target::Master | Target::Threeloop, Form::Series) if all_minus_one => Some(Form::Closed),
            _ => None,
        }
    }

    fn row(&self, dim: &Float, value: Result<LoopValue>, prec: &Precision) -> Row {
        let digits = prec.digits();
        let mut row = Row {
            dim: decimal(dim, digits),
            coefficient: None,
            pi_exponent: None,
            p2_exponent: None,
            phase_exponent: None,
            terms: None,
            tail_bound: None,
            flags: Vec::new(),
            error: None,
            digits,
        };
        match value {
            Ok(v) => {
                let p2_exponent = v.p2_exponent_value();
                let scale = Float::with_val(prec.bits(), self.p2.clone().pow(&p2_exponent));
                row.coefficient = Some(decimal(&(v.coefficient_real() * &scale), digits));
                row.pi_exponent = Some(decimal(&v.pi_exponent_value(), digits));
                row.p2_exponent = Some(decimal(&p2_exponent, digits));
                row.terms = Some(v.diagnostics.terms);
                row.tail_bound = Some(decimal(&(scale * &v.diagnostics.tail_bound), digits));
                row.flags = v.diagnostics.flags.iter().map(|f| f.name().to_string()).collect();
                if !v.phase_exponent.is_zero() {
                    row.phase_exponent = Some(decimal(&v.phase_exponent.at(dim), digits));
                    row.flags.push("pending-phase".into());
                }
            }
            Err(e) => {
                row.flags.push(format!("error:{}", e.category()));
                row.error = Some(ErrorEntry::from_error(&e));
            }
        }
        row
    }
}

fn is_pole(e: &Error) -> bool {
    matches!(
        e,
        Error::Pole { .. } | Error::DoublePole { .. } | Error::DenominatorPole { .. }
    )
}

fn parse_list(list: &[String], prec: &Precision) -> Result<Vec<Float>> {
    list.iter().map(|s| prec.parse(s)).collect()
}

/// Fill target-specific defaults into `inputs` and build the problem.
fn resolve(target: Target, mut inputs: Inputs, config: &Config, prec: &Precision) -> Result<(Problem, Inputs)> {
    let arity = target.arity();
    let mut exponents = inputs.exponents.take().unwrap_or_else(|| vec!["-1".to_string(); arity]);
    if target == Target::Bubble {
        if let Some(e) = inputs.e.take() {
            exponents[0] = e;
        }
        if let Some(f) = inputs.f.take() {
            exponents[1] = f;
        }
    } else if inputs.e.is_some() || inputs.f.is_some() {
        return Err(Error::InvalidInput("--e and --f apply to the bubble only".into()));
    }
    if exponents.len() != arity {
        return Err(Error::InvalidInput(format!(
            "{target} needs {arity} exponents, got {}",
            exponents.len()
        )));
    }
    let form = inputs.form.unwrap_or_default();
    let values = parse_list(&exponents, prec)?;
    if form != Form::Series && values.iter().any(|e| *e != -1) {
        return Err(Error::InvalidInput(format!(
            "the {} form needs every exponent equal to -1",
            form.name()
        )));
    }
    let p2 = prec.parse(config.p2.as_deref().unwrap_or("1"))?;
    if !(p2.is_finite() && p2 > 0) {
        return Err(Error::InvalidInput("p2 must be positive".into()));
    }
    let takes_convention = matches!(target, Target::Bubble | Target::Triangle);
    let convention = match inputs.convention.as_deref() {
        None | Some("continued") => Convention::Continued,
        Some("ndim") if takes_convention => Convention::Ndim,
        Some(other) => {
            return Err(Error::InvalidInput(format!(
                "convention {other:?} is not available for {target}; expected continued{}",
                if takes_convention { " or ndim" } else { "" }
            )))
        }
    };
    let mut rep = TriangleRep::FourTerm;
    let mut kinematics = None;
    if target == Target::Triangle {
        rep = inputs.rep.as_deref().unwrap_or("four-term").parse()?;
        let get = |v: &Option<String>, name: &str| {
            v.as_deref()
                .ok_or_else(|| Error::InvalidInput(format!("triangle needs --{name}")))
                .and_then(|s| prec.parse(s))
        };
        kinematics = Some(Kinematics::new(
            p2.clone(),
            get(&inputs.q2, "q2")?,
            get(&inputs.r2, "r2")?,
        )?);
        inputs.rep = Some(rep.name().into());
    } else if inputs.rep.is_some() || inputs.q2.is_some() || inputs.r2.is_some() {
        return Err(Error::InvalidInput(
            "--rep, --q2 and --r2 apply to the triangle only".into(),
        ));
    }
    inputs.target = Some(target);
    inputs.exponents = Some(exponents);
    inputs.form = Some(form);
    inputs.convention = takes_convention.then(|| {
        match convention {
            Convention::Continued => "continued",
            Convention::Ndim => "ndim",
        }
        .to_string()
    });
    let problem = Problem {
        target,
        form,
        exponents: values,
        p2,
        kinematics,
        rep,
        convention,
    };
    Ok((problem, inputs))
}

fn missing_target(command: &str) -> Error {
    Error::InvalidInput(format!(
        "{command} needs a target: bubble, triangle, master or threeloop"
    ))
}

pub fn eval(config: Config, inputs: Inputs) -> Report {
    let command = match inputs.target {
        Some(t) => format!("eval {t}"),
        None => "eval".into(),
    };
    let fail =
        |inputs: Inputs, e: Error| Report::new(Kind::Eval, command.clone(), config.clone(), inputs).fail_with(&e);
    let prec = match config.precision() {
        Ok(p) => p,
        Err(e) => return fail(inputs, e),
    };
    let Some(target) = inputs.target else {
        return fail(inputs, missing_target("eval"));
    };
    let (problem, mut echo) = match resolve(target, inputs.clone(), &config, &prec) {
        Ok(x) => x,
        Err(e) => return fail(inputs, e),
    };
    echo.grid = None;
    echo.epsilons = None;
    echo.suite = None;
    let dim = echo
        .dim
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("eval needs --dim".into()));
    let dim = match dim.and_then(|d| prec.parse(d)) {
        Ok(d) => d,
        Err(e) => return fail(echo, e),
    };
    let mut report = Report::new(Kind::Eval, command, config, echo);
    let row = problem.row(&dim, problem.evaluate(&dim, &prec), &prec);
    report.error = row.error.clone();
    report.result = Some(row);
    report.settle();
    report
}

fn comparison_from_check(c: &Check, digits: u32) -> Comparison {
    let reason = match &c.status {
        verify::Status::Skipped(r) => Some(r.clone()),
        _ => None,
    };
    Comparison {
        name: c.name.clone(),
        dim: None,
        status: c.status.name().into(),
        reason,
        cases: c.cases,
        worst_relative_error: c.worst_relative_error.as_ref().map(|e| decimal(e, 6)),
        tolerance: decimal(&c.tolerance, 6),
        warnings: c.warnings.iter().map(|w| w.name().to_string()).collect(),
        skipped: c.skipped.clone(),
        failures: c.failures.clone(),
        digits,
    }
}

pub fn verify(config: Config, mut inputs: Inputs, exec: Execution) -> Report {
    let name = inputs.suite.clone().unwrap_or_else(|| "all".into());
    let command = format!("verify {name}");
    let prec = match config.precision() {
        Ok(p) => p,
        Err(e) => return Report::new(Kind::Verify, command, config, inputs).fail_with(&e),
    };
    inputs = Inputs {
        suite: Some(name.clone()),
        ..Inputs::default()
    };
    let suite: Suite = match name.parse() {
        Ok(s) => s,
        Err(e) => return Report::new(Kind::Verify, command, config, inputs).fail_with(&e),
    };
    let mut report = Report::new(Kind::Verify, command, config, inputs);
    for check in verify::run(suite, &prec, &Sampling::default(), exec) {
        for w in &check.warnings {
            report.warnings.push(format!("{}: {w}", check.name));
        }
        report.comparisons.push(comparison_from_check(&check, prec.digits()));
    }
    report.settle();
    report
}

/// Grid points in order: `D = 4 - 2 eps` for each epsilon, or an inclusive
/// linear grid.
fn sweep_dims(inputs: &Inputs, prec: &Precision) -> Result<Vec<Float>> {
    match (&inputs.grid, &inputs.epsilons) {
        (Some(_), Some(_)) => Err(Error::InvalidInput("give either --grid or --epsilons, not both".into())),
        (None, None) => Err(Error::InvalidInput(
            "sweep needs --grid start:stop:count or --epsilons".into(),
        )),
        (None, Some(eps)) => Ok(parse_list(eps, prec)?
            .into_iter()
            .map(|e| prec.float(4) - Float::with_val(prec.bits(), e * 2u32))
            .collect()),
        (Some(grid), None) => {
            let (start, stop, count) = grid_parts(grid)?;
            let start = prec.parse(&start)?;
            let stop = prec.parse(&stop)?;
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = Float::with_val(prec.bits(), &stop - &start) / (count as u64 - 1);
            Ok((0..count)
                .map(|k| {
                    if k + 1 == count {
                        stop.clone()
                    } else {
                        Float::with_val(prec.bits(), &step * k as u64) + &start
                    }
                })
                .collect())
        }
    }
}

/// Rows closer to the oracle than this count as agreeing.
fn comparison_tolerance(prec: &Precision) -> Float {
    let stated = prec.pow10(-(prec.digits() as i32 / 2));
    stated.max(&prec.identity_tolerance())
}

pub fn sweep(config: Config, inputs: Inputs, exec: Execution) -> Report {
    let command = match inputs.target {
        Some(t) => format!("sweep {t}"),
        None => "sweep".into(),
    };
    let prec = match config.precision() {
        Ok(p) => p,
        Err(e) => return Report::new(Kind::Sweep, command, config, inputs).fail_with(&e),
    };
    let Some(target) = inputs.target else {
        return Report::new(Kind::Sweep, command, config, inputs).fail_with(&missing_target("sweep"));
    };
    let (problem, mut echo) = match resolve(target, inputs.clone(), &config, &prec) {
        Ok(x) => x,
        Err(e) => return Report::new(Kind::Sweep, command, config, inputs).fail_with(&e),
    };
    echo.dim = None;
    echo.suite = None;
    let dims = match sweep_dims(&echo, &prec) {
        Ok(d) => d,
        Err(e) => return Report::new(Kind::Sweep, command, config, echo).fail_with(&e),
    };
    let mut report = Report::new(Kind::Sweep, command, config, echo);
    let oracle = problem.oracle();
    let evaluated = exec.map(&dims, |d| {
        let value = problem.evaluate(d, &prec);
        let reference = oracle.map(|form| {
            Problem {
                form,
                ..problem.clone()
            }
            .evaluate(d, &prec)
        });
        (value, reference)
    });
    let mut removed = Vec::new();
    let tol = comparison_tolerance(&prec);
    for (dim, (value, reference)) in dims.iter().zip(evaluated) {
        if matches!(&value, Err(e) if is_pole(e)) {
            removed.push(decimal(dim, 12));
            continue;
        }
        if let (Ok(v), Some(reference)) = (&value, reference) {
            report.comparisons.push(row_comparison(dim, v, reference, &tol, &prec));
        }
        report.rows.push(problem.row(dim, value, &prec));
    }
    if !removed.is_empty() {
        report.warnings.push(format!(
            "removed {} grid point(s) at poles: D = {}",
            removed.len(),
            removed.join(", ")
        ));
    }
    if report.rows.is_empty() {
        report.warnings.push("grid is empty after removing poles".into());
    }
    report.settle();
    report
}

fn row_comparison(
    dim: &Float,
    value: &LoopValue,
    reference: Result<LoopValue>,
    tol: &Float,
    prec: &Precision,
) -> Comparison {
    let digits = prec.digits();
    let mut c = Comparison {
        name: "closed-form".into(),
        dim: Some(decimal(dim, digits)),
        status: "pass".into(),
        reason: None,
        cases: 0,
        worst_relative_error: None,
        tolerance: decimal(tol, 6),
        warnings: Vec::new(),
        skipped: Vec::new(),
        failures: Vec::new(),
        digits,
    };
    match reference {
        Ok(r) => {
            let err = relative_error(&value.coefficient_real(), &r.coefficient_real());
            c.cases = 1;
            if err > *tol {
                c.status = "fail".into();
                c.failures.push(format!("relative error {}", decimal(&err, 6)));
            }
            c.worst_relative_error = Some(decimal(&err, 6));
        }
        Err(e) => {
            c.status = "skipped".into();
            c.reason = Some(e.to_string());
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(digits: u32) -> Config {
        Config {
            digits: Some(digits),
            ..Config::default()
        }
        .resolved()
    }

    #[test]
    fn linear_grid_is_inclusive() {
        let prec = Precision::with_digits(30).unwrap();
        let inputs = Inputs {
            grid: Some("3:4:5".into()),
            ..Inputs::default()
        };
        let d = sweep_dims(&inputs, &prec).unwrap();
        assert_eq!(d.len(), 5);
        assert_eq!(d[4], 4);
        assert!((d[1].to_f64() - 3.25).abs() < 1e-25);
    }

    #[test]
    fn bubble_takes_e_and_f() {
        let prec = Precision::with_digits(30).unwrap();
        let inputs = Inputs {
            e: Some("-0.5".into()),
            ..Inputs::default()
        };
        let (p, echo) = resolve(Target::Bubble, inputs, &config(30), &prec).unwrap();
        assert_eq!(echo.exponents, Some(vec!["-0.5".to_string(), "-1".to_string()]));
        assert_eq!(p.exponents[0], -0.5);
        assert!(echo.e.is_none());
    }

    #[test]
    fn closed_form_needs_minus_one() {
        let prec = Precision::with_digits(30).unwrap();
        let inputs = Inputs {
            exponents: Some(vec!["-1".into(), "-1".into(), "-1".into(), "-1".into(), "-2".into()]),
            form: Some(Form::Closed),
            ..Inputs::default()
        };
        assert!(resolve(Target::Master, inputs, &config(30), &prec).is_err());
    }

    #[test]
    fn eval_error_carries_category() {
        let inputs = Inputs {
            target: Some(Target::Master),
            dim: Some("4".into()),
            ..Inputs::default()
        };
        let r = eval(config(30), inputs);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.error.unwrap().category, "Pole");
    }
}
