//! Run configuration and inputs, merged from flags, `NDIM_DIGITS` and a
//! JSON config file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use ndim_core::precision::{DEFAULT_DIGITS, DEFAULT_MAX_TERMS};
use ndim_core::{Error, Precision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Bubble,
    Triangle,
    Master,
    Threeloop,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Bubble => "bubble",
            Target::Triangle => "triangle",
            Target::Master => "master",
            Target::Threeloop => "threeloop",
        }
    }

    /// Number of propagator exponents.
    pub fn arity(self) -> usize {
        match self {
            Target::Bubble => 2,
            Target::Triangle => 3,
            Target::Master => 5,
            Target::Threeloop => 6,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which formula evaluates a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Hypergeometric series solution.
    #[default]
    Series,
    /// Gamma-function closed form (all exponents -1).
    Closed,
    /// Gauss-summed 2F1 form of the master (all exponents -1).
    Gauss,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Series => "series",
            Form::Closed => "closed",
            Form::Gauss => "gauss",
        }
    }
}

/// Precision and output settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub digits: Option<u32>,
    pub tol_exp: Option<i32>,
    pub max_terms: Option<usize>,
    pub p2: Option<String>,
    pub format: Option<Format>,
}

impl Config {
    /// Fill unset fields from `lower`.
    pub fn or(self, lower: Config) -> Config {
        Config {
            digits: self.digits.or(lower.digits),
            tol_exp: self.tol_exp.or(lower.tol_exp),
            max_terms: self.max_terms.or(lower.max_terms),
            p2: self.p2.or(lower.p2),
            format: self.format.or(lower.format),
        }
    }

    /// Defaults applied, with `tol_exp` left unset when it follows the digits.
    pub fn resolved(self) -> Config {
        Config {
            digits: Some(self.digits.unwrap_or(DEFAULT_DIGITS)),
            tol_exp: self.tol_exp,
            max_terms: Some(self.max_terms.unwrap_or(DEFAULT_MAX_TERMS)),
            p2: Some(self.p2.unwrap_or_else(|| "1".into())),
            format: Some(self.format.unwrap_or_default()),
        }
    }

    pub fn precision(&self) -> Result<Precision, Error> {
        let digits = self.digits.unwrap_or(DEFAULT_DIGITS);
        let tol_exp = self.tol_exp.unwrap_or(10 - digits as i32);
        Precision::new(digits, tol_exp, self.max_terms.unwrap_or(DEFAULT_MAX_TERMS))
    }
}

/// What to evaluate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub target: Option<Target>,
    pub suite: Option<String>,
    pub exponents: Option<Vec<String>>,
    pub e: Option<String>,
    pub f: Option<String>,
    pub dim: Option<String>,
    pub q2: Option<String>,
    pub r2: Option<String>,
    pub rep: Option<String>,
    pub convention: Option<String>,
    pub form: Option<Form>,
    pub grid: Option<String>,
    pub epsilons: Option<Vec<String>>,
}

impl Inputs {
    pub fn or(self, lower: Inputs) -> Inputs {
        Inputs {
            target: self.target.or(lower.target),
            suite: self.suite.or(lower.suite),
            exponents: self.exponents.or(lower.exponents),
            e: self.e.or(lower.e),
            f: self.f.or(lower.f),
            dim: self.dim.or(lower.dim),
            q2: self.q2.or(lower.q2),
            r2: self.r2.or(lower.r2),
            rep: self.rep.or(lower.rep),
            convention: self.convention.or(lower.convention),
            form: self.form.or(lower.form),
            grid: self.grid.or(lower.grid),
            epsilons: self.epsilons.or(lower.epsilons),
        }
    }
}

const CONFIG_KEYS: [&str; 5] = ["digits", "tol_exp", "max_terms", "p2", "format"];

#[derive(Debug, Deserialize)]
struct Echo {
    #[serde(default)]
    config: Config,
    #[serde(default)]
    inputs: Inputs,
}

/// Read a config file: either a flat object of config and input keys, or a
/// previously written JSON report.
pub fn load(path: &Path) -> Result<(Config, Inputs), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<(Config, Inputs), String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if value.get("schema_version").is_some() {
        let echo: Echo = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok((echo.config, echo.inputs))
    } else {
        let serde_json::Value::Object(map) = value else {
            return Err("expected a JSON object".into());
        };
        let (config, inputs): (serde_json::Map<_, _>, serde_json::Map<_, _>) =
            map.into_iter().partition(|(k, _)| CONFIG_KEYS.contains(&k.as_str()));
        let config = serde_json::from_value(config.into()).map_err(|e| e.to_string())?;
        let inputs = serde_json::from_value(inputs.into()).map_err(|e| e.to_string())?;
        Ok((config, inputs))
    }
}

/// Parse a `start:stop:count` grid into its three parts.
pub fn grid_parts(spec: &str) -> Result<(String, String, usize), Error> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let bad = || Error::InvalidInput(format!("grid {spec:?} is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let count = usize::from_str(parts[2]).map_err(|_| bad())?;
    if count == 0 {
        return Err(Error::InvalidInput("grid count must be positive".into()));
    }
    Ok((parts[0].to_string(), parts[1].to_string(), count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let flags = Config {
            digits: Some(30),
            ..Config::default()
        };
        let file = Config {
            digits: Some(60),
            max_terms: Some(10),
            ..Config::default()
        };
        let c = flags.or(file).resolved();
        assert_eq!(c.digits, Some(30));
        assert_eq!(c.max_terms, Some(10));
        assert_eq!(c.p2.as_deref(), Some("1"));
        assert_eq!(c.tol_exp, None);
    }

    #[test]
    fn flat_and_report_files() {
        let (c, i) = parse(r#"{"digits": 40, "target": "master", "dim": "3.8"}"#).unwrap();
        assert_eq!(c.digits, Some(40));
        assert_eq!(i.target, Some(Target::Master));
        let (c, i) =
            parse(r#"{"schema_version": 1, "config": {"digits": 25}, "inputs": {"dim": "4.2"}, "result": null}"#)
                .unwrap();
        assert_eq!(c.digits, Some(25));
        assert_eq!(i.dim.as_deref(), Some("4.2"));
        assert!(parse(r#"{"digitz": 3}"#).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid_parts("3.1:4.9:10").unwrap(), ("3.1".into(), "4.9".into(), 10));
        assert!(grid_parts("3:4").is_err());
        assert!(grid_parts("3:4:0").is_err());
    }
}
