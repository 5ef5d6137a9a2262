//! Report structure and its JSON, CSV and text renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::settings::{Config, Format, Inputs};

/// Bumped whenever a field or CSV column changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Fixed column order of tabular output.
pub const CSV_COLUMNS: [&str; 7] = [
    "D",
    "coefficient",
    "pi_exponent",
    "p2_exponent",
    "terms",
    "tail_bound",
    "flags",
];

const CHECK_COLUMNS: [&str; 9] = [
    "name",
    "D",
    "status",
    "cases",
    "worst_relative_error",
    "tolerance",
    "warnings",
    "skipped",
    "failures",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub category: String,
    pub message: String,
}

impl ErrorEntry {
    pub fn from_error(e: &ndim_core::Error) -> Self {
        Self {
            category: e.category().into(),
            message: e.to_string(),
        }
    }
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    #[serde(rename = "D")]
    pub dim: String,
    pub coefficient: Option<String>,
    pub pi_exponent: Option<String>,
    pub p2_exponent: Option<String>,
    pub phase_exponent: Option<String>,
    pub terms: Option<usize>,
    pub tail_bound: Option<String>,
    pub flags: Vec<String>,
    pub error: Option<ErrorEntry>,
    pub digits: u32,
}

impl Row {
    fn cells(&self) -> [String; 7] {
        let o = |s: &Option<String>| s.clone().unwrap_or_default();
        [
            self.dim.clone(),
            o(&self.coefficient),
            o(&self.pi_exponent),
            o(&self.p2_exponent),
            self.terms.map(|t| t.to_string()).unwrap_or_default(),
            o(&self.tail_bound),
            self.flags.join(";"),
        ]
    }
}

/// An oracle comparison or a verification check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    #[serde(rename = "D")]
    pub dim: Option<String>,
    pub status: String,
    pub reason: Option<String>,
    pub cases: usize,
    pub worst_relative_error: Option<String>,
    pub tolerance: String,
    pub warnings: Vec<String>,
    pub skipped: Vec<String>,
    pub failures: Vec<String>,
    pub digits: u32,
}

impl Comparison {
    pub fn failed(&self) -> bool {
        self.status == "fail"
    }

    fn cells(&self) -> [String; 9] {
        [
            self.name.clone(),
            self.dim.clone().unwrap_or_default(),
            self.status.clone(),
            self.cases.to_string(),
            self.worst_relative_error.clone().unwrap_or_default(),
            self.tolerance.clone(),
            self.warnings.join(";"),
            self.skipped.len().to_string(),
            self.failures.len().to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Eval,
    Verify,
    Sweep,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub status: Status,
    pub digits: u32,
    pub config: Config,
    pub inputs: Inputs,
    pub result: Option<Row>,
    pub rows: Vec<Row>,
    pub comparisons: Vec<Comparison>,
    pub warnings: Vec<String>,
    pub error: Option<ErrorEntry>,
    #[serde(skip)]
    pub kind: Kind,
}

impl Report {
    pub fn new(kind: Kind, command: String, config: Config, inputs: Inputs) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            status: Status::Ok,
            digits: config.digits.unwrap_or_default(),
            config,
            inputs,
            result: None,
            rows: Vec::new(),
            comparisons: Vec::new(),
            warnings: Vec::new(),
            error: None,
            kind,
        }
    }

    pub fn fail_with(mut self, e: &ndim_core::Error) -> Self {
        self.error = Some(ErrorEntry::from_error(e));
        self.status = Status::Error;
        self
    }

    /// Recompute the status from errors and failed comparisons.
    pub fn settle(&mut self) {
        let row_error = self.rows.iter().chain(self.result.iter()).any(|r| r.error.is_some());
        self.status = if self.error.is_some() || row_error {
            Status::Error
        } else if self.comparisons.iter().any(Comparison::failed) {
            Status::Failed
        } else {
            Status::Ok
        };
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Failed | Status::Error => 1,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self.kind {
            Kind::Verify => {
                w.write_record(CHECK_COLUMNS).expect("in-memory write");
                for c in &self.comparisons {
                    w.write_record(c.cells()).expect("in-memory write");
                }
            }
            Kind::Eval | Kind::Sweep => {
                w.write_record(CSV_COLUMNS).expect("in-memory write");
                for r in self.result.iter().chain(&self.rows) {
                    w.write_record(r.cells()).expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} ({} digits): {}",
            self.command,
            self.digits,
            status_name(self.status)
        );
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error [{}]: {}", e.category, e.message);
        }
        if let Some(r) = &self.result {
            for (name, cell) in CSV_COLUMNS.iter().zip(r.cells()) {
                let _ = writeln!(out, "  {name:<12} {}", if cell.is_empty() { "-" } else { &cell });
            }
            if let Some(p) = &r.phase_exponent {
                let _ = writeln!(out, "  {:<12} {p}", "phase");
            }
        }
        if self.kind == Kind::Sweep {
            table(
                &mut out,
                &CSV_COLUMNS,
                self.rows.iter().map(|r| r.cells().to_vec()).collect(),
            );
            for r in &self.rows {
                if let Some(e) = &r.error {
                    let _ = writeln!(out, "  D = {}: error [{}]: {}", r.dim, e.category, e.message);
                }
            }
        }
        if !self.comparisons.is_empty() {
            table(
                &mut out,
                &["name", "D", "status", "cases", "worst", "tolerance"],
                self.comparisons.iter().map(|c| c.cells()[..6].to_vec()).collect(),
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Failed => "failed",
        Status::Error => "error",
    }
}

fn table(out: &mut String, header: &[&str], rows: Vec<Vec<String>>) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(dim: &str) -> Row {
        Row {
            dim: dim.into(),
            coefficient: Some("1.5".into()),
            pi_exponent: Some("2".into()),
            p2_exponent: Some("-1".into()),
            phase_exponent: None,
            terms: Some(4),
            tail_bound: Some("0".into()),
            flags: vec!["extrapolated".into(), "slow-convergence".into()],
            error: None,
            digits: 30,
        }
    }

    #[test]
    fn csv_columns_fixed() {
        let mut r = Report::new(Kind::Sweep, "sweep master".into(), Config::default(), Inputs::default());
        r.rows = vec![row("3.5"), row("4.5")];
        let csv = r.render(Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("D,coefficient,pi_exponent,p2_exponent,terms,tail_bound,flags")
        );
        assert_eq!(lines.next(), Some("3.5,1.5,2,-1,4,0,extrapolated;slow-convergence"));
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn status_follows_contents() {
        let mut r = Report::new(Kind::Sweep, "sweep master".into(), Config::default(), Inputs::default());
        r.warnings.push("grid is empty".into());
        r.settle();
        assert_eq!(r.exit_code(), 0);
        let mut bad = row("4.5");
        bad.error = Some(ErrorEntry {
            category: "InvalidInput".into(),
            message: "x".into(),
        });
        r.rows.push(bad);
        r.settle();
        assert_eq!(r.status, Status::Error);
    }

    #[test]
    fn json_has_schema_version_and_string_reals() {
        let mut r = Report::new(Kind::Eval, "eval master".into(), Config::default(), Inputs::default());
        r.result = Some(row("3.8"));
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert!(v["result"]["coefficient"].is_string());
        assert!(v["result"]["D"].is_string());
    }
}
