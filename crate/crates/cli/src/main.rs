mod commands;
mod report;
mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ndim_core::exec::Execution;

use settings::{Config, Form, Format, Inputs, Target};

const PRECEDENCE: &str = "\
Configuration precedence: command-line flags, then the NDIM_DIGITS environment
variable (working digits only), then the --config file, then built-in defaults.
A JSON report written by any command is itself a valid --config file and
reproduces the same output.

Exit status is 0 on success, 1 on an evaluation error or a failed check, and 2
on a usage error. Warnings never change the exit status.";

#[derive(Debug, Parser)]
#[command(name = "ndim", version, about = "Massless loop integrals in hypergeometric form", after_help = PRECEDENCE)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Decimal working digits, at least 20 [default: 50]
    #[arg(long, global = true, env = "NDIM_DIGITS")]
    digits: Option<u32>,
    /// Series truncation tolerance 10^TOL_EXP [default: 10 - digits]
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_exp: Option<i32>,
    /// Ceiling on the number of series terms [default: 200000]
    #[arg(long, global = true)]
    max_terms: Option<usize>,
    /// External momentum squared; for the triangle, the p^2 leg [default: 1]
    #[arg(long, global = true)]
    p2: Option<String>,
    /// Report format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON config file or earlier report
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Evaluate grid points and checks one at a time
    #[arg(long, global = true)]
    sequential: bool,
}

impl Common {
    fn config(&self) -> Config {
        Config {
            digits: self.digits,
            tol_exp: self.tol_exp,
            max_terms: self.max_terms,
            p2: self.p2.clone(),
            format: self.format,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one integral at one dimension
    Eval {
        #[arg(value_enum)]
        target: Option<Target>,
        #[command(flatten)]
        inputs: InputArgs,
        /// Dimension D
        #[arg(long, allow_hyphen_values = true)]
        dim: Option<String>,
    },
    /// Run a verification suite: identities, representations, master, threeloop or all
    Verify { suite: Option<String> },
    /// Evaluate one integral over a grid of dimensions
    Sweep {
        #[arg(value_enum)]
        target: Option<Target>,
        #[command(flatten)]
        inputs: InputArgs,
        /// Inclusive linear grid of D values
        #[arg(long, value_name = "START:STOP:COUNT", allow_hyphen_values = true)]
        grid: Option<String>,
        /// Comma-separated eps values, sweeping D = 4 - 2 eps
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<String>>,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Comma-separated propagator exponents [default: all -1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    exponents: Option<Vec<String>>,
    /// First bubble exponent
    #[arg(long, allow_hyphen_values = true)]
    e: Option<String>,
    /// Second bubble exponent
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Triangle q^2
    #[arg(long)]
    q2: Option<String>,
    /// Triangle r^2 = (q-p)^2
    #[arg(long)]
    r2: Option<String>,
    /// Triangle representation: four-term, three-term, three-term-primed, three-term-double-primed
    #[arg(long)]
    rep: Option<String>,
    /// Pochhammer convention for bubble and triangle: continued or ndim
    #[arg(long)]
    convention: Option<String>,
    /// Formula: series, closed or gauss
    #[arg(long, value_enum)]
    form: Option<Form>,
}

impl InputArgs {
    fn inputs(self, target: Option<Target>) -> Inputs {
        Inputs {
            target,
            exponents: self.exponents,
            e: self.e,
            f: self.f,
            q2: self.q2,
            r2: self.r2,
            rep: self.rep,
            convention: self.convention,
            form: self.form,
            ..Inputs::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (file_config, file_inputs) = match &cli.common.config {
        Some(path) => match settings::load(path) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("ndim: {e}");
                return ExitCode::from(1);
            }
        },
        None => (Config::default(), Inputs::default()),
    };
    let config = cli.common.config().or(file_config).resolved();
    let format = config.format.unwrap_or_default();
    let exec = if cli.common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let report = match cli.command {
        Command::Eval { target, inputs, dim } => {
            let flags = Inputs {
                dim,
                ..inputs.inputs(target)
            };
            commands::eval(config, flags.or(file_inputs))
        }
        Command::Verify { suite } => {
            let flags = Inputs {
                suite,
                ..Inputs::default()
            };
            commands::verify(config, flags.or(file_inputs), exec)
        }
        Command::Sweep {
            target,
            inputs,
            grid,
            epsilons,
        } => {
            let flags = Inputs {
                grid,
                epsilons,
                ..inputs.inputs(target)
            };
            commands::sweep(config, flags.or(file_inputs), exec)
        }
    };
    if format != Format::Json {
        if let Some(e) = &report.error {
            eprintln!("ndim: {} error: {}", e.category, e.message);
        }
    }
    if format == Format::Csv {
        for w in &report.warnings {
            eprintln!("ndim: warning: {w}");
        }
    }
    let mut out = std::io::stdout().lock();
    if out
        .write_all(report.render(format).as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit_code() as u8)
}
