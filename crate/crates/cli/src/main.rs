mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Evaluate, tabulate, classify and sample the generalized Euler distribution.
#[derive(Parser)]
#[command(name = "geneuler", version)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

/// The distribution parameters; the state label is given as `lambda` or `|z|`.
#[derive(Args, Clone, Copy)]
#[command(group = clap::ArgGroup::new("state").required(true).args(["lambda", "zmod"]))]
pub struct State {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub m: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// |z|; lambda = |z|^2
    #[arg(long, allow_negative_numbers = true)]
    pub zmod: Option<f64>,
}

#[derive(Args, Clone, Copy)]
#[command(group = clap::ArgGroup::new("state").required(false).args(["lambda", "zmod"]))]
pub struct OptState {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub m: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zmod: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// PMF table with cumulative sums and the tail bound
    Pmf {
        #[command(flatten)]
        state: State,
        #[arg(long, default_value_t = geneuler::gen_euler::DEFAULT_TABLE_TOL)]
        tol: f64,
    },
    /// Mean, variance, Mandel Q and regime
    Moments {
        #[command(flatten)]
        state: State,
    },
    /// Regime report for (q, m), plus the regime at lambda when given
    Classify {
        #[command(flatten)]
        state: OptState,
        #[arg(long, default_value = "sign-poly")]
        classifier: String,
    },
    /// Cubic discriminant, root and threshold index over a q grid
    PhaseDiagram {
        #[arg(long)]
        q_min: f64,
        #[arg(long)]
        q_max: f64,
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value = "trigonometric")]
        zeta_solver: String,
    },
    /// Seeded draws and their summary
    Sample {
        #[command(flatten)]
        state: State,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Probability generating function at one or more points
    Pgf {
        #[command(flatten)]
        state: State,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
        #[arg(long, default_value = "closed-form")]
        method: String,
    },
    /// Run the invariant suites; exit 1 if any property fails
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: commands::LevelArg,
        /// Restrict to the named suites
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Scale every closed form by 1 + x, for negative-control runs
        #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
        inject_perturbation: f64,
    },
}

pub enum CliError {
    /// Bad flags or parameters outside the domain; exit 2.
    Usage(String),
    /// A verification property failed; exit 1.
    Verify(String),
}

impl From<geneuler::Error> for CliError {
    fn from(e: geneuler::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("output error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // first paragraph of clap's message, folded onto one line
            let text = e.to_string();
            let line: Vec<&str> = text.lines().map(str::trim).take_while(|l| !l.is_empty()).collect();
            eprintln!("{}", line.join(" "));
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let fmt = cli.format;
    let result = match cli.command {
        Command::Pmf { state, tol } => commands::pmf(&mut out, fmt, state, tol),
        Command::Moments { state } => commands::moments(&mut out, fmt, state),
        Command::Classify { state, classifier } => commands::classify(&mut out, fmt, state, &classifier),
        Command::PhaseDiagram { q_min, q_max, steps, zeta_solver } => {
            commands::phase_diagram(&mut out, fmt, q_min, q_max, steps, &zeta_solver)
        }
        Command::Sample { state, n, seed } => commands::sample(&mut out, fmt, state, n, seed),
        Command::Pgf { state, t, method } => commands::pgf(&mut out, fmt, state, &t, &method),
        Command::Verify { level, suite, inject_perturbation } => {
            commands::verify(&mut out, fmt, level, &suite, inject_perturbation)
        }
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(CliError::Verify(msg)), _) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        (Err(CliError::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: output error: {e}");
            ExitCode::from(2)
        }
    }
}
