use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use polyroots::{all_roots, gauss_run, Error, GaussOptions};

mod parse;
mod report;
mod svg;

use report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// All roots by descent and deflation.
    Descent,
    /// One root from traced level curves and a Miranda box.
    Gauss,
}

/// Polynomial root localization.
///
/// Coefficients are given in descending powers, separated by whitespace:
/// "1 0 -1" is z^2 - 1. A token "re,im" is a complex coefficient, so
/// "1 0 0,1" is z^2 + i. In a file, '#' starts a comment.
#[derive(Debug, Parser)]
#[command(name = "polyroots", version, group(ArgGroup::new("input").required(true).args(["poly", "poly_file"])))]
struct Args {
    /// Coefficients in descending powers.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// File holding the coefficients.
    #[arg(long, value_name = "PATH")]
    poly_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "descent")]
    method: Method,
    /// Residual target |f(z)| for every reported root.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write a plot of the gauss run.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Threads used to trace level curves.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Picks the arc used by the reverse-trace audit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report stage timings and progress on stderr.
    #[arg(long)]
    verbose: bool,
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    if !(args.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    if args.svg.is_some() && args.method != Method::Gauss {
        return Err(Failure::Usage("--svg needs --method gauss".into()));
    }
    let text = match (&args.poly, &args.poly_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let p = parse::parse_poly(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    if p.degree() == 0 {
        return Err(Failure::Usage(Error::DegreeZero.to_string()));
    }

    let report = match args.method {
        Method::Descent => {
            let roots = all_roots(&p, args.tol).map_err(Failure::Numeric)?;
            Report::descent(&p, &roots)
        }
        Method::Gauss => {
            let opts = GaussOptions { tol: args.tol, jobs: args.jobs.max(1), seed: args.seed, ..GaussOptions::default() };
            let run = gauss_run(&p, &opts).map_err(Failure::Numeric)?;
            if args.verbose {
                for (stage, d) in &run.stages {
                    eprintln!("{stage}: {:.6} s", d.as_secs_f64());
                }
            }
            if let Some(path) = &args.svg {
                svg::emit_svg(&run, path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            Report::gauss(&p, &run, args.verbose)
        }
    };

    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, json).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
