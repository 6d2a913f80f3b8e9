use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use spectral_action::commands::{self, exit, Command, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Verify,
    Coeff,
    Action,
    Sm,
    Torus,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Verify => Command::Verify,
            Cmd::Coeff => Command::Coeff,
            Cmd::Action => Command::Action,
            Cmd::Sm => Command::Sm,
            Cmd::Torus => Command::Torus,
        }
    }
}

/// Verify and evaluate spectral-action coefficients of sub-Dirac operators on foliations.
///
/// Exit codes: 0 all identities pass, 1 identity failure, 2 input error, 3 resource limit.
#[derive(Debug, Parser)]
#[command(name = "spectral-action", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "verify")]
    command: Cmd,
    /// Half the leaf dimension.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Normal dimension (even).
    #[arg(long, default_value_t = 2)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Relative tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Input JSON (curvature file, SM parameters, or torus spec).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    /// `sharp`, `zero`, `ramp:<plateau>`, or a JSON file of `[s, F(s)]` samples.
    #[arg(long)]
    cutoff: Option<String>,
    /// Heat time for the torus benchmark.
    #[arg(long)]
    time: Option<f64>,
    /// Fail unless the curvature file carries boundary data.
    #[arg(long)]
    boundary: bool,
    #[arg(long)]
    include_total_derivatives: bool,
    #[arg(long)]
    oracle_corrected_signs: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT_ERROR } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cfg = RunConfig {
        command: cli.command.into(),
        p: cli.p,
        q: cli.q,
        seed: cli.seed,
        trials: cli.trials,
        tol: cli.tol,
        input: cli.input,
        output: cli.out,
        lambda: cli.lambda,
        cutoff: cli.cutoff,
        time: cli.time,
        boundary: cli.boundary,
        include_total_derivatives: cli.include_total_derivatives,
        oracle_corrected_signs: cli.oracle_corrected_signs,
    };
    let report = match commands::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::exit_code_for(&e) as u8);
        }
    };
    let text = match commands::report_json(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::INPUT_ERROR as u8);
        }
    };
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(exit::INPUT_ERROR as u8);
            }
        }
        None => print!("{text}"),
    }
    for r in report.records.iter().filter(|r| r.status == spectral_action::report::Status::Fail) {
        log::error!("{} failed: lhs {} rhs {} rel {}", r.id, r.lhs, r.rhs, r.rel_dev);
    }
    ExitCode::from(commands::exit_code(&report) as u8)
}
