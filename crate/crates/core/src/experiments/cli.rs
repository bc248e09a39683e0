//! Command-line front end. Exit codes: 0 success, 1 failed checks or
//! runtime error, 2 usage or configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::counterexamples::{build_pair, CounterexampleSpec, Family};
use crate::error::{Error, Result};
use crate::experiments::checks::run_checks;
use crate::experiments::config::SweepConfig;
use crate::experiments::sweep::run_sweep;
use crate::field::{gradient, jacobian, trace};
use crate::grid::{make_polar_grid, Grid};
use crate::norms::{gagliardo_h12, h1_seminorm, hessian_l1, linf_norm, lorentz_l21, lp_norm, NormReport, Resolution};
use crate::poisson::{solve_dirichlet_disk, solve_wente_neumann, SolveOptions};

#[derive(Debug, Parser)]
#[command(name = "wente-lab", version, about = "Wente-type estimates: solvers, counterexamples and sweeps")]
struct Cli {
    /// Seed for randomized sampling in `check`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the compatible Neumann problem on the disk for one instance and
    /// write the solution as CSV.
    Solve {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        eps: f64,
        /// Radial cells; the angular count is 2n.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Field CSV destination (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Norm report CSV destination (stderr if absent).
        #[arg(long)]
        norms: Option<PathBuf>,
    },
    /// Run a sweep config file.
    Sweep { config: PathBuf },
    /// Run the built-in invariant checks.
    Check,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::InvalidGrid(_) => 2,
        _ => 1,
    }
}

fn sink(path: Option<&Path>, fallback: Box<dyn Write>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => fallback,
    })
}

fn solve(spec: &CounterexampleSpec, n: usize, output: Option<&Path>, norms: Option<&Path>) -> Result<()> {
    let grid = Grid::from(make_polar_grid(n, 2 * n)?).shared();
    let (a, b) = build_pair(spec, &grid)?;
    let u = solve_dirichlet_disk(&jacobian(&a, &b)?)?;
    let sol = solve_wente_neumann(&a, &b, &SolveOptions::default())?;
    let grad_w = gradient(&sol.u);

    let mut report = NormReport::new(Resolution::of(&grid));
    report.push("norm_a_inf", linf_norm(&a))?;
    report.push("seminorm_a_h1", h1_seminorm(&a))?;
    report.push("seminorm_b_h1", h1_seminorm(&b))?;
    report.push("lorentz_b", lorentz_l21(&gradient(&b)))?;
    report.push("linf_u", linf_norm(&u))?;
    report.push("l2_grad_u", h1_seminorm(&u))?;
    report.push("l2_grad_w", lp_norm(&grad_w, 2.0)?)?;
    report.push("lorentz_grad_w", lorentz_l21(&grad_w))?;
    report.push("hessian_l1_w", hessian_l1(&sol.u))?;
    report.push("h12_trace_w", gagliardo_h12(&trace(&sol.u)))?;
    report.push("abs_defect", sol.defect.abs())?;

    let mut out = sink(output, Box::new(io::stdout().lock()))?;
    sol.u.write_csv(&mut out)?;
    out.flush()?;
    let mut out = sink(norms, Box::new(io::stderr().lock()))?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn sweep(path: &Path) -> Result<()> {
    let cfg = SweepConfig::load(path)?;
    let report = run_sweep(&cfg)?;
    match &cfg.output {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            report.write_csv(&mut f)?;
            f.flush()?;
            report.write_summary(io::stdout().lock())
        }
        None => {
            report.write_csv(io::stdout().lock())?;
            report.write_summary(io::stderr().lock())
        }
    }
}

fn check(seed: u64) -> Result<bool> {
    let outcomes = run_checks(seed)?;
    let mut out = io::stdout().lock();
    for c in &outcomes {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    Ok(outcomes.iter().all(|c| c.passed))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Solve {
            family,
            beta,
            eps,
            n,
            output,
            norms,
        } => CounterexampleSpec::new(*family, *beta, *eps)
            .and_then(|spec| solve(&spec, *n, output.as_deref(), norms.as_deref()))
            .map(|_| true),
        Command::Sweep { config } => sweep(config).map(|_| true),
        Command::Check => check(cli.seed),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
