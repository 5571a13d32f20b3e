//! `nisqlab`: run experiments, simulate circuits and verify property suites.
//!
//! Exit codes: 0 success, 1 invariant failure or runtime error, 2 usage,
//! 3 capacity.

mod config;
mod experiments;
mod output;
mod simulate;
mod verify;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{usage, ParamArgs, Params, UsageError};
use output::{write_file, GIT_HASH, VERSION};

#[derive(Parser, Debug)]
#[command(name = "nisqlab", version, about = "Noisy quantum circuit simulator and experiment lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Output distribution of a circuit JSON file.
    Simulate(ParamArgs),
    /// Run a named experiment and write its CSV (and SVG plot).
    Experiment {
        /// Experiment name; see `nisqlab list`.
        name: Option<String>,
        #[arg(long = "experiment", value_name = "NAME")]
        experiment: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the property suites and print a JSON summary.
    Verify {
        /// Comma-separated suites to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long)]
        threads: Option<usize>,
        /// Deliberately break the simulator to confirm the suites notice.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// List experiments and verify suites.
    List,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Fault {
    LambdaSign,
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn emit(csv: &[u8], dir: Option<&Path>, stem: &str, svg: Option<String>) -> Result<()> {
    match dir {
        Some(dir) => {
            eprintln!("wrote {}", write_file(dir, &format!("{stem}.csv"), csv)?.display());
            if let Some(svg) = svg {
                eprintln!("wrote {}", write_file(dir, &format!("{stem}.svg"), svg.as_bytes())?.display());
            }
        }
        None => std::io::stdout().write_all(csv)?,
    }
    Ok(())
}

fn run_simulate(args: &ParamArgs) -> Result<bool> {
    let params = Params::resolve(args)?;
    if let Some(e) = &params.experiment {
        return Err(usage(format!("config names experiment `{e}`; use `nisqlab experiment`")));
    }
    params.check_accepted("simulate", simulate::ACCEPTS)?;
    set_threads(params.threads)?;
    let sim = simulate::simulate(&params)?;
    let csv = sim.table.to_csv("simulate", sim.seed)?;
    emit(&csv, params.out.as_deref(), "simulate", None)?;
    Ok(true)
}

fn run_experiment(name: Option<String>, flag: Option<String>, args: &ParamArgs) -> Result<bool> {
    let params = Params::resolve(args)?;
    let name = match (name, flag) {
        (Some(a), Some(b)) if a != b => return Err(usage(format!("experiment named twice: `{a}` and `{b}`"))),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => params
            .experiment
            .clone()
            .ok_or_else(|| usage("no experiment named; pass one or use --experiment"))?,
    };
    let exp = experiments::find(&name)?;
    params.check_accepted(exp.name, exp.accepts)?;
    set_threads(params.threads)?;
    let out = (exp.run)(&params)?;
    let csv = out.table.to_csv(&format!("experiment:{}", exp.name), out.seed)?;
    emit(&csv, params.out.as_deref(), exp.name, out.plot.as_ref().map(|p| p.to_svg()))?;
    for f in &out.failures {
        eprintln!("invariant failed: {f}");
    }
    Ok(out.failures.is_empty())
}

#[derive(Serialize)]
struct VerifySummary {
    version: &'static str,
    git: &'static str,
    fault: Option<Fault>,
    suites: Vec<&'static str>,
    passed: usize,
    failed: usize,
    checks: Vec<verify::Entry>,
}

fn run_verify(only: &[String], threads: Option<usize>, fault: Option<Fault>) -> Result<bool> {
    for name in only {
        if !verify::SUITES.iter().any(|s| s.name == name) {
            let names: Vec<_> = verify::SUITES.iter().map(|s| s.name).collect();
            return Err(usage(format!("unknown suite `{name}`; available: {}", names.join(", "))));
        }
    }
    set_threads(threads)?;
    if let Some(Fault::LambdaSign) = fault {
        nisqlab::qsim::fault::set_lambda_sign_fault(true);
    }
    let suites: Vec<_> = verify::SUITES
        .iter()
        .filter(|s| only.is_empty() || only.iter().any(|o| o == s.name))
        .collect();
    let mut checks = Vec::new();
    for s in &suites {
        for e in verify::run_suite(s) {
            eprintln!("{} [{}] {}", if e.report.holds { "PASS" } else { "FAIL" }, e.suite, e.report.claim);
            checks.push(e);
        }
    }
    let failed = checks.iter().filter(|e| !e.report.holds).count();
    let summary = VerifySummary {
        version: VERSION,
        git: GIT_HASH,
        fault,
        suites: suites.iter().map(|s| s.name).collect(),
        passed: checks.len() - failed,
        failed,
        checks,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(failed == 0)
}

fn list() {
    println!("experiments:");
    for e in experiments::EXPERIMENTS {
        println!("  {:<20} {} (parameters: {})", e.name, e.summary, e.accepts.join(", "));
    }
    println!("verify suites:");
    for s in verify::SUITES {
        println!("  {}", s.name);
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<nisqlab::error::Error>() {
            if e.is_capacity() {
                return 3;
            }
            if matches!(e, nisqlab::error::Error::InvalidParameter(_)) {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Experiment { name, experiment, params } => run_experiment(name, experiment, &params),
        Command::Verify {
            only,
            threads,
            inject_fault,
        } => run_verify(&only, threads, inject_fault),
        Command::List => {
            list();
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
