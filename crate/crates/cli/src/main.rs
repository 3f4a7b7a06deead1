//! `annulus-div`: solve `div U = f` on an annulus, verify the result and run
//! the exact identity suite.
//!
//! ```text
//! annulus-div solve --config run.json --out-dir out/
//! annulus-div verify --config out/config.json
//! annulus-div identities --max-n 50
//! ```

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use annulus_div::coefficients::identities::check_identities;
use annulus_div::verify::{fd_divergence, spread_directions};
use annulus_div::{assemble_solution, run_suite, SolutionField, Source, VerificationReport};
use clap::{Parser, Subcommand};

use config::RunConfig;

pub const THREADS_ENV: &str = "ANNULUS_DIV_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<annulus_div::Error> for CliError {
    fn from(e: annulus_div::Error) -> Self {
        Self::Config(e.to_string())
    }
}

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "annulus-div", version, about = "Divergence equation on an annulus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble a solution, write field samples and a verification report
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the exact-arithmetic identities for 2 <= n <= max_n
    Identities {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        max_n: u32,
    },
    /// Re-run the verification checks for a config and print the report
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn assemble(config: &RunConfig) -> Result<SolutionField, CliError> {
    let domain = config.domain()?;
    let source: Arc<dyn Source> = Arc::new(config.source.build(&domain)?);
    Ok(assemble_solution(source, &domain, config.resolution())?)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_samples(solution: &SolutionField, config: &RunConfig, path: &Path) -> Result<(), CliError> {
    let d = solution.domain();
    let n = d.n();
    let step = config.resolution().fd_step_for(d);
    let source = solution.tilde_f().source();
    let out = &config.output;
    let points: Vec<Vec<f64>> = (0..out.sample_radii)
        .flat_map(|i| {
            let r = d.r1() + d.width() * i as f64 / (out.sample_radii - 1) as f64;
            spread_directions(n, out.sample_directions)
                .into_iter()
                .map(move |y| y.iter().map(|c| c * r).collect::<Vec<_>>())
        })
        .collect();
    let values = solution.eval_many(&points)?;

    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("U{i}")))
        .chain(["f".to_string(), "divU_fd".to_string()])
        .collect();
    writer.write_record(&header)?;
    for (x, u) in points.iter().zip(&values) {
        let div = fd_divergence(|p| solution.eval(p), x, step).unwrap_or(f64::NAN);
        let row: Vec<String> = x
            .iter()
            .chain(u)
            .copied()
            .chain([source.eval(x), div])
            .map(fmt_float)
            .collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn print_summary(report: &VerificationReport) {
    for c in &report.checks {
        let status = if c.pass { "pass" } else { "FAIL" };
        eprintln!("{status:4}  {:30} {:>10.3e}  (tol {:.1e})", c.name, c.value, c.tol);
    }
    eprintln!("overall: {}", if report.pass { "pass" } else { "FAIL" });
}

fn exit_for(report: &VerificationReport) -> ExitCode {
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_CHECKS)
    }
}

fn cmd_solve(config_path: &Path, out_dir: &Path) -> Result<ExitCode, CliError> {
    let config = RunConfig::load(config_path)?;
    let solution = assemble(&config)?;
    let report = run_suite(&solution, &config.verify);
    fs::create_dir_all(out_dir)?;
    write_samples(&solution, &config, &out_dir.join(&config.output.csv))?;
    fs::write(out_dir.join(&config.output.report), report.to_json())?;
    fs::write(out_dir.join("config.json"), config.to_json())?;
    print_summary(&report);
    Ok(exit_for(&report))
}

fn cmd_verify(config_path: &Path) -> Result<ExitCode, CliError> {
    let config = RunConfig::load(config_path)?;
    let report = run_suite(&assemble(&config)?, &config.verify);
    println!("{}", report.to_json());
    print_summary(&report);
    Ok(exit_for(&report))
}

fn cmd_identities(max_n: usize) -> Result<ExitCode, CliError> {
    let mut all = true;
    for n in 2..=max_n {
        let check = check_identities(n)?;
        all &= check.pass();
        println!(
            "n={n:<3} {}  taylor_low={} taylor_high={} dual_forms={} closed_form={}",
            if check.pass() { "pass" } else { "FAIL" },
            check.taylor_low_vanish,
            check.taylor_high_positive,
            check.dual_forms_agree,
            check.closed_form_matches_solve,
        );
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED_CHECKS) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Solve { config, out_dir } => cmd_solve(config, out_dir),
        Command::Verify { config } => cmd_verify(config),
        Command::Identities { max_n } => cmd_identities(*max_n as usize),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}
