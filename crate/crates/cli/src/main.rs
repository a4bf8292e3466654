mod job;
mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;

use dforge::arith::factor::{factor_limit, set_factor_limit};

use job::{parse_job, Command, OutputFormat};
use report::{Audit, RunReport, Status};

/// Certified Dirichlet series and arithmetic-function jobs.
///
/// Exit status: 0 success, 1 error, 2 a certified negative result
/// (rank deficit, failed recovery, exceptions up to the horizon, residual
/// above its bound).
#[derive(Debug, Parser)]
#[command(name = "dforge", version)]
struct Cli {
    command: Command,
    /// JSON job specification.
    #[arg(long)]
    job: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the tabular results here as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Leave timing and thread count out of the report.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads for summation and matrix construction.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

const FACTOR_LIMIT_VAR: &str = "DFORGE_FACTOR_LIMIT";

fn apply_factor_limit() -> Result<()> {
    if let Ok(v) = std::env::var(FACTOR_LIMIT_VAR) {
        let limit: u64 = v.trim().parse().map_err(|_| anyhow!("{FACTOR_LIMIT_VAR}={v:?} is not a positive integer"))?;
        if limit == 0 {
            bail!("{FACTOR_LIMIT_VAR} must be positive");
        }
        set_factor_limit(limit);
    }
    Ok(())
}

struct Destinations {
    report: Option<PathBuf>,
    csv: Option<PathBuf>,
}

fn destinations(cli: &Cli, job: Option<&job::JobSpec>) -> Destinations {
    let mut d = Destinations { report: cli.out.clone(), csv: cli.csv.clone() };
    if let Some(o) = job.and_then(|j| j.output.as_ref()) {
        let slot = match o.format {
            OutputFormat::Json => &mut d.report,
            OutputFormat::Csv => &mut d.csv,
        };
        slot.get_or_insert_with(|| PathBuf::from(&o.path));
    }
    d
}

fn execute(cli: &Cli) -> Result<u8> {
    let started = Instant::now();
    let mut report = RunReport {
        tool: "dforge",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.to_string(),
        status: Status::Error,
        job: serde_json::Value::Null,
        results: None,
        error: None,
        audit: Audit::default(),
        threads: None,
        wall_time_s: None,
    };
    let mut dest = destinations(cli, None);

    let outcome = (|| -> Result<run::Outcome> {
        apply_factor_limit()?;
        report.audit.factor_limit = factor_limit();
        let text = std::fs::read_to_string(&cli.job).with_context(|| format!("reading {}", cli.job.display()))?;
        let (job, echo) = parse_job(&text)?;
        report.job = echo;
        dest = destinations(cli, Some(&job));
        if let Some(c) = job.command {
            if c != cli.command {
                bail!("job is for `{c}` but `{}` was requested", cli.command);
            }
        }
        if dest.csv.is_some() && !run::has_table(cli.command) {
            bail!("`{}` has no CSV output", cli.command);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads.map_or(0, usize::from))
            .build()?;
        report.threads = Some(pool.current_num_threads());
        pool.install(|| run::run(cli.command, &job, &mut report.audit))
    })();

    match outcome {
        Ok(o) => {
            report.status = o.status;
            report.results = Some(o.results);
            if let (Some(path), Some(table)) = (&dest.csv, &o.table) {
                table.write(path)?;
            }
        }
        Err(e) => {
            report.error = Some(format!("{e:#}"));
            eprintln!("dforge: {e:#}");
        }
    }
    if cli.deterministic {
        report.threads = None;
    } else {
        report.wall_time_s = Some(started.elapsed().as_secs_f64());
    }
    report.write(dest.report.as_deref().map(Path::new))?;
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dforge: {e:#}");
            ExitCode::from(1)
        }
    }
}
