//! Command-line verifier for the sphere quotient `S^n / <B>`.

pub mod error;
pub mod json;
pub mod randers_check;
pub mod report;
pub mod verify;

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use projdim_core::liealg::DimensionReport;

pub use error::{VerifyError, EXIT_AMBIGUOUS, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
pub use randers_check::{run_randers_check, RandersConfig, RandersReport};
pub use report::{emit_report, Format, Report, TestResult, Tolerances, VerificationReport};
pub use verify::run_verify;

#[derive(Debug, Parser)]
#[command(
    name = "projdim",
    version,
    about = "Numerical certificates for the projective group of S^n/<B>"
)]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "tol-rank", global = true, default_value_t = projdim_core::numkernel::DEFAULT_RANK_TOL)]
    pub tol_rank: f64,
    #[arg(long, global = true, default_value_t = projdim_core::randers::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full certificate suite for one n.
    Verify {
        #[arg(long)]
        n: usize,
    },
    /// Certificate suites for every n in a range, evaluated in parallel.
    VerifyRange {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Geodesics of a Randers metric read from a JSON config.
    RandersCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-form dimensions only.
    Dims {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimsReport {
    pub n: usize,
    pub dim_sl: usize,
    pub dim_isom_bound: usize,
    pub dim_proj_prime: usize,
    pub chain_holds: bool,
}

impl From<(usize, DimensionReport)> for DimsReport {
    fn from((n, d): (usize, DimensionReport)) -> Self {
        Self {
            n,
            dim_sl: d.dim_sl,
            dim_isom_bound: d.dim_isom_bound,
            dim_proj_prime: d.dim_proj_prime,
            chain_holds: d.chain_holds,
        }
    }
}

impl Report for DimsReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "  dim sl(n+1)              {}", self.dim_sl);
        let _ = writeln!(s, "  isometry bound n(n+1)/2  {}", self.dim_isom_bound);
        let _ = writeln!(s, "  n^2 - 2n + 2             {}", self.dim_proj_prime);
        let _ = writeln!(
            s,
            "  chain {} < {} < {}  {}",
            self.dim_isom_bound,
            self.dim_proj_prime,
            self.dim_sl,
            if self.chain_holds {
                "STRICT"
            } else {
                "NOT STRICT"
            }
        );
        s
    }
}

pub const MAX_DIMS_N: usize = 1 << 20;

fn tolerances(cli: &Cli) -> Result<Tolerances, VerifyError> {
    if !(cli.tol_rank > 0.0 && cli.tol_rank < 1.0) {
        return Err(VerifyError::Usage(format!(
            "--tol-rank must lie in (0, 1), got {}",
            cli.tol_rank
        )));
    }
    if !(cli.dt > 0.0 && cli.dt <= TAU / 10.0) {
        return Err(VerifyError::Usage(format!(
            "--dt must lie in (0, {:.4}], got {}",
            TAU / 10.0,
            cli.dt
        )));
    }
    Ok(Tolerances {
        rank: cli.tol_rank,
        dt: cli.dt,
        ..Tolerances::default()
    })
}

/// Evaluates every n in `from..=to` on its own thread; reports come back in
/// order of n.
pub fn run_range(
    from: usize,
    to: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<VerificationReport>, VerifyError> {
    if from > to {
        return Err(VerifyError::Usage(format!(
            "--from {from} exceeds --to {to}"
        )));
    }
    verify::check_n(from)?;
    verify::check_n(to)?;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (from..=to)
            .map(|n| s.spawn(move || run_verify(n, seed, tol)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn execute(cli: &Cli, out: &mut String) -> Result<i32, VerifyError> {
    let tol = tolerances(cli)?;
    let format = Format::from(cli.format);
    let status = |ok: bool| if ok { EXIT_OK } else { EXIT_CHECK_FAILED };
    match &cli.command {
        Command::Verify { n } => {
            let r = run_verify(*n, cli.seed, &tol)?;
            out.push_str(&emit_report(&r, format));
            Ok(status(r.overall))
        }
        Command::VerifyRange { from, to } => {
            let reports = run_range(*from, *to, cli.seed, &tol)?;
            out.push_str(&emit_report(&reports, format));
            Ok(status(reports.iter().all(|r| r.overall)))
        }
        Command::RandersCheck { config } => {
            let text = std::fs::read_to_string(config)
                .map_err(|e| VerifyError::Usage(format!("{}: {e}", config.display())))?;
            let config = RandersConfig::from_json(&text)?;
            let r = run_randers_check(&config, cli.seed, &tol)?;
            out.push_str(&emit_report(&r, format));
            Ok(EXIT_OK)
        }
        Command::Dims { n } => {
            if !(2..=MAX_DIMS_N).contains(n) {
                return Err(VerifyError::Usage(format!(
                    "n must be between 2 and {MAX_DIMS_N}, got {n}"
                )));
            }
            let d = DimensionReport::from_formulas(*n).map_err(VerifyError::from_core)?;
            out.push_str(&emit_report(&DimsReport::from((*n, d)), format));
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut out = String::new();
    match execute(&cli, &mut out) {
        Ok(code) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
