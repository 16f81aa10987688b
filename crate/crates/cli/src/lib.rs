//! Command-line front end: `interaction`, `partitions`, `verify-kernel` and
//! `frechet`. Exit codes are 0 on success, 2 on input errors and 3 when a
//! verification fails.

pub mod input;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use pdik::{Bernstein1D, KernelSpec, Mode, VerifyReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Points used by the CND check on the factors of a kernel.
const CND_POINTS: usize = 16;
const CND_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Library(#[from] pdik::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Library(_) => EXIT_INPUT,
            CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pdik", version, about = "Interaction statistics with order-k independence kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Lancaster,
    Streitberg,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lancaster => Mode::Lancaster,
            ModeArg::Streitberg => Mode::Streitberg,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interaction statistic of a CSV sample, with an optional permutation p-value.
    Interaction {
        #[arg(long)]
        input: PathBuf,
        /// Column counts of the variables, left to right, e.g. `1,2,1`.
        #[arg(long)]
        groups: String,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value = "lancaster")]
        mode: ModeArg,
        /// Kernel spec JSON file.
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        permutations: Option<usize>,
        #[arg(long, requires = "permutations")]
        seed: Option<u64>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// The first CSV row is data, not a header.
        #[arg(long)]
        no_header: bool,
    },
    /// Set partitions of `{1..n}` with their Streitberg coefficients, one JSON object per line.
    Partitions {
        #[arg(long)]
        n: usize,
    },
    /// Random PDI check, inequality suite and CND check on the kernel's one-variable factors.
    VerifyKernel {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fréchet difference identities for `t_1..t_ell`.
    Frechet {
        #[arg(long)]
        ell: usize,
        /// Comma-separated positive values.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Power to check; all of `0..=ell` when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Resolved configuration of an `interaction` run.
#[derive(Debug, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    input: String,
    groups: Vec<usize>,
    order: usize,
    mode: Mode,
    kernel_path: String,
    permutations: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
    header: bool,
}

#[derive(Debug, Serialize)]
struct InteractionReport {
    statistic: f64,
    p_value: Option<f64>,
    order: usize,
    mode: Mode,
    kernel: KernelSpec,
    seed: Option<u64>,
    version: &'static str,
    atoms: usize,
    route: pdik::Route,
    rows: usize,
    config: RunConfig,
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    passed: bool,
    kernel: KernelSpec,
    order: usize,
    trials: usize,
    seed: u64,
    dim: usize,
    version: &'static str,
    checks: Vec<VerifyReport>,
}

#[derive(Debug, Serialize)]
struct PartitionLine {
    blocks: Vec<Vec<usize>>,
    coefficient: i64,
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Interaction { input, groups, order, mode, kernel, permutations, seed, out, no_header } => {
            let groups = input::parse_groups(&groups)?;
            if order == 0 || order > groups.len() {
                return Err(CliError::Input(format!("--order must lie in [1, {}], got {order}", groups.len())));
            }
            let spec = input::read_kernel(&kernel)?;
            let sample = input::read_sample(&input, &groups, !no_header)?;
            let mode = Mode::from(mode);
            let seed = permutations.map(|_| seed.unwrap_or(0));
            let report = match (permutations, seed) {
                (Some(b), Some(s)) => pdik::permutation_pvalue(&sample, order, &spec, mode, b, s)?,
                _ => pdik::interaction_statistic(&sample, order, &spec, mode)?,
            };
            let config = RunConfig {
                subcommand: "interaction",
                input: input.display().to_string(),
                groups,
                order,
                mode,
                kernel_path: kernel.display().to_string(),
                permutations,
                seed,
                out: out.as_ref().map(|p| p.display().to_string()),
                header: !no_header,
            };
            let report = InteractionReport {
                statistic: report.statistic,
                p_value: report.p_value,
                order,
                mode,
                kernel: spec,
                seed,
                version: pdik::VERSION,
                atoms: report.atoms,
                route: report.route,
                rows: sample.m(),
                config,
            };
            emit(&report, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Partitions { n } => {
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            for pi in pdik::enumerate_partitions(n)? {
                let line = PartitionLine {
                    blocks: pi.blocks().iter().map(|b| b.iter().map(|i| i + 1).collect()).collect(),
                    coefficient: pdik::streitberg_coefficient(&pi),
                };
                serde_json::to_writer(&mut w, &line).map_err(io::Error::from)?;
                writeln!(w)?;
            }
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::VerifyKernel { kernel, order, trials, seed, dim, out } => {
            let spec = input::read_kernel(&kernel)?;
            let mut checks =
                vec![pdik::pdi_random_check(&spec, order, trials, seed, dim)?, pdik::inequality_suite(seed, trials)?];
            checks.extend(factor_cnd_checks(&spec, seed, dim)?);
            let passed = checks.iter().all(|c| c.passed);
            let summary =
                VerifySummary { passed, kernel: spec, order, trials, seed, dim, version: pdik::VERSION, checks };
            emit(&summary, out.as_deref())?;
            Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Frechet { ell, t, k } => {
            let t = input::parse_reals(&t)?;
            let powers: Vec<usize> = match k {
                Some(k) => vec![k],
                None => (0..=ell).collect(),
            };
            let reports =
                powers.into_iter().map(|k| pdik::frechet_check(ell, &t, k)).collect::<pdik::Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            emit(&reports, None)?;
            Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

/// CND check of `ψ(‖x - y‖²)` for every one-variable Bernstein factor of the spec.
fn factor_cnd_checks(spec: &KernelSpec, seed: u64, dim: usize) -> Result<Vec<VerifyReport>, CliError> {
    let parts: Vec<Bernstein1D> = match spec {
        KernelSpec::Product(p) => p.parts.clone(),
        KernelSpec::OrderK(o) => o.cross.iter().flat_map(|c| c.parts.iter().copied()).collect(),
        KernelSpec::SumCm(_) => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> =
        (0..CND_POINTS).map(|_| (0..dim.max(1)).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let mut reports = Vec::with_capacity(parts.len());
    for part in parts {
        let mut report = pdik::cnd_check(|t| part.eval(t), &points, CND_TOL)?;
        report.name = format!("cnd {part:?}");
        report.seed = seed;
        reports.push(report);
    }
    Ok(reports)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::from)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
