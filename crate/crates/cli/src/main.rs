//! `qcong`: reproducible experiments on x1^2 + x2^2 ≡ x3^2 modulo odd prime powers.
//!
//! Exit codes: 0 success, 2 usage or precondition failure, 3 oracle disagreement.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{write_json, CliError, RunManifest};

#[derive(Parser)]
#[command(
    name = "qcong",
    version,
    about = "Small solutions of x1^2 + x2^2 = x3^2 modulo odd prime powers"
)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files when --out is not given.
    #[arg(long, global = true, env = "QCONG_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smoothed unit-solution count T against the predicted main term.
    Count(CountArgs),
    /// Sweep `count` over exponents and box sizes, one CSV row each.
    Scan(ScanArgs),
    /// Complete exponential sums by brute force and in closed form.
    Expsum(ExpsumArgs),
    /// Admissible circle parameters and the parametrization bijection.
    Param(ParamArgs),
    /// Quadratic Gauss sum G_q, termwise and closed form.
    Gauss(GaussArgs),
    /// Poisson summation check for a Gaussian weight.
    Poisson(PoissonArgs),
    /// Integer Pythagorean triples in a box.
    Triples(TriplesArgs),
    /// Congruence box count against exact triples below sqrt(q/2).
    Transition(TransitionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    SqrtBucket,
    TripleLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Bruteforce,
    Closed,
    Both,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("size").required(true).args(["n_scale", "nu"])))]
pub struct CountArgs {
    /// Odd prime p > 5.
    #[arg(long)]
    pub p: u64,
    /// Exponent n of the modulus q = p^n.
    #[arg(long, value_name = "EXP")]
    pub n: u32,
    /// Box scale N.
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N")]
    pub n_scale: Option<f64>,
    /// Set N = ceil(q^nu) instead of giving N.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Scale s of the Gaussian weight exp(-pi (x/s)^2).
    #[arg(long, default_value_t = 1.0)]
    pub phi_scale: f64,
    /// Sum coordinates over |x| <= cutoff * N.
    #[arg(long, default_value_t = qcong::counter::DEFAULT_CUTOFF)]
    pub cutoff: f64,
    /// Counting kernel.
    #[arg(long, value_enum, default_value_t = MethodArg::SqrtBucket)]
    pub method: MethodArg,
    /// Also count unit solutions in the sharp box max |x_i| <= N.
    #[arg(long)]
    pub exact_box: bool,
    /// Output JSON path (default: stdout or the output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("size").required(true).args(["n_scale", "nu"])))]
pub struct ScanArgs {
    /// Odd prime p > 5.
    #[arg(long)]
    pub p: u64,
    /// Exponent range, inclusive: "4..6" or a single value.
    #[arg(long, value_name = "RANGE")]
    pub n: String,
    /// Comma-separated box scales, e.g. "100,200,400".
    #[arg(long = "N", value_name = "LIST")]
    #[serde(rename = "N")]
    pub n_scale: Option<String>,
    /// Set N = ceil(q^nu) for every exponent.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Scale s of the Gaussian weight.
    #[arg(long, default_value_t = 1.0)]
    pub phi_scale: f64,
    /// Sum coordinates over |x| <= cutoff * N.
    #[arg(long, default_value_t = qcong::counter::DEFAULT_CUTOFF)]
    pub cutoff: f64,
    /// Counting kernel.
    #[arg(long, value_enum, default_value_t = MethodArg::SqrtBucket)]
    pub method: MethodArg,
    /// Output CSV path; a manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpsumArgs {
    /// Odd prime p.
    #[arg(long)]
    pub p: u64,
    /// Exponent n of the modulus q = p^n.
    #[arg(long, value_name = "EXP")]
    pub n: u32,
    /// First frequency k1.
    #[arg(long, allow_hyphen_values = true)]
    pub k1: i64,
    /// Second frequency k2.
    #[arg(long, allow_hyphen_values = true)]
    pub k2: i64,
    /// Unit x3 scaling the phase.
    #[arg(long, allow_hyphen_values = true)]
    pub x3: i64,
    /// Restrict to the class t ≡ alpha mod p (default: the full sum).
    #[arg(long)]
    pub alpha: Option<u64>,
    /// Evaluation route.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ParamArgs {
    /// Odd prime p.
    #[arg(long)]
    pub p: u64,
    /// Exponent n of the modulus q = p^n.
    #[arg(long, value_name = "EXP")]
    pub n: u32,
    /// Include every (t, y1, y2) in the output.
    #[arg(long)]
    pub points: bool,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GaussArgs {
    /// Odd modulus q.
    #[arg(long)]
    pub q: u64,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PoissonArgs {
    /// Gaussian scale s.
    #[arg(long)]
    pub s: f64,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TriplesArgs {
    /// Box half-width N.
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N")]
    pub n_box: u64,
    /// Cross-check against direct enumeration (N <= 2000).
    #[arg(long)]
    pub oracle: bool,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransitionArgs {
    /// Odd prime p.
    #[arg(long)]
    pub p: u64,
    /// Exponent n of the modulus q = p^n.
    #[arg(long, value_name = "EXP")]
    pub n: u32,
    /// Box half-width N, below sqrt(q/2).
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N")]
    pub n_box: u64,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Context {
    pub out_dir: Option<PathBuf>,
    pub threads: usize,
    pub start: Instant,
}

impl Context {
    pub fn manifest(
        &self,
        subcommand: &str,
        params: &impl Serialize,
        output: Option<&std::path::Path>,
    ) -> RunManifest {
        RunManifest {
            subcommand: subcommand.to_string(),
            params: serde_json::to_value(params).unwrap_or_default(),
            tool_version: output::TOOL_VERSION.to_string(),
            output_path: output.map(|p| p.display().to_string()),
            threads: self.threads,
            wall_time_s: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = Context {
        out_dir: cli.out_dir,
        threads: rayon::current_num_threads(),
        start: Instant::now(),
    };
    let (name, params, out, report) = match &cli.command {
        Command::Scan(args) => return commands::scan(args, &ctx),
        Command::Count(args) => ("count", to_value(args), &args.out, commands::count(args)),
        Command::Expsum(args) => ("expsum", to_value(args), &args.out, commands::expsum(args)),
        Command::Param(args) => ("param", to_value(args), &args.out, commands::param(args)),
        Command::Gauss(args) => ("gauss", to_value(args), &args.out, commands::gauss(args)),
        Command::Poisson(args) => (
            "poisson",
            to_value(args),
            &args.out,
            commands::poisson(args),
        ),
        Command::Triples(args) => (
            "triples",
            to_value(args),
            &args.out,
            commands::triples(args),
        ),
        Command::Transition(args) => (
            "transition",
            to_value(args),
            &args.out,
            commands::transition(args),
        ),
    };
    let report = report?;
    let default_name = format!("{}.json", output::default_stem(name, &params));
    let path = output::destination(out.as_deref(), ctx.out_dir.as_deref(), &default_name);
    let manifest = ctx.manifest(name, &params, path.as_deref());
    write_json(path.as_deref(), &output::document(&manifest, report.result))?;
    if let Some(msg) = report.tolerance_failure {
        eprintln!("tolerance failure: {msg}");
        return Ok(false);
    }
    Ok(true)
}

fn to_value(args: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(2)
        }
    }
}
