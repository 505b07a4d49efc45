//! `trigsample` — command-line interface to the random trigonometric
//! sampling toolkit.
//!
//! Subcommands:
//!
//! * `bounds` — evaluate a failure-probability bound at a given sample
//!   count, or solve for the minimal sample count meeting a target.
//! * `simulate` — run a seeded Monte Carlo experiment (tail, eigenvalue
//!   sandwich, or Frobenius moment) and compare against every applicable
//!   bound.
//! * `stirling` — associated Stirling numbers and the `G_m` sums they
//!   generate.
//! * `voronoi` — sampling weights for a stored point set, exact in one
//!   dimension or by Monte Carlo volume estimation in general.
//! * `reconstruct` — least-squares recovery of coefficients from point
//!   samples, either as a self-checking demo or from user-supplied data.
//!
//! Every run that fixes `--seed` is fully reproducible: reports are
//! byte-identical across runs and thread counts. When `--seed` is omitted
//! where one is needed, a seed is drawn from OS entropy and echoed in the
//! output so the run can be replayed.
//!
//! Exit codes: 0 success; 1 unexpected runtime failure; 2 usage or domain
//! error (bad flags, invalid parameter ranges, malformed input files);
//! 3 a certifiable bound was violated by the observed failure rate.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};
use trigsample::bounds::{
    better_bound_min_n, bounded_failure_bound, certified_condition_number, detprob_cond_bound,
    detprob_min_n, fourier_failure_bound, fourier_min_n, main_failure_bound, moment_best_m,
    moment_failure_bound, mp_failure_bound, noniid_psi, solve_min_n, uniform_min_n,
    uniform_simple_min_n, MomentProfile, MpParams, MP_CAVEAT,
};
use trigsample::fourier::{Coefficients, FourierSystem, SampleSet};
use trigsample::hermitian::HermitianError;
use trigsample::montecarlo::{
    run_eigen_sandwich, run_frobenius_moment, run_tail_experiment, ExperimentReport,
    FrobeniusReport, MonteCarloError, RowFamily, Verdict,
};
use trigsample::spectrum::{cube_spectrum, Spectrum};
use trigsample::stirling::{assoc_stirling2, g_eval, g_tail_bound};
use trigsample::voronoi::{default_probes, voronoi_weights_1d, voronoi_weights_mc};
use trigsample::rng;

/// Schema version stamped into every structured output document.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "trigsample",
    version,
    about = "Random trigonometric sampling: probability bounds, seeded experiments, \
             sampling weights, and reconstruction",
    max_term_width = 100
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Worker threads for the parallel sections (Monte Carlo trials, weight
    /// probes). Defaults to the RAYON_NUM_THREADS environment variable, or
    /// all cores. Results never depend on this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a failure-probability bound, or solve for the minimal
    /// sample count meeting a target probability.
    Bounds(BoundsArgs),
    /// Run a seeded statistical experiment and compare the observed failure
    /// rate against every applicable bound.
    Simulate(SimulateArgs),
    /// Associated Stirling numbers S2(m, k) and the G_m sums.
    Stirling(StirlingArgs),
    /// Sampling weights for a point set stored as JSON.
    Voronoi(VoronoiArgs),
    /// Recover basis coefficients from point samples by least squares.
    Reconstruct(ReconstructArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable key/value lines.
    Table,
    /// A single JSON document with a "schema" version field.
    Json,
    /// Comma-separated rows with a header line.
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Formula {
    /// Deviation bound for independent rows with shared entry moment
    /// constants v and M; complex entries by default, --real for real ones.
    Main,
    /// Deviation bound for rows with entries bounded by C and entry
    /// variances at most b; --improved applies the sharper exponent.
    Bounded,
    /// Entrywise union bound for independent rows whose moment constants
    /// vary per row, built from a repeating --sigmas pattern.
    Noniid,
    /// Deviation bound specialized to the uniform-sampling Fourier family.
    Fourier,
    /// Orlicz-norm deviation bound; its absolute constant is unspecified,
    /// so it is reported for orientation only and is never a certificate.
    Mp,
    /// Minimal sample count for full-measure recovery of polynomials of
    /// cube degree --m in --dim variables, with the companion condition
    /// bound controlled by --gamma.
    Detprob,
    /// Moment-method deviation bound at a fixed or optimized power.
    Moment,
    /// Minimal sample count from the moment method with tuning knob
    /// --alpha in (0, eps^2).
    Uniform,
    /// Closed-form minimal sample count from the moment method (the
    /// alpha-optimized formula rounded to a convenient closed form).
    Simple,
    /// Minimal sample count of proportional D·log D shape, up to the same
    /// unspecified constant as the Orlicz-norm bound.
    Better,
}

impl Formula {
    fn name(self) -> &'static str {
        match self {
            Formula::Main => "main",
            Formula::Bounded => "bounded",
            Formula::Noniid => "noniid",
            Formula::Fourier => "fourier",
            Formula::Mp => "mp",
            Formula::Detprob => "detprob",
            Formula::Moment => "moment",
            Formula::Uniform => "uniform",
            Formula::Simple => "simple",
            Formula::Better => "better",
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    /// Which bound to evaluate.
    #[arg(long, value_enum)]
    formula: Formula,

    /// Basis size D (number of frequencies).
    #[arg(long = "D")]
    d: Option<usize>,

    /// Deviation threshold for the operator norm of the normalized Gram
    /// matrix minus its expectation.
    #[arg(long)]
    eps: Option<f64>,

    /// Sample count: evaluate the bound at this n.
    #[arg(long, value_parser = parse_count)]
    n: Option<u64>,

    /// Target failure probability: solve for the minimal n whose bound is
    /// at most this value.
    #[arg(long)]
    delta: Option<f64>,

    /// Entry variance constant v (main formula). The default is the
    /// uniform-sampling Fourier value.
    #[arg(long, default_value_t = 0.5)]
    v: f64,

    /// Entry moment-growth constant M (main formula). The default is the
    /// uniform-sampling Fourier value.
    #[arg(long = "M", default_value_t = 1.0 / 3.0)]
    m_const: f64,

    /// Use the real-entry variant of the main formula.
    #[arg(long)]
    real: bool,

    /// Entry magnitude cap C (bounded formula).
    #[arg(long = "C", default_value_t = 1.0)]
    c_cap: f64,

    /// Entry variance cap b (bounded formula).
    #[arg(long, default_value_t = 0.5)]
    b: f64,

    /// Apply the sharper exponent of the bounded formula.
    #[arg(long)]
    improved: bool,

    /// Comma-separated row scale pattern for the noniid formula; rows cycle
    /// through the pattern (row t uses entry t mod length).
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,

    /// Refine the noniid bound using per-row supports.
    #[arg(long)]
    refine: bool,

    /// Tuning knob for the uniform formula; must lie in (0, eps^2).
    #[arg(long)]
    alpha: Option<f64>,

    /// Orlicz exponent for the mp formula (>= 1).
    #[arg(long, default_value_t = 2.0)]
    orlicz_alpha: f64,

    /// Unspecified absolute constant of the mp and better formulas,
    /// taken at face value.
    #[arg(long, default_value_t = 1.0)]
    c: f64,

    /// Moment power for the moment formula; omitted means scan for the
    /// power giving the smallest bound.
    #[arg(long, value_parser = parse_count)]
    power: Option<u64>,

    /// Cube degree for the detprob formula.
    #[arg(long)]
    m: Option<u32>,

    /// Number of variables for the detprob formula.
    #[arg(long, default_value_t = 1)]
    dim: usize,

    /// Oversampling exponent in (0, 1) for the detprob formula; smaller
    /// gamma means more samples and a smaller condition bound.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Rows exp(2 pi i k.x) with x uniform on the unit cube.
    Fourier,
    /// Rows of independent random signs scaled per row by a sigma pattern.
    Scaledsign,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    /// Estimate the probability that the Gram deviation reaches eps.
    Tail,
    /// Check the two-sided eigenvalue enclosure implied by the deviation.
    Sandwich,
    /// Compare the mean squared Frobenius norm of the m-th deviation power
    /// against its closed-form moment bound.
    Frobenius,
}

#[derive(Args)]
struct SimulateArgs {
    /// Row distribution family.
    #[arg(long, value_enum)]
    family: Family,

    /// Frequency set for the fourier family: either `cube:<m>:<d>` (all
    /// integer vectors with entries in [-m, m], dimension d) or a path to a
    /// spectrum JSON file.
    #[arg(long)]
    spectrum: Option<String>,

    /// Basis size D for the scaledsign family.
    #[arg(long = "D")]
    d: Option<usize>,

    /// Comma-separated row scale pattern for the scaledsign family; rows
    /// cycle through the pattern.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,

    /// Rows per sampled matrix.
    #[arg(long, value_parser = parse_count_usize)]
    n: usize,

    /// Deviation threshold (tail and sandwich experiments).
    #[arg(long)]
    eps: Option<f64>,

    /// Number of independent trials.
    #[arg(long, value_parser = parse_count_usize)]
    trials: usize,

    /// Master seed; trial i draws from stream i. Omitted: drawn from OS
    /// entropy and echoed in the output.
    #[arg(long)]
    seed: Option<u64>,

    /// Which experiment to run.
    #[arg(long, value_enum, default_value_t = Experiment::Tail)]
    experiment: Experiment,

    /// Deviation power for the frobenius experiment.
    #[arg(long, value_parser = parse_count_usize, default_value_t = 1)]
    power: usize,

    /// Write the rendered output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StirlingArgs {
    /// Set size m.
    #[arg(long, value_parser = parse_count_usize)]
    m: usize,

    /// Print S2(m, k): the number of partitions of an m-element set into
    /// exactly k blocks, each of size at least 2.
    #[arg(long, value_parser = parse_count_usize)]
    k: Option<usize>,

    /// Print G_m(theta), the Stirling-weighted sum driving the moment
    /// bounds.
    #[arg(long)]
    g: bool,

    /// Print the closed-form tail estimate that dominates G_{2m}(theta);
    /// requires theta > 3m.
    #[arg(long)]
    tail: bool,

    /// Evaluation point for --g and --tail.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args)]
struct VoronoiArgs {
    /// Path to a point-set JSON file (as produced by the library or the
    /// reconstruct demo).
    #[arg(long)]
    points: PathBuf,

    /// Probe count for Monte Carlo weights; defaults to a count scaled to
    /// the number of points.
    #[arg(long, value_parser = parse_count_usize)]
    probes: Option<usize>,

    /// Master seed for the Monte Carlo probes. Omitted: drawn from OS
    /// entropy and echoed in the output.
    #[arg(long)]
    seed: Option<u64>,

    /// Force the exact sweep construction (one-dimensional point sets
    /// only). Default: exact in one dimension, Monte Carlo otherwise.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Frequency set: `cube:<m>:<d>` or a path to a spectrum JSON file.
    #[arg(long)]
    spectrum: String,

    /// Demo mode: draw this many random sample points, synthesize a random
    /// coefficient vector, and report the recovery error.
    #[arg(long, value_parser = parse_count_usize)]
    n: Option<usize>,

    /// Master seed for the demo (points use stream 0, coefficients stream
    /// 1). Omitted: drawn from OS entropy and echoed in the output.
    #[arg(long)]
    seed: Option<u64>,

    /// Path to a point-set JSON file (data mode, together with --values).
    #[arg(long)]
    samples: Option<PathBuf>,

    /// Path to a JSON array of [re, im] sample values, one per point
    /// (data mode, together with --samples).
    #[arg(long)]
    values: Option<PathBuf>,
}

/// Errors surfaced to the user, split by exit code.
#[derive(Debug)]
enum CliError {
    /// Bad flags, out-of-range parameters, malformed input files: exit 2.
    Usage(String),
    /// Unexpected internal failure (I/O, numerical breakdown): exit 1.
    Runtime(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::Hermitian(HermitianError::EigensolverFailure { .. }) => {
                CliError::Runtime(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<trigsample::bounds::BoundsError> for CliError {
    fn from(e: trigsample::bounds::BoundsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<trigsample::fourier::FourierError> for CliError {
    fn from(e: trigsample::fourier::FourierError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<trigsample::voronoi::VoronoiError> for CliError {
    fn from(e: trigsample::voronoi::VoronoiError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<trigsample::spectrum::SpectrumError> for CliError {
    fn from(e: trigsample::spectrum::SpectrumError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // A second initialization (e.g. under test harnesses) is harmless:
        // the first pool wins and results do not depend on thread count.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let format = cli.format;
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(&args, format),
        Command::Simulate(args) => cmd_simulate(&args, format),
        Command::Stirling(args) => cmd_stirling(&args, format),
        Command::Voronoi(args) => cmd_voronoi(&args, format),
        Command::Reconstruct(args) => cmd_reconstruct(&args, format),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Parses a nonnegative integer given in decimal or scientific notation
/// (e.g. `2000` or `2e3`).
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= 9.007_199_254_740_992e15 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

fn parse_count_usize(s: &str) -> Result<usize, String> {
    parse_count(s).map(|v| v as usize)
}

/// Repeats a scale pattern cyclically to length n.
fn cycle_sigmas(pattern: &[f64], n: usize) -> Result<Vec<f64>, CliError> {
    if pattern.is_empty() {
        return Err(usage("--sigmas must list at least one value"));
    }
    Ok((0..n).map(|t| pattern[t % pattern.len()]).collect())
}

/// Parses `cube:<m>:<d>` or reads a spectrum JSON file.
fn parse_spectrum(spec: &str) -> Result<Spectrum, CliError> {
    if let Some(rest) = spec.strip_prefix("cube:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(usage(format!(
                "`{spec}`: cube spectra are written cube:<degree>:<dimension>"
            )));
        }
        let m: u32 = parts[0]
            .parse()
            .map_err(|_| usage(format!("`{}` is not a valid cube degree", parts[0])))?;
        let d: usize = parts[1]
            .parse()
            .map_err(|_| usage(format!("`{}` is not a valid dimension", parts[1])))?;
        Ok(cube_spectrum(m, d)?)
    } else {
        let text = fs::read_to_string(spec)
            .map_err(|e| usage(format!("cannot read spectrum file `{spec}`: {e}")))?;
        Spectrum::from_json(&text).map_err(|e| usage(format!("`{spec}`: {e}")))
    }
}

fn require<T>(opt: Option<T>, what: &str) -> Result<T, CliError> {
    opt.ok_or_else(|| usage(format!("missing required flag {what}")))
}

fn entropy_seed() -> u64 {
    rand::random::<u64>()
}

// ---------------------------------------------------------------------------
// bounds

/// What the bounds subcommand computed, serialized as the JSON document and
/// flattened for the table and CSV renderers.
#[derive(Serialize)]
struct BoundsOutput {
    schema: u32,
    formula: String,
    /// Echo of the parameters the formula actually used (alphabetical key
    /// order).
    inputs: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_n: Option<u64>,
    /// Moment power chosen by the scan (moment formula without --power).
    #[serde(skip_serializing_if = "Option::is_none")]
    best_power: Option<u64>,
    /// Condition-number bound tied to the formula's own guarantee
    /// (detprob).
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_bound: Option<f64>,
    /// Condition-number certificate (1 + eps)/(1 - eps) valid whenever the
    /// deviation event is avoided and the expected Gram matrix is the
    /// identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    certified_condition_number: Option<f64>,
    caveats: Vec<String>,
}

impl BoundsOutput {
    fn new(formula: Formula) -> Self {
        BoundsOutput {
            schema: SCHEMA_VERSION,
            formula: formula.name().to_string(),
            inputs: Map::new(),
            bound: None,
            min_n: None,
            best_power: None,
            condition_bound: None,
            certified_condition_number: None,
            caveats: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, value: Value) {
        self.inputs.insert(key.to_string(), value);
    }
}

fn cmd_bounds(args: &BoundsArgs, format: Format) -> Result<bool, CliError> {
    let mut out = BoundsOutput::new(args.formula);
    let mode_err = |need: &str| {
        usage(format!(
            "--formula {} needs {need} (got {})",
            args.formula.name(),
            match (args.n, args.delta) {
                (Some(_), Some(_)) => "both --n and --delta",
                (Some(_), None) => "--n",
                (None, Some(_)) => "--delta",
                (None, None) => "neither",
            }
        ))
    };
    // Formulas that can do both directions insist on exactly one of
    // --n / --delta; single-direction formulas insist on their one flag.
    match args.formula {
        Formula::Main | Formula::Bounded | Formula::Noniid | Formula::Fourier | Formula::Mp => {
            if args.n.is_some() == args.delta.is_some() {
                return Err(mode_err("exactly one of --n or --delta"));
            }
        }
        Formula::Moment => {
            if args.n.is_none() || args.delta.is_some() {
                return Err(mode_err("--n (and no --delta)"));
            }
        }
        Formula::Detprob | Formula::Uniform | Formula::Simple | Formula::Better => {
            if args.delta.is_none() || args.n.is_some() {
                return Err(mode_err("--delta (and no --n)"));
            }
        }
    }
    if let Some(delta) = args.delta {
        out.input("delta", json_f64(delta));
    }
    if let Some(n) = args.n {
        out.input("n", Value::from(n));
    }

    match args.formula {
        Formula::Main => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            let profile = MomentProfile::iid(args.v, args.m_const)?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("v", json_f64(args.v));
            out.input("M", json_f64(args.m_const));
            out.input("real", Value::from(args.real));
            if let Some(n) = args.n {
                out.bound = Some(main_failure_bound(n, d, eps, &profile, args.real)?);
            } else {
                main_failure_bound(1, d, eps, &profile, args.real)?;
                let f = |n| main_failure_bound(n, d, eps, &profile, args.real).unwrap_or(1.0);
                out.min_n = Some(solve_min_n(f, args.delta.unwrap())?);
            }
        }
        Formula::Bounded => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("C", json_f64(args.c_cap));
            out.input("b", json_f64(args.b));
            out.input("improved", Value::from(args.improved));
            if let Some(n) = args.n {
                out.bound = Some(bounded_failure_bound(n, d, eps, args.c_cap, args.b, args.improved)?);
            } else {
                bounded_failure_bound(1, d, eps, args.c_cap, args.b, args.improved)?;
                let f =
                    |n| bounded_failure_bound(n, d, eps, args.c_cap, args.b, args.improved).unwrap_or(1.0);
                out.min_n = Some(solve_min_n(f, args.delta.unwrap())?);
            }
        }
        Formula::Noniid => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            let pattern = require(args.sigmas.clone(), "--sigmas")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("sigmas", Value::from(pattern.clone()));
            out.input("refine", Value::from(args.refine));
            if let Some(n) = args.n {
                let sigmas = cycle_sigmas(&pattern, n as usize)?;
                let family = RowFamily::ScaledSign { sigmas, d };
                let profile = family.moment_profile(n as usize)?;
                out.bound = Some(noniid_psi(n, d, eps, &profile, args.refine)?);
            } else {
                // For the solve, the moment constants are averaged over one
                // full cycle of the pattern (they are then independent of n).
                let family = RowFamily::ScaledSign { sigmas: pattern.clone(), d };
                let profile = family.moment_profile(pattern.len())?;
                noniid_psi(1, d, eps, &profile, args.refine)?;
                let f = |n| noniid_psi(n, d, eps, &profile, args.refine).unwrap_or(1.0);
                out.min_n = Some(solve_min_n(f, args.delta.unwrap())?);
            }
        }
        Formula::Fourier => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            if let Some(n) = args.n {
                out.bound = Some(fourier_failure_bound(n, d, eps)?);
            } else {
                out.min_n = Some(fourier_min_n(d, eps, args.delta.unwrap())?);
            }
            out.certified_condition_number = certified_condition_number(eps);
        }
        Formula::Mp => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            let params = MpParams::fourier(d, args.orlicz_alpha, args.c)?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("orlicz_alpha", json_f64(args.orlicz_alpha));
            out.input("c", json_f64(args.c));
            mp_failure_bound(2, d, &params, eps)?;
            if let Some(n) = args.n {
                if n < 2 {
                    return Err(usage("the mp formula needs n >= 2"));
                }
                out.bound = Some(mp_failure_bound(n, d, &params, eps)?);
            } else {
                let f = |n: u64| mp_failure_bound(n.max(2), d, &params, eps).unwrap_or(1.0);
                out.min_n = Some(solve_min_n(f, args.delta.unwrap())?.max(2));
            }
            out.certified_condition_number = certified_condition_number(eps);
            out.caveats.push(MP_CAVEAT.to_string());
        }
        Formula::Detprob => {
            let m = require(args.m, "--m")?;
            let gamma = require(args.gamma, "--gamma")?;
            let delta = args.delta.unwrap();
            out.input("m", Value::from(m));
            out.input("dim", Value::from(args.dim));
            out.input("gamma", json_f64(gamma));
            out.min_n = Some(detprob_min_n(m, args.dim, gamma, delta)?);
            out.condition_bound = Some(detprob_cond_bound(gamma)?);
        }
        Formula::Moment => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            let n = args.n.unwrap();
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            match args.power {
                Some(p) => {
                    if p == 0 {
                        return Err(usage("--power must be at least 1"));
                    }
                    out.input("power", Value::from(p));
                    out.bound = Some(moment_failure_bound(n, d, eps, p as usize)?);
                }
                None => {
                    let (best, value) = moment_best_m(n, d, eps)?;
                    out.best_power = Some(best as u64);
                    out.bound = Some(value);
                }
            }
            out.certified_condition_number = certified_condition_number(eps);
        }
        Formula::Uniform => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            let alpha = require(args.alpha, "--alpha")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("alpha", json_f64(alpha));
            out.min_n = Some(uniform_min_n(d, eps, alpha, args.delta.unwrap())?);
            out.certified_condition_number = certified_condition_number(eps);
        }
        Formula::Simple => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.min_n = Some(uniform_simple_min_n(d, eps, args.delta.unwrap())?);
            out.certified_condition_number = certified_condition_number(eps);
        }
        Formula::Better => {
            let d = require(args.d, "--D")?;
            let eps = require(args.eps, "--eps")?;
            out.input("D", Value::from(d));
            out.input("eps", json_f64(eps));
            out.input("c", json_f64(args.c));
            out.min_n = Some(better_bound_min_n(d, eps, args.delta.unwrap(), args.c)?);
            out.certified_condition_number = certified_condition_number(eps);
            out.caveats.push(MP_CAVEAT.to_string());
        }
    }

    println!("{}", render_bounds(&out, format));
    Ok(false)
}

fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn render_bounds(out: &BoundsOutput, format: Format) -> String {
    match format {
        Format::Json => pretty_json(out),
        Format::Table => {
            let mut lines = vec![format!("formula: {}", out.formula)];
            for (key, value) in &out.inputs {
                lines.push(format!("{key}: {}", plain_value(value)));
            }
            if let Some(b) = out.bound {
                lines.push(format!("bound: {b}"));
            }
            if let Some(n) = out.min_n {
                lines.push(format!("min_n: {n}"));
            }
            if let Some(p) = out.best_power {
                lines.push(format!("best_power: {p}"));
            }
            if let Some(c) = out.condition_bound {
                lines.push(format!("condition_bound: {c}"));
            }
            if let Some(c) = out.certified_condition_number {
                lines.push(format!("certified_condition_number: {c}"));
            }
            for caveat in &out.caveats {
                lines.push(format!("caveat: {caveat}"));
            }
            lines.join("\n")
        }
        Format::Csv => {
            // Columns: schema, formula, the formula's inputs in alphabetical
            // key order, then the five result columns (empty when absent).
            let mut header = vec!["schema".to_string(), "formula".to_string()];
            let mut row = vec![out.schema.to_string(), out.formula.clone()];
            for (key, value) in &out.inputs {
                header.push(key.clone());
                row.push(csv_field(&plain_value(value)));
            }
            for (name, value) in [
                ("bound", out.bound.map(|x| x.to_string())),
                ("min_n", out.min_n.map(|x| x.to_string())),
                ("best_power", out.best_power.map(|x| x.to_string())),
                ("condition_bound", out.condition_bound.map(|x| x.to_string())),
                (
                    "certified_condition_number",
                    out.certified_condition_number.map(|x| x.to_string()),
                ),
            ] {
                header.push(name.to_string());
                row.push(value.unwrap_or_default());
            }
            header.push("caveats".to_string());
            row.push(csv_field(&out.caveats.join("; ")));
            format!("{}\n{}", header.join(","), row.join(","))
        }
    }
}

/// Renders a JSON value without quoting strings (for table/CSV cells).
fn plain_value(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            items.iter().map(plain_value).collect::<Vec<_>>().join(" ")
        }
        other => other.to_string(),
    }
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// simulate

fn cmd_simulate(args: &SimulateArgs, format: Format) -> Result<bool, CliError> {
    let family = match args.family {
        Family::Fourier => {
            let spec = require(args.spectrum.as_deref(), "--spectrum")?;
            RowFamily::FourierUniform { spectrum: parse_spectrum(spec)? }
        }
        Family::Scaledsign => {
            let d = require(args.d, "--D")?;
            let pattern = require(args.sigmas.clone(), "--sigmas")?;
            RowFamily::ScaledSign { sigmas: cycle_sigmas(&pattern, args.n)?, d }
        }
    };
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let (text, violated) = match args.experiment {
        Experiment::Tail | Experiment::Sandwich => {
            let eps = require(args.eps, "--eps")?;
            let report = if args.experiment == Experiment::Tail {
                run_tail_experiment(&family, args.n, eps, args.trials, seed)?
            } else {
                run_eigen_sandwich(&family, args.n, eps, args.trials, seed)?
            };
            (render_experiment(&report, format), report.any_certifiable_violation())
        }
        Experiment::Frobenius => {
            if args.power == 0 {
                return Err(usage("--power must be at least 1"));
            }
            let report = run_frobenius_moment(&family, args.n, args.power, args.trials, seed)?;
            let violated = report.verdict == Verdict::Violated;
            (render_frobenius(&report, format), violated)
        }
    };
    match &args.out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| {
                CliError::Runtime(format!("cannot write `{}`: {e}", path.display()))
            })?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(violated)
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Consistent => "consistent",
        Verdict::Violated => "violated",
    }
}

fn render_experiment(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => {
            let mut lines = vec![
                format!("experiment: {}", report.experiment),
                format!("family: {}", report.family),
                format!("n: {}", report.n),
                format!("D: {}", report.d),
                format!("eps: {}", report.eps),
                format!("trials: {}", report.trials),
                format!("seed: {}", report.seed),
                format!("failure_count: {}", report.failure_count),
                format!("empirical_rate: {}", report.empirical_rate),
                format!("cp99_lower: {}", report.cp99_lower),
                format!("cp99_upper: {}", report.cp99_upper),
            ];
            if let Some(c) = report.certified_condition_number {
                lines.push(format!("certified_condition_number: {c}"));
            }
            if report.unaudited {
                lines.push("unaudited: true".to_string());
            }
            lines.push("bounds:".to_string());
            let width = report.bounds.iter().map(|b| b.name.len()).max().unwrap_or(0);
            for b in &report.bounds {
                let mut line = format!(
                    "  {:<width$}  {:<22}  {}",
                    b.name,
                    b.value,
                    verdict_str(b.verdict),
                    width = width
                );
                if !b.certifiable {
                    line.push_str("  (not a certificate)");
                }
                lines.push(line);
            }
            let caveats: Vec<&str> = report
                .bounds
                .iter()
                .flat_map(|b| b.caveats.iter().map(String::as_str))
                .collect();
            for caveat in dedup(caveats) {
                lines.push(format!("caveat: {caveat}"));
            }
            lines.join("\n")
        }
        Format::Csv => {
            // One row per bound. Columns: schema, experiment, family, n, D,
            // eps, trials, seed, failure_count, empirical_rate, cp99_lower,
            // cp99_upper, certified_condition_number, unaudited, bound_name,
            // bound_value, bound_certifiable, bound_verdict.
            let mut lines = vec![
                "schema,experiment,family,n,D,eps,trials,seed,failure_count,empirical_rate,\
                 cp99_lower,cp99_upper,certified_condition_number,unaudited,bound_name,\
                 bound_value,bound_certifiable,bound_verdict"
                    .to_string(),
            ];
            let prefix = [
                report.schema.to_string(),
                report.experiment.clone(),
                csv_field(&report.family),
                report.n.to_string(),
                report.d.to_string(),
                report.eps.to_string(),
                report.trials.to_string(),
                report.seed.to_string(),
                report.failure_count.to_string(),
                report.empirical_rate.to_string(),
                report.cp99_lower.to_string(),
                report.cp99_upper.to_string(),
                report.certified_condition_number.map(|c| c.to_string()).unwrap_or_default(),
                report.unaudited.to_string(),
            ]
            .join(",");
            for b in &report.bounds {
                lines.push(format!(
                    "{prefix},{},{},{},{}",
                    csv_field(&b.name),
                    b.value,
                    b.certifiable,
                    verdict_str(b.verdict)
                ));
            }
            lines.join("\n")
        }
    }
}

fn dedup<'a>(items: Vec<&'a str>) -> Vec<&'a str> {
    let mut seen = Vec::new();
    for item in items {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

fn render_frobenius(report: &FrobeniusReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => [
            format!("experiment: {}", report.experiment),
            format!("family: {}", report.family),
            format!("n: {}", report.n),
            format!("D: {}", report.d),
            format!("power: {}", report.m),
            format!("trials: {}", report.trials),
            format!("seed: {}", report.seed),
            format!("empirical_mean: {}", report.empirical_mean),
            format!("std_error: {}", report.std_error),
            format!("theoretical: {}", report.theoretical),
            format!("verdict: {}", verdict_str(report.verdict)),
        ]
        .join("\n"),
        Format::Csv => {
            // Columns: schema, experiment, family, n, D, power, trials,
            // seed, empirical_mean, std_error, theoretical, verdict.
            format!(
                "schema,experiment,family,n,D,power,trials,seed,empirical_mean,std_error,\
                 theoretical,verdict\n{},{},{},{},{},{},{},{},{},{},{},{}",
                report.schema,
                report.experiment,
                csv_field(&report.family),
                report.n,
                report.d,
                report.m,
                report.trials,
                report.seed,
                report.empirical_mean,
                report.std_error,
                report.theoretical,
                verdict_str(report.verdict)
            )
        }
    }
}

// ---------------------------------------------------------------------------
// stirling

fn cmd_stirling(args: &StirlingArgs, format: Format) -> Result<bool, CliError> {
    let modes = args.k.is_some() as u8 + args.g as u8 + args.tail as u8;
    if modes != 1 {
        return Err(usage("pick exactly one of --k, --g, or --tail"));
    }
    if args.m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    let (label, value, theta): (&str, Value, Option<f64>) = if let Some(k) = args.k {
        // Counts can exceed u64, so the JSON carries them as strings.
        (("value"), Value::from(assoc_stirling2(args.m, k).to_string()), None)
    } else {
        let theta = require(args.theta, "--theta")?;
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(usage("--theta must be positive and finite"));
        }
        if args.g {
            ("g", json_f64(g_eval(args.m, theta)), Some(theta))
        } else {
            let bound = g_tail_bound(args.m, theta).map_err(|e| usage(e.to_string()))?;
            ("g2m_tail", json_f64(bound), Some(theta))
        }
    };
    let text = match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::from(SCHEMA_VERSION));
            doc.insert("m".into(), Value::from(args.m as u64));
            if let Some(k) = args.k {
                doc.insert("k".into(), Value::from(k as u64));
            }
            if let Some(t) = theta {
                doc.insert("theta".into(), json_f64(t));
            }
            doc.insert(label.into(), value.clone());
            pretty_json(&Value::Object(doc))
        }
        Format::Table => plain_value(&value),
        Format::Csv => {
            // Columns: m, then k or theta, then the value.
            if let Some(k) = args.k {
                format!("m,k,{label}\n{},{},{}", args.m, k, plain_value(&value))
            } else {
                format!("m,theta,{label}\n{},{},{}", args.m, theta.unwrap(), plain_value(&value))
            }
        }
    };
    println!("{text}");
    Ok(false)
}

// ---------------------------------------------------------------------------
// voronoi

#[derive(Serialize)]
struct VoronoiOutput {
    schema: u32,
    /// "exact-1d" or "monte-carlo".
    method: String,
    n: usize,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_std_error: Option<f64>,
    weights: Vec<f64>,
}

fn cmd_voronoi(args: &VoronoiArgs, format: Format) -> Result<bool, CliError> {
    let text = fs::read_to_string(&args.points)
        .map_err(|e| usage(format!("cannot read `{}`: {e}", args.points.display())))?;
    let points = SampleSet::from_json(&text)
        .map_err(|e| usage(format!("`{}`: {e}", args.points.display())))?;
    let exact = args.exact || points.dim() == 1;
    if args.exact && points.dim() != 1 {
        return Err(usage(format!(
            "--exact needs a one-dimensional point set (this one has dimension {})",
            points.dim()
        )));
    }
    let out = if exact {
        let coords: Vec<f64> = points.points().iter().map(|p| p[0]).collect();
        let weights = voronoi_weights_1d(&coords)?;
        VoronoiOutput {
            schema: SCHEMA_VERSION,
            method: "exact-1d".to_string(),
            n: points.len(),
            dim: points.dim(),
            probes: None,
            seed: None,
            mc_std_error: None,
            weights: weights.weights().to_vec(),
        }
    } else {
        let probes = args.probes.unwrap_or_else(|| default_probes(points.len()));
        let seed = args.seed.unwrap_or_else(entropy_seed);
        let weights = voronoi_weights_mc(&points, probes, seed)?;
        VoronoiOutput {
            schema: SCHEMA_VERSION,
            method: "monte-carlo".to_string(),
            n: points.len(),
            dim: points.dim(),
            probes: Some(probes),
            seed: Some(seed),
            mc_std_error: weights.mc_std_error(),
            weights: weights.weights().to_vec(),
        }
    };
    let text = match format {
        Format::Json => pretty_json(&out),
        Format::Table => {
            let mut lines = vec![
                format!("method: {}", out.method),
                format!("n: {}", out.n),
                format!("dim: {}", out.dim),
            ];
            if let Some(p) = out.probes {
                lines.push(format!("probes: {p}"));
            }
            if let Some(s) = out.seed {
                lines.push(format!("seed: {s}"));
            }
            if let Some(se) = out.mc_std_error {
                lines.push(format!("mc_std_error: {se}"));
            }
            lines.push("weights:".to_string());
            for (i, w) in out.weights.iter().enumerate() {
                lines.push(format!("  {i}: {w}"));
            }
            lines.join("\n")
        }
        Format::Csv => {
            // Metadata rides in `#`-prefixed comment lines; the data rows
            // are `index,weight`.
            let mut lines = vec![
                format!("# schema: {}", out.schema),
                format!("# method: {}", out.method),
            ];
            if let Some(p) = out.probes {
                lines.push(format!("# probes: {p}"));
            }
            if let Some(s) = out.seed {
                lines.push(format!("# seed: {s}"));
            }
            if let Some(se) = out.mc_std_error {
                lines.push(format!("# mc_std_error: {se}"));
            }
            lines.push("index,weight".to_string());
            for (i, w) in out.weights.iter().enumerate() {
                lines.push(format!("{i},{w}"));
            }
            lines.join("\n")
        }
    };
    println!("{text}");
    Ok(false)
}

// ---------------------------------------------------------------------------
// reconstruct

#[derive(Serialize)]
struct ReconstructOutput {
    schema: u32,
    /// "demo" or "data".
    mode: String,
    n: usize,
    basis_size: usize,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Relative L2 error between the synthesized and the recovered
    /// coefficients (demo mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error: Option<f64>,
    /// Recovered coefficients as [re, im] pairs (data mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<[f64; 2]>>,
}

fn cmd_reconstruct(args: &ReconstructArgs, format: Format) -> Result<bool, CliError> {
    let spectrum = parse_spectrum(&args.spectrum)?;
    let data_mode = args.samples.is_some() || args.values.is_some();
    if data_mode && (args.samples.is_none() || args.values.is_none()) {
        return Err(usage("data mode needs both --samples and --values"));
    }
    if data_mode == args.n.is_some() {
        return Err(usage(
            "pick one mode: --n for the random demo, or --samples with --values for stored data",
        ));
    }

    let (out, freqs) = if data_mode {
        let samples_path = args.samples.as_ref().unwrap();
        let values_path = args.values.as_ref().unwrap();
        let samples_text = fs::read_to_string(samples_path)
            .map_err(|e| usage(format!("cannot read `{}`: {e}", samples_path.display())))?;
        let samples = SampleSet::from_json(&samples_text)
            .map_err(|e| usage(format!("`{}`: {e}", samples_path.display())))?;
        let values_text = fs::read_to_string(values_path)
            .map_err(|e| usage(format!("cannot read `{}`: {e}", values_path.display())))?;
        let pairs: Vec<[f64; 2]> = serde_json::from_str(&values_text)
            .map_err(|e| usage(format!("`{}`: expected [[re, im], ...]: {e}", values_path.display())))?;
        if pairs.len() != samples.len() {
            return Err(usage(format!(
                "{} values for {} sample points",
                pairs.len(),
                samples.len()
            )));
        }
        let y: Vec<Complex64> = pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let fs = FourierSystem::build(spectrum, samples)?;
        let coeffs = fs.reconstruct(&y)?;
        let out = ReconstructOutput {
            schema: SCHEMA_VERSION,
            mode: "data".to_string(),
            n: fs.n(),
            basis_size: fs.basis_size(),
            dim: fs.spectrum().dim(),
            seed: None,
            relative_error: None,
            coefficients: Some(coeffs.values().iter().map(|c| [c.re, c.im]).collect()),
        };
        (out, fs.spectrum().freqs().to_vec())
    } else {
        let n = args.n.unwrap();
        let seed = args.seed.unwrap_or_else(entropy_seed);
        let samples = SampleSet::uniform_with_stream(spectrum.dim(), n, seed, 0)?;
        let fs = FourierSystem::build(spectrum, samples)?;
        let mut coeff_rng = rng::stream(seed, 1);
        let truth: Vec<Complex64> = (0..fs.basis_size())
            .map(|_| {
                use rand::Rng;
                Complex64::new(
                    coeff_rng.gen::<f64>() * 2.0 - 1.0,
                    coeff_rng.gen::<f64>() * 2.0 - 1.0,
                )
            })
            .collect();
        let y = fs.apply(&Coefficients::new(truth.clone()))?;
        let recovered = fs.reconstruct(&y)?;
        let err: f64 = recovered
            .values()
            .iter()
            .zip(&truth)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = truth.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let out = ReconstructOutput {
            schema: SCHEMA_VERSION,
            mode: "demo".to_string(),
            n: fs.n(),
            basis_size: fs.basis_size(),
            dim: fs.spectrum().dim(),
            seed: Some(seed),
            relative_error: Some(if scale > 0.0 { err / scale } else { err }),
            coefficients: None,
        };
        (out, Vec::new())
    };

    let text = match format {
        Format::Json => pretty_json(&out),
        Format::Table => {
            let mut lines = vec![
                format!("mode: {}", out.mode),
                format!("n: {}", out.n),
                format!("basis_size: {}", out.basis_size),
                format!("dim: {}", out.dim),
            ];
            if let Some(s) = out.seed {
                lines.push(format!("seed: {s}"));
            }
            if let Some(e) = out.relative_error {
                lines.push(format!("relative_error: {e}"));
            }
            if let Some(coeffs) = &out.coefficients {
                lines.push("coefficients:".to_string());
                for (k, c) in coeffs.iter().enumerate() {
                    let freq = freqs
                        .get(k)
                        .map(|f| {
                            f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                        })
                        .unwrap_or_default();
                    lines.push(format!("  [{freq}]: {} {}", c[0], c[1]));
                }
            }
            lines.join("\n")
        }
        Format::Csv => {
            if let Some(coeffs) = &out.coefficients {
                // Columns: index, freq (components joined by ';'), re, im.
                let mut lines = vec!["index,freq,re,im".to_string()];
                for (k, c) in coeffs.iter().enumerate() {
                    let freq = freqs
                        .get(k)
                        .map(|f| {
                            f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
                        })
                        .unwrap_or_default();
                    lines.push(format!("{k},{},{},{}", csv_field(&freq), c[0], c[1]));
                }
                lines.join("\n")
            } else {
                // Columns: schema, mode, n, basis_size, dim, seed,
                // relative_error.
                format!(
                    "schema,mode,n,basis_size,dim,seed,relative_error\n{},{},{},{},{},{},{}",
                    out.schema,
                    out.mode,
                    out.n,
                    out.basis_size,
                    out.dim,
                    out.seed.map(|s| s.to_string()).unwrap_or_default(),
                    out.relative_error.map(|e| e.to_string()).unwrap_or_default()
                )
            }
        }
    };
    println!("{text}");
    Ok(false)
}
