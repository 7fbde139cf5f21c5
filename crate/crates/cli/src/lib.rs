//! Command implementations for the `hsfft` binary.
//!
//! Every command returns `Ok(())` or a [`Failure`] carrying the process exit
//! code, so the binary stays a thin shell around [`execute`].

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsfft::adversary::{
    build_aligned_sets, build_moduli, count_survivors_oracle, predict_survivors_degenerate,
    predict_survivors_formula, synthesize_adversarial,
};
use hsfft::crt::ModuliConfig;
use hsfft::pipeline::{
    predict_costs, run_hybrid, ExecutionPath, ForcePath, HybridConfig, HybridResult, ViewMode,
};
use hsfft::signal::{load_signal, random_sparse, save_signal, synthesize, SparseSpec, Tone};
use hsfft::verify::{run_all, Budget};
use hsfft::{Complex64, Error};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Amplitude range for `--random-k` tones and bench trials.
const RANDOM_AMPLITUDE: (f64, f64) = (1.0, 2.0);

#[derive(Debug, Parser)]
#[command(
    name = "hsfft",
    version,
    about = "Hybrid sparse-dense FFT with safety certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a sparse test signal.
    Synth(SynthArgs),
    /// Run the hybrid pipeline on a signal file.
    Run(RunArgs),
    /// Build an adversarial instance with vulnerable moduli.
    Adversary(AdversaryArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
    /// Sweep k over random trials and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated `freq:re:im` triples.
    #[arg(long, conflicts_with_all = ["random_k", "seed"], required_unless_present = "random_k")]
    pub tones: Option<String>,
    #[arg(long, requires = "seed")]
    pub random_k: Option<usize>,
    #[arg(long, requires = "random_k")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForceArg {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViewsArg {
    Auto,
    Decimate,
    Fold,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub m1: u64,
    #[arg(long)]
    pub m2: u64,
    #[arg(long)]
    pub m3: u64,
    /// Coverage multiplier.
    #[arg(long, default_value_t = 2)]
    pub c: usize,
    /// Bucket occupancy threshold.
    #[arg(long, default_value_t = 3)]
    pub tau: u64,
    #[arg(long, default_value_t = 3)]
    pub count_factor: u64,
    #[arg(long, value_enum)]
    pub force: Option<ForceArg>,
    /// `decimate` requires every modulus to divide N; `auto` folds the ones that don't.
    #[arg(long, value_enum, default_value_t = ViewsArg::Auto)]
    pub views: ViewsArg,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct AdversaryArgs {
    #[arg(long)]
    pub g1: u64,
    #[arg(long)]
    pub g2: u64,
    #[arg(long)]
    pub m1p: u64,
    #[arg(long)]
    pub m2p: u64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `k=K1..K2`, inclusive.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Sweep,
    #[arg(long)]
    pub n: usize,
    /// `m1,m2,m3`
    #[arg(long, value_parser = parse_moduli)]
    pub moduli: (u64, u64, u64),
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub c: usize,
    #[arg(long)]
    pub csv: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub lo: usize,
    pub hi: usize,
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let range = s.strip_prefix("k=").ok_or("expected k=K1..K2")?;
    let (lo, hi) = range.split_once("..").ok_or("expected k=K1..K2")?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad K1: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad K2: {e}"))?;
    if lo > hi {
        return Err(format!("empty sweep {lo}..{hi}"));
    }
    Ok(Sweep { lo, hi })
}

fn parse_moduli(s: &str) -> Result<(u64, u64, u64), String> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad modulus {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(format!("expected three moduli, got {}", parts.len())),
    }
}

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
    pub fn moduli(message: impl fmt::Display) -> Self {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }
    pub fn file(path: &Path, message: impl fmt::Display) -> Self {
        Failure {
            code: 4,
            message: format!("{}: {message}", path.display()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Classifies a pipeline error: moduli problems exit 3, the rest exit 2.
fn pipeline_failure(e: Error) -> Failure {
    match e {
        Error::Divisibility { .. }
        | Error::NoInverse { .. }
        | Error::Configuration(_)
        | Error::Overflow(_) => Failure::moduli(e),
        Error::Io(_) | Error::Format { .. } => Failure {
            code: 4,
            message: e.to_string(),
        },
        other => Failure::usage(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub bucket: u64,
    pub count_factor: u64,
    pub validation_rel: f64,
    pub validation_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInput {
    pub n: usize,
    pub k: usize,
    pub moduli: [u64; 3],
    pub coverage: usize,
    pub thresholds: Thresholds,
    pub views: String,
    pub force: Option<String>,
    pub signal_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub tool_version: String,
    pub input: RunInput,
    pub result: HybridResult,
    pub timing_ms: f64,
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Adversary(a) => cmd_adversary(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn parse_tones(s: &str) -> Result<Vec<Tone>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let fields: Vec<&str> = t.trim().split(':').collect();
            let [f, re, im] = fields[..] else {
                return Err(Failure::usage(format!("tone {t:?} is not freq:re:im")));
            };
            let bad = |what: &str| Failure::usage(format!("tone {t:?}: bad {what}"));
            let freq = f.parse::<usize>().map_err(|_| bad("frequency"))?;
            let re = re.parse::<f64>().map_err(|_| bad("real part"))?;
            let im = im.parse::<f64>().map_err(|_| bad("imaginary part"))?;
            Ok(Tone::new(freq, Complex64::new(re, im)))
        })
        .collect()
}

pub fn cmd_synth(a: &SynthArgs) -> Result<(), Failure> {
    let spec = match (&a.tones, a.random_k, a.seed) {
        (Some(tones), None, None) => SparseSpec::new(a.n, parse_tones(tones)?),
        (None, Some(k), Some(seed)) => random_sparse(a.n, k, seed, RANDOM_AMPLITUDE),
        _ => {
            return Err(Failure::usage(
                "give either --tones or --random-k with --seed",
            ))
        }
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    save_signal(&synthesize(&spec), &a.out).map_err(|e| Failure::file(&a.out, e))?;
    println!(
        "wrote N={} with {} tones to {}",
        a.n,
        spec.sparsity(),
        a.out.display()
    );
    Ok(())
}

pub fn cmd_run(a: &RunArgs) -> Result<(), Failure> {
    let x = load_signal(&a.input).map_err(|e| Failure::file(&a.input, e))?;
    let n = x.len();
    let moduli = ModuliConfig::new(a.m1, a.m2, a.m3, n as u64).map_err(Failure::moduli)?;
    let mut cfg = HybridConfig::new(a.k, moduli).with_coverage(a.c);
    cfg.bucket_threshold = a.tau;
    cfg.count_factor = a.count_factor;
    cfg = cfg.with_view_mode(match a.views {
        ViewsArg::Auto => ViewMode::Auto,
        ViewsArg::Decimate => ViewMode::Decimate,
        ViewsArg::Fold => ViewMode::Fold,
    });
    if let Some(force) = a.force {
        cfg = cfg.with_force_path(match force {
            ForceArg::Sparse => ForcePath::Sparse,
            ForceArg::Dense => ForcePath::Dense,
        });
    }

    let start = Instant::now();
    let result = run_hybrid(&x, &cfg).map_err(pipeline_failure)?;
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;

    let report = RunReport {
        schema_version: SCHEMA_VERSION.into(),
        tool_version: TOOL_VERSION.into(),
        input: RunInput {
            n,
            k: a.k,
            moduli: [a.m1, a.m2, a.m3],
            coverage: a.c,
            thresholds: Thresholds {
                bucket: cfg.bucket_threshold,
                count_factor: cfg.count_factor,
                validation_rel: cfg.validation_threshold_rel,
                validation_abs: cfg.validation_threshold_abs,
            },
            views: format!("{:?}", a.views).to_lowercase(),
            force: a.force.map(|f| format!("{f:?}").to_lowercase()),
            signal_path: a.input.display().to_string(),
        },
        result,
        timing_ms,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::usage(format!("serializing report: {e}")))?;
    fs::write(&a.report, json + "\n").map_err(|e| Failure::file(&a.report, e))?;

    let r = &report.result;
    let path = match r.path {
        ExecutionPath::Sparse => "sparse",
        ExecutionPath::Fallback => "fallback",
    };
    println!("path: {path}");
    println!(
        "certificates: {:?} (failing: {:?}), survivors {} / {}, occupancy {} / {}",
        r.certificates.verdict,
        r.certificates.failing_certificate,
        r.certificates.candidate_count,
        r.certificates.candidate_count_threshold,
        r.certificates.max_bucket_occupancy_candidates,
        r.certificates.bucket_threshold,
    );
    println!(
        "ops: {} (dense reference {})",
        r.ops.total, r.dense_ops_reference
    );
    println!("{:>10}  {:>16}", "freq", "magnitude");
    for p in &r.peaks {
        println!("{:>10}  {:>16.9}", p.freq, p.magnitude);
    }
    Ok(())
}

pub fn cmd_adversary(a: &AdversaryArgs) -> Result<(), Failure> {
    let usage = |e: Error| Failure::usage(e.to_string());
    let cfg = build_moduli(a.g1, a.g2, a.m1p, a.m2p, None).map_err(usage)?;
    let plan = build_aligned_sets(&cfg, a.k, 0, 0).map_err(usage)?;
    let x = synthesize_adversarial(&plan).map_err(usage)?;
    let oracle = count_survivors_oracle(&plan).map_err(usage)?;

    save_signal(&x, &a.out).map_err(|e| Failure::file(&a.out, e))?;
    let json = serde_json::to_string_pretty(&plan)
        .map_err(|e| Failure::usage(format!("serializing plan: {e}")))?;
    fs::write(&a.plan, json + "\n").map_err(|e| Failure::file(&a.plan, e))?;

    println!(
        "moduli: ({}, {}, {}), N = {}",
        cfg.m1, cfg.m2, cfg.m3, cfg.n
    );
    println!("affine coefficients: u = {}, v = {}", plan.u, plan.v);
    println!("steps: dA = {}, dB = {}", plan.step_a, plan.step_b);
    println!(
        "predicted survivors: formula {}, degenerate {}",
        predict_survivors_formula(a.k, &plan.differences),
        predict_survivors_degenerate(a.k)
    );
    println!("oracle survivors: {oracle}");
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let budget = if a.quick {
        Budget::quick()
    } else {
        Budget::full()
    };
    let reports = run_all(&budget, a.seed);
    let mut failed = Vec::new();
    for r in &reports {
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!(
            "{status}  {:<10} {} checks, {} failures",
            r.name, r.checks, r.failures
        );
        if !r.passed() {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("failing suites: {}", failed.join(", ")),
        })
    }
}

/// One CSV row per `(k, trial)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub k: usize,
    pub trial: u64,
    pub seed: u64,
    pub path: String,
    pub survivors_predup: u64,
    pub survivors_dedup: u64,
    pub validated: u64,
    pub fft_ops: u64,
    pub goertzel_ops: u64,
    pub crt_ops: u64,
    pub total_ops: u64,
    pub dense_ref_ops: u64,
    pub predicted_candidates: f64,
    pub predicted_sparse_ops: f64,
}

pub const BENCH_HEADER: [&str; 14] = [
    "k",
    "trial",
    "seed",
    "path",
    "survivors_predup",
    "survivors_dedup",
    "validated",
    "fft_ops",
    "goertzel_ops",
    "crt_ops",
    "total_ops",
    "dense_ref_ops",
    "predicted_candidates",
    "predicted_sparse_ops",
];

/// Per-trial seed, independent of sweep bounds.
pub fn trial_seed(base: u64, k: usize, trial: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((k as u64) << 32)
        .wrapping_add(trial)
}

pub fn bench_rows(a: &BenchArgs) -> Result<Vec<BenchRow>, Failure> {
    let (m1, m2, m3) = a.moduli;
    let moduli = ModuliConfig::new(m1, m2, m3, a.n as u64).map_err(Failure::moduli)?;
    let mut rows = Vec::new();
    for k in a.sweep.lo..=a.sweep.hi {
        if k > a.n {
            return Err(Failure::usage(format!("k = {k} exceeds N = {}", a.n)));
        }
        let cfg = HybridConfig::new(k, moduli).with_coverage(a.c);
        let predicted = predict_costs(a.n as u64, k as u64, a.c as u64);
        for trial in 0..a.trials {
            let seed = trial_seed(a.seed, k, trial);
            let spec = random_sparse(a.n, k, seed, RANDOM_AMPLITUDE)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let res = run_hybrid(&synthesize(&spec), &cfg).map_err(pipeline_failure)?;
            rows.push(BenchRow {
                k,
                trial,
                seed,
                path: match res.path {
                    ExecutionPath::Sparse => "sparse".into(),
                    ExecutionPath::Fallback => "fallback".into(),
                },
                survivors_predup: res.certificates.candidate_count,
                survivors_dedup: res.survivors_dedup,
                validated: res.validated,
                fft_ops: res.ops.fft_butterflies,
                goertzel_ops: res.ops.goertzel_iterations,
                crt_ops: res.ops.crt_pair_ops,
                total_ops: res.ops.total,
                dense_ref_ops: res.dense_ops_reference,
                predicted_candidates: predicted.expected_candidates,
                predicted_sparse_ops: predicted.sparse_ops,
            });
        }
    }
    rows.sort_by_key(|r| (r.k, r.trial));
    Ok(rows)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    let rows = bench_rows(a)?;
    let io = |e: csv::Error| Failure::file(&a.csv, e);
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&a.csv)
        .map_err(io)?;
    w.write_record(BENCH_HEADER).map_err(io)?;
    for row in &rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::file(&a.csv, e))?;

    println!(
        "{:>4}  {:>8}  {:>14}  {:>9}",
        "k", "trials", "mean_survivors", "fallbacks"
    );
    for k in a.sweep.lo..=a.sweep.hi {
        let of_k: Vec<&BenchRow> = rows.iter().filter(|r| r.k == k).collect();
        if of_k.is_empty() {
            continue;
        }
        let mean = of_k.iter().map(|r| r.survivors_predup as f64).sum::<f64>() / of_k.len() as f64;
        let fallbacks = of_k.iter().filter(|r| r.path == "fallback").count();
        println!("{k:>4}  {:>8}  {mean:>14.3}  {fallbacks:>9}", of_k.len());
    }
    println!("wrote {} rows to {}", rows.len(), a.csv.display());
    Ok(())
}
