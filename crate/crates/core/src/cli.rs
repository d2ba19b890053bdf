//! Command-line front end (`sdnn`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    analyze, read_records_csv, run_sweep, write_params_csv, write_params_to, write_records_csv,
    write_records_to, write_skipped_to, BenchConfig, DEFAULT_MAX_DENSE_BYTES,
};
use crate::dnn::{dense_relu_forward, relu_forward};
use crate::matgen::{gen_bias, gen_input, gen_model, gen_weight, BiasMode, GenSpec, DEFAULT_BATCH};
use crate::matio::write_matrix;
use crate::matrix::{DenseMatrix, Matrix};
use crate::semiring::{check_laws, relative_error, Semiring, REL_TOL};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a command ran but its check failed, or on I/O errors.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for invalid arguments.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sdnn",
    version,
    about = "Sparse semiring ReLU inference kernels and sparse-vs-dense benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time sparse and dense layer steps over a size x sparsity sweep.
    Sweep(SweepArgs),
    /// Derive curve parameters from a sweep CSV.
    Analyze(AnalyzeArgs),
    /// Generate a weight matrix or input batch as a Matrix Market file.
    Gen(GenArgs),
    /// Compare the semiring forward pass with the dense reference.
    Verify(VerifyArgs),
    /// Check the algebraic laws of a semiring on random samples.
    Laws(LawsArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = crate::bench::DEFAULT_SIZES)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = crate::bench::DEFAULT_INVERSE_SPARSITIES)]
    inverse_sparsities: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    batch: usize,
    /// Layer steps chained per timed repetition.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = BiasArg::Zero)]
    bias_mode: BiasArg,
    /// Dense weights above this many bytes are skipped.
    #[arg(long, default_value_t = DEFAULT_MAX_DENSE_BYTES)]
    max_dense_bytes: usize,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Sweep CSV produced by `sweep`.
    #[arg(long)]
    input: PathBuf,
    /// Size whose parameters everything is normalized to.
    #[arg(long, default_value_t = 2048)]
    reference_m: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Weight,
    Input,
    Bias,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Weight)]
    kind: GenKind,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    inverse_sparsity: f64,
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    batch: usize,
    #[arg(long, value_enum, default_value_t = BiasArg::Uniform01)]
    bias_mode: BiasArg,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 1.0)]
    inverse_sparsity: f64,
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    batch: usize,
    #[arg(long, value_enum, default_value_t = BiasArg::Zero)]
    bias_mode: BiasArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Args)]
struct LawsArgs {
    #[arg(long, value_parser = parse_semiring)]
    semiring: Semiring,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BiasArg {
    Zero,
    Uniform01,
}

impl From<BiasArg> for BiasMode {
    fn from(b: BiasArg) -> Self {
        match b {
            BiasArg::Zero => BiasMode::Zero,
            BiasArg::Uniform01 => BiasMode::Uniform01,
        }
    }
}

fn parse_semiring(s: &str) -> Result<Semiring, String> {
    s.parse().map_err(|e: crate::semiring::SemiringError| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a, out, err),
        Command::Analyze(a) => analyze_cmd(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Laws(a) => laws(a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

enum CliError {
    Usage(String),
    Failed(String),
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let config = BenchConfig {
        sizes: a.sizes,
        inverse_sparsities: a.inverse_sparsities,
        batch: a.batch,
        layers: a.layers,
        workers: a.workers,
        repetitions: a.repetitions,
        warmup: a.warmup,
        seed: a.seed,
        bias_mode: a.bias_mode.into(),
        output: a.out,
        max_dense_bytes: a.max_dense_bytes,
    };
    config.validate().map_err(usage)?;
    let outcome = run_sweep(&config).map_err(failed)?;
    if !outcome.skipped.is_empty() {
        let _ = writeln!(err, "skipped {} sweep points:", outcome.skipped.len());
        write_skipped_to(&outcome.skipped, &mut *err).map_err(failed)?;
    }
    match &config.output {
        Some(path) => {
            write_records_csv(&outcome.records, path).map_err(failed)?;
            writeln!(out, "wrote {} records to {}", outcome.records.len(), path.display())
                .map_err(failed)?;
        }
        None => write_records_to(&outcome.records, &mut *out).map_err(failed)?,
    }
    Ok(EXIT_OK)
}

fn analyze_cmd(a: AnalyzeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let records = read_records_csv(&a.input).map_err(failed)?;
    let params = analyze(&records, a.reference_m).map_err(failed)?;
    match &a.out {
        Some(path) => {
            write_params_csv(&params, path).map_err(failed)?;
            writeln!(out, "wrote {} rows to {}", params.len(), path.display()).map_err(failed)?;
        }
        None => write_params_to(&params, &mut *out).map_err(failed)?,
    }
    Ok(EXIT_OK)
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = GenSpec {
        m: a.m,
        inverse_sparsity: a.inverse_sparsity,
        batch: a.batch,
        seed: a.seed,
    };
    spec.validate().map_err(usage)?;
    let matrix = match a.kind {
        GenKind::Weight => Matrix::Sparse(gen_weight(&spec).map_err(usage)?),
        GenKind::Input => Matrix::Dense(gen_input(&spec).map_err(usage)?),
        GenKind::Bias => {
            let b = gen_bias(&spec, a.bias_mode.into()).map_err(usage)?;
            Matrix::Dense(DenseMatrix::new(b.len(), 1, b).map_err(failed)?)
        }
    };
    let info = write_matrix(&matrix, &a.out).map_err(failed)?;
    writeln!(
        out,
        "wrote {}x{} matrix ({} stored entries) to {}",
        info.nrows,
        info.ncols,
        info.nnz.unwrap_or(info.nrows * info.ncols),
        info.path.display()
    )
    .map_err(failed)?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.layers == 0 || a.workers == 0 {
        return Err(usage("layers and workers must be at least 1"));
    }
    let spec = GenSpec {
        m: a.m,
        inverse_sparsity: a.inverse_sparsity,
        batch: a.batch,
        seed: a.seed,
    };
    spec.validate().map_err(usage)?;
    let model = gen_model(&spec, a.layers, a.bias_mode.into()).map_err(failed)?;
    let input = gen_input(&spec).map_err(failed)?;
    let got = relu_forward(&model, &input, a.workers).map_err(failed)?;
    let want = dense_relu_forward(&model, &input).map_err(failed)?;
    let max_err = got
        .data()
        .iter()
        .zip(want.data())
        .map(|(&g, &w)| relative_error(g, w))
        .fold(0.0f32, f32::max);
    let ok = max_err <= REL_TOL;
    writeln!(
        out,
        "m={} layers={} inverse_sparsity={} batch={} workers={}: max relative error {:e} ({})",
        a.m,
        a.layers,
        a.inverse_sparsity,
        a.batch,
        a.workers,
        max_err,
        if ok { "ok" } else { "FAILED" }
    )
    .map_err(failed)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn laws(a: LawsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.samples == 0 {
        return Err(usage("samples must be at least 1"));
    }
    let report = check_laws(a.semiring, a.samples, a.seed);
    write!(out, "{report}").map_err(failed)?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
}
