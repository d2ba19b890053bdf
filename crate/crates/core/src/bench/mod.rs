//! Sparse-semiring versus dense-baseline timing sweeps.
//!
//! The timed unit is one layer step (product, bias add, ReLU). For every
//! `(m, inverse_sparsity)` point the same generated weights are timed twice:
//! through the CSR semiring path and through the dense baseline with zeros
//! stored explicitly.

mod analyze;
mod report;

pub use analyze::{analyze, AnalysisError, CurveParams};
pub use report::{
    read_records_csv, read_records_from, write_params_csv, write_params_to, write_records_csv,
    write_records_to, write_skipped_to, CsvError, BENCH_FIELDS, PARAM_FIELDS,
};

use std::fmt;
use std::hint::black_box;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnn::{dense_layer_step, layer_step, DnnError};
use crate::matgen::{gen_bias, gen_input, gen_weight, BiasMode, GenError, GenSpec, DEFAULT_BATCH};
use crate::matrix::{DenseMatrix, Matrix};

/// Sizes of the default sweep.
pub const DEFAULT_SIZES: [usize; 2] = [512, 2048];
/// Inverse sparsities of the default sweep.
pub const DEFAULT_INVERSE_SPARSITIES: [f64; 8] =
    [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0];
/// Dense weights larger than this are skipped instead of allocated.
pub const DEFAULT_MAX_DENSE_BYTES: usize = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Implementation {
    Sparse,
    Dense,
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Implementation::Sparse => "sparse",
            Implementation::Dense => "dense",
        })
    }
}

impl FromStr for Implementation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sparse" => Ok(Implementation::Sparse),
            "dense" => Ok(Implementation::Dense),
            _ => Err(format!("unknown implementation {s:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Dnn(#[from] DnnError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub inverse_sparsities: Vec<f64>,
    pub batch: usize,
    /// Layer steps chained inside one timed repetition.
    pub layers: usize,
    pub workers: Vec<usize>,
    pub repetitions: usize,
    pub warmup: usize,
    pub seed: u64,
    pub bias_mode: BiasMode,
    pub output: Option<PathBuf>,
    pub max_dense_bytes: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: DEFAULT_SIZES.to_vec(),
            inverse_sparsities: DEFAULT_INVERSE_SPARSITIES.to_vec(),
            batch: DEFAULT_BATCH,
            layers: 1,
            workers: vec![1],
            repetitions: 5,
            warmup: 1,
            seed: 0,
            bias_mode: BiasMode::Zero,
            output: None,
            max_dense_bytes: DEFAULT_MAX_DENSE_BYTES,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: &str| Err(BenchError::Config(msg.to_string()));
        if self.sizes.is_empty() || self.inverse_sparsities.is_empty() {
            return bad("sizes and inverse sparsities must be non-empty");
        }
        if self.workers.is_empty() || self.workers.contains(&0) {
            return bad("worker counts must be non-empty and at least 1");
        }
        if self.repetitions < 3 {
            return bad("repetitions must be at least 3");
        }
        if self.warmup < 1 {
            return bad("warmup must be at least 1");
        }
        if self.layers < 1 {
            return bad("layers must be at least 1");
        }
        for &m in &self.sizes {
            for &is in &self.inverse_sparsities {
                self.gen_spec(m, is).validate()?;
            }
        }
        Ok(())
    }

    fn gen_spec(&self, m: usize, inverse_sparsity: f64) -> GenSpec {
        GenSpec {
            m,
            inverse_sparsity,
            batch: self.batch,
            seed: self.seed,
        }
    }

    /// Rows a complete sweep produces (before any skips).
    pub fn expected_rows(&self) -> usize {
        self.sizes.len() * self.inverse_sparsities.len() * 2 * self.workers.len()
    }
}

/// Timing of one `(m, inverse_sparsity, implementation, workers)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub m: usize,
    pub inverse_sparsity: f64,
    pub implementation: Implementation,
    pub workers: usize,
    pub mean_layer_seconds: f64,
    pub stddev_seconds: f64,
    pub nnz: usize,
    pub matrix_bytes: usize,
}

#[cfg(test)]
impl BenchRecord {
    fn sort_key(&self) -> (usize, u64, Implementation, usize) {
        (
            self.m,
            self.inverse_sparsity.to_bits(),
            self.implementation,
            self.workers,
        )
    }
}

/// Sorts by `m`, inverse sparsity, implementation, then workers.
pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| {
        a.m.cmp(&b.m)
            .then(a.inverse_sparsity.total_cmp(&b.inverse_sparsity))
            .then(a.implementation.cmp(&b.implementation))
            .then(a.workers.cmp(&b.workers))
    });
}

/// A sweep point that could not be run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRun {
    pub m: usize,
    pub inverse_sparsity: f64,
    pub implementation: Implementation,
    pub workers: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedRun>,
}

/// Mean and sample standard deviation.
pub fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `layers` chained steps from `input` and returns seconds per layer.
fn time_chain<F>(input: &DenseMatrix, layers: usize, step: F) -> Result<f64, DnnError>
where
    F: Fn(&DenseMatrix) -> Result<DenseMatrix, DnnError>,
{
    let start = Instant::now();
    let mut y = step(black_box(input))?;
    for _ in 1..layers {
        y = step(&y)?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    black_box(y);
    Ok((elapsed / layers as f64).max(f64::MIN_POSITIVE))
}

/// One generated `(m, inverse_sparsity)` point and its timing samples,
/// indexed by position in `config.workers`.
struct Point {
    is: f64,
    w: Matrix,
    b: Vec<f32>,
    y: DenseMatrix,
    sparse: Vec<Vec<f64>>,
    dense: Vec<Vec<f64>>,
}

/// Dense copy of a sparse weight, or the reason it cannot be built.
fn densify(w: &Matrix, max_bytes: usize) -> Result<DenseMatrix, String> {
    let m = w.nrows();
    let bytes = DenseMatrix::bytes_for(m, m);
    if bytes > max_bytes {
        return Err(format!("dense weight needs {bytes} bytes, above the {max_bytes} byte cap"));
    }
    let mut d = DenseMatrix::try_filled(m, m, 0.0).map_err(|e| e.to_string())?;
    for (i, j, v) in w.as_sparse().expect("sparse").triples() {
        d.set(i, j, v);
    }
    Ok(d)
}

/// Runs every configured sweep point. Dense points whose weight matrix
/// exceeds the memory cap or cannot be allocated are reported as skipped.
///
/// Repetitions are interleaved round-robin over the inverse sparsities of
/// one size, so a slow spell on the machine spreads over all points
/// instead of landing on one. Each point gets one untimed run per round
/// before its samples. Sparse weights held for a round are limited to
/// `max_dense_bytes`; beyond that the points of a size run in groups.
pub fn run_sweep(config: &BenchConfig) -> Result<SweepOutcome, BenchError> {
    config.validate()?;
    let mut outcome = SweepOutcome::default();
    for &m in &config.sizes {
        let mut group: Vec<Point> = Vec::new();
        let mut held = 0usize;
        for &is in &config.inverse_sparsities {
            let spec = config.gen_spec(m, is);
            let w = gen_weight(&spec)?;
            let bytes = w.storage_bytes();
            if !group.is_empty() && held + bytes > config.max_dense_bytes {
                run_group(config, m, std::mem::take(&mut group), &mut outcome)?;
                held = 0;
            }
            held += bytes;
            group.push(Point {
                is,
                w: Matrix::Sparse(w),
                b: gen_bias(&spec, config.bias_mode)?,
                y: gen_input(&spec)?,
                sparse: vec![Vec::with_capacity(config.repetitions); config.workers.len()],
                dense: vec![Vec::with_capacity(config.repetitions); config.workers.len()],
            });
        }
        run_group(config, m, group, &mut outcome)?;
    }
    sort_records(&mut outcome.records);
    Ok(outcome)
}

fn run_group(
    config: &BenchConfig,
    m: usize,
    mut points: Vec<Point>,
    outcome: &mut SweepOutcome,
) -> Result<(), BenchError> {
    let layers = config.layers;
    // Dense copies are rebuilt for every sample rather than held, so only
    // one exists at a time.
    let mut skipped: Vec<Option<String>> = vec![None; points.len()];

    for round in 0..config.warmup + config.repetitions {
        let timed = round >= config.warmup;
        for p in &mut points {
            // Untimed run so every sample starts warm, as it would inside
            // a loop over layers.
            time_chain(&p.y, 1, |y| layer_step(&p.w, &p.b, y, 1))?;
            for (k, &workers) in config.workers.iter().enumerate() {
                let t = time_chain(&p.y, layers, |y| layer_step(&p.w, &p.b, y, workers))?;
                if timed {
                    p.sparse[k].push(t);
                }
            }
        }
        for (p, skip) in points.iter_mut().zip(&mut skipped) {
            if skip.is_some() {
                continue;
            }
            let wd = match densify(&p.w, config.max_dense_bytes) {
                Ok(wd) => wd,
                Err(reason) => {
                    *skip = Some(reason);
                    continue;
                }
            };
            time_chain(&p.y, 1, |y| dense_layer_step(&wd, &p.b, y, 1))?;
            for (k, &workers) in config.workers.iter().enumerate() {
                let t = time_chain(&p.y, layers, |y| dense_layer_step(&wd, &p.b, y, workers))?;
                if timed {
                    p.dense[k].push(t);
                }
            }
        }
    }

    for (p, skip) in points.iter().zip(&skipped) {
        let nnz = p.w.nnz();
        for (k, &workers) in config.workers.iter().enumerate() {
            let (mean, sd) = mean_stddev(&p.sparse[k]);
            outcome.records.push(BenchRecord {
                m,
                inverse_sparsity: p.is,
                implementation: Implementation::Sparse,
                workers,
                mean_layer_seconds: mean,
                stddev_seconds: sd,
                nnz,
                matrix_bytes: p.w.storage_bytes(),
            });
            match skip {
                None => {
                    let (mean, sd) = mean_stddev(&p.dense[k]);
                    outcome.records.push(BenchRecord {
                        m,
                        inverse_sparsity: p.is,
                        implementation: Implementation::Dense,
                        workers,
                        mean_layer_seconds: mean,
                        stddev_seconds: sd,
                        // The dense copy holds exactly the stored entries of `w`.
                        nnz,
                        matrix_bytes: DenseMatrix::bytes_for(m, m),
                    });
                }
                Some(reason) => outcome.skipped.push(SkippedRun {
                    m,
                    inverse_sparsity: p.is,
                    implementation: Implementation::Dense,
                    workers,
                    reason: reason.clone(),
                }),
            }
        }
    }
    Ok(())
}
