//! Seeded generators for weights, input batches and biases.
//!
//! All randomness comes from Xoshiro256++ streams. Each matrix row gets its
//! own stream derived from `(seed, purpose, row)` through SplitMix64, so a
//! given `GenSpec` yields the same matrix on every platform and the result
//! does not depend on generation order.
//!
//! Weights mask a fixed dense `U[-1, 3)` matrix: entry `(i, j)` is kept when
//! its own uniform mask draw falls below `1 / inverse_sparsity`. With the
//! per-entry sampler a sparser matrix is therefore an entry subset of a
//! denser one with the same seed.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, RngCore, SeedableRng};
use rand_distr::Geometric;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnn::{DnnError, DnnModel};
use crate::matrix::{CsrMatrix, DenseMatrix, Index, Matrix};

/// Default mini-batch width.
pub const DEFAULT_BATCH: usize = 64;

/// Above this inverse sparsity [`Sampling::Auto`] switches to geometric skips.
pub const SKIP_THRESHOLD: f64 = 100.0;

const WEIGHT_STREAM: u64 = 0x5745_4947_4854; // "WEIGHT"
const SKIP_STREAM: u64 = 0x534b_4950; // "SKIP"
const INPUT_STREAM: u64 = 0x49_4e_50_55_54; // "INPUT"
const BIAS_STREAM: u64 = 0x4249_4153; // "BIAS"
const LAYER_STREAM: u64 = 0x4c_41_59_45_52; // "LAYER"

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("matrix size must be at least 1")]
    ZeroSize,
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error("inverse sparsity must be a finite number >= 1, got {0}")]
    InverseSparsity(f64),
    #[error("unknown bias mode {0:?} (expected zero or uniform01)")]
    BiasMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub m: usize,
    /// Total elements divided by expected nonzeros.
    pub inverse_sparsity: f64,
    pub batch: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(m: usize, inverse_sparsity: f64, seed: u64) -> Result<Self, GenError> {
        let spec = Self {
            m,
            inverse_sparsity,
            batch: DEFAULT_BATCH,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch = batch;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.m == 0 {
            return Err(GenError::ZeroSize);
        }
        if self.batch == 0 {
            return Err(GenError::ZeroBatch);
        }
        if !(self.inverse_sparsity.is_finite() && self.inverse_sparsity >= 1.0) {
            return Err(GenError::InverseSparsity(self.inverse_sparsity));
        }
        Ok(())
    }

    /// Probability that a weight entry is present.
    pub fn density(&self) -> f64 {
        1.0 / self.inverse_sparsity
    }

    /// Expected number of stored weight entries.
    pub fn expected_nnz(&self) -> f64 {
        (self.m * self.m) as f64 * self.density()
    }
}

/// How the Bernoulli pattern of a weight matrix is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// One mask draw per entry; nested patterns across sparsities.
    PerEntry,
    /// Geometric gaps between kept entries; `O(nnz + m)` work.
    GeometricSkip,
    /// Per-entry up to [`SKIP_THRESHOLD`], geometric skips above it.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasMode {
    #[default]
    Zero,
    Uniform01,
}

impl fmt::Display for BiasMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiasMode::Zero => "zero",
            BiasMode::Uniform01 => "uniform01",
        })
    }
}

impl FromStr for BiasMode {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(BiasMode::Zero),
            "uniform01" | "uniform" => Ok(BiasMode::Uniform01),
            _ => Err(GenError::BiasMode(s.to_string())),
        }
    }
}

fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut sm = SplitMix64::seed_from_u64(seed ^ stream.rotate_left(29));
    let base = sm.next_u64();
    let mut sm = SplitMix64::seed_from_u64(base ^ index);
    sm.next_u64()
}

fn stream_rng(seed: u64, stream: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(seed, stream, index))
}

/// `U[-1, 3)` conditioned on being nonzero: `0.0` is what an absent entry
/// means, so a drawn zero is redrawn.
fn weight_value<R: Rng>(dist: &Uniform<f32>, rng: &mut R) -> f32 {
    loop {
        let v = dist.sample(rng);
        if v != 0.0 {
            return v;
        }
    }
}

/// `m × m` weight matrix with Bernoulli(`1/inverse_sparsity`) pattern and
/// `U[-1, 3)` values, using [`Sampling::Auto`].
pub fn gen_weight(spec: &GenSpec) -> Result<CsrMatrix, GenError> {
    gen_weight_with(spec, Sampling::Auto)
}

pub fn gen_weight_with(spec: &GenSpec, sampling: Sampling) -> Result<CsrMatrix, GenError> {
    spec.validate()?;
    let skip = match sampling {
        Sampling::PerEntry => false,
        Sampling::GeometricSkip => true,
        Sampling::Auto => spec.inverse_sparsity > SKIP_THRESHOLD,
    };
    let m = spec.m;
    let p = spec.density();
    let values_dist = Uniform::new(-1.0f32, 3.0);
    let mut row_ptr = Vec::with_capacity(m + 1);
    let cap = (spec.expected_nnz() * 1.05 + 16.0).min((m * m) as f64) as usize;
    let mut col_idx: Vec<Index> = Vec::with_capacity(cap);
    let mut values: Vec<f32> = Vec::with_capacity(cap);
    row_ptr.push(0);

    if skip {
        let gap = Geometric::new(p).expect("density is in (0, 1]");
        for i in 0..m {
            let mut rng = stream_rng(spec.seed, SKIP_STREAM, i as u64);
            let mut j = gap.sample(&mut rng);
            while j < m as u64 {
                col_idx.push(j as Index);
                values.push(weight_value(&values_dist, &mut rng));
                j = j.saturating_add(1 + gap.sample(&mut rng));
            }
            row_ptr.push(col_idx.len() as Index);
        }
    } else {
        for i in 0..m {
            let mut rng = stream_rng(spec.seed, WEIGHT_STREAM, i as u64);
            for j in 0..m {
                let v = weight_value(&values_dist, &mut rng);
                if rng.gen::<f64>() < p {
                    col_idx.push(j as Index);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len() as Index);
        }
    }
    col_idx.shrink_to_fit();
    values.shrink_to_fit();
    Ok(CsrMatrix::from_parts(m, m, row_ptr, col_idx, values).expect("generator builds valid CSR"))
}

/// `m × batch` input with `U[0, 1)` entries.
pub fn gen_input(spec: &GenSpec) -> Result<DenseMatrix, GenError> {
    spec.validate()?;
    let dist = Uniform::new(0.0f32, 1.0);
    let mut data = Vec::with_capacity(spec.m * spec.batch);
    for i in 0..spec.m {
        let mut rng = stream_rng(spec.seed, INPUT_STREAM, i as u64);
        data.extend((0..spec.batch).map(|_| dist.sample(&mut rng)));
    }
    Ok(DenseMatrix::new(spec.m, spec.batch, data).expect("length matches"))
}

/// Length-`m` bias vector.
pub fn gen_bias(spec: &GenSpec, mode: BiasMode) -> Result<Vec<f32>, GenError> {
    spec.validate()?;
    Ok(match mode {
        BiasMode::Zero => vec![0.0; spec.m],
        BiasMode::Uniform01 => {
            let mut rng = stream_rng(spec.seed, BIAS_STREAM, 0);
            let dist = Uniform::new(0.0f32, 1.0);
            (0..spec.m).map(|_| dist.sample(&mut rng)).collect()
        }
    })
}

/// Spec for layer `k` of a generated model: same shape, independent seed.
pub fn layer_spec(spec: &GenSpec, layer: usize) -> GenSpec {
    GenSpec {
        seed: derive_seed(spec.seed, LAYER_STREAM, layer as u64),
        ..*spec
    }
}

/// `layers`-deep model of sparse weights generated from `spec`.
pub fn gen_model(spec: &GenSpec, layers: usize, bias: BiasMode) -> Result<DnnModel, DnnError> {
    let mut weights = Vec::with_capacity(layers);
    let mut biases = Vec::with_capacity(layers);
    for k in 0..layers {
        let ls = layer_spec(spec, k);
        let w = gen_weight(&ls).map_err(|e| DnnError::InvalidModel(e.to_string()))?;
        weights.push(Matrix::Sparse(w));
        biases.push(gen_bias(&ls, bias).map_err(|e| DnnError::InvalidModel(e.to_string()))?);
    }
    DnnModel::new(weights, biases)
}
