//! ReLU network inference written as linear algebra over two semirings.
//!
//! One layer is
//!
//! ```text
//! Y' = (W ·(+.×) Y) ⊗(max.+) B  ⊕(max.+) 0
//! ```
//!
//! where `B` replicates the bias vector across the batch columns. Under
//! max-plus, `⊗` is ordinary addition (the bias add) and `⊕ 0` is
//! `max(·, 0)`, i.e. the ReLU. [`dense_relu_forward`] computes the same thing
//! the direct way, `max(W·Y + b, 0)`, with the plain dense product.

use thiserror::Error;

use crate::matrix::{
    dense_mxm_baseline_with_workers, ewise_add, ewise_mul, ewise_mul_broadcast_rows,
    mxm_dense_rhs, DenseMatrix, Matrix, MatrixError,
};
use crate::semiring::{arithmetic_semiring, max_plus_semiring};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DnnError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("input is {got:?} but the model expects {expected} rows")]
    InputShape { expected: usize, got: (usize, usize) },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `L` square weight matrices and bias vectors, all of width `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DnnModel {
    neurons: usize,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f32>>,
}

impl DnnModel {
    pub fn new(weights: Vec<Matrix>, biases: Vec<Vec<f32>>) -> Result<Self, DnnError> {
        let Some(first) = weights.first() else {
            return Err(DnnError::InvalidModel("at least one layer is required".into()));
        };
        if weights.len() != biases.len() {
            return Err(DnnError::InvalidModel(format!(
                "{} weight matrices but {} bias vectors",
                weights.len(),
                biases.len()
            )));
        }
        let m = first.nrows();
        for (k, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.shape() != (m, m) {
                return Err(DnnError::InvalidModel(format!(
                    "layer {k} weight is {:?}, expected {m}x{m}",
                    w.shape()
                )));
            }
            if b.len() != m {
                return Err(DnnError::InvalidModel(format!(
                    "layer {k} bias has length {}, expected {m}",
                    b.len()
                )));
            }
        }
        Ok(Self {
            neurons: m,
            weights,
            biases,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f32>] {
        &self.biases
    }

    /// Same model with every weight stored densely (explicit zeros).
    pub fn to_dense_weights(&self) -> DnnModel {
        DnnModel {
            neurons: self.neurons,
            weights: self
                .weights
                .iter()
                .map(|w| Matrix::Dense(w.to_dense(0.0)))
                .collect(),
            biases: self.biases.clone(),
        }
    }

    fn check_input(&self, y: &DenseMatrix) -> Result<(), DnnError> {
        if y.nrows() != self.neurons || y.ncols() == 0 {
            return Err(DnnError::InputShape {
                expected: self.neurons,
                got: y.shape(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForwardOptions {
    pub workers: usize,
    /// Build the full `m × n` bias matrix and use the generic element-wise
    /// multiply instead of the row-broadcast kernel.
    pub materialize_bias: bool,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            materialize_bias: false,
        }
    }
}

/// Runs the batch `input` (`m × n`) through every layer of `model`.
pub fn relu_forward(
    model: &DnnModel,
    input: &DenseMatrix,
    workers: usize,
) -> Result<DenseMatrix, DnnError> {
    relu_forward_with(
        model,
        input,
        ForwardOptions {
            workers,
            ..ForwardOptions::default()
        },
    )
}

pub fn relu_forward_with(
    model: &DnnModel,
    input: &DenseMatrix,
    opts: ForwardOptions,
) -> Result<DenseMatrix, DnnError> {
    model.check_input(input)?;
    if opts.workers == 0 {
        return Err(DnnError::NoWorkers);
    }
    // One zero matrix serves every layer's ReLU.
    let zeros = Matrix::Dense(DenseMatrix::zeros(input.nrows(), input.ncols()));
    let mut y = input.clone();
    for (w, b) in model.weights.iter().zip(&model.biases) {
        y = layer_step_impl(w, b, &y, &zeros, opts)?;
    }
    Ok(y)
}

/// One layer: `max(W·Y + b·1ᵀ, 0)` evaluated through the semiring kernels.
pub fn layer_step(
    w: &Matrix,
    b: &[f32],
    y: &DenseMatrix,
    workers: usize,
) -> Result<DenseMatrix, DnnError> {
    if workers == 0 {
        return Err(DnnError::NoWorkers);
    }
    check_layer(w, b, y)?;
    let zeros = Matrix::Dense(DenseMatrix::zeros(y.nrows(), y.ncols()));
    layer_step_impl(
        w,
        b,
        y,
        &zeros,
        ForwardOptions {
            workers,
            materialize_bias: false,
        },
    )
}

fn check_layer(w: &Matrix, b: &[f32], y: &DenseMatrix) -> Result<(), DnnError> {
    let m = w.nrows();
    if w.ncols() != m || b.len() != m {
        return Err(DnnError::InvalidModel(format!(
            "weight {:?} and bias of length {} do not form a layer",
            w.shape(),
            b.len()
        )));
    }
    if y.nrows() != m {
        return Err(DnnError::InputShape {
            expected: m,
            got: y.shape(),
        });
    }
    Ok(())
}

fn layer_step_impl(
    w: &Matrix,
    b: &[f32],
    y: &DenseMatrix,
    zeros: &Matrix,
    opts: ForwardOptions,
) -> Result<DenseMatrix, DnnError> {
    let plus_times = arithmetic_semiring();
    let max_plus = max_plus_semiring();

    let z = mxm_dense_rhs(w, y, plus_times, opts.workers)?;
    let z = if opts.materialize_bias {
        let bias = DenseMatrix::from_fn(z.nrows(), z.ncols(), |i, _| b[i]);
        ewise_mul(&Matrix::Dense(z), &Matrix::Dense(bias), max_plus)?
    } else {
        Matrix::Dense(ewise_mul_broadcast_rows(&z, b, max_plus)?)
    };
    Ok(ewise_add(&z, zeros, max_plus)?.into_dense(max_plus.zero()))
}

/// Direct reference: `y ← max(W·y + b, 0)` per layer, using the dense
/// baseline product on dense copies of the weights.
pub fn dense_relu_forward(model: &DnnModel, input: &DenseMatrix) -> Result<DenseMatrix, DnnError> {
    model.check_input(input)?;
    let mut y = input.clone();
    for (w, b) in model.weights.iter().zip(&model.biases) {
        let w = match w {
            Matrix::Dense(d) => std::borrow::Cow::Borrowed(d),
            Matrix::Sparse(_) => std::borrow::Cow::Owned(w.to_dense(0.0)),
        };
        y = dense_layer_step(&w, b, &y, 1)?;
    }
    Ok(y)
}

/// One dense layer: baseline product, bias add and ReLU in plain `f32`.
pub fn dense_layer_step(
    w: &DenseMatrix,
    b: &[f32],
    y: &DenseMatrix,
    workers: usize,
) -> Result<DenseMatrix, DnnError> {
    if workers == 0 {
        return Err(DnnError::NoWorkers);
    }
    if w.nrows() != w.ncols() || b.len() != w.nrows() {
        return Err(DnnError::InvalidModel(format!(
            "weight {:?} and bias of length {} do not form a layer",
            w.shape(),
            b.len()
        )));
    }
    if y.nrows() != w.nrows() {
        return Err(DnnError::InputShape {
            expected: w.nrows(),
            got: y.shape(),
        });
    }
    let mut z = dense_mxm_baseline_with_workers(w, y, workers)?;
    let n = z.ncols();
    if n > 0 {
        for (row, &bi) in z.data_mut().chunks_mut(n).zip(b) {
            for v in row.iter_mut() {
                *v = (*v + bi).max(0.0);
            }
        }
    }
    Ok(z)
}
