//! Semiring-generic sparse linear algebra for ReLU network inference.
//!
//! A ReLU layer `max(W·Y + b, 0)` is evaluated as a product over the
//! `+.×` semiring followed by an element-wise multiply and add over the
//! `max.+` semiring. The crate provides the semirings ([`semiring`]), CSR and
//! dense matrices with semiring-parameterized kernels ([`matrix`]), the
//! forward pass ([`dnn`]), seeded workload generation ([`matgen`]), Matrix
//! Market I/O ([`matio`]) and a sparse-versus-dense benchmark harness
//! ([`bench`], driven by the `sdnn` binary through [`cli`]).

pub mod bench;
pub mod cli;
pub mod dnn;
pub mod matgen;
pub mod matio;
pub mod matrix;
pub mod semiring;

pub use dnn::{dense_relu_forward, layer_step, relu_forward, DnnModel};
pub use matrix::{CsrMatrix, DenseMatrix, Matrix};
pub use semiring::Semiring;
