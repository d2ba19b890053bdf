//! Sparse (CSR) and dense matrices with semiring-generic operations.

mod csr;
mod dense;
mod ops;
mod par;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use ops::{
    dense_mxm_baseline, dense_mxm_baseline_with_workers, ewise_add, ewise_mul,
    ewise_mul_broadcast_rows, from_dense, mxm, mxm_dense_rhs, mxm_with_workers, to_dense,
};

use thiserror::Error;

use crate::semiring::SemiringError;

/// Index type used for CSR row pointers and column indices.
pub type Index = u32;

/// Width of [`Index`] in bytes.
pub const INDEX_BYTES: usize = std::mem::size_of::<Index>();

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("entry ({row}, {col}) is outside a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),
    #[error("expected {expected} values, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("cannot allocate {bytes} bytes")]
    Allocation { bytes: usize },
    #[error("unsupported operand combination: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Domain(#[from] SemiringError),
}

/// Either representation, with uniform shape accessors.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

impl Matrix {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Sparse(a) => a.nrows(),
            Matrix::Dense(a) => a.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Sparse(a) => a.ncols(),
            Matrix::Dense(a) => a.ncols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    /// Stored entries for CSR; entries different from `0.0` for dense.
    pub fn nnz(&self) -> usize {
        match self {
            Matrix::Sparse(a) => a.nnz(),
            Matrix::Dense(a) => a.count_nonzero(),
        }
    }

    /// Exact byte footprint of the representation's arrays.
    pub fn storage_bytes(&self) -> usize {
        match self {
            Matrix::Sparse(a) => a.storage_bytes(),
            Matrix::Dense(a) => a.storage_bytes(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Sparse(_))
    }

    pub fn as_sparse(&self) -> Option<&CsrMatrix> {
        match self {
            Matrix::Sparse(a) => Some(a),
            Matrix::Dense(_) => None,
        }
    }

    pub fn as_dense(&self) -> Option<&DenseMatrix> {
        match self {
            Matrix::Dense(a) => Some(a),
            Matrix::Sparse(_) => None,
        }
    }

    /// Dense view with absent entries set to `ambient_zero`.
    pub fn to_dense(&self, ambient_zero: f32) -> DenseMatrix {
        to_dense(self, ambient_zero)
    }

    pub fn into_dense(self, ambient_zero: f32) -> DenseMatrix {
        match self {
            Matrix::Dense(a) => a,
            Matrix::Sparse(a) => to_dense(&Matrix::Sparse(a), ambient_zero),
        }
    }

    /// Stored values, used for domain checks.
    pub(crate) fn stored_values(&self) -> &[f32] {
        match self {
            Matrix::Sparse(a) => a.values(),
            Matrix::Dense(a) => a.data(),
        }
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(a: CsrMatrix) -> Self {
        Matrix::Sparse(a)
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(a: DenseMatrix) -> Self {
        Matrix::Dense(a)
    }
}

/// Number of stored entries; see [`Matrix::nnz`].
pub fn nnz(a: &Matrix) -> usize {
    a.nnz()
}

/// See [`Matrix::storage_bytes`].
pub fn storage_bytes(a: &Matrix) -> usize {
    a.storage_bytes()
}
