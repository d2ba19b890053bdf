use std::borrow::Cow;
use std::ops::Range;

use super::par::{for_row_blocks, row_ranges};
use super::{CsrMatrix, DenseMatrix, Index, Matrix, MatrixError};
use crate::semiring::{with_ops, Semiring, SemiringOps};

fn check_same_shape(op: &'static str, a: &Matrix, b: &Matrix) -> Result<(), MatrixError> {
    if a.shape() != b.shape() {
        return Err(MatrixError::DimensionMismatch {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

fn check_domain(s: Semiring, operands: &[&Matrix]) -> Result<(), MatrixError> {
    if s == Semiring::Gf2 {
        for m in operands {
            for &v in m.stored_values() {
                s.check_domain(v)?;
            }
        }
    }
    Ok(())
}

/// Dense copy of `a`; positions not stored in a CSR operand get `ambient_zero`.
pub fn to_dense(a: &Matrix, ambient_zero: f32) -> DenseMatrix {
    match a {
        Matrix::Dense(d) => d.clone(),
        Matrix::Sparse(c) => {
            let mut out = DenseMatrix::filled(c.nrows(), c.ncols(), ambient_zero);
            for (i, j, v) in c.triples() {
                out.set(i, j, v);
            }
            out
        }
    }
}

/// CSR copy of `d` holding every entry different from `0.0`.
pub fn from_dense(d: &DenseMatrix) -> CsrMatrix {
    let (nrows, ncols) = d.shape();
    let nnz = d.count_nonzero();
    let mut row_ptr = Vec::with_capacity(nrows + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for i in 0..nrows {
        for (j, &v) in d.row(i).iter().enumerate() {
            if v != 0.0 {
                col_idx.push(j as Index);
                values.push(v);
            }
        }
        row_ptr.push(col_idx.len() as Index);
    }
    CsrMatrix::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values)
}

/// Element-wise `C(i,j) = A(i,j) ⊕ B(i,j)`.
///
/// Two CSR operands give a CSR result over the union of their patterns;
/// anything involving a dense operand gives a dense result, with absent
/// CSR positions read as `s.zero()`.
pub fn ewise_add(a: &Matrix, b: &Matrix, s: Semiring) -> Result<Matrix, MatrixError> {
    check_same_shape("ewise_add", a, b)?;
    check_domain(s, &[a, b])?;
    Ok(with_ops!(s, S => match (a, b) {
        (Matrix::Sparse(x), Matrix::Sparse(y)) => Matrix::Sparse(merge_union::<S>(x, y)),
        _ => Matrix::Dense(zip_dense(a, b, s, S::add)),
    }))
}

/// Element-wise (Hadamard) `C(i,j) = A(i,j) ⊗ B(i,j)`.
///
/// Two CSR operands give a CSR result over the intersection of their
/// patterns, since an absent entry is the annihilator.
pub fn ewise_mul(a: &Matrix, b: &Matrix, s: Semiring) -> Result<Matrix, MatrixError> {
    check_same_shape("ewise_mul", a, b)?;
    check_domain(s, &[a, b])?;
    Ok(with_ops!(s, S => match (a, b) {
        (Matrix::Sparse(x), Matrix::Sparse(y)) => Matrix::Sparse(merge_intersection::<S>(x, y)),
        _ => Matrix::Dense(zip_dense(a, b, s, S::mul)),
    }))
}

/// `C(i,j) = A(i,j) ⊗ b[i]`: element-wise multiply by the matrix whose
/// columns all equal `b`, without materializing it.
pub fn ewise_mul_broadcast_rows(
    a: &DenseMatrix,
    b: &[f32],
    s: Semiring,
) -> Result<DenseMatrix, MatrixError> {
    if b.len() != a.nrows() {
        return Err(MatrixError::DimensionMismatch {
            op: "ewise_mul_broadcast_rows",
            left: a.shape(),
            right: (b.len(), 1),
        });
    }
    if s == Semiring::Gf2 {
        for &v in a.data().iter().chain(b) {
            s.check_domain(v)?;
        }
    }
    let mut out = a.clone();
    let n = a.ncols();
    if n > 0 {
        with_ops!(s, S => {
            for (row, &bi) in out.data_mut().chunks_mut(n).zip(b) {
                row.iter_mut().for_each(|x| *x = S::mul(*x, bi));
            }
        });
    }
    Ok(out)
}

fn zip_dense<F: Fn(f32, f32) -> f32>(a: &Matrix, b: &Matrix, s: Semiring, f: F) -> DenseMatrix {
    let (x, y) = (densify(a, s.zero()), densify(b, s.zero()));
    let data = x.data().iter().zip(y.data()).map(|(&p, &q)| f(p, q)).collect();
    DenseMatrix::new(x.nrows(), x.ncols(), data).expect("shapes already checked")
}

fn densify(m: &Matrix, zero: f32) -> Cow<'_, DenseMatrix> {
    match m {
        Matrix::Dense(d) => Cow::Borrowed(d),
        Matrix::Sparse(_) => Cow::Owned(to_dense(m, zero)),
    }
}

fn merge_union<S: SemiringOps>(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    let mut col_idx = Vec::with_capacity(a.nnz() + b.nnz());
    let mut values = Vec::with_capacity(a.nnz() + b.nnz());
    row_ptr.push(0);
    for i in 0..a.nrows() {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let (mut p, mut q) = (0, 0);
        while p < ac.len() || q < bc.len() {
            let take_a = q == bc.len() || (p < ac.len() && ac[p] <= bc[q]);
            let take_b = p == ac.len() || (q < bc.len() && bc[q] <= ac[p]);
            let (col, val) = match (take_a, take_b) {
                (true, true) => (ac[p], S::add(av[p], bv[q])),
                (true, false) => (ac[p], S::add(av[p], S::ZERO)),
                (false, true) => (bc[q], S::add(S::ZERO, bv[q])),
                (false, false) => unreachable!(),
            };
            p += take_a as usize;
            q += take_b as usize;
            col_idx.push(col);
            values.push(val);
        }
        row_ptr.push(col_idx.len() as Index);
    }
    col_idx.shrink_to_fit();
    values.shrink_to_fit();
    CsrMatrix::from_parts_unchecked(a.nrows(), a.ncols(), row_ptr, col_idx, values)
}

fn merge_intersection<S: SemiringOps>(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..a.nrows() {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let (mut p, mut q) = (0, 0);
        while p < ac.len() && q < bc.len() {
            match ac[p].cmp(&bc[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    col_idx.push(ac[p]);
                    values.push(S::mul(av[p], bv[q]));
                    p += 1;
                    q += 1;
                }
            }
        }
        row_ptr.push(col_idx.len() as Index);
    }
    CsrMatrix::from_parts_unchecked(a.nrows(), a.ncols(), row_ptr, col_idx, values)
}

/// Single-worker [`mxm_with_workers`].
pub fn mxm(a: &Matrix, b: &Matrix, s: Semiring) -> Result<Matrix, MatrixError> {
    mxm_with_workers(a, b, s, 1)
}

/// Matrix multiply `C(i,j) = ⊕_k A(i,k) ⊗ B(k,j)` over `s`.
///
/// Supported operand pairs are CSR×dense (dense result), dense×dense (dense
/// result) and CSR×CSR (CSR result). For a CSR left operand only stored
/// entries contribute. Every output entry accumulates its terms in ascending
/// `k`, and each output row is owned by exactly one worker, so the result is
/// bitwise identical for any `workers`.
pub fn mxm_with_workers(
    a: &Matrix,
    b: &Matrix,
    s: Semiring,
    workers: usize,
) -> Result<Matrix, MatrixError> {
    if a.ncols() != b.nrows() {
        return Err(MatrixError::DimensionMismatch {
            op: "mxm",
            left: a.shape(),
            right: b.shape(),
        });
    }
    check_domain(s, &[a, b])?;
    with_ops!(s, S => match (a, b) {
        (Matrix::Sparse(x), Matrix::Dense(y)) => Ok(Matrix::Dense(csr_dense::<S>(x, y, workers))),
        (Matrix::Dense(x), Matrix::Dense(y)) => Ok(Matrix::Dense(dense_dense::<S>(x, y, workers))),
        (Matrix::Sparse(x), Matrix::Sparse(y)) => Ok(Matrix::Sparse(csr_csr::<S>(x, y, workers))),
        (Matrix::Dense(_), Matrix::Sparse(_)) => Err(MatrixError::Unsupported("dense x CSR mxm")),
    })
}

/// [`mxm_with_workers`] for a dense right operand, borrowing it in place.
pub fn mxm_dense_rhs(
    a: &Matrix,
    b: &DenseMatrix,
    s: Semiring,
    workers: usize,
) -> Result<DenseMatrix, MatrixError> {
    if a.ncols() != b.nrows() {
        return Err(MatrixError::DimensionMismatch {
            op: "mxm",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if s == Semiring::Gf2 {
        check_domain(s, &[a])?;
        for &v in b.data() {
            s.check_domain(v)?;
        }
    }
    Ok(with_ops!(s, S => match a {
        Matrix::Sparse(x) => csr_dense::<S>(x, b, workers),
        Matrix::Dense(x) => dense_dense::<S>(x, b, workers),
    }))
}

fn csr_dense<S: SemiringOps>(a: &CsrMatrix, b: &DenseMatrix, workers: usize) -> DenseMatrix {
    let n = b.ncols();
    let mut out = DenseMatrix::filled(a.nrows(), n, S::ZERO);
    if n == 0 {
        return out;
    }
    for_row_blocks(out.data_mut(), n, workers, |rows, block| {
        for (i, crow) in rows.zip(block.chunks_exact_mut(n)) {
            let (cols, vals) = a.row(i);
            for (&k, &v) in cols.iter().zip(vals) {
                let brow = b.row(k as usize);
                for (c, &x) in crow.iter_mut().zip(brow) {
                    *c = S::add(*c, S::mul(v, x));
                }
            }
        }
    });
    out
}

fn dense_dense<S: SemiringOps>(a: &DenseMatrix, b: &DenseMatrix, workers: usize) -> DenseMatrix {
    let n = b.ncols();
    let mut out = DenseMatrix::filled(a.nrows(), n, S::ZERO);
    if n == 0 {
        return out;
    }
    for_row_blocks(out.data_mut(), n, workers, |rows, block| {
        for (i, crow) in rows.zip(block.chunks_exact_mut(n)) {
            for (k, &v) in a.row(i).iter().enumerate() {
                for (c, &x) in crow.iter_mut().zip(b.row(k)) {
                    *c = S::add(*c, S::mul(v, x));
                }
            }
        }
    });
    out
}

/// Row-merge (Gustavson) product with a dense accumulator per worker.
fn csr_csr<S: SemiringOps>(a: &CsrMatrix, b: &CsrMatrix, workers: usize) -> CsrMatrix {
    let ncols = b.ncols();
    let block = |rows: Range<usize>| {
        let mut acc = vec![S::ZERO; ncols];
        let mut seen = vec![false; ncols];
        let mut touched: Vec<Index> = Vec::new();
        let mut counts = Vec::with_capacity(rows.len());
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in rows {
            let (acols, avals) = a.row(i);
            for (&k, &v) in acols.iter().zip(avals) {
                let (bcols, bvals) = b.row(k as usize);
                for (&j, &x) in bcols.iter().zip(bvals) {
                    let j = j as usize;
                    let term = S::mul(v, x);
                    if seen[j] {
                        acc[j] = S::add(acc[j], term);
                    } else {
                        seen[j] = true;
                        acc[j] = S::add(S::ZERO, term);
                        touched.push(j as Index);
                    }
                }
            }
            touched.sort_unstable();
            counts.push(touched.len());
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j as usize]);
                seen[j as usize] = false;
            }
            touched.clear();
        }
        (counts, cols, vals)
    };

    let ranges = row_ranges(a.nrows(), workers);
    let parts: Vec<_> = if ranges.len() <= 1 {
        ranges.into_iter().map(block).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(move || block(r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("mxm worker panicked"))
                .collect()
        })
    };

    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0 as Index);
    for (counts, cols, vals) in parts {
        for c in counts {
            let last = *row_ptr.last().unwrap();
            row_ptr.push(last + c as Index);
        }
        col_idx.extend(cols);
        values.extend(vals);
    }
    CsrMatrix::from_parts_unchecked(a.nrows(), ncols, row_ptr, col_idx, values)
}

/// Plain arithmetic dense product, single worker.
pub fn dense_mxm_baseline(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, MatrixError> {
    dense_mxm_baseline_with_workers(a, b, 1)
}

/// Plain arithmetic dense product in `i-k-j` order.
///
/// Every entry of `a` is used, zero or not, so the cost depends only on the
/// shapes. Four `k` steps are fused per pass over an output row to cut
/// load/store traffic; the per-entry summation order stays ascending in `k`.
pub fn dense_mxm_baseline_with_workers(
    a: &DenseMatrix,
    b: &DenseMatrix,
    workers: usize,
) -> Result<DenseMatrix, MatrixError> {
    if a.ncols() != b.nrows() {
        return Err(MatrixError::DimensionMismatch {
            op: "dense_mxm_baseline",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (l, n) = (a.ncols(), b.ncols());
    let mut out = DenseMatrix::zeros(a.nrows(), n);
    if n == 0 {
        return Ok(out);
    }
    for_row_blocks(out.data_mut(), n, workers, |rows, block| {
        for (i, crow) in rows.zip(block.chunks_exact_mut(n)) {
            let arow = a.row(i);
            let mut k = 0;
            while k + 4 <= l {
                let (a0, a1, a2, a3) = (arow[k], arow[k + 1], arow[k + 2], arow[k + 3]);
                let (b0, b1, b2, b3) = (b.row(k), b.row(k + 1), b.row(k + 2), b.row(k + 3));
                for j in 0..n {
                    let mut c = crow[j];
                    c += a0 * b0[j];
                    c += a1 * b1[j];
                    c += a2 * b2[j];
                    c += a3 * b3[j];
                    crow[j] = c;
                }
                k += 4;
            }
            for (kk, &av) in arow.iter().enumerate().skip(k) {
                for (c, &x) in crow.iter_mut().zip(b.row(kk)) {
                    *c += av * x;
                }
            }
        }
    });
    Ok(out)
}
