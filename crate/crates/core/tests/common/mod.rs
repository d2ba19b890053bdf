//! Independent reference implementations shared by the integration tests.
//!
//! Everything here works on plain nested loops over dense copies and calls
//! only the scalar semiring operations, never the crate's matrix kernels.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use semiring_dnn::matrix::{CsrMatrix, DenseMatrix, Index, Matrix};
use semiring_dnn::semiring::Semiring;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Dense view of `a` where absent CSR entries read as `zero`, built
/// entry by entry from `CsrMatrix::get`.
pub fn dense_of(a: &Matrix, zero: f32) -> Vec<Vec<f32>> {
    let (r, c) = a.shape();
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| match a {
                    Matrix::Sparse(s) => s.get(i, j).unwrap_or(zero),
                    Matrix::Dense(d) => d.get(i, j),
                })
                .collect()
        })
        .collect()
}

/// `C(i,j) = ⊕_k A(i,k) ⊗ B(k,j)` by brute force, folding from `s.zero()`
/// in ascending `k`. Absent CSR entries take part as `s.zero()`.
pub fn oracle_mxm(a: &Matrix, b: &Matrix, s: Semiring) -> Vec<Vec<f32>> {
    let (a, b) = (dense_of(a, s.zero()), dense_of(b, s.zero()));
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|arow| {
            (0..n)
                .map(|j| {
                    arow.iter()
                        .enumerate()
                        .fold(s.zero(), |acc, (k, &x)| s.add(acc, s.mul(x, b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn oracle_ewise(a: &Matrix, b: &Matrix, s: Semiring, f: fn(Semiring, f32, f32) -> f32) -> Vec<Vec<f32>> {
    let (a, b) = (dense_of(a, s.zero()), dense_of(b, s.zero()));
    a.iter()
        .zip(&b)
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(s, p, q)).collect())
        .collect()
}

/// One layer `max(W·Y + b, 0)` with scalar loops in `f32`.
pub fn oracle_layer(w: &[Vec<f32>], b: &[f32], y: &[Vec<f32>]) -> Vec<Vec<f32>> {
    let n = y[0].len();
    w.iter()
        .enumerate()
        .map(|(i, wrow)| {
            (0..n)
                .map(|j| {
                    let mut acc = 0.0f32;
                    for (k, &wk) in wrow.iter().enumerate() {
                        acc += wk * y[k][j];
                    }
                    (acc + b[i]).max(0.0)
                })
                .collect()
        })
        .collect()
}

pub fn rows_of(d: &DenseMatrix) -> Vec<Vec<f32>> {
    (0..d.nrows()).map(|i| d.row(i).to_vec()).collect()
}

/// Compares against an oracle: bitwise for exact semirings, within the
/// crate tolerance otherwise.
pub fn agrees(s: Semiring, got: &[Vec<f32>], want: &[Vec<f32>]) -> bool {
    got.len() == want.len()
        && got.iter().zip(want).all(|(g, w)| {
            g.len() == w.len()
                && g.iter().zip(w).all(|(&x, &y)| {
                    if s.is_exact() {
                        x == y
                    } else {
                        semiring_dnn::semiring::approx_eq(x, y)
                    }
                })
        })
}

/// Random scalar in the semiring's exact-arithmetic domain: integers for
/// max-plus and arithmetic, non-negative integers for min-max, bits for GF(2).
pub fn exact_scalar<R: Rng>(s: Semiring, rng: &mut R) -> f32 {
    match s {
        Semiring::Arithmetic => rng.gen_range(-8i32..=8) as f32,
        Semiring::MaxPlus => rng.gen_range(-50i32..=50) as f32,
        Semiring::MinMax => rng.gen_range(0i32..=100) as f32,
        Semiring::Gf2 => 1.0,
    }
}

/// Random CSR with the given density; values from `value`.
pub fn random_csr<R: Rng>(
    rng: &mut R,
    nrows: usize,
    ncols: usize,
    density: f64,
    mut value: impl FnMut(&mut R) -> f32,
) -> CsrMatrix {
    let mut row_ptr: Vec<Index> = vec![0];
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for _ in 0..nrows {
        for j in 0..ncols {
            if rng.gen_bool(density) {
                col_idx.push(j as Index);
                values.push(value(rng));
            }
        }
        row_ptr.push(col_idx.len() as Index);
    }
    CsrMatrix::from_parts(nrows, ncols, row_ptr, col_idx, values).unwrap()
}

pub fn random_dense<R: Rng>(
    rng: &mut R,
    nrows: usize,
    ncols: usize,
    mut value: impl FnMut(&mut R) -> f32,
) -> DenseMatrix {
    DenseMatrix::from_fn(nrows, ncols, |_, _| value(rng))
}

/// Inserts explicit `zero` entries at roughly `extra` of the absent positions.
pub fn inject_zeros<R: Rng>(rng: &mut R, a: &CsrMatrix, zero: f32, extra: f64) -> CsrMatrix {
    let mut row_ptr: Vec<Index> = vec![0];
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            match a.get(i, j) {
                Some(v) => {
                    col_idx.push(j as Index);
                    values.push(v);
                }
                None if rng.gen_bool(extra) => {
                    col_idx.push(j as Index);
                    values.push(zero);
                }
                None => {}
            }
        }
        row_ptr.push(col_idx.len() as Index);
    }
    CsrMatrix::from_parts(a.nrows(), a.ncols(), row_ptr, col_idx, values).unwrap()
}

/// Edges of the seven-vertex, twelve-edge directed example graph
/// (0-based `(from, to)`).
pub const EXAMPLE_GRAPH_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (0, 3),
    (1, 4),
    (1, 6),
    (2, 5),
    (3, 0),
    (3, 2),
    (4, 5),
    (5, 2),
    (6, 2),
    (6, 3),
    (6, 4),
];

pub fn example_graph() -> CsrMatrix {
    CsrMatrix::from_triples(7, 7, EXAMPLE_GRAPH_EDGES.iter().map(|&(i, j)| (i, j, 1.0))).unwrap()
}
