use std::mem::size_of;

use super::{Index, MatrixError};

/// Compressed-sparse-row matrix of `f32`.
///
/// Column indices are strictly increasing within each row. Values are stored
/// as given; [`CsrMatrix::from_triples`] drops entries equal to `0.0` but
/// [`CsrMatrix::from_parts`] keeps every value, including explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<Index>,
    col_idx: Vec<Index>,
    values: Vec<f32>,
}

impl CsrMatrix {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// `n × n` matrix with `value` on the diagonal.
    pub fn diagonal(n: usize, value: f32) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n as Index).collect(),
            col_idx: (0..n as Index).collect(),
            values: vec![value; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(n, 1.0)
    }

    /// Builds a matrix from `(row, col, value)` coordinates in any order.
    /// Entries whose value is exactly `0.0` are dropped.
    pub fn from_triples<I>(nrows: usize, ncols: usize, triples: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, f32)>,
    {
        check_index_width(nrows, ncols)?;
        let mut entries: Vec<(usize, usize, f32)> = Vec::new();
        for (row, col, value) in triples {
            if row >= nrows || col >= ncols {
                return Err(MatrixError::IndexOutOfRange {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
            entries.push((row, col, value));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(MatrixError::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }

        let mut row_ptr = vec![0 as Index; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for &(row, col, value) in &entries {
            if value == 0.0 {
                continue;
            }
            row_ptr[row + 1] += 1;
            col_idx.push(col as Index);
            values.push(value);
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        col_idx.shrink_to_fit();
        values.shrink_to_fit();
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix from raw CSR arrays after validating every
    /// structural invariant. Values are kept verbatim.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<Index>,
        col_idx: Vec<Index>,
        values: Vec<f32>,
    ) -> Result<Self, MatrixError> {
        check_index_width(nrows, ncols)?;
        let bad = |msg: String| Err(MatrixError::InvalidStructure(msg));
        if row_ptr.len() != nrows + 1 {
            return bad(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            ));
        }
        if row_ptr[0] != 0 {
            return bad(format!("row_ptr[0] = {}, expected 0", row_ptr[0]));
        }
        if col_idx.len() != values.len() {
            return bad(format!(
                "col_idx has {} entries but values has {}",
                col_idx.len(),
                values.len()
            ));
        }
        if row_ptr[nrows] as usize != col_idx.len() {
            return bad(format!(
                "row_ptr[{nrows}] = {} but nnz = {}",
                row_ptr[nrows],
                col_idx.len()
            ));
        }
        for i in 0..nrows {
            let (start, end) = (row_ptr[i] as usize, row_ptr[i + 1] as usize);
            if start > end {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let cols = &col_idx[start..end];
            if let Some(&c) = cols.iter().find(|&&c| c as usize >= ncols) {
                return Err(MatrixError::IndexOutOfRange {
                    row: i,
                    col: c as usize,
                    nrows,
                    ncols,
                });
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("columns of row {i} are not strictly increasing"));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix the caller has already built correctly.
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<Index>,
        col_idx: Vec<Index>,
        values: Vec<f32>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[Index] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[Index] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[Index], &[f32]) {
        let (start, end) = (self.row_ptr[i] as usize, self.row_ptr[i + 1] as usize);
        (&self.col_idx[start..end], &self.values[start..end])
    }

    /// Stored value at `(i, j)`, if any.
    pub fn get(&self, i: usize, j: usize) -> Option<f32> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&(j as Index)).ok().map(|p| vals[p])
    }

    /// Iterates stored entries in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f32)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c as usize, v))
        })
    }

    /// Bytes held by the three CSR arrays.
    pub fn storage_bytes(&self) -> usize {
        Self::bytes_for(self.nrows, self.nnz())
    }

    /// `(nrows + 1)·iw + nnz·(iw + 4)` with `iw` the index width in bytes.
    pub fn bytes_for(nrows: usize, nnz: usize) -> usize {
        (nrows + 1) * size_of::<Index>() + nnz * (size_of::<Index>() + size_of::<f32>())
    }

    /// Bytes actually reserved by the backing vectors.
    pub fn allocated_bytes(&self) -> usize {
        self.row_ptr.capacity() * size_of::<Index>()
            + self.col_idx.capacity() * size_of::<Index>()
            + self.values.capacity() * size_of::<f32>()
    }
}

fn check_index_width(nrows: usize, ncols: usize) -> Result<(), MatrixError> {
    if nrows > Index::MAX as usize || ncols > Index::MAX as usize {
        return Err(MatrixError::InvalidStructure(format!(
            "{nrows}x{ncols} exceeds the {}-bit index width",
            Index::BITS
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pattern_from_triples() {
        let a = CsrMatrix::from_triples(2, 2, [(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a, CsrMatrix::identity(2));
    }

    #[test]
    fn empty_from_triples() {
        let a = CsrMatrix::from_triples(2, 2, []).unwrap();
        assert_eq!(a.row_ptr(), &[0, 0, 0]);
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn triples_are_sorted_and_zeros_dropped() {
        let a = CsrMatrix::from_triples(3, 4, [(2, 1, 5.0), (0, 3, 1.0), (0, 0, 2.0), (1, 2, 0.0)])
            .unwrap();
        assert_eq!(a.row_ptr(), &[0, 2, 2, 3]);
        assert_eq!(a.col_idx(), &[0, 3, 1]);
        assert_eq!(a.values(), &[2.0, 1.0, 5.0]);
        assert_eq!(a.get(2, 1), Some(5.0));
        assert_eq!(a.get(1, 2), None);
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(matches!(
            CsrMatrix::from_triples(2, 2, [(2, 0, 1.0)]),
            Err(MatrixError::IndexOutOfRange { row: 2, .. })
        ));
        assert!(matches!(
            CsrMatrix::from_triples(2, 2, [(0, 5, 1.0)]),
            Err(MatrixError::IndexOutOfRange { col: 5, .. })
        ));
        assert!(matches!(
            CsrMatrix::from_triples(2, 2, [(1, 1, 1.0), (0, 0, 2.0), (1, 1, 3.0)]),
            Err(MatrixError::DuplicateEntry { row: 1, col: 1 })
        ));
    }

    #[test]
    fn from_parts_validates() {
        assert!(CsrMatrix::from_parts(2, 2, vec![0, 1, 2], vec![1, 0], vec![1.0, 2.0]).is_ok());
        // explicit zero survives
        let z = CsrMatrix::from_parts(1, 2, vec![0, 1], vec![1], vec![0.0]).unwrap();
        assert_eq!(z.nnz(), 1);
        for (rp, ci, v) in [
            (vec![0, 1], vec![0], vec![1.0]),
            (vec![1, 1, 1], vec![0], vec![1.0]),
            (vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]),
            (vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]),
            (vec![0, 1, 2], vec![0, 2], vec![1.0, 1.0]),
            (vec![0, 1, 2], vec![0, 1], vec![1.0]),
        ] {
            assert!(CsrMatrix::from_parts(2, 2, rp, ci, v).is_err());
        }
    }

    #[test]
    fn byte_formula() {
        let a = CsrMatrix::empty(10, 7);
        assert_eq!(a.storage_bytes(), 11 * 4);
        let b = CsrMatrix::identity(5);
        assert_eq!(b.storage_bytes(), 6 * 4 + 5 * 8);
    }
}
