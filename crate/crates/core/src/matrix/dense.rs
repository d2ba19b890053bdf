use std::mem::size_of;

use super::MatrixError;

/// Row-major dense matrix of `f32`. Every entry is stored explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f32>,
}

impl DenseMatrix {
    pub fn new(nrows: usize, ncols: usize, data: Vec<f32>) -> Result<Self, MatrixError> {
        let expected = nrows.checked_mul(ncols).ok_or(MatrixError::Allocation {
            bytes: usize::MAX,
        })?;
        if data.len() != expected {
            return Err(MatrixError::DataLength {
                expected,
                got: data.len(),
            });
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn filled(nrows: usize, ncols: usize, value: f32) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![value; nrows * ncols],
        }
    }

    /// Like [`DenseMatrix::filled`] but reports allocation failure instead of
    /// aborting.
    pub fn try_filled(nrows: usize, ncols: usize, value: f32) -> Result<Self, MatrixError> {
        let len = nrows.checked_mul(ncols);
        let bytes = len.and_then(|l| l.checked_mul(size_of::<f32>()));
        let (Some(len), Some(bytes)) = (len, bytes) else {
            return Err(MatrixError::Allocation { bytes: usize::MAX });
        };
        let mut data = Vec::new();
        data.try_reserve_exact(len)
            .map_err(|_| MatrixError::Allocation { bytes })?;
        data.resize(len, value);
        Ok(Self { nrows, ncols, data })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::filled(nrows, ncols, 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    /// Builds from equal-length rows.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(MatrixError::DataLength {
                    expected: ncols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            nrows: rows.len(),
            ncols,
            data,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f32) {
        self.data[i * self.ncols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// Entries different from `0.0`.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn storage_bytes(&self) -> usize {
        Self::bytes_for(self.nrows, self.ncols)
    }

    pub fn bytes_for(nrows: usize, ncols: usize) -> usize {
        nrows * ncols * size_of::<f32>()
    }

    /// Entry-wise bit equality (distinguishes `0.0` from `-0.0`).
    pub fn bitwise_eq(&self, other: &DenseMatrix) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_checked() {
        assert!(DenseMatrix::new(2, 3, vec![0.0; 6]).is_ok());
        assert!(matches!(
            DenseMatrix::new(2, 3, vec![0.0; 5]),
            Err(MatrixError::DataLength { expected: 6, got: 5 })
        ));
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn four_gib_for_32768_square() {
        assert_eq!(DenseMatrix::bytes_for(32768, 32768), 4 << 30);
    }

    #[test]
    fn row_major_layout() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(a.data(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(a.get(1, 0), 4.0);
        assert_eq!(a.row(1), &[4.0, 5.0, 6.0]);
        assert_eq!(a.count_nonzero(), 6);
    }

    #[test]
    fn try_filled_reports_overflow() {
        assert!(matches!(
            DenseMatrix::try_filled(usize::MAX, 2, 0.0),
            Err(MatrixError::Allocation { .. })
        ));
        assert!(matches!(
            DenseMatrix::try_filled(1 << 40, 1 << 20, 0.0),
            Err(MatrixError::Allocation { .. })
        ));
    }
}
