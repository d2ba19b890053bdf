use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BenchRecord, Implementation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no records")]
    Empty,
    #[error("m = {m}: missing {implementation} run at inverse sparsity {inverse_sparsity}")]
    MissingPoint {
        m: usize,
        implementation: Implementation,
        inverse_sparsity: f64,
    },
    #[error("reference size m = {0} is not among the analyzed sizes")]
    MissingReference(usize),
    #[error("m = {m}: {name} is {value}, expected a positive value")]
    NonPositive {
        m: usize,
        name: &'static str,
        value: f64,
    },
}

/// Shape parameters of the time-versus-sparsity curves for one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub m: usize,
    /// Sparse time over dense time, both at inverse sparsity 1.
    pub ratio_dense: f64,
    /// `(T(IS=1) - T(IS=4)) / (0.75 m²)`: sparse seconds per nonzero.
    pub slope: f64,
    /// Sparse time at the largest swept inverse sparsity, divided by `m`.
    pub saturation: f64,
    /// Dense time at inverse sparsity 1 divided by `m²`.
    pub blas_per_element: f64,
    pub ratio_dense_normalized: f64,
    pub slope_normalized: f64,
    pub saturation_normalized: f64,
    pub blas_per_element_normalized: f64,
}

/// Derives [`CurveParams`] for every size in `records`, normalized to the
/// values at `reference_m`.
///
/// Only the smallest worker count present for each size is used.
pub fn analyze(records: &[BenchRecord], reference_m: usize) -> Result<Vec<CurveParams>, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut by_m: BTreeMap<usize, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_m.entry(r.m).or_default().push(r);
    }

    let mut params = Vec::with_capacity(by_m.len());
    for (&m, rows) in &by_m {
        let workers = rows.iter().map(|r| r.workers).min().expect("non-empty");
        let rows: Vec<&BenchRecord> = rows.iter().copied().filter(|r| r.workers == workers).collect();
        let time = |implementation: Implementation, is: f64| {
            rows.iter()
                .find(|r| r.implementation == implementation && r.inverse_sparsity == is)
                .map(|r| r.mean_layer_seconds)
                .ok_or(AnalysisError::MissingPoint {
                    m,
                    implementation,
                    inverse_sparsity: is,
                })
        };
        let max_is = rows
            .iter()
            .filter(|r| r.implementation == Implementation::Sparse)
            .map(|r| r.inverse_sparsity)
            .fold(f64::NAN, f64::max);
        if max_is.is_nan() {
            return Err(AnalysisError::MissingPoint {
                m,
                implementation: Implementation::Sparse,
                inverse_sparsity: 1.0,
            });
        }

        let sparse_full = time(Implementation::Sparse, 1.0)?;
        let sparse_quarter = time(Implementation::Sparse, 4.0)?;
        let sparse_empty = time(Implementation::Sparse, max_is)?;
        let dense_full = time(Implementation::Dense, 1.0)?;
        let m2 = (m * m) as f64;

        let values = [
            ("ratio_dense", sparse_full / dense_full),
            ("slope", (sparse_full - sparse_quarter) / (0.75 * m2)),
            ("saturation", sparse_empty / m as f64),
            ("blas_per_element", dense_full / m2),
        ];
        for (name, value) in values {
            if !(value > 0.0 && value.is_finite()) {
                return Err(AnalysisError::NonPositive { m, name, value });
            }
        }
        params.push(CurveParams {
            m,
            ratio_dense: values[0].1,
            slope: values[1].1,
            saturation: values[2].1,
            blas_per_element: values[3].1,
            ratio_dense_normalized: 1.0,
            slope_normalized: 1.0,
            saturation_normalized: 1.0,
            blas_per_element_normalized: 1.0,
        });
    }

    let reference = params
        .iter()
        .find(|p| p.m == reference_m)
        .cloned()
        .ok_or(AnalysisError::MissingReference(reference_m))?;
    for p in &mut params {
        p.ratio_dense_normalized = p.ratio_dense / reference.ratio_dense;
        p.slope_normalized = p.slope / reference.slope;
        p.saturation_normalized = p.saturation / reference.saturation;
        p.blas_per_element_normalized = p.blas_per_element / reference.blas_per_element;
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(m: usize, is: f64, implementation: Implementation, workers: usize, t: f64) -> BenchRecord {
        BenchRecord {
            m,
            inverse_sparsity: is,
            implementation,
            workers,
            mean_layer_seconds: t,
            stddev_seconds: 0.0,
            nnz: 0,
            matrix_bytes: 0,
        }
    }

    /// Synthetic timings from a cost model `T = a·nnz + c·m` (sparse) and
    /// `T = d·m²` (dense), so every parameter has a closed form.
    fn model_records(m: usize, a: f64, c: f64, d: f64) -> Vec<BenchRecord> {
        let m2 = (m * m) as f64;
        let mut out = Vec::new();
        for is in [1.0, 4.0, 16.0, 1024.0] {
            out.push(rec(m, is, Implementation::Sparse, 1, a * m2 / is + c * m as f64));
            out.push(rec(m, is, Implementation::Dense, 1, d * m2));
        }
        out
    }

    #[test]
    fn closed_form_parameters() {
        let (a, c, d) = (2e-9, 3e-7, 1e-9);
        let mut records = model_records(64, a, c, d);
        records.extend(model_records(256, a, c, d));
        let params = analyze(&records, 256).unwrap();
        assert_eq!(params.len(), 2);
        for p in &params {
            let m = p.m as f64;
            let m2 = m * m;
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1e-30);
            assert!(close(p.slope, a));
            assert!(close(p.saturation, (a * m2 / 1024.0 + c * m) / m));
            assert!(close(p.blas_per_element, d));
            assert!(close(p.ratio_dense, (a * m2 + c * m) / (d * m2)));
            assert!(close(p.slope_normalized, 1.0));
            assert!(close(p.blas_per_element_normalized, 1.0));
        }
        assert_eq!(params[1].saturation_normalized, 1.0);
    }

    #[test]
    fn smallest_worker_count_is_used() {
        let mut records = model_records(64, 1e-9, 1e-7, 1e-9);
        records.extend(
            model_records(64, 1e-10, 1e-8, 1e-10)
                .into_iter()
                .map(|mut r| {
                    r.workers = 4;
                    r
                }),
        );
        let p = &analyze(&records, 64).unwrap()[0];
        assert!((p.slope - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn gaps_are_named() {
        let mut records = model_records(64, 1e-9, 1e-7, 1e-9);
        records.retain(|r| !(r.implementation == Implementation::Sparse && r.inverse_sparsity == 4.0));
        let err = analyze(&records, 64).unwrap_err();
        assert_eq!(
            err,
            AnalysisError::MissingPoint {
                m: 64,
                implementation: Implementation::Sparse,
                inverse_sparsity: 4.0
            }
        );
        assert!(err.to_string().contains("inverse sparsity 4"));

        let records = model_records(64, 1e-9, 1e-7, 1e-9);
        assert_eq!(analyze(&records, 128), Err(AnalysisError::MissingReference(128)));
        assert_eq!(analyze(&[], 64), Err(AnalysisError::Empty));

        let mut records = model_records(64, 1e-9, 1e-7, 1e-9);
        records.retain(|r| !(r.implementation == Implementation::Dense && r.inverse_sparsity == 1.0));
        assert!(matches!(
            analyze(&records, 64),
            Err(AnalysisError::MissingPoint { implementation: Implementation::Dense, .. })
        ));
    }

    #[test]
    fn non_positive_slope_is_rejected() {
        let records = vec![
            rec(8, 1.0, Implementation::Sparse, 1, 1.0),
            rec(8, 4.0, Implementation::Sparse, 1, 2.0),
            rec(8, 1.0, Implementation::Dense, 1, 1.0),
        ];
        assert!(matches!(
            analyze(&records, 8),
            Err(AnalysisError::NonPositive { name: "slope", .. })
        ));
    }
}
