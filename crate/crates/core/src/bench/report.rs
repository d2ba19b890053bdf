//! CSV output for sweep records and curve parameters.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::{sort_records, BenchRecord, CurveParams, SkippedRun};

/// Column order of the sweep CSV.
pub const BENCH_FIELDS: [&str; 8] = [
    "m",
    "inverse_sparsity",
    "implementation",
    "workers",
    "mean_layer_seconds",
    "stddev_seconds",
    "nnz",
    "matrix_bytes",
];

/// Column order of the analysis CSV.
pub const PARAM_FIELDS: [&str; 9] = [
    "m",
    "ratio_dense",
    "slope",
    "saturation",
    "blas_per_element",
    "ratio_dense_normalized",
    "slope_normalized",
    "saturation_normalized",
    "blas_per_element_normalized",
];

const SKIPPED_FIELDS: [&str; 5] = ["m", "inverse_sparsity", "implementation", "workers", "reason"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected CSV header {found:?}, expected {expected:?}")]
    Header {
        found: Vec<String>,
        expected: Vec<String>,
    },
}

// The header is written by hand so an empty list still yields a header row.
fn write_rows<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<File, CsvError> {
    File::create(path).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes records sorted by `m`, inverse sparsity, implementation, workers.
pub fn write_records_to<W: Write>(records: &[BenchRecord], out: W) -> Result<(), CsvError> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    write_rows(out, &BENCH_FIELDS, &sorted)
}

pub fn write_records_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<(), CsvError> {
    write_records_to(records, create(path.as_ref())?)
}

pub fn write_params_to<W: Write>(params: &[CurveParams], out: W) -> Result<(), CsvError> {
    let mut sorted = params.to_vec();
    sorted.sort_by_key(|p| p.m);
    write_rows(out, &PARAM_FIELDS, &sorted)
}

pub fn write_params_csv(params: &[CurveParams], path: impl AsRef<Path>) -> Result<(), CsvError> {
    write_params_to(params, create(path.as_ref())?)
}

pub fn write_skipped_to<W: Write>(skipped: &[SkippedRun], out: W) -> Result<(), CsvError> {
    write_rows(out, &SKIPPED_FIELDS, skipped)
}

pub fn read_records_from<R: Read>(input: R) -> Result<Vec<BenchRecord>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != BENCH_FIELDS {
        return Err(CsvError::Header {
            found,
            expected: BENCH_FIELDS.iter().map(|s| s.to_string()).collect(),
        });
    }
    Ok(r.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?)
}

pub fn read_records_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>, CsvError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records_from(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Implementation;

    fn sample() -> Vec<BenchRecord> {
        vec![
            BenchRecord {
                m: 2048,
                inverse_sparsity: 4.0,
                implementation: Implementation::Dense,
                workers: 1,
                mean_layer_seconds: 0.123456789012,
                stddev_seconds: 1.5e-5,
                nnz: 1048000,
                matrix_bytes: 16777216,
            },
            BenchRecord {
                m: 512,
                inverse_sparsity: 16384.0,
                implementation: Implementation::Sparse,
                workers: 2,
                mean_layer_seconds: 3.3e-6,
                stddev_seconds: 0.0,
                nnz: 17,
                matrix_bytes: 2188,
            },
        ]
    }

    #[test]
    fn empty_list_writes_header_only() {
        let mut buf = Vec::new();
        write_records_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", BENCH_FIELDS.join(",")));
        let mut buf = Vec::new();
        write_params_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn round_trip_and_column_counts() {
        let mut buf = Vec::new();
        write_records_to(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), BENCH_FIELDS.len());
        }
        let back = read_records_from(buf.as_slice()).unwrap();
        let mut want = sample();
        sort_records(&mut want);
        assert_eq!(back, want);
        assert_eq!(back[0].m, 512);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "m,workers\n1,2\n";
        assert!(matches!(read_records_from(text.as_bytes()), Err(CsvError::Header { .. })));
    }

    #[test]
    fn unwritable_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no").join("such").join("dir.csv");
        assert!(matches!(write_records_csv(&sample(), path), Err(CsvError::Io { .. })));
    }
}
