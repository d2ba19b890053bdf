//! Matrix Market reading and writing (`real general` only).
//!
//! CSR matrices map to the `coordinate` variant with 1-based indices, one
//! entry per line in row-major order. Dense matrices map to the `array`
//! variant, values listed column by column. Values are written with nine
//! significant digits, which round-trips every `f32` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::matrix::{CsrMatrix, DenseMatrix, Index, Matrix};

const BANNER: &str = "%%MatrixMarket";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Coordinate,
    Array,
}

/// What was written to (or found in) a Matrix Market file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub path: PathBuf,
    pub kind: MatrixKind,
    pub nrows: usize,
    pub ncols: usize,
    /// Entry count for coordinate files.
    pub nnz: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported format: {0}")]
    Unsupported(String),
    #[error("malformed size line: {0}")]
    Size(String),
    #[error("malformed entry: {0}")]
    Entry(String),
    #[error("unexpected extra token {0:?}")]
    ExtraToken(String),
    #[error("entry ({row}, {col}) is outside a {nrows}x{ncols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("duplicate entry ({row}, {col}), first seen on line {first_line}")]
    Duplicate {
        row: usize,
        col: usize,
        first_line: usize,
    },
    #[error("file ended after {got} of {expected} entries")]
    Truncated { expected: usize, got: usize },
    #[error("data after the last of {expected} entries")]
    TrailingData { expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum MatioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl MatioError {
    pub fn parse_error(&self) -> Option<&ParseError> {
        match self {
            MatioError::Parse(e) => Some(e),
            MatioError::Io { .. } => None,
        }
    }
}

fn fmt_value(v: f32) -> String {
    format!("{v:.8e}")
}

/// Writes `a` in Matrix Market form to `out`.
pub fn write_to<W: Write>(a: &Matrix, out: &mut W) -> io::Result<()> {
    match a {
        Matrix::Sparse(c) => {
            writeln!(out, "{BANNER} matrix coordinate real general")?;
            writeln!(out, "{} {} {}", c.nrows(), c.ncols(), c.nnz())?;
            for (i, j, v) in c.triples() {
                writeln!(out, "{} {} {}", i + 1, j + 1, fmt_value(v))?;
            }
        }
        Matrix::Dense(d) => {
            writeln!(out, "{BANNER} matrix array real general")?;
            writeln!(out, "{} {}", d.nrows(), d.ncols())?;
            for j in 0..d.ncols() {
                for i in 0..d.nrows() {
                    writeln!(out, "{}", fmt_value(d.get(i, j)))?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_matrix(a: &Matrix, path: impl AsRef<Path>) -> Result<MatrixFile, MatioError> {
    let path = path.as_ref();
    let io_err = |source| MatioError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    write_to(a, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    Ok(MatrixFile {
        path: path.to_path_buf(),
        kind: if a.is_sparse() {
            MatrixKind::Coordinate
        } else {
            MatrixKind::Array
        },
        nrows: a.nrows(),
        ncols: a.ncols(),
        nnz: a.as_sparse().map(CsrMatrix::nnz),
    })
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix, MatioError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| MatioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_from(BufReader::new(file)).map_err(|e| match e {
        MatioError::Io { source, .. } => MatioError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_from<R: BufRead>(reader: R) -> Result<Matrix, MatioError> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line.map_err(|source| MatioError::Io {
            path: PathBuf::new(),
            source,
        })?);
    }
    Ok(parse_lines(&lines)?)
}

/// Parses Matrix Market text held in memory.
pub fn parse_str(text: &str) -> Result<Matrix, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    parse_lines(&lines)
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn parse_lines<S: AsRef<str>>(lines: &[S]) -> Result<Matrix, ParseError> {
    let Some(header) = lines.first() else {
        return err(1, ParseErrorKind::Header("empty file".into()));
    };
    let kind = parse_header(header.as_ref())?;

    // Data lines with their 1-based numbers; comments and blanks skipped.
    let mut data = lines
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, l)| (n + 1, l.as_ref().trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let Some((size_line, size)) = data.next() else {
        return err(
            lines.len() + 1,
            ParseErrorKind::Size("missing size line".into()),
        );
    };
    let dims = parse_size(size_line, size, kind)?;
    match kind {
        MatrixKind::Coordinate => parse_coordinate(dims, data, lines.len()),
        MatrixKind::Array => parse_array(dims, data, lines.len()),
    }
}

fn parse_header(line: &str) -> Result<MatrixKind, ParseError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return err(1, ParseErrorKind::Header(format!("expected {BANNER} banner")));
    }
    if tokens.len() != 5 {
        return err(
            1,
            ParseErrorKind::Header(format!("expected 5 fields, found {}", tokens.len())),
        );
    }
    if tokens[1] != "matrix" {
        return err(1, ParseErrorKind::Unsupported(format!("object {:?}", tokens[1])));
    }
    let kind = match tokens[2].as_str() {
        "coordinate" => MatrixKind::Coordinate,
        "array" => MatrixKind::Array,
        other => return err(1, ParseErrorKind::Unsupported(format!("format {other:?}"))),
    };
    if tokens[3] != "real" {
        return err(1, ParseErrorKind::Unsupported(format!("field {:?}", tokens[3])));
    }
    if tokens[4] != "general" {
        return err(1, ParseErrorKind::Unsupported(format!("symmetry {:?}", tokens[4])));
    }
    Ok(kind)
}

fn parse_count(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError {
            line,
            kind: ParseErrorKind::Size(format!("{what} {tok:?} is not a count")),
        })
}

fn parse_size(line: usize, text: &str, kind: MatrixKind) -> Result<[usize; 3], ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let want = if kind == MatrixKind::Coordinate { 3 } else { 2 };
    if tokens.len() < want {
        return err(
            line,
            ParseErrorKind::Size(format!("expected {want} counts, found {}", tokens.len())),
        );
    }
    if let Some(extra) = tokens.get(want) {
        return err(line, ParseErrorKind::ExtraToken(extra.to_string()));
    }
    let nrows = parse_count(line, tokens[0], "row count")?;
    let ncols = parse_count(line, tokens[1], "column count")?;
    let nnz = if want == 3 {
        parse_count(line, tokens[2], "entry count")?
    } else {
        nrows * ncols
    };
    if nrows > Index::MAX as usize || ncols > Index::MAX as usize {
        return err(line, ParseErrorKind::Size("dimensions exceed index width".into()));
    }
    if want == 3 && nnz > nrows.saturating_mul(ncols) {
        return err(
            line,
            ParseErrorKind::Size(format!("{nnz} entries cannot fit in {nrows}x{ncols}")),
        );
    }
    Ok([nrows, ncols, nnz])
}

fn parse_value(line: usize, tok: &str) -> Result<f32, ParseError> {
    match tok.parse::<f32>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => err(line, ParseErrorKind::Entry(format!("{tok:?} is not a real value"))),
    }
}

fn parse_index(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::Entry(format!("{tok:?} is not an index")),
    })
}

fn parse_coordinate<'a>(
    [nrows, ncols, nnz]: [usize; 3],
    mut data: impl Iterator<Item = (usize, &'a str)>,
    total_lines: usize,
) -> Result<Matrix, ParseError> {
    // (row, col, value, line)
    let mut entries: Vec<(usize, usize, f32, usize)> = Vec::with_capacity(nnz);
    for got in 0..nnz {
        let Some((line, text)) = data.next() else {
            return err(
                total_lines + 1,
                ParseErrorKind::Truncated { expected: nnz, got },
            );
        };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 {
            return err(
                line,
                ParseErrorKind::Entry(format!("expected row, column and value, found {:?}", text)),
            );
        }
        if let Some(extra) = tokens.get(3) {
            return err(line, ParseErrorKind::ExtraToken(extra.to_string()));
        }
        let row = parse_index(line, tokens[0])?;
        let col = parse_index(line, tokens[1])?;
        if row == 0 || col == 0 || row > nrows || col > ncols {
            return err(
                line,
                ParseErrorKind::OutOfBounds {
                    row,
                    col,
                    nrows,
                    ncols,
                },
            );
        }
        let value = parse_value(line, tokens[2])?;
        entries.push((row - 1, col - 1, value, line));
    }
    if let Some((line, _)) = data.next() {
        return err(line, ParseErrorKind::TrailingData { expected: nnz });
    }

    entries.sort_by_key(|&(r, c, _, line)| (r, c, line));
    if let Some(w) = entries
        .windows(2)
        .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
    {
        return err(
            w[1].3,
            ParseErrorKind::Duplicate {
                row: w[1].0 + 1,
                col: w[1].1 + 1,
                first_line: w[0].3,
            },
        );
    }

    let mut row_ptr = vec![0 as Index; nrows + 1];
    let mut col_idx = Vec::with_capacity(entries.len());
    let mut values = Vec::with_capacity(entries.len());
    for &(r, c, v, _) in &entries {
        row_ptr[r + 1] += 1;
        col_idx.push(c as Index);
        values.push(v);
    }
    for i in 0..nrows {
        row_ptr[i + 1] += row_ptr[i];
    }
    let csr = CsrMatrix::from_parts(nrows, ncols, row_ptr, col_idx, values)
        .expect("entries are sorted, unique and in range");
    Ok(Matrix::Sparse(csr))
}

fn parse_array<'a>(
    [nrows, ncols, len]: [usize; 3],
    mut data: impl Iterator<Item = (usize, &'a str)>,
    total_lines: usize,
) -> Result<Matrix, ParseError> {
    let mut out = DenseMatrix::filled(nrows, ncols, 0.0);
    for got in 0..len {
        let Some((line, text)) = data.next() else {
            return err(
                total_lines + 1,
                ParseErrorKind::Truncated { expected: len, got },
            );
        };
        let mut tokens = text.split_whitespace();
        let value = parse_value(line, tokens.next().unwrap_or_default())?;
        if let Some(extra) = tokens.next() {
            return err(line, ParseErrorKind::ExtraToken(extra.to_string()));
        }
        out.set(got % nrows, got / nrows, value);
    }
    if let Some((line, _)) = data.next() {
        return err(line, ParseErrorKind::TrailingData { expected: len });
    }
    Ok(Matrix::Dense(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(a: &Matrix) -> String {
        let mut buf = Vec::new();
        write_to(a, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_coordinate_file() {
        let text = render(&CsrMatrix::empty(3, 3).into());
        assert_eq!(text, "%%MatrixMarket matrix coordinate real general\n3 3 0\n");
        assert_eq!(parse_str(&text).unwrap(), Matrix::from(CsrMatrix::empty(3, 3)));
    }

    #[test]
    fn coordinate_layout() {
        let a = CsrMatrix::from_triples(2, 3, [(1, 0, -2.5), (0, 2, 1.0)]).unwrap();
        let text = render(&a.clone().into());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "2 3 2");
        assert_eq!(lines[2], "1 3 1.00000000e0");
        assert_eq!(lines[3], "2 1 -2.50000000e0");
        assert_eq!(parse_str(&text).unwrap(), Matrix::from(a));
    }

    #[test]
    fn array_is_column_major() {
        let d = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let text = render(&d.clone().into());
        let values: Vec<f32> = text.lines().skip(2).map(|l| l.parse().unwrap()).collect();
        assert_eq!(values, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(parse_str(&text).unwrap(), Matrix::from(d));
    }

    #[test]
    fn comments_and_unsorted_entries_accepted() {
        let text = "%%MatrixMarket matrix coordinate real general\n% note\n\n2 2 2\n2 2 4\n1 1 3\n";
        let a = parse_str(text).unwrap();
        let a = a.as_sparse().unwrap();
        assert_eq!(a.get(0, 0), Some(3.0));
        assert_eq!(a.get(1, 1), Some(4.0));
    }

    #[test]
    fn out_of_bounds_names_line() {
        let text = "%%MatrixMarket matrix coordinate real general\n7 7 2\n1 2 1.0\n8 1 1.0\n";
        let e = parse_str(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::OutOfBounds { row: 8, col: 1, .. }));
        assert!(e.to_string().starts_with("line 4:"));
    }

    #[test]
    fn distinct_errors() {
        let h = "%%MatrixMarket matrix coordinate real general\n";
        let cases: Vec<(String, usize, fn(&ParseErrorKind) -> bool)> = vec![
            ("%%MatrixMarket matrix\n1 1 0\n".into(), 1, |k| matches!(k, ParseErrorKind::Header(_))),
            ("%%MatrixMarket matrix coordinate pattern general\n1 1 0\n".into(), 1, |k| {
                matches!(k, ParseErrorKind::Unsupported(_))
            }),
            (format!("{h}2 2\n"), 2, |k| matches!(k, ParseErrorKind::Size(_))),
            (format!("{h}2 2 2\n1 1 1.0\n"), 4, |k| matches!(k, ParseErrorKind::Truncated { expected: 2, got: 1 })),
            (format!("{h}2 2 1\n1 1 1.0\n2 2 1.0\n"), 4, |k| matches!(k, ParseErrorKind::TrailingData { .. })),
            (format!("{h}2 2 2\n1 1 1.0\n1 1 2.0\n"), 4, |k| matches!(k, ParseErrorKind::Duplicate { first_line: 3, .. })),
            (format!("{h}2 2 1\n1 1 1.0 9\n"), 3, |k| matches!(k, ParseErrorKind::ExtraToken(_))),
            (format!("{h}2 2 1\n1 x 1.0\n"), 3, |k| matches!(k, ParseErrorKind::Entry(_))),
            (format!("{h}2 2 1\n0 1 1.0\n"), 3, |k| matches!(k, ParseErrorKind::OutOfBounds { .. })),
            (format!("{h}2 2 1\n1 1 nan\n"), 3, |k| matches!(k, ParseErrorKind::Entry(_))),
            (String::new(), 1, |k| matches!(k, ParseErrorKind::Header(_))),
        ];
        for (text, line, check) in cases {
            let e = parse_str(&text).unwrap_err();
            assert_eq!(e.line, line, "{text:?} -> {e}");
            assert!(check(&e.kind), "{text:?} -> {e}");
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        let a = Matrix::from(CsrMatrix::from_triples(3, 2, [(2, 1, 0.1), (0, 0, -7.25e-9)]).unwrap());
        let info = write_matrix(&a, &path).unwrap();
        assert_eq!(info.kind, MatrixKind::Coordinate);
        assert_eq!(info.nnz, Some(2));
        assert_eq!(read_matrix(&path).unwrap(), a);
        assert!(matches!(
            read_matrix(dir.path().join("missing.mtx")),
            Err(MatioError::Io { .. })
        ));
    }
}
