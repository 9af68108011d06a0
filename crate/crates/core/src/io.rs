//! File formats: Matrix Market and dense text for systems, JSON for reports.
//!
//! Supported inputs:
//! - Matrix Market `matrix coordinate|array real|integer|complex
//!   general|symmetric|skew-symmetric|hermitian`. Symmetric variants are
//!   expanded to full storage on read.
//! - Dense text: first line `m n`, then `m` lines of `n` real numbers.
//! - Right-hand sides: one value per line (`re im` for complex), or a
//!   Matrix Market `m x 1` file. Without a right-hand side file the last
//!   matrix column is taken as `b`.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::linop::{DenseMatrix, Rhs};
use crate::scalar::Scalar;
use crate::solver::{feas_tol, SolveReport, SolverConfig, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Header(String),
    Dimension(String),
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    NonNumeric(String),
    DuplicateEntry {
        row: usize,
        col: usize,
    },
}

/// A parse failure, tagged with the one-based line it was detected on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::Header(msg) => write!(f, "bad header: {msg}"),
            ParseErrorKind::Dimension(msg) => write!(f, "dimension error: {msg}"),
            ParseErrorKind::IndexOutOfRange {
                row,
                col,
                rows,
                cols,
            } => write!(f, "entry ({row}, {col}) outside a {rows}x{cols} matrix"),
            ParseErrorKind::NonNumeric(tok) => write!(f, "not a finite number: {tok:?}"),
            ParseErrorKind::DuplicateEntry { row, col } => {
                write!(f, "duplicate entry ({row}, {col})")
            }
        }
    }
}

fn fail<T>(line: usize, kind: ParseErrorKind) -> std::result::Result<T, ParseError> {
    Err(ParseError { line, kind })
}

/// A parsed matrix in whichever field the file declared.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(DenseMatrix<f64>),
    Complex(DenseMatrix<Complex64>),
}

impl MatrixData {
    pub fn rows(&self) -> usize {
        match self {
            MatrixData::Real(a) => a.rows(),
            MatrixData::Complex(a) => a.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixData::Real(a) => a.cols(),
            MatrixData::Complex(a) => a.cols(),
        }
    }
}

/// A linear system; complex if either the matrix or the right-hand side is.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Real(DenseMatrix<f64>, Rhs<f64>),
    Complex(DenseMatrix<Complex64>, Rhs<Complex64>),
}

impl System {
    pub fn rows(&self) -> usize {
        match self {
            System::Real(a, _) => a.rows(),
            System::Complex(a, _) => a.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            System::Real(a, _) => a.cols(),
            System::Complex(a, _) => a.cols(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, System::Complex(..))
    }
}

fn promote(a: &DenseMatrix<f64>) -> DenseMatrix<Complex64> {
    let data = a
        .as_slice()
        .iter()
        .map(|&x| Complex64::from_real(x))
        .collect();
    DenseMatrix::from_row_major(a.rows(), a.cols(), data).expect("same shape")
}

// ---------------------------------------------------------------------------
// Matrix Market

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

#[derive(Debug, Clone, Copy)]
struct Header {
    layout: Layout,
    complex: bool,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> std::result::Result<Header, ParseError> {
    let words: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return fail(
            1,
            ParseErrorKind::Header("expected %%MatrixMarket banner".into()),
        );
    }
    if words.len() != 5 {
        return fail(
            1,
            ParseErrorKind::Header(format!(
                "expected `%%MatrixMarket matrix <format> <field> <symmetry>`, got {} words",
                words.len()
            )),
        );
    }
    if words[1] != "matrix" {
        return fail(
            1,
            ParseErrorKind::Header(format!("unsupported object {:?}", words[1])),
        );
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => {
            return fail(
                1,
                ParseErrorKind::Header(format!("unsupported format {other:?}")),
            )
        }
    };
    let complex = match words[3].as_str() {
        "real" | "integer" | "double" => false,
        "complex" => true,
        other => {
            return fail(
                1,
                ParseErrorKind::Header(format!("unsupported field {other:?}")),
            )
        }
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" if complex => Symmetry::Hermitian,
        other => {
            return fail(
                1,
                ParseErrorKind::Header(format!("unsupported symmetry {other:?}")),
            )
        }
    };
    if symmetry == Symmetry::Skew && false {
        unreachable!()
    }
    Ok(Header {
        layout,
        complex,
        symmetry,
    })
}

fn number(tok: &str, line: usize) -> std::result::Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => fail(line, ParseErrorKind::NonNumeric(tok.to_string())),
    }
}

fn index(tok: &str, line: usize) -> std::result::Result<usize, ParseError> {
    tok.parse::<usize>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::NonNumeric(tok.to_string()),
    })
}

/// Non-blank, non-comment lines with their one-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn entry_value(
    toks: &[&str],
    complex: bool,
    line: usize,
) -> std::result::Result<Complex64, ParseError> {
    let want = if complex { 2 } else { 1 };
    if toks.len() != want {
        return fail(
            line,
            ParseErrorKind::Dimension(format!(
                "expected {want} value token(s), got {}",
                toks.len()
            )),
        );
    }
    let re = number(toks[0], line)?;
    let im = if complex { number(toks[1], line)? } else { 0.0 };
    Ok(Complex64::new(re, im))
}

/// Parses Matrix Market text into dense storage.
pub fn parse_matrix_market(text: &str) -> std::result::Result<MatrixData, ParseError> {
    let first = text.lines().next().unwrap_or("");
    let header = parse_header(first)?;
    let mut lines = content_lines(text).filter(|(n, _)| *n > 1);

    let Some((size_line, size)) = lines.next() else {
        return fail(
            text.lines().count().max(1),
            ParseErrorKind::Dimension("missing size line".into()),
        );
    };
    let size_toks: Vec<&str> = size.split_whitespace().collect();
    let want = match header.layout {
        Layout::Coordinate => 3,
        Layout::Array => 2,
    };
    if size_toks.len() != want {
        return fail(
            size_line,
            ParseErrorKind::Dimension(format!(
                "size line needs {want} integers, got {}",
                size_toks.len()
            )),
        );
    }
    let rows = index(size_toks[0], size_line)?;
    let cols = index(size_toks[1], size_line)?;
    if rows == 0 || cols == 0 {
        return fail(
            size_line,
            ParseErrorKind::Dimension(format!("empty {rows}x{cols} matrix")),
        );
    }
    if header.symmetry != Symmetry::General && rows != cols {
        return fail(
            size_line,
            ParseErrorKind::Dimension(format!("{rows}x{cols} matrix cannot be symmetric")),
        );
    }

    let mut dense = vec![Complex64::new(0.0, 0.0); rows * cols];
    let mut place = |i: usize, j: usize, v: Complex64| {
        dense[i * cols + j] = v;
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => dense[j * cols + i] = v,
                Symmetry::Skew => dense[j * cols + i] = -v,
                Symmetry::Hermitian => dense[j * cols + i] = v.conj(),
            }
        }
    };

    let last_line;
    match header.layout {
        Layout::Coordinate => {
            let nnz = index(size_toks[2], size_line)?;
            let mut seen = std::collections::HashSet::with_capacity(nnz);
            let mut count = 0;
            let mut last = size_line;
            for (ln, l) in lines {
                last = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() < 2 {
                    return fail(
                        ln,
                        ParseErrorKind::Dimension("entry needs row, column and value".into()),
                    );
                }
                let i = index(toks[0], ln)?;
                let j = index(toks[1], ln)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return fail(
                        ln,
                        ParseErrorKind::IndexOutOfRange {
                            row: i,
                            col: j,
                            rows,
                            cols,
                        },
                    );
                }
                let v = entry_value(&toks[2..], header.complex, ln)?;
                count += 1;
                if count > nnz {
                    return fail(
                        ln,
                        ParseErrorKind::Dimension(format!("more than the declared {nnz} entries")),
                    );
                }
                let key = if header.symmetry == Symmetry::General {
                    (i, j)
                } else {
                    (i.max(j), i.min(j))
                };
                if !seen.insert(key) {
                    return fail(ln, ParseErrorKind::DuplicateEntry { row: i, col: j });
                }
                if header.symmetry == Symmetry::Skew && i == j {
                    return fail(
                        ln,
                        ParseErrorKind::Dimension("skew-symmetric diagonal entry".into()),
                    );
                }
                let (i, j, v) = if i >= j || header.symmetry == Symmetry::General {
                    (i, j, v)
                } else {
                    // upper-triangle entry in a symmetric file: store its mirror
                    let mirrored = match header.symmetry {
                        Symmetry::Skew => -v,
                        Symmetry::Hermitian => v.conj(),
                        _ => v,
                    };
                    (j, i, mirrored)
                };
                place(i - 1, j - 1, v);
            }
            if count != nnz {
                return fail(
                    last,
                    ParseErrorKind::Dimension(format!("declared {nnz} entries, found {count}")),
                );
            }
            last_line = last;
        }
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match header.symmetry {
                    Symmetry::General => true,
                    Symmetry::Symmetric | Symmetry::Hermitian => i >= j,
                    Symmetry::Skew => i > j,
                })
                .collect();
            let mut next = positions.iter();
            let mut last = size_line;
            for (ln, l) in lines {
                last = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                let v = entry_value(&toks, header.complex, ln)?;
                let Some(&(i, j)) = next.next() else {
                    return fail(
                        ln,
                        ParseErrorKind::Dimension(format!(
                            "more than the expected {} entries",
                            positions.len()
                        )),
                    );
                };
                place(i, j, v);
            }
            let remaining = next.count();
            if remaining > 0 {
                return fail(
                    last,
                    ParseErrorKind::Dimension(format!(
                        "expected {} entries, found {}",
                        positions.len(),
                        positions.len() - remaining
                    )),
                );
            }
            last_line = last;
        }
    }
    let _ = last_line;

    Ok(if header.complex {
        MatrixData::Complex(DenseMatrix::from_row_major(rows, cols, dense).expect("shape checked"))
    } else {
        let re = dense.into_iter().map(|c| c.re).collect();
        MatrixData::Real(DenseMatrix::from_row_major(rows, cols, re).expect("shape checked"))
    })
}

/// Parses the dense whitespace format: `m n`, then `m` rows of `n` reals.
pub fn parse_dense_text(text: &str) -> std::result::Result<DenseMatrix<f64>, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((size_line, size)) = lines.next() else {
        return fail(1, ParseErrorKind::Dimension("empty file".into()));
    };
    let toks: Vec<&str> = size.split_whitespace().collect();
    if toks.len() != 2 {
        return fail(
            size_line,
            ParseErrorKind::Header("first line must be `m n`".into()),
        );
    }
    let rows = index(toks[0], size_line)?;
    let cols = index(toks[1], size_line)?;
    if rows == 0 || cols == 0 {
        return fail(
            size_line,
            ParseErrorKind::Dimension(format!("empty {rows}x{cols} matrix")),
        );
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    let mut last = size_line;
    for (ln, l) in lines {
        last = ln;
        seen_rows += 1;
        if seen_rows > rows {
            return fail(
                ln,
                ParseErrorKind::Dimension(format!("more than {rows} rows")),
            );
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != cols {
            return fail(
                ln,
                ParseErrorKind::Dimension(format!(
                    "row has {} entries, expected {cols}",
                    toks.len()
                )),
            );
        }
        for t in toks {
            data.push(number(t, ln)?);
        }
    }
    if seen_rows != rows {
        return fail(
            last,
            ParseErrorKind::Dimension(format!("expected {rows} rows, found {seen_rows}")),
        );
    }
    Ok(DenseMatrix::from_row_major(rows, cols, data).expect("shape checked"))
}

/// Parses a matrix file in either supported format.
pub fn parse_matrix(text: &str) -> std::result::Result<MatrixData, ParseError> {
    if text.trim_start().starts_with("%%") {
        parse_matrix_market(text)
    } else {
        parse_dense_text(text).map(MatrixData::Real)
    }
}

/// Parses a right-hand side: Matrix Market `m x 1`, or one value per line.
pub fn parse_rhs(text: &str) -> std::result::Result<Vec<Complex64>, ParseError> {
    if text.trim_start().starts_with("%%") {
        let m = parse_matrix_market(text)?;
        if m.cols() != 1 {
            return fail(
                1,
                ParseErrorKind::Dimension(format!(
                    "right-hand side must have 1 column, got {}",
                    m.cols()
                )),
            );
        }
        return Ok(match m {
            MatrixData::Real(a) => a
                .as_slice()
                .iter()
                .map(|&x| Complex64::from_real(x))
                .collect(),
            MatrixData::Complex(a) => a.as_slice().to_vec(),
        });
    }
    let mut out = Vec::new();
    for (ln, l) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if l.is_empty() || l.starts_with('%') || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let v = match toks.as_slice() {
            [re] => Complex64::new(number(re, ln)?, 0.0),
            [re, im] => Complex64::new(number(re, ln)?, number(im, ln)?),
            _ => {
                return fail(
                    ln,
                    ParseErrorKind::Dimension(format!(
                        "expected 1 or 2 values, got {}",
                        toks.len()
                    )),
                )
            }
        };
        out.push(v);
    }
    if out.is_empty() {
        return fail(1, ParseErrorKind::Dimension("empty right-hand side".into()));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Pairs a parsed matrix with a right-hand side.
pub fn assemble_system(matrix: MatrixData, rhs: Option<Vec<Complex64>>) -> Result<System> {
    let (matrix, rhs) = match rhs {
        Some(b) => (matrix, b),
        None => split_last_column(matrix)?,
    };
    if rhs.len() != matrix.rows() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but right-hand side has {} entries",
            matrix.rows(),
            rhs.len()
        )));
    }
    let rhs_complex = rhs.iter().any(|c| c.im != 0.0);
    Ok(match matrix {
        MatrixData::Real(a) if !rhs_complex => {
            System::Real(a, Rhs(rhs.into_iter().map(|c| c.re).collect()))
        }
        MatrixData::Real(a) => System::Complex(promote(&a), Rhs(rhs)),
        MatrixData::Complex(a) => System::Complex(a, Rhs(rhs)),
    })
}

fn split_last_column(matrix: MatrixData) -> Result<(MatrixData, Vec<Complex64>)> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if n < 2 {
        return Err(Error::Dimension(
            "no right-hand side given and the matrix has no column to spare".into(),
        ));
    }
    fn split<S: Scalar>(a: &DenseMatrix<S>) -> (DenseMatrix<S>, Vec<S>) {
        let (m, n) = (a.rows(), a.cols());
        let mut data = Vec::with_capacity(m * (n - 1));
        let mut b = Vec::with_capacity(m);
        for i in 0..m {
            data.extend_from_slice(&a.row(i)[..n - 1]);
            b.push(a.get(i, n - 1));
        }
        (
            DenseMatrix::from_row_major(m, n - 1, data).expect("shape"),
            b,
        )
    }
    let _ = m;
    Ok(match matrix {
        MatrixData::Real(a) => {
            let (a, b) = split(&a);
            (
                MatrixData::Real(a),
                b.into_iter().map(Complex64::from_real).collect(),
            )
        }
        MatrixData::Complex(a) => {
            let (a, b) = split(&a);
            (MatrixData::Complex(a), b)
        }
    })
}

/// Reads a system from a matrix file and an optional right-hand side file.
pub fn parse_system(matrix_path: &Path, rhs_path: Option<&Path>) -> Result<System> {
    let matrix = parse_matrix(&read(matrix_path)?)?;
    let rhs = match rhs_path {
        Some(p) => Some(parse_rhs(&read(p)?)?),
        None => None,
    };
    assemble_system(matrix, rhs)
}

/// Dense text with an optional right-hand side appended as a final column.
/// Values use the shortest decimal form that reads back exactly.
pub fn write_dense_text(matrix: &DenseMatrix<f64>, rhs: Option<&Rhs<f64>>) -> String {
    let extra = usize::from(rhs.is_some());
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols() + extra);
    for i in 0..matrix.rows() {
        let mut fields: Vec<String> = matrix.row(i).iter().map(|x| format!("{x:?}")).collect();
        if let Some(b) = rhs {
            fields.push(format!("{:?}", b.0[i]));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// Matrix Market `array general` text.
pub fn write_matrix_market<S: Scalar>(matrix: &DenseMatrix<S>) -> String {
    let field = if S::IS_COMPLEX { "complex" } else { "real" };
    let mut out = format!(
        "%%MatrixMarket matrix array {field} general\n{} {}\n",
        matrix.rows(),
        matrix.cols()
    );
    for j in 0..matrix.cols() {
        for i in 0..matrix.rows() {
            let v = matrix.get(i, j);
            if S::IS_COMPLEX {
                out.push_str(&format!("{:?} {:?}\n", v.re(), v.im()));
            } else {
                out.push_str(&format!("{:?}\n", v.re()));
            }
        }
    }
    out
}

/// One value per line (`re im` for complex).
pub fn write_rhs<S: Scalar>(rhs: &[S]) -> String {
    rhs.iter()
        .map(|v| {
            if S::IS_COMPLEX {
                format!("{:?} {:?}\n", v.re(), v.im())
            } else {
                format!("{:?}\n", v.re())
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports

/// A real number as it appears in a report; non-finite values are spelled
/// out because JSON has no literal for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonReal {
    Num(f64),
    Text(String),
}

impl JsonReal {
    fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            JsonReal::Num(x)
        } else {
            JsonReal::Text(x.to_string())
        }
    }

    fn to_f64(&self) -> Result<f64> {
        match self {
            JsonReal::Num(x) => Ok(*x),
            JsonReal::Text(s) => s
                .parse()
                .map_err(|_| Error::Report(format!("not a number: {s:?}"))),
        }
    }
}

/// A scalar in a report: a bare number, or `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(JsonReal),
    Complex([JsonReal; 2]),
}

impl JsonScalar {
    fn from_scalar<S: Scalar>(s: S) -> Self {
        if S::IS_COMPLEX {
            JsonScalar::Complex([JsonReal::from_f64(s.re()), JsonReal::from_f64(s.im())])
        } else {
            JsonScalar::Real(JsonReal::from_f64(s.re()))
        }
    }

    fn to_scalar<S: Scalar>(&self) -> Result<S> {
        let (re, im) = match self {
            JsonScalar::Real(r) => (r.to_f64()?, 0.0),
            JsonScalar::Complex([r, i]) => (r.to_f64()?, i.to_f64()?),
        };
        S::from_parts(re, im).ok_or_else(|| Error::Report("complex value in a real report".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlopRecord {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
    pub total: u64,
}

impl From<FlopCounter> for FlopRecord {
    fn from(c: FlopCounter) -> Self {
        Self {
            adds: c.adds,
            muls: c.muls,
            divs: c.divs,
            total: c.total(),
        }
    }
}

/// Serialized form of a [`SolveReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    /// `"solved"` or `"partial"`.
    pub status: String,
    pub completed_steps: usize,
    pub rows: usize,
    pub dim: usize,
    /// `"real"` or `"complex"`.
    pub scalar: String,
    pub max_residual: JsonReal,
    pub rhs_norm_inf: f64,
    pub feas_tol: f64,
    pub flops: FlopRecord,
    pub depth_flops: u64,
    pub wall_time_ns: u64,
    pub seed: u64,
    pub retries_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub config: SolverConfig,
    pub iterate_count: usize,
    /// First output vector.
    pub solution: Vec<JsonScalar>,
    /// Every output vector, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterates: Option<Vec<Vec<JsonScalar>>>,
}

impl ReportRecord {
    pub fn from_report<S: Scalar>(report: &SolveReport<S>, full_iterates: bool) -> Self {
        let encode = |v: &[S]| {
            v.iter()
                .map(|&x| JsonScalar::from_scalar(x))
                .collect::<Vec<_>>()
        };
        let completed_steps = report.completed_steps();
        Self {
            status: match report.status {
                Status::Solved => "solved".into(),
                Status::Partial { .. } => "partial".into(),
            },
            completed_steps,
            rows: report.rows,
            dim: report.iterates.dim(),
            scalar: if S::IS_COMPLEX { "complex" } else { "real" }.into(),
            max_residual: JsonReal::from_f64(report.max_residual),
            rhs_norm_inf: report.rhs_norm_inf,
            feas_tol: feas_tol(completed_steps, report.rhs_norm_inf),
            flops: report.flops.into(),
            depth_flops: report.depth_flops,
            wall_time_ns: u64::try_from(report.wall_time.as_nanos()).unwrap_or(u64::MAX),
            seed: report.config.seed,
            retries_used: report.retries_used,
            failure: report.failure.map(|f| f.to_string()),
            config: report.config.clone(),
            iterate_count: report.iterates.len(),
            solution: report
                .iterates
                .vectors()
                .first()
                .map(|v| encode(v))
                .unwrap_or_default(),
            iterates: full_iterates.then(|| {
                report
                    .iterates
                    .vectors()
                    .iter()
                    .map(|v| encode(v))
                    .collect()
            }),
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == "solved"
    }

    /// Every vector the record carries: all iterates if present, otherwise
    /// the single solution.
    pub fn vectors<S: Scalar>(&self) -> Result<Vec<Vec<S>>> {
        let decode = |v: &Vec<JsonScalar>| {
            v.iter()
                .map(JsonScalar::to_scalar::<S>)
                .collect::<Result<Vec<S>>>()
        };
        match &self.iterates {
            Some(all) => all.iter().map(decode).collect(),
            None => Ok(vec![decode(&self.solution)?]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
        if rec.status != "solved" && rec.status != "partial" {
            return Err(Error::Report(format!("unknown status {:?}", rec.status)));
        }
        Ok(rec)
    }
}

/// Writes the report as one JSON object followed by a newline.
pub fn write_report<S: Scalar>(
    report: &SolveReport<S>,
    path: &Path,
    full_iterates: bool,
) -> Result<()> {
    let mut text = ReportRecord::from_report(report, full_iterates).to_json();
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<ReportRecord> {
    ReportRecord::from_json(&read(path)?)
}
