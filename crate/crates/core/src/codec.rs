//! Text encoding of exact rationals and rational matrices.
//!
//! Rationals are written as `"p/q"` in lowest terms, with `/q` omitted when
//! `q = 1`. Matrices are nested arrays of those strings, one inner array per
//! row. Decoding takes the expected shape because a matrix with zero rows
//! carries no column count of its own.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Result, SdofError};
use crate::matcore::RationalMatrix;

pub type MatrixText = Vec<Vec<String>>;

pub fn format_rational(x: &BigRational) -> String {
    // `Ratio`'s Display already prints `p` for integers and `p/q` otherwise.
    x.to_string()
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let parse_int = |t: &str| -> Option<BigInt> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    let num = parse_int(num)?;
    let den = match den {
        Some(d) if d.starts_with('-') => return None,
        Some(d) => parse_int(d)?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn matrix_to_text(m: &RationalMatrix) -> MatrixText {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rational).collect())
        .collect()
}

pub fn matrix_from_text(text: &MatrixText, rows: usize, cols: usize, field: &str) -> Result<RationalMatrix> {
    if text.len() != rows {
        return Err(SdofError::malformed(
            field,
            format!("expected {rows} rows, found {}", text.len()),
        ));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in text.iter().enumerate() {
        if row.len() != cols {
            return Err(SdofError::malformed(
                format!("{field}[{i}]"),
                format!("expected {cols} columns, found {}", row.len()),
            ));
        }
        for (j, cell) in row.iter().enumerate() {
            let x = parse_rational(cell).ok_or_else(|| {
                SdofError::malformed(format!("{field}[{i}][{j}]"), format!("`{cell}` is not a p/q rational"))
            })?;
            entries.push(x);
        }
    }
    RationalMatrix::new(rows, cols, entries)
}
