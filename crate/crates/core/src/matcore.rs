//! Exact dense matrices over the rationals.
//!
//! Every rank statement made elsewhere in the crate bottoms out here, so
//! nothing in this module rounds: entries are arbitrary-precision fractions
//! and rank is computed with fraction-free (Bareiss) elimination over the
//! integers after clearing denominators row by row.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Result, SdofError};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(SdofError::mismatch(
                "RationalMatrix::new",
                format!("{} entries", rows * cols),
                format!("{} entries", entries.len()),
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from integer rows. Panics on ragged input; meant for
    /// literals in tests and examples.
    pub fn from_integers(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged integer rows");
        Self::from_fn(rows.len(), cols, |i, j| BigRational::from_integer(rows[i][j].into()))
    }

    /// Builds a matrix from `(numerator, denominator)` pairs. Panics on ragged
    /// input or a zero denominator.
    pub fn from_fractions(rows: &[&[(i64, i64)]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged fraction rows");
        Self::from_fn(rows.len(), cols, |i, j| {
            let (p, q) = rows[i][j];
            BigRational::new(p.into(), q.into())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product. Zero entries of `self` are skipped, which matters for
    /// the block-diagonal stacked channels.
    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != rhs.rows {
            return Err(SdofError::mismatch(
                "matrix product",
                format!("rhs with {} rows", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact rank via fraction-free Gaussian elimination with row pivoting.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut work: Vec<Vec<BigInt>> = (0..self.rows).map(|i| clear_denominators(self.row(i))).collect();
        bareiss_rank(&mut work, self.cols)
    }

    /// Exact inverse by Gauss-Jordan elimination on `[self | I]`.
    pub fn inverse(&self) -> Result<RationalMatrix> {
        if self.rows != self.cols {
            return Err(SdofError::mismatch(
                "inverse",
                "square matrix",
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();

        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Err(SdofError::SingularMatrix {
                    rank: self.rank(),
                    size: n,
                });
            };
            a.swap(col, pivot);
            inv.swap(col, pivot);

            let scale = a[col][col].recip();
            for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
                *v *= &scale;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] -= t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// Selects a contiguous column range.
    pub fn columns(&self, range: std::ops::Range<usize>) -> RationalMatrix {
        assert!(range.end <= self.cols, "column range out of bounds");
        Self::from_fn(self.rows, range.len(), |i, j| self.get(i, range.start + j).clone())
    }

    /// Selects a contiguous row range.
    pub fn row_block(&self, range: std::ops::Range<usize>) -> RationalMatrix {
        assert!(range.end <= self.rows, "row range out of bounds");
        Self::from_fn(range.len(), self.cols, |i, j| self.get(range.start + i, j).clone())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(rational_to_f64).collect())
            .collect()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Assembles a block-diagonal matrix. Off-block entries are exact zeros; an
/// empty list yields the 0x0 matrix.
pub fn block_diag(blocks: &[RationalMatrix]) -> RationalMatrix {
    let rows = blocks.iter().map(|b| b.rows).sum();
    let cols = blocks.iter().map(|b| b.cols).sum();
    let mut out = RationalMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.entries[(r0 + i) * cols + c0 + j] = b.get(i, j).clone();
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    out
}

/// Horizontal concatenation `[A, B, ...]`.
pub fn hconcat(blocks: &[&RationalMatrix]) -> Result<RationalMatrix> {
    let Some(first) = blocks.first() else {
        return Ok(RationalMatrix::zeros(0, 0));
    };
    let rows = first.rows;
    if let Some(bad) = blocks.iter().find(|b| b.rows != rows) {
        return Err(SdofError::mismatch(
            "hconcat",
            format!("{rows} rows"),
            format!("{} rows", bad.rows),
        ));
    }
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for b in blocks {
            entries.extend_from_slice(b.row(i));
        }
    }
    Ok(RationalMatrix {
        rows,
        cols,
        entries,
    })
}

/// Vertical concatenation.
pub fn vconcat(blocks: &[&RationalMatrix]) -> Result<RationalMatrix> {
    let Some(first) = blocks.first() else {
        return Ok(RationalMatrix::zeros(0, 0));
    };
    let cols = first.cols;
    if let Some(bad) = blocks.iter().find(|b| b.cols != cols) {
        return Err(SdofError::mismatch(
            "vconcat",
            format!("{cols} columns"),
            format!("{} columns", bad.cols),
        ));
    }
    Ok(RationalMatrix {
        rows: blocks.iter().map(|b| b.rows).sum(),
        cols,
        entries: blocks.iter().flat_map(|b| b.entries.iter().cloned()).collect(),
    })
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Numerator or denominator overflowed f64 on its own; scale down first.
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Fraction-free row echelon reduction; returns the rank. Each division by
/// the previous pivot is exact (Sylvester's determinant identity), so the
/// entries stay integral minors of the input.
fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Smallest nonzero magnitude keeps intermediate growth down.
        let pivot = (rank..rows)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].magnitude().bits());
        let Some(pivot) = pivot else {
            continue;
        };
        a.swap(rank, pivot);
        let (top, below) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in below.iter_mut() {
            for j in col + 1..cols {
                let v = &prow[col] * &row[j] - &row[col] * &prow[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = prow[col].clone();
        rank += 1;
    }
    rank
}
