//! Dense linear algebra over GF(2).
//!
//! Rows are packed into 64-bit words, row-major. Every matrix is immutable
//! from the caller's point of view once built; the mutating helpers exist
//! for construction only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("column index {index} out of range for a matrix with {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    InvalidBit(char),
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinVector {
    dim: usize,
    words: Vec<u64>,
}

impl BinVector {
    pub fn zeros(dim: usize) -> Self {
        BinVector {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range for dim {}", self.dim);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit {i} out of range for dim {}", self.dim);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&i| self.get(i))
    }

    /// `self += other` over GF(2).
    pub fn xor_assign(&mut self, other: &BinVector) {
        assert_eq!(self.dim, other.dim, "xor of vectors with different dims");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BinVector) -> BinVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.dim)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_word(dim: usize, word: u64) -> Self {
        debug_assert!(dim <= WORD_BITS);
        let mut v = Self::zeros(dim);
        if dim > 0 {
            let mask = if dim == WORD_BITS { u64::MAX } else { (1u64 << dim) - 1 };
            v.words[0] = word & mask;
        }
        v
    }

    /// Zero-pads the vector to `total` coordinates, placing the existing
    /// coordinates starting at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> BinVector {
        assert!(offset + self.dim <= total);
        let mut out = BinVector::zeros(total);
        for i in self.ones() {
            out.set(offset + i, true);
        }
        out
    }
}

impl FromStr for BinVector {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(LinalgError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BinVector::from_bits(&bits))
    }
}

impl fmt::Display for BinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl fmt::Debug for BinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinVector({})", self.to_bitstring())
    }
}

impl Serialize for BinVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for BinVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BinMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from row vectors. `cols` is needed to describe a
    /// matrix with no rows.
    pub fn from_rows(cols: usize, rows: &[BinVector]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(0, cols);
        for row in rows {
            m.push_row(row)?;
        }
        Ok(m)
    }

    /// Parses rows written as bitstrings, e.g. `["110", "011"]`.
    pub fn parse_rows(cols: usize, rows: &[&str]) -> Result<Self, LinalgError> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BinVector>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(cols, &parsed)
    }

    pub fn push_row(&mut self, row: &BinVector) -> Result<(), LinalgError> {
        if row.dim() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: row.dim(),
            });
        }
        self.data.extend_from_slice(row.words());
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        let idx = r * self.stride + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BinVector {
        BinVector {
            dim: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn row_vectors(&self) -> Vec<BinVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BinVector {
        let mut v = BinVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BinMatrix {
        BinMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`
    fn add_row(&mut self, src: usize, dst: usize) {
        for w in 0..self.stride {
            let v = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= v;
        }
    }

    /// Gauss-Jordan elimination in place; returns the pivot columns.
    fn eliminate(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.add_row(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    /// Reduced row-echelon form, same shape, zero rows last.
    pub fn rref(&self) -> BinMatrix {
        let mut m = self.clone();
        m.eliminate();
        m
    }

    pub fn rref_with_pivots(&self) -> (BinMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate();
        (m, pivots)
    }

    /// Dimension of the column space (equivalently the row space).
    pub fn rank(&self) -> usize {
        if self.stride == 1 {
            return rank_of_words(self.data.iter().copied());
        }
        self.rref_with_pivots().1.len()
    }

    /// The non-zero rows of the RREF: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> BinMatrix {
        let (m, pivots) = self.rref_with_pivots();
        let mut out = BinMatrix::zeros(0, self.cols);
        for r in 0..pivots.len() {
            out.data.extend_from_slice(m.row_words(r));
            out.rows += 1;
        }
        out
    }

    /// Columns packed as words (bit `r` = entry in row `r`). Only available
    /// when the matrix has at most 64 rows.
    pub(crate) fn column_words(&self) -> Option<Vec<u64>> {
        if self.rows > WORD_BITS {
            return None;
        }
        let mut cols = vec![0u64; self.cols];
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                cols[c] |= 1 << r;
            }
        }
        Some(cols)
    }

    pub fn select_columns(&self, columns: &[usize]) -> Result<BinMatrix, LinalgError> {
        for &c in columns {
            if c >= self.cols {
                return Err(LinalgError::ColumnOutOfRange {
                    index: c,
                    cols: self.cols,
                });
            }
        }
        Ok(BinMatrix::from_fn(self.rows, columns.len(), |r, i| {
            self.get(r, columns[i])
        }))
    }

    /// Rank of the submatrix formed by the given columns: the matroid rank
    /// function of the vector matroid of `self`. Columns are 0-based.
    pub fn column_rank_of_subset(&self, columns: &[usize]) -> Result<usize, LinalgError> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.cols) {
            return Err(LinalgError::ColumnOutOfRange {
                index: bad,
                cols: self.cols,
            });
        }
        if let Some(words) = self.column_words() {
            return Ok(rank_of_words(columns.iter().map(|&c| words[c])));
        }
        Ok(self.select_columns(columns)?.rank())
    }

    /// Basis of the right kernel `{x : M x = 0}` as the rows of a
    /// `(cols - rank) x cols` matrix in RREF. Its vector matroid is the dual
    /// of the vector matroid of `self`.
    pub fn nullspace_basis(&self) -> BinMatrix {
        let (m, pivots) = self.rref_with_pivots();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = BinMatrix::zeros(0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BinVector::unit(self.cols, free);
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, free) {
                    v.set(p, true);
                }
            }
            out.push_row(&v).expect("kernel vector has matching width");
        }
        out.row_space_basis()
    }

    /// `self * other^T`; both operands need the same number of columns.
    pub fn mul_transpose(&self, other: &BinMatrix) -> Result<BinMatrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(BinMatrix::from_fn(self.rows, other.rows, |r, c| {
            self.row_words(r)
                .iter()
                .zip(other.row_words(c))
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                % 2
                == 1
        }))
    }

    /// `true` iff `v` lies in the row space of `self`.
    pub fn spans(&self, v: &BinVector) -> Result<bool, LinalgError> {
        in_span(v, self)
    }

    pub fn to_bitstrings(&self) -> Vec<String> {
        (0..self.rows).map(|r| self.row(r).to_bitstring()).collect()
    }
}

/// `true` iff `v` lies in the row space of `basis` (the rows need not be
/// independent). The zero vector is always in the span.
pub fn in_span(v: &BinVector, basis: &BinMatrix) -> Result<bool, LinalgError> {
    if v.dim() != basis.cols() {
        return Err(LinalgError::DimensionMismatch {
            expected: basis.cols(),
            found: v.dim(),
        });
    }
    if v.is_zero() {
        return Ok(true);
    }
    let mut stacked = basis.clone();
    stacked.push_row(v)?;
    Ok(stacked.rank() == basis.rank())
}

/// Rank of a set of GF(2) vectors packed into words.
pub(crate) fn rank_of_words(words: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = [0u64; WORD_BITS];
    let mut rank = 0;
    for mut w in words {
        while w != 0 {
            let top = 63 - w.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = w;
                rank += 1;
                break;
            }
            w ^= basis[top];
        }
    }
    rank
}

/// Incremental xor basis over word-packed vectors; used by span queries in
/// the enumeration oracles.
#[derive(Clone, Debug)]
pub(crate) struct WordBasis {
    basis: [u64; WORD_BITS],
    rank: usize,
}

impl WordBasis {
    pub(crate) fn new() -> Self {
        WordBasis {
            basis: [0; WORD_BITS],
            rank: 0,
        }
    }

    pub(crate) fn reduce(&self, mut w: u64) -> u64 {
        while w != 0 {
            let top = 63 - w.leading_zeros() as usize;
            if self.basis[top] == 0 {
                return w;
            }
            w ^= self.basis[top];
        }
        0
    }

    /// Inserts `w`; returns `true` if the rank grew.
    pub(crate) fn insert(&mut self, w: u64) -> bool {
        let r = self.reduce(w);
        if r == 0 {
            return false;
        }
        let top = 63 - r.leading_zeros() as usize;
        self.basis[top] = r;
        self.rank += 1;
        true
    }

    pub(crate) fn contains(&self, w: u64) -> bool {
        self.reduce(w) == 0
    }
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinMatrix({}x{}; {:?})", self.rows, self.cols, self.to_bitstrings())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    cols: usize,
    rows: Vec<String>,
}

impl Serialize for BinMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            cols: self.cols,
            rows: self.to_bitstrings(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let rows: Vec<&str> = repr.rows.iter().map(String::as_str).collect();
        BinMatrix::parse_rows(repr.cols, &rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[&str]) -> BinMatrix {
        BinMatrix::parse_rows(cols, rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BinMatrix::identity(3).rank(), 3);
        assert_eq!(BinMatrix::zeros(2, 4).rank(), 0);
        assert_eq!(m(3, &["110", "011", "101"]).rank(), 2);
    }

    #[test]
    fn rank_wide_matrix_uses_elimination() {
        let mut a = BinMatrix::zeros(3, 130);
        a.set(0, 0, true);
        a.set(1, 129, true);
        a.set(2, 0, true);
        a.set(2, 129, true);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn column_subset_rank_examples() {
        let id = BinMatrix::identity(3);
        assert_eq!(id.column_rank_of_subset(&[]).unwrap(), 0);
        assert_eq!(id.column_rank_of_subset(&[0, 2]).unwrap(), 2);
        // columns 10, 10, 01
        let dup = m(3, &["110", "001"]);
        assert_eq!(dup.column_rank_of_subset(&[0, 1]).unwrap(), 1);
        assert_eq!(
            id.column_rank_of_subset(&[3]),
            Err(LinalgError::ColumnOutOfRange { index: 3, cols: 3 })
        );
    }

    #[test]
    fn nullspace_examples() {
        let k = BinMatrix::identity(4).nullspace_basis();
        assert_eq!((k.rows(), k.cols()), (0, 4));
        assert_eq!(m(2, &["11"]).nullspace_basis(), m(2, &["11"]));
        // the 3-cycle code (1 1 1) has the two-row dual {101, 011} in RREF
        assert_eq!(m(3, &["111"]).nullspace_basis(), m(3, &["101", "011"]));
    }

    #[test]
    fn in_span_examples() {
        let basis = m(3, &["100", "010"]);
        assert!(in_span(&BinVector::zeros(3), &basis).unwrap());
        assert!(in_span(&"110".parse().unwrap(), &basis).unwrap());
        let basis2 = m(3, &["110", "100"]);
        assert!(!in_span(&"001".parse().unwrap(), &basis2).unwrap());
        assert!(in_span(&BinVector::zeros(2), &basis).is_err());
        assert!(in_span(&BinVector::zeros(3), &BinMatrix::zeros(0, 3)).unwrap());
    }

    #[test]
    fn rref_of_empty_and_zero_rows() {
        let a = m(3, &["000", "011", "011"]);
        assert_eq!(a.rref(), m(3, &["011", "000", "000"]));
        assert_eq!(a.row_space_basis(), m(3, &["011"]));
    }

    #[test]
    fn serde_round_trip_keeps_width() {
        let a = BinMatrix::zeros(0, 5);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"cols":5,"rows":[]}"#);
        let back: BinMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn word_basis_tracks_span() {
        let mut b = WordBasis::new();
        assert!(b.insert(0b011));
        assert!(b.insert(0b110));
        assert!(!b.insert(0b101));
        assert!(b.contains(0b101));
        assert!(!b.contains(0b001));
        assert_eq!(b.rank, 2);
    }

    #[test]
    fn embed_pads_into_block() {
        let v: BinVector = "11".parse().unwrap();
        assert_eq!(v.embed(3, 1).to_bitstring(), "011");
    }
}
