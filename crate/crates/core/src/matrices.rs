//! The transition matrix `M`, its Kirchhoff matrix `∇M`, the diagonal of
//! column sums `Δ`, and the block decomposition into `A`, `B_a` and `D`.
//!
//! Rows and columns are indexed by lexicographic rank of words.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{format_rational, Rational};
use crate::words::{all_words, RateSystem, Word};

/// Largest state space exported as a dense JSON matrix.
pub const DENSE_EXPORT_CAP: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseRationalMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::new(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Stores `value` at `(i, j)`; zero values are stored too, as structural entries.
    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(i < self.rows && j < self.cols);
        self.entries.insert((i, j), value);
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        assert!(i < self.rows && j < self.cols);
        *self.entries.entry((i, j)).or_insert_with(Rational::zero) += value;
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Number of stored (structural) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.cols];
        for (&(_, j), v) in &self.entries {
            sums[j] += v;
        }
        sums
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, self.cols);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = v.clone();
        }
        m
    }

    /// Entry-wise equality of values (structural zeros compare equal to absent entries).
    pub fn same_values(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .keys()
                .chain(other.entries.keys())
                .all(|&(i, j)| self.get(i, j) == other.get(i, j))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (&(i, j), a) in &self.entries {
            out[i] += a * &v[j];
        }
        Ok(out)
    }
}

/// `M^{n,L}`: entry `(v, u)` is `β(v)` whenever `v = ∂_a u` for some letter `a`.
///
/// The self-loops at `u = a^L` are kept as structural entries.
pub fn transition_matrix(rates: &RateSystem) -> SparseRationalMatrix {
    let n = rates.alphabet_size();
    let size = rates.state_count();
    let mut m = SparseRationalMatrix::new(size, size);
    for u in rates.words() {
        for a in 1..=n {
            let v = u.shift_append(a);
            m.set(v.rank(), u.rank(), rates.beta(&v).clone());
        }
    }
    m
}

/// `∇M = M − diag(column sums of M)`.
pub fn kirchhoff(m: &SparseRationalMatrix) -> Result<SparseRationalMatrix> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let sums = m.column_sums();
    let mut out = m.clone();
    for (j, s) in sums.iter().enumerate() {
        out.add_to(j, j, &-s);
    }
    Ok(out)
}

/// `Δ^{n,L}`: diagonal with `Δ_{u,u} = Σ_a β(∂_a u)`.
pub fn delta_matrix(rates: &RateSystem) -> SparseRationalMatrix {
    let diag: Vec<Rational> = rates.words().map(|u| outflow(rates, &u)).collect();
    SparseRationalMatrix::from_diagonal(&diag)
}

/// `Σ_a β(∂_a u)`.
pub fn outflow(rates: &RateSystem, u: &Word) -> Rational {
    (1..=rates.alphabet_size())
        .map(|a| rates.beta(&u.shift_append(a)))
        .sum()
}

fn check_length(rates: &RateSystem, len: usize) -> Result<()> {
    if len == 0 || len > rates.word_length() {
        return Err(Error::DepthOutOfRange {
            depth: len,
            max: rates.word_length(),
        });
    }
    Ok(())
}

/// `A^{n,len}` of size `n^len x n^(len-1)`: entry `(v, u)` is `β(v)` when `h(v) = u`.
///
/// For `len = 1` the single column holds `x_{a,1}`.
pub fn a_matrix(rates: &RateSystem, len: usize) -> Result<SparseRationalMatrix> {
    check_length(rates, len)?;
    let n = rates.alphabet_size();
    let rows = n.pow(len as u32);
    let cols = n.pow(len as u32 - 1);
    let mut m = SparseRationalMatrix::new(rows, cols);
    for v in all_words(n, len) {
        let col = if len == 1 { 0 } else { v.prefix(len - 1).rank() };
        m.set(v.rank(), col, rates.beta(&v).clone());
    }
    Ok(m)
}

/// `B_a^{n,len}` for `a = 1..=n`, each `n^len x n^len`: entry `(v, u)` is
/// `β(a.v)` when `a.h(v) = u`.
///
/// `a.v` has length `len + 1`; its depth is capped at `L`, so for `len = L`
/// the pure-block self-loop uses `x_{a,L}` and `Σ_a B_a = M` exactly.
pub fn b_matrices(rates: &RateSystem, len: usize) -> Result<Vec<SparseRationalMatrix>> {
    check_length(rates, len)?;
    let n = rates.alphabet_size();
    let size = n.pow(len as u32);
    let mut parts = Vec::with_capacity(n);
    for a in 1..=n {
        let mut m = SparseRationalMatrix::new(size, size);
        for v in all_words(n, len) {
            let av = v.prepend(a);
            let u = av.prefix(len);
            m.set(v.rank(), u.rank(), rates.beta(&av).clone());
        }
        parts.push(m);
    }
    Ok(parts)
}

/// `B^{n,len} = Σ_a B_a^{n,len}`.
pub fn b_sum(rates: &RateSystem, len: usize) -> Result<SparseRationalMatrix> {
    let parts = b_matrices(rates, len)?;
    let size = parts[0].rows();
    let mut sum = SparseRationalMatrix::new(size, size);
    for part in &parts {
        for ((i, j), v) in part.iter() {
            sum.add_to(i, j, v);
        }
    }
    Ok(sum)
}

/// Diagonal of `D^{n,len}`: the column sums of `A^{n,len+1}`, i.e.
/// `Σ_b β(u.b)` for `u` of length `len`. Requires `len < L`.
pub fn d_diagonal(rates: &RateSystem, len: usize) -> Result<Vec<Rational>> {
    if len == 0 || len >= rates.word_length() {
        return Err(Error::DepthOutOfRange {
            depth: len,
            max: rates.word_length() - 1,
        });
    }
    Ok(a_matrix(rates, len + 1)?.column_sums())
}

/// The parts below the top level, present only when `L >= 2`.
#[derive(Clone, Debug)]
pub struct LowerBlocks {
    /// `B_a^{n,L-1}` for `a = 1..=n`.
    pub b_parts: Vec<SparseRationalMatrix>,
    /// Diagonal of `D^{n,L-1}`.
    pub d_diagonal: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    /// `A^{n,L}`; `M^{n,L}` is `n` copies side by side.
    pub a: SparseRationalMatrix,
    pub lower: Option<LowerBlocks>,
}

pub fn block_decomposition(rates: &RateSystem) -> Result<BlockDecomposition> {
    let len = rates.word_length();
    let a = a_matrix(rates, len)?;
    let lower = if len >= 2 {
        Some(LowerBlocks {
            b_parts: b_matrices(rates, len - 1)?,
            d_diagonal: d_diagonal(rates, len - 1)?,
        })
    } else {
        None
    };
    Ok(BlockDecomposition { a, lower })
}

/// `(row_word, col_word, "p/q")` for every structural entry.
pub fn coordinate_records(
    m: &SparseRationalMatrix,
    n: usize,
    len: usize,
) -> Vec<(String, String, String)> {
    m.iter()
        .map(|((i, j), v)| {
            (
                Word::from_rank(n, len, i).to_string(),
                Word::from_rank(n, len, j).to_string(),
                format_rational(v),
            )
        })
        .collect()
}

/// `{"states": [...], "matrix": [["p/q", ...], ...]}` for square state matrices.
pub fn dense_json(m: &SparseRationalMatrix, n: usize, len: usize) -> Result<serde_json::Value> {
    if m.rows() > DENSE_EXPORT_CAP {
        return Err(Error::CapExceeded {
            states: m.rows(),
            cap: DENSE_EXPORT_CAP,
        });
    }
    let states: Vec<String> = all_words(n, len).map(|w| w.to_string()).collect();
    let matrix: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| format_rational(&m.get(i, j))).collect())
        .collect();
    Ok(json!({ "states": states, "matrix": matrix }))
}
