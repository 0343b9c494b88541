//! Characteristic polynomials by Faddeev–LeVerrier and determinants by
//! fraction-free (Bareiss) elimination.
//!
//! Both routines clear denominators first and run over the integers: for an
//! integer matrix every Faddeev–LeVerrier coefficient is itself an integer,
//! so the divisions by `k` are exact and no rational normalization is needed
//! inside the loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::dense::RationalMatrix;
use super::poly::Polynomial;
use crate::error::Result;
use crate::rational::{lcm_denominators, Rational};

/// `(d * M, d)` with `d` the least common denominator of the entries.
pub(crate) fn integer_scaled(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let d = lcm_denominators(m.entries());
    let rows = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|v| (v * Rational::from_integer(d.clone())).to_integer())
                .collect()
        })
        .collect();
    (rows, d)
}

/// `det(λI − M)` as a monic polynomial in `λ`.
pub fn char_poly(m: &RationalMatrix) -> Result<Polynomial> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Polynomial::one());
    }
    let (a, d) = integer_scaled(m);
    let coeffs = faddeev_leverrier(&a);
    // χ_M(λ) = d^{-n} χ_{dM}(dλ), so coefficient i picks up d^{i-n}.
    let d = Rational::from_integer(d);
    let mut scale = Rational::one();
    let mut out = vec![Rational::zero(); n + 1];
    for i in (0..=n).rev() {
        out[i] = Rational::from_integer(coeffs[i].clone()) * &scale;
        scale /= &d;
    }
    Ok(Polynomial::new(out))
}

/// Integer characteristic-polynomial coefficients, ascending, for an integer matrix.
fn faddeev_leverrier(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let sparse_rows: Vec<Vec<(usize, &BigInt)>> = a
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect()
        })
        .collect();

    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    // M_1 = I
    let mut mk: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n];
            row[i] = BigInt::one();
            row
        })
        .collect();

    for k in 1..=n {
        let mut product = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in sparse_rows.iter().enumerate() {
            let out = &mut product[i];
            for &(l, coeff) in row {
                for (o, v) in out.iter_mut().zip(&mk[l]) {
                    if !v.is_zero() {
                        *o += coeff * v;
                    }
                }
            }
        }
        let trace: BigInt = (0..n).map(|i| &product[i][i]).sum();
        let (q, r) = (-trace).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        c[n - k] = q;
        if k < n {
            for (i, row) in product.iter_mut().enumerate() {
                row[i] += &c[n - k];
            }
            mk = product;
        }
    }
    c
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &RationalMatrix) -> Result<Rational> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut a, d) = integer_scaled(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = sign * &a[n - 1][n - 1];
    Ok(Rational::new(det, num_traits::pow(d, n)))
}

/// Reduced row echelon data from fraction-free elimination over the
/// integers: the rank and, for each pivot row, its pivot column.
pub(crate) struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

/// Bareiss forward elimination with row pivoting; columns without a pivot
/// are skipped. Rows are pre-scaled to integers individually, which leaves
/// the row space (and hence the kernel) unchanged.
pub(crate) fn integer_echelon(m: &RationalMatrix) -> Echelon {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let d = lcm_denominators(row);
            row.iter()
                .map(|v| (v * Rational::from_integer(d.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots }
}
