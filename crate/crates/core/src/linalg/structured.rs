//! Structured matrices: the block characteristic-polynomial identity and the
//! closed-form inverse of `K_n(s,t) = sI + tJ`.

use num_traits::{One, Zero};

use super::charpoly::char_poly;
use super::dense::RationalMatrix;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Assembles the `mk x mk` matrix whose block row `i` is
/// `[P_1, ..., P_i + Q, ..., P_m]`.
pub fn block_matrix(ps: &[RationalMatrix], q: &RationalMatrix) -> Result<RationalMatrix> {
    let k = q.require_square()?;
    if ps.is_empty() {
        return Err(Error::DimensionMismatch("need at least one P block".into()));
    }
    for p in ps {
        if p.rows() != k || p.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "P block {}x{} vs Q {k}x{k}",
                p.rows(),
                p.cols()
            )));
        }
    }
    let m = ps.len();
    let mut r = RationalMatrix::zeros(m * k, m * k);
    for i in 0..m {
        for (j, p) in ps.iter().enumerate() {
            if i == j {
                r.set_block(i * k, j * k, &(p + q));
            } else {
                r.set_block(i * k, j * k, p);
            }
        }
    }
    Ok(r)
}

/// Checks `χ(R) = χ(Q)^{m−1} χ(P_1 + ... + P_m + Q)` for the block matrix `R`
/// built by [`block_matrix`].
pub fn blockm_charpoly_check(ps: &[RationalMatrix], q: &RationalMatrix) -> Result<bool> {
    let r = block_matrix(ps, q)?;
    let lhs = char_poly(&r)?;
    let mut sum = q.clone();
    for p in ps {
        sum = &sum + p;
    }
    let rhs = &char_poly(q)?.pow(ps.len() - 1) * &char_poly(&sum)?;
    Ok(lhs == rhs)
}

/// `K_n(s,t) = s I_n + t J_n`.
pub fn kn(s: &Rational, t: &Rational, n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |i, j| if i == j { s + t } else { t.clone() })
}

/// `K_n(s,t)^{-1} = K_n(s + nt, −t) / (s (s + nt))`.
pub fn kn_inverse(s: &Rational, t: &Rational, n: usize) -> Result<RationalMatrix> {
    let shifted = s + t * int(n as i64);
    if s.is_zero() {
        return Err(Error::Singular("s = 0".into()));
    }
    if shifted.is_zero() {
        return Err(Error::Singular("s + n t = 0".into()));
    }
    let factor = Rational::one() / (s * &shifted);
    Ok(kn(&shifted, &-t, n).scale(&factor))
}
