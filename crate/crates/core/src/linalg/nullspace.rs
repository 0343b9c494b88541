use num_traits::Zero;

use super::charpoly::integer_echelon;
use super::dense::RationalMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub fn rank(m: &RationalMatrix) -> usize {
    integer_echelon(m).pivots.len()
}

/// The unique kernel vector of a square matrix with one-dimensional kernel,
/// normalized to component sum 1.
pub fn null_space_vector(m: &RationalMatrix) -> Result<Vec<Rational>> {
    let size = m.require_square()?;
    let echelon = integer_echelon(m);
    let rank = echelon.pivots.len();
    if size - rank != 1 {
        return Err(Error::KernelDimension {
            dimension: size - rank,
            rank,
            size,
        });
    }
    let free = (0..size)
        .find(|c| !echelon.pivots.contains(c))
        .expect("one non-pivot column");

    let mut v = vec![Rational::zero(); size];
    v[free] = Rational::from_integer(1.into());
    for (r, &pc) in echelon.pivots.iter().enumerate().rev() {
        let row = &echelon.rows[r];
        let mut acc = Rational::zero();
        for (j, coeff) in row.iter().enumerate().skip(pc + 1) {
            if !coeff.is_zero() && !v[j].is_zero() {
                acc += Rational::from_integer(coeff.clone()) * &v[j];
            }
        }
        v[pc] = -acc / Rational::from_integer(row[pc].clone());
    }

    let total: Rational = v.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroKernelSum);
    }
    Ok(v.into_iter().map(|x| x / &total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_state_generator() {
        // columns sum to zero: rates 1 into state 1, 3 into state 2
        let gen = m(&[&[-3, 1], &[3, -1]]);
        assert_eq!(
            null_space_vector(&gen).unwrap(),
            vec![ratio(1, 4), ratio(3, 4)]
        );
    }

    #[test]
    fn rejects_wrong_kernel_dimension() {
        let zero = RationalMatrix::zeros(2, 2);
        assert_eq!(
            null_space_vector(&zero),
            Err(Error::KernelDimension {
                dimension: 2,
                rank: 0,
                size: 2
            })
        );
        assert!(matches!(
            null_space_vector(&RationalMatrix::identity(3)),
            Err(Error::KernelDimension { dimension: 0, .. })
        ));
    }

    #[test]
    fn zero_sum_kernel() {
        assert_eq!(null_space_vector(&m(&[&[1, 1], &[1, 1]])), Err(Error::ZeroKernelSum));
    }

    #[test]
    fn rank_counts_pivots() {
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 5]])), 1);
    }
}
