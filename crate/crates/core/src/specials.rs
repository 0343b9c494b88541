//! Two rate specializations with explicit stationary laws.
//!
//! *Bernoulli*: `x_{a,k} = y_a` for every depth; the stationary law is the
//! product measure with densities `ρ_a = y_a / Σ_b y_b`.
//!
//! *Skin-deep*: `x_{a,1} = x`, `x_{a,k} = 1` for `k > 1`; the stationary law
//! depends on a word only through its number of blocks, densities are
//! uniform, and two-point correlations decay like `α^{j−i}` with
//! `α = (1−x)/(1+(n−1)x)`. Block-count generating polynomials come from
//! powers of the transfer matrix `A_n(x) = (1−x)I + xJ`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Polynomial;
use crate::rational::{int, pow, Rational};
use crate::words::{RateSystem, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliSpec {
    pub y: Vec<Rational>,
    pub len: usize,
}

impl BernoulliSpec {
    pub fn new(y: Vec<Rational>, len: usize) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::AlphabetTooSmall(y.len()));
        }
        Ok(Self { y, len })
    }

    /// `ρ_a = y_a / Σ_b y_b`.
    pub fn densities(&self) -> Vec<Rational> {
        let total: Rational = self.y.iter().sum();
        self.y.iter().map(|v| v / &total).collect()
    }

    /// Product-measure probability `Π_i ρ_{u_i}`.
    pub fn product_measure(&self, w: &Word) -> Rational {
        let rho = self.densities();
        w.letters().iter().map(|&a| rho[a - 1].clone()).product()
    }
}

pub fn bernoulli_rates(spec: &BernoulliSpec) -> Result<RateSystem> {
    RateSystem::new(spec.y.len(), spec.len, |a, _| spec.y[a - 1].clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkinDeepSpec {
    pub x: Rational,
    pub n: usize,
    pub len: usize,
}

impl SkinDeepSpec {
    pub fn new(x: Rational, n: usize, len: usize) -> Result<Self> {
        if x <= Rational::zero() {
            return Err(Error::NonPositiveRate {
                letter: 0,
                depth: 1,
                value: crate::rational::format_rational(&x),
            });
        }
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        Ok(Self { x, n, len })
    }
}

pub fn skin_deep_rates(spec: &SkinDeepSpec) -> Result<RateSystem> {
    RateSystem::new(spec.n, spec.len, |_, k| {
        if k == 1 {
            spec.x.clone()
        } else {
            Rational::one()
        }
    })
}

/// `x^{γ(u)−1} / (n (1+(n−1)x)^{L−1})` with `γ` the block count.
pub fn skin_deep_mu_bar(w: &Word, x: &Rational) -> Rational {
    let n = w.alphabet_size() as i64;
    let spread = Rational::one() + int(n - 1) * x;
    pow(x, w.block_count() - 1) / (int(n) * pow(&spread, w.len() - 1))
}

/// `α = (1−x)/(1+(n−1)x)`.
pub fn decay_ratio(n: usize, x: &Rational) -> Rational {
    (Rational::one() - x) / (Rational::one() + int(n as i64 - 1) * x)
}

/// Block-count generating polynomial `α_{n,k}(a,b;x)` for words of length
/// `k+1` from `a` to `b`:
/// `((1+(n−1)x)^k + (n−1)(1−x)^k)/n` on the diagonal and
/// `((1+(n−1)x)^k − (1−x)^k)/n` off it.
pub fn alpha_poly(n: usize, k: usize, diagonal: bool) -> Polynomial {
    let spread = Polynomial::linear(Rational::one(), int(n as i64 - 1)).pow(k);
    let contract = Polynomial::linear(Rational::one(), int(-1)).pow(k);
    let inv_n = Rational::one() / int(n as i64);
    let combined = if diagonal {
        &spread + &contract.scale(&int(n as i64 - 1))
    } else {
        &spread - &contract
    };
    combined.scale(&inv_n)
}

/// Square matrix of polynomials.
pub type PolyMatrix = Vec<Vec<Polynomial>>;

/// `A_n(x)^k` by repeated exact polynomial-matrix multiplication.
pub fn transfer_matrix_power(n: usize, k: usize) -> PolyMatrix {
    let one_step: PolyMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Polynomial::one()
                    } else {
                        Polynomial::x()
                    }
                })
                .collect()
        })
        .collect();
    let mut acc: PolyMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Polynomial::one() } else { Polynomial::zero() })
                .collect()
        })
        .collect();
    for _ in 0..k {
        acc = poly_matmul(&acc, &one_step);
    }
    acc
}

fn poly_matmul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Polynomial::zero(), |acc, l| &acc + &(&a[i][l] * &b[l][j]))
                })
                .collect()
        })
        .collect()
}

/// `⟨η^{a,i} η^{b,j}⟩` under skin-deep rates, for `a = b` when `same_letter`.
pub fn two_point(n: usize, x: &Rational, i: usize, j: usize, same_letter: bool) -> Result<Rational> {
    if i == 0 || i >= j {
        return Err(Error::InvalidQuery(format!("need 1 <= i < j, got i={i}, j={j}")));
    }
    let nn = int((n * n) as i64);
    let power = pow(&decay_ratio(n, x), j - i);
    let base = Rational::one() / &nn;
    Ok(if same_letter {
        base + int(n as i64 - 1) * power / nn
    } else {
        base - power / nn
    })
}

/// `⟨η^{a,i} η^{a,i+gap}⟩ − ⟨η^{a,i}⟩⟨η^{a,i+gap}⟩ = ((n−1)/n²) α^{gap}`.
pub fn truncated_two_point(n: usize, x: &Rational, gap: usize) -> Result<Rational> {
    if gap == 0 {
        return Err(Error::InvalidQuery("gap must be positive".into()));
    }
    Ok(int(n as i64 - 1) / int((n * n) as i64) * pow(&decay_ratio(n, x), gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::stationary::stationary_vector;

    #[test]
    fn bernoulli_product_measure() {
        let spec = BernoulliSpec::new(vec![int(1), int(3)], 2).unwrap();
        let v = stationary_vector(&bernoulli_rates(&spec).unwrap());
        assert_eq!(
            v.probabilities(),
            &[ratio(1, 16), ratio(3, 16), ratio(3, 16), ratio(9, 16)]
        );
        let uniform = BernoulliSpec::new(vec![int(2); 3], 2).unwrap();
        let v = stationary_vector(&bernoulli_rates(&uniform).unwrap());
        assert!(v.probabilities().iter().all(|p| *p == ratio(1, 9)));
    }

    #[test]
    fn skin_deep_examples() {
        let at = |x: Rational| {
            stationary_vector(&skin_deep_rates(&SkinDeepSpec::new(x, 2, 2).unwrap()).unwrap())
        };
        assert_eq!(
            at(int(3)).probabilities(),
            &[ratio(1, 8), ratio(3, 8), ratio(3, 8), ratio(1, 8)]
        );
        assert_eq!(
            at(ratio(1, 3)).probabilities(),
            &[ratio(3, 8), ratio(1, 8), ratio(1, 8), ratio(3, 8)]
        );
        assert!(at(int(1)).probabilities().iter().all(|p| *p == ratio(1, 4)));
        let w = Word::parse(2, "12").unwrap();
        assert_eq!(skin_deep_mu_bar(&w, &int(3)), ratio(3, 8));
        let block = Word::parse(3, "222").unwrap();
        assert_eq!(skin_deep_mu_bar(&block, &int(2)), ratio(1, 75));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_poly(2, 1, false), Polynomial::x());
        assert_eq!(
            alpha_poly(2, 2, true),
            Polynomial::new(vec![int(1), int(0), int(1)])
        );
        let t = transfer_matrix_power(3, 0);
        assert_eq!(t[0][0], Polynomial::one());
        assert!(t[0][1].is_zero());
        let t = transfer_matrix_power(2, 2);
        assert_eq!(t[0][1], Polynomial::new(vec![int(0), int(2)]));
    }

    #[test]
    fn two_point_examples() {
        assert_eq!(two_point(2, &int(3), 1, 2, true).unwrap(), ratio(1, 8));
        assert_eq!(two_point(3, &int(1), 2, 5, true).unwrap(), ratio(1, 9));
        assert_eq!(two_point(3, &int(1), 2, 5, false).unwrap(), ratio(1, 9));
        assert!(two_point(2, &int(3), 2, 2, true).is_err());
        assert_eq!(truncated_two_point(2, &int(3), 1).unwrap(), ratio(-1, 8));
        assert_eq!(truncated_two_point(4, &int(1), 3).unwrap(), int(0));
        assert!(truncated_two_point(2, &int(3), 0).is_err());
    }
}
