use std::collections::BTreeMap;

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A multiset of exact eigenvalues with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EigenMultiset {
    entries: BTreeMap<Rational, usize>,
}

impl EigenMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `multiplicity` copies of `value`, merging with existing copies.
    pub fn insert(&mut self, value: Rational, multiplicity: usize) {
        if multiplicity > 0 {
            *self.entries.entry(value).or_insert(0) += multiplicity;
        }
    }

    pub fn multiplicity(&self, value: &Rational) -> usize {
        self.entries.get(value).copied().unwrap_or(0)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Iterates in increasing eigenvalue order.
    pub fn iter(&self) -> impl Iterator<Item = (&Rational, usize)> {
        self.entries.iter().map(|(v, &m)| (v, m))
    }

    /// `Π (λ − r)^{m_r}`.
    pub fn polynomial(&self) -> Polynomial {
        self.entries
            .iter()
            .map(|(r, &m)| Polynomial::root_factor(r).pow(m))
            .product()
    }
}

impl FromIterator<(Rational, usize)> for EigenMultiset {
    fn from_iter<I: IntoIterator<Item = (Rational, usize)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (v, m) in iter {
            out.insert(v, m);
        }
        out
    }
}

/// Whether `p(λ) = Π (λ − r)^{m_r}` exactly.
///
/// Fails when the multiplicities do not add up to the degree of `p`.
pub fn factor_check(p: &Polynomial, roots: &EigenMultiset) -> Result<bool> {
    let degree = p.degree().unwrap_or(0);
    let multiplicities = roots.total_multiplicity();
    if multiplicities != degree {
        return Err(Error::MultiplicityMismatch {
            multiplicities,
            degree,
        });
    }
    Ok(*p == roots.polynomial())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn factor_check_examples() {
        let roots: EigenMultiset = [(int(2), 1), (int(3), 1)].into_iter().collect();
        assert!(factor_check(&p(&[6, -5, 1]), &roots).unwrap());
        let zero: EigenMultiset = [(int(0), 2)].into_iter().collect();
        assert!(factor_check(&p(&[0, 0, 1]), &zero).unwrap());
        let one: EigenMultiset = [(int(1), 2)].into_iter().collect();
        assert!(!factor_check(&p(&[1, 0, 1]), &one).unwrap());
        assert_eq!(
            factor_check(&p(&[6, -5, 1]), &one.clone().into_iter_merged(int(7))),
            Err(Error::MultiplicityMismatch {
                multiplicities: 3,
                degree: 2
            })
        );
    }

    #[test]
    fn insert_merges() {
        let mut m = EigenMultiset::new();
        m.insert(int(-4), 1);
        m.insert(int(-4), 2);
        m.insert(int(0), 0);
        assert_eq!(m.multiplicity(&int(-4)), 3);
        assert_eq!(m.distinct(), 1);
    }

    impl EigenMultiset {
        fn into_iter_merged(mut self, v: Rational) -> Self {
            self.insert(v, 1);
            self
        }
    }
}
