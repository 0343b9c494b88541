//! Closed-form spectrum of the Kirchhoff matrix and its exact verification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{char_poly, factor_check, EigenMultiset, Polynomial};
use crate::matrices::{d_diagonal, kirchhoff, transition_matrix};
use crate::rational::{format_rational, Rational};
use crate::words::RateSystem;

/// Default cap on `n^L` for the dense characteristic-polynomial oracle.
pub const DEFAULT_ORACLE_CAP: usize = 256;

/// Eigenvalues of `∇M^{n,L}`:
/// `0` once, `−β_{1,1}` with multiplicity `n−1`, and `−β_{a,m}` with
/// multiplicity `(n−1) n^{L−m}` for each letter `a` and `m = 2..=L`.
/// Coincident values are merged.
pub fn eigenvalue_multiset(rates: &RateSystem) -> EigenMultiset {
    eigenvalues_with_base_multiplicity(rates, rates.alphabet_size() - 1)
}

/// Same as [`eigenvalue_multiset`] but with the `−β_{1,1}` multiplicity
/// supplied by the caller.
pub fn eigenvalues_with_base_multiplicity(rates: &RateSystem, base: usize) -> EigenMultiset {
    let n = rates.alphabet_size();
    let len = rates.word_length();
    let mut set = EigenMultiset::new();
    set.insert(Rational::from_integer(0.into()), 1);
    set.insert(-rates.beta_sum(1, 1).expect("depth 1 exists"), base);
    for m in 2..=len {
        let mult = (n - 1) * n.pow((len - m) as u32);
        for a in 1..=n {
            set.insert(-rates.beta_sum(a, m).expect("depth in range"), mult);
        }
    }
    set
}

/// `1 + (n−1) + n(n−1) Σ_{m=2}^{L} n^{L−m}`, which must equal `n^L`.
pub fn multiplicity_total(n: usize, len: usize) -> usize {
    1 + (n - 1) + n * (n - 1) * (2..=len).map(|m| n.pow((len - m) as u32)).sum::<usize>()
}

/// `χ(∇M^{n,L}; λ)` by the dense oracle.
pub fn kirchhoff_char_poly(rates: &RateSystem) -> Result<Polynomial> {
    let k = kirchhoff(&transition_matrix(rates))?;
    char_poly(&k.to_dense())
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub claimed: EigenMultiset,
    pub charpoly: Polynomial,
    pub matches: bool,
    /// `(Σ claimed multiplicities, n^L)`.
    pub degree_check: (usize, usize),
    /// Whether `χ(∇M^{n,L}) = χ(−D^{n,L−1})^{n−1} χ(∇M^{n,L−1})`; `None` for `L = 1`.
    pub recursion_holds: Option<bool>,
}

#[derive(Serialize)]
pub struct EigenRow {
    pub eigenvalue: String,
    pub multiplicity: usize,
}

impl SpectrumReport {
    pub fn rows(&self) -> Vec<EigenRow> {
        self.claimed
            .iter()
            .map(|(v, m)| EigenRow {
                eigenvalue: format_rational(v),
                multiplicity: m,
            })
            .collect()
    }
}

fn check_cap(rates: &RateSystem, cap: usize) -> Result<()> {
    let states = rates.state_count();
    if states > cap {
        return Err(Error::CapExceeded { states, cap });
    }
    Ok(())
}

/// Verifies the closed-form spectrum against the exact characteristic
/// polynomial, and the one-step recursion in `L` by exact polynomial division.
pub fn spectrum_verify(rates: &RateSystem, cap: usize) -> Result<SpectrumReport> {
    check_cap(rates, cap)?;
    let claimed = eigenvalue_multiset(rates);
    let charpoly = kirchhoff_char_poly(rates)?;
    let degree_check = (claimed.total_multiplicity(), rates.state_count());
    let matches = degree_check.0 == degree_check.1 && factor_check(&charpoly, &claimed)?;
    let recursion_holds = if rates.word_length() >= 2 {
        Some(recursion_check(rates, &charpoly)?)
    } else {
        None
    };
    Ok(SpectrumReport {
        claimed,
        charpoly,
        matches,
        degree_check,
        recursion_holds,
    })
}

/// `χ(∇M^{n,L}) / χ(∇M^{n,L−1})` divides exactly and equals `χ(−D^{n,L−1})^{n−1}`.
pub fn recursion_check(rates: &RateSystem, top: &Polynomial) -> Result<bool> {
    let len = rates.word_length();
    let n = rates.alphabet_size();
    let shorter = rates.truncate(len - 1)?;
    let below = kirchhoff_char_poly(&shorter)?;
    let (quotient, remainder) = top.div_rem(&below);
    if !remainder.is_zero() {
        return Ok(false);
    }
    let chi_minus_d: Polynomial = d_diagonal(rates, len - 1)?
        .iter()
        .map(|d| Polynomial::root_factor(&-d))
        .product();
    Ok(quotient == chi_minus_d.pow(n - 1))
}
