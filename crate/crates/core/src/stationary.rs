//! Closed-form stationary law of the de Bruijn process.
//!
//! `μ(u) = β(u) / Σ_a β(∂_a u)` on non-empty words of length at most `L`
//! (the shift acting at the word's own length), and the stationary
//! probability of a word is the product of `μ` over its prefixes. The
//! resulting vector is exactly normalized and exactly stationary.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Polynomial;
use crate::rational::{format_rational, int, Rational};
use crate::words::{all_words, Block, RateSystem, Word};

fn check_prefix(w: &Word, rates: &RateSystem) -> Result<()> {
    rates.check_word(w)?;
    if w.len() > rates.word_length() {
        return Err(Error::LengthMismatch {
            expected: rates.word_length(),
            got: w.len(),
        });
    }
    Ok(())
}

/// `μ(w)` for `1 <= |w| <= L`.
pub fn mu(w: &Word, rates: &RateSystem) -> Result<Rational> {
    check_prefix(w, rates)?;
    let Block { letter, run_length } = w.last_block();
    let x = rates.rate(letter, run_length);
    let denominator = if w.is_block() {
        rates.beta_sum(letter, run_length)?
    } else {
        rates.beta_sum(letter, run_length + 1)?
    };
    Ok(x / denominator)
}

/// `μ̄(w) = Π_i μ(w_1 ... w_i)` for `1 <= |w| <= L`.
pub fn mu_bar(w: &Word, rates: &RateSystem) -> Result<Rational> {
    check_prefix(w, rates)?;
    (1..=w.len()).try_fold(Rational::one(), |acc, i| Ok(acc * mu(&w.prefix(i), rates)?))
}

/// `ρ̄(a^k) = Π_{j=1}^{k} x_{a,j} / β_{a,j+1}`; needs `k + 1 <= L`.
pub fn rho_bar(block: Block, rates: &RateSystem) -> Result<Rational> {
    let Block { letter, run_length } = block;
    if run_length == 0 || run_length + 1 > rates.word_length() {
        return Err(Error::DepthOutOfRange {
            depth: run_length + 1,
            max: rates.word_length(),
        });
    }
    (1..=run_length).try_fold(Rational::one(), |acc, j| {
        Ok(acc * rates.rate(letter, j) / rates.beta_sum(letter, j + 1)?)
    })
}

/// Probabilities of all `n^L` words in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryVector {
    n: usize,
    len: usize,
    probs: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbabilityRow {
    pub word: String,
    pub prob: String,
}

impl StationaryVector {
    pub fn new(n: usize, len: usize, probs: Vec<Rational>) -> Result<Self> {
        let expected = n.pow(len as u32);
        if probs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {expected} words",
                probs.len()
            )));
        }
        Ok(Self { n, len, probs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn word_length(&self) -> usize {
        self.len
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probs
    }

    pub fn get(&self, w: &Word) -> &Rational {
        &self.probs[w.rank()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, &Rational)> {
        all_words(self.n, self.len).zip(&self.probs)
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }

    pub fn rows(&self) -> Vec<ProbabilityRow> {
        self.iter()
            .map(|(w, p)| ProbabilityRow {
                word: w.to_string(),
                prob: format_rational(p),
            })
            .collect()
    }

    /// Stationary probability that every `(site, letter)` of the query holds.
    pub fn correlation(&self, query: &CorrelationQuery) -> Result<Rational> {
        query.check(self.n, self.len)?;
        Ok(self
            .iter()
            .filter(|(w, _)| query.matches(w))
            .map(|(_, p)| p)
            .sum())
    }
}

/// The closed-form stationary vector `μ̄` over all words of length `L`.
pub fn stationary_vector(rates: &RateSystem) -> StationaryVector {
    let n = rates.alphabet_size();
    let len = rates.word_length();
    let mut probs = Vec::with_capacity(rates.state_count());
    // Depth-first over prefixes in lexicographic order, carrying μ̄ of the prefix.
    let mut stack: Vec<(Word, Rational)> = (1..=n)
        .rev()
        .map(|a| {
            let w = Word::new(n, vec![a]).expect("letter in range");
            let p = mu(&w, rates).expect("prefix within length");
            (w, p)
        })
        .collect();
    while let Some((w, p)) = stack.pop() {
        if w.len() == len {
            probs.push(p);
            continue;
        }
        for a in (1..=n).rev() {
            let next = w.append(a);
            let q = &p * mu(&next, rates).expect("prefix within length");
            stack.push((next, q));
        }
    }
    StationaryVector { n, len, probs }
}

/// A set of `(site, letter)` occupation constraints with strictly increasing sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationQuery {
    sites: Vec<(usize, usize)>,
}

impl CorrelationQuery {
    pub fn new(sites: Vec<(usize, usize)>) -> Result<Self> {
        if sites.iter().any(|&(i, a)| i == 0 || a == 0) {
            return Err(Error::InvalidQuery("sites and letters are 1-based".into()));
        }
        if sites.windows(2).any(|p| p[0].0 >= p[1].0) {
            return Err(Error::InvalidQuery(
                "site indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { sites })
    }

    pub fn empty() -> Self {
        Self { sites: Vec::new() }
    }

    /// The query `η^{a_k, L-k+1} ... η^{a_1, L}` fixing the last `|suffix|` sites.
    pub fn last_sites(suffix: &Word, len: usize) -> Result<Self> {
        if suffix.len() > len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: suffix.len(),
            });
        }
        let offset = len - suffix.len();
        Self::new(
            suffix
                .letters()
                .iter()
                .enumerate()
                .map(|(i, &a)| (offset + i + 1, a))
                .collect(),
        )
    }

    pub fn sites(&self) -> &[(usize, usize)] {
        &self.sites
    }

    fn check(&self, n: usize, len: usize) -> Result<()> {
        for &(i, a) in &self.sites {
            if i > len {
                return Err(Error::InvalidQuery(format!("site {i} beyond length {len}")));
            }
            if a > n {
                return Err(Error::LetterOutOfRange { letter: a, n });
            }
        }
        Ok(())
    }

    pub fn matches(&self, w: &Word) -> bool {
        self.sites.iter().all(|&(i, a)| w.letters()[i - 1] == a)
    }
}

/// `⟨Π η^{a,i}⟩` by exact enumeration over all words.
pub fn correlation(query: &CorrelationQuery, rates: &RateSystem) -> Result<Rational> {
    stationary_vector(rates).correlation(query)
}

/// Joint law of the last `|suffix|` sites, `μ̄(suffix)`.
pub fn last_k_correlation(suffix: &Word, rates: &RateSystem) -> Result<Rational> {
    mu_bar(suffix, rates)
}

/// Candidate partition functions together with the denominator oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFunction {
    /// `β_{1,1} Π_{m=2}^{L} Π_a β_{a,m}`.
    pub product_formula: Rational,
    /// `β_{1,1} Π_{m=2}^{L} Π_a β_{a,m}^{⌊L/m⌋}`, the exact common denominator.
    pub common_denominator: Rational,
    /// Oracle value: least common denominator of the stationary probabilities,
    /// scaled to the common-denominator normalization.
    pub lcm_oracle: Rational,
    /// Whether the oracle polynomial equals the product formula along the probe line.
    pub product_formula_matches: bool,
    /// Whether the oracle polynomial equals the common denominator along the probe line.
    pub common_denominator_matches: bool,
}

/// Exponent of `β_{a,m}` (`m >= 2`) in the common denominator of words of
/// length `L`. A run `a^{m-1}` after a different letter (or `a^m` at the
/// start) contributes one factor and uses `m` sites, hence `⌊L/m⌋`.
pub fn denominator_exponent(m: usize, len: usize) -> usize {
    debug_assert!(m >= 2);
    len / m
}

fn partition_product(
    rates: &RateSystem,
    exponent: impl Fn(usize) -> usize,
) -> Result<Rational> {
    let mut z = rates.beta_sum(1, 1)?;
    for m in 2..=rates.word_length() {
        for a in 1..=rates.alphabet_size() {
            z *= crate::rational::pow(&rates.beta_sum(a, m)?, exponent(m));
        }
    }
    Ok(z)
}

/// Seed for the probe direction used by [`partition_function`].
pub const PARTITION_PROBE_SEED: u64 = 0x00de_b201_1a1e;

pub fn partition_function(rates: &RateSystem) -> Result<PartitionFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(PARTITION_PROBE_SEED);
    partition_function_with_probe(rates, &mut rng)
}

/// Compares both product formulas against the least common denominator of
/// the stationary probabilities.
///
/// Denominators of numeric probabilities collapse under accidental
/// cancellation, so the oracle works along a random line
/// `x_{a,k}(t) = x_{a,k} + t d_{a,k}` through the rate point: each
/// probability becomes a rational function of `t`, reduced by polynomial
/// gcd, and the monic lcm of the reduced denominators is compared against
/// the formulas evaluated along the same line.
pub fn partition_function_with_probe<R: Rng + ?Sized>(
    rates: &RateSystem,
    rng: &mut R,
) -> Result<PartitionFunction> {
    let n = rates.alphabet_size();
    let len = rates.word_length();
    let direction: Vec<Rational> = (0..n * len).map(|_| int(rng.gen_range(1..=997))).collect();
    let line = |a: usize, k: usize| {
        Polynomial::linear(
            rates.rate(a, k).clone(),
            direction[(a - 1) * len + (k - 1)].clone(),
        )
    };
    let beta_line = |w: &Word| {
        let (a, k) = crate::words::beta_index(w);
        line(a, k.min(len))
    };

    let mut lcm = Polynomial::one();
    for w in rates.words() {
        let mut numer = Polynomial::one();
        let mut denom = Polynomial::one();
        for i in 1..=len {
            let prefix = w.prefix(i);
            numer = &numer * &beta_line(&prefix);
            let outflow: Polynomial = (1..=n)
                .map(|a| beta_line(&prefix.shift_append(a)))
                .fold(Polynomial::zero(), |acc, p| &acc + &p);
            denom = &denom * &outflow;
        }
        let g = numer.gcd(&denom);
        let (reduced, rem) = denom.div_rem(&g);
        debug_assert!(rem.is_zero());
        lcm = lcm.lcm(&reduced);
    }

    let beta_sum_line = |a: usize, m: usize| {
        let mut p = line(a, m);
        for b in (1..=n).filter(|&b| b != a) {
            p = &p + &line(b, 1);
        }
        p
    };
    let formula_line = |exponent: &dyn Fn(usize) -> usize| {
        let mut z = beta_sum_line(1, 1);
        for m in 2..=len {
            for a in 1..=n {
                z = &z * &beta_sum_line(a, m).pow(exponent(m));
            }
        }
        z
    };
    let product_line = formula_line(&|_| 1);
    let common_line = formula_line(&|m| denominator_exponent(m, len));

    let lcm_oracle = lcm.eval(&Rational::zero()) * common_line.leading();
    Ok(PartitionFunction {
        product_formula: partition_product(rates, |_| 1)?,
        common_denominator: partition_product(rates, |m| denominator_exponent(m, len))?,
        lcm_oracle,
        product_formula_matches: product_line.monic() == lcm,
        common_denominator_matches: common_line.monic() == lcm,
    })
}
