//! Words over the alphabet `{1..n}`, block factorization, the shift operator
//! and rate systems.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, parse_rational, Rational};

/// A word `u_1 u_2 ... u_L` over `{1..n}`.
///
/// Ordering is lexicographic on the letters, which is the canonical state
/// order for every matrix and vector in this crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<usize>,
    n: usize,
}

/// A maximal run `letter^run_length` inside a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub letter: usize,
    pub run_length: usize,
}

impl Block {
    pub fn new(letter: usize, run_length: usize) -> Self {
        Self { letter, run_length }
    }
}

impl Word {
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&letter) = letters.iter().find(|&&a| a == 0 || a > n) {
            return Err(Error::LetterOutOfRange { letter, n });
        }
        Ok(Self { letters, n })
    }

    /// Parses a digit string (`"1122"`) or, for any `n`, a comma-separated
    /// list (`"1,10,3"`).
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let letters: Vec<usize> = if s.contains(',') || n > 9 {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Malformed(format!("bad word {s:?}")))?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Malformed(format!("bad word {s:?}")))?
        };
        Self::new(n, letters)
    }

    /// The word with lexicographic index `rank` among all words of length `len`.
    pub fn from_rank(n: usize, len: usize, mut rank: usize) -> Self {
        let mut letters = vec![0; len];
        for slot in letters.iter_mut().rev() {
            *slot = rank % n + 1;
            rank /= n;
        }
        Self { letters, n }
    }

    pub fn rank(&self) -> usize {
        self.letters.iter().fold(0, |acc, &a| acc * self.n + (a - 1))
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> usize {
        self.letters[0]
    }

    pub fn last(&self) -> usize {
        self.letters[self.letters.len() - 1]
    }

    /// The prefix `u_1 ... u_len`.
    pub fn prefix(&self, len: usize) -> Word {
        Word {
            letters: self.letters[..len].to_vec(),
            n: self.n,
        }
    }

    /// The suffix of length `len`.
    pub fn suffix(&self, len: usize) -> Word {
        Word {
            letters: self.letters[self.len() - len..].to_vec(),
            n: self.n,
        }
    }

    /// `a.u`: the letter `a` prepended.
    pub fn prepend(&self, a: usize) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(a);
        letters.extend_from_slice(&self.letters);
        Word { letters, n: self.n }
    }

    /// `u.a`: the letter `a` appended.
    pub fn append(&self, a: usize) -> Word {
        let mut letters = self.letters.clone();
        letters.push(a);
        Word { letters, n: self.n }
    }

    /// Concatenation `u.v`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, n: self.n }
    }

    pub fn reversed(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { letters, n: self.n }
    }

    /// The shift `t(u).a`: drops the first letter and appends `a`.
    pub fn shift_append(&self, a: usize) -> Word {
        let mut letters = Vec::with_capacity(self.len());
        letters.extend_from_slice(&self.letters[1..]);
        letters.push(a);
        Word { letters, n: self.n }
    }

    /// Canonical factorization into maximal blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::new();
        for &a in &self.letters {
            match out.last_mut() {
                Some(b) if b.letter == a => b.run_length += 1,
                _ => out.push(Block::new(a, 1)),
            }
        }
        out
    }

    /// Number of blocks, `γ(u)`.
    pub fn block_count(&self) -> usize {
        1 + self.letters.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// The final maximal block as `(letter, run length)`.
    pub fn last_block(&self) -> Block {
        let a = self.last();
        let k = self.letters.iter().rev().take_while(|&&b| b == a).count();
        Block::new(a, k)
    }

    pub fn is_block(&self) -> bool {
        self.letters.iter().all(|&b| b == self.letters[0])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 9 {
            for a in &self.letters {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|a| a.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

pub fn block_factorize(w: &Word) -> Vec<Block> {
    w.blocks()
}

/// `(a, k)` for the final block `a^k` of `w`, so that `β(w) = x_{a,k}`.
pub fn beta_index(w: &Word) -> (usize, usize) {
    let b = w.last_block();
    (b.letter, b.run_length)
}

pub fn shift_append(w: &Word, a: usize) -> Result<Word> {
    if a == 0 || a > w.alphabet_size() {
        return Err(Error::LetterOutOfRange {
            letter: a,
            n: w.alphabet_size(),
        });
    }
    Ok(w.shift_append(a))
}

/// All words of length `len` in lexicographic order.
pub fn all_words(n: usize, len: usize) -> impl Iterator<Item = Word> {
    let count = n.pow(len as u32);
    (0..count).map(move |r| Word::from_rank(n, len, r))
}

/// The rates `x_{a,k}` for letters `a in 1..=n` and depths `k in 1..=L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateSystem {
    n: usize,
    len: usize,
    rates: Vec<Rational>,
}

impl RateSystem {
    /// Builds a system from a rate function, validating positivity.
    pub fn new(n: usize, len: usize, rate: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        if len < 1 {
            return Err(Error::EmptyWord);
        }
        let mut rates = Vec::with_capacity(n * len);
        for a in 1..=n {
            for k in 1..=len {
                let value = rate(a, k);
                if !rational::is_positive(&value) {
                    return Err(Error::NonPositiveRate {
                        letter: a,
                        depth: k,
                        value: format_rational(&value),
                    });
                }
                rates.push(value);
            }
        }
        Ok(Self { n, len, rates })
    }

    /// Builds a system from explicit `(a, k) -> x` entries; every entry must be present.
    pub fn from_entries(
        n: usize,
        len: usize,
        entries: &BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self> {
        for &(a, k) in entries.keys() {
            if a == 0 || a > n {
                return Err(Error::LetterOutOfRange { letter: a, n });
            }
            if k == 0 || k > len {
                return Err(Error::DepthOutOfRange { depth: k, max: len });
            }
        }
        for a in 1..=n {
            for k in 1..=len {
                if !entries.contains_key(&(a, k)) {
                    return Err(Error::MissingRate {
                        letter: a,
                        depth: k,
                    });
                }
            }
        }
        Self::new(n, len, |a, k| entries[&(a, k)].clone())
    }

    /// Independent random positive rational rates `p/q`, `p <= 30`, `q <= 7`.
    pub fn random<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Result<Self> {
        let mut values = Vec::with_capacity(n * len);
        for _ in 0..n * len {
            values.push(rational::random_positive(rng, 30, 7));
        }
        Self::new(n, len, |a, k| values[(a - 1) * len + (k - 1)].clone())
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn word_length(&self) -> usize {
        self.len
    }

    pub fn state_count(&self) -> usize {
        self.n.pow(self.len as u32)
    }

    /// `x_{a,k}`.
    pub fn rate(&self, a: usize, k: usize) -> &Rational {
        assert!((1..=self.n).contains(&a) && (1..=self.len).contains(&k));
        &self.rates[(a - 1) * self.len + (k - 1)]
    }

    /// `β(w)`: the rate of the final block, with depth capped at `L`.
    pub fn beta(&self, w: &Word) -> &Rational {
        let (a, k) = beta_index(w);
        self.rate(a, k.min(self.len))
    }

    /// `β_{a,m} = x_{a,m} + Σ_{b≠a} x_{b,1}`.
    pub fn beta_sum(&self, a: usize, m: usize) -> Result<Rational> {
        if a == 0 || a > self.n {
            return Err(Error::LetterOutOfRange {
                letter: a,
                n: self.n,
            });
        }
        if m == 0 || m > self.len {
            return Err(Error::DepthOutOfRange {
                depth: m,
                max: self.len,
            });
        }
        let mut sum = self.rate(a, m).clone();
        for b in (1..=self.n).filter(|&b| b != a) {
            sum += self.rate(b, 1);
        }
        Ok(sum)
    }

    /// The same rates restricted to depths `1..=len`.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len {
            return Err(Error::DepthOutOfRange {
                depth: len,
                max: self.len,
            });
        }
        Self::new(self.n, len, |a, k| self.rate(a, k).clone())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.alphabet_size() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "word over {} letters, rate system over {}",
                w.alphabet_size(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn words(&self) -> impl Iterator<Item = Word> {
        all_words(self.n, self.len)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: RateFile =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        file.into_rate_system()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_rate_file(&self) -> RateFile {
        let mut rates = BTreeMap::new();
        for a in 1..=self.n {
            for k in 1..=self.len {
                rates.insert(
                    format!("{a},{k}"),
                    serde_json::Value::String(format_rational(self.rate(a, k))),
                );
            }
        }
        RateFile {
            n: self.n,
            len: self.len,
            rates,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_rate_file()).expect("rate file serializes")
    }
}

/// On-disk rate file: `{"n": 2, "L": 2, "rates": {"1,1": "1", "1,2": "2/3", ...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateFile {
    pub n: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub rates: BTreeMap<String, serde_json::Value>,
}

impl RateFile {
    pub fn into_rate_system(self) -> Result<RateSystem> {
        let mut entries = BTreeMap::new();
        for (key, value) in &self.rates {
            let (a, k) = key
                .split_once(',')
                .and_then(|(a, k)| Some((a.trim().parse().ok()?, k.trim().parse().ok()?)))
                .ok_or_else(|| Error::Malformed(format!("bad rate key {key:?}")))?;
            let text = match value {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(num) => num.to_string(),
                other => return Err(Error::Malformed(format!("bad rate value {other}"))),
            };
            let x = parse_rational(&text)?;
            if x <= Rational::zero() {
                return Err(Error::NonPositiveRate {
                    letter: a,
                    depth: k,
                    value: format_rational(&x),
                });
            }
            if entries.insert((a, k), x).is_some() {
                return Err(Error::Malformed(format!("duplicate rate key {key:?}")));
            }
        }
        RateSystem::from_entries(self.n, self.len, &entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn r0() -> RateSystem {
        let v = [[1, 2], [3, 5]];
        RateSystem::new(2, 2, |a, k| int(v[a - 1][k - 1])).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    #[test]
    fn factorizes_runs() {
        assert_eq!(
            block_factorize(&w("11221")),
            vec![Block::new(1, 2), Block::new(2, 2), Block::new(1, 1)]
        );
        assert_eq!(block_factorize(&w("2")), vec![Block::new(2, 1)]);
        assert_eq!(
            block_factorize(&w("1122")),
            vec![Block::new(1, 2), Block::new(2, 2)]
        );
        assert_eq!(w("11221").block_count(), 3);
    }

    #[test]
    fn beta_index_is_final_block() {
        assert_eq!(beta_index(&w("1122")), (2, 2));
        assert_eq!(beta_index(&w("222")), (2, 3));
        assert_eq!(beta_index(&w("21")), (1, 1));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_append(&w("122"), 1).unwrap(), w("221"));
        assert_eq!(shift_append(&w("22"), 2).unwrap(), w("22"));
        assert_eq!(shift_append(&w("12"), 2).unwrap(), w("22"));
        assert!(shift_append(&w("12"), 3).is_err());
    }

    #[test]
    fn beta_sum_examples() {
        let r = r0();
        assert_eq!(r.beta_sum(1, 1).unwrap(), int(4));
        assert_eq!(r.beta_sum(1, 2).unwrap(), int(5));
        assert_eq!(r.beta_sum(2, 2).unwrap(), int(6));
        assert_eq!(r.beta_sum(2, 1).unwrap(), int(4));
        assert!(matches!(
            r.beta_sum(1, 3),
            Err(Error::DepthOutOfRange { depth: 3, max: 2 })
        ));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(Word::new(1, vec![1]), Err(Error::AlphabetTooSmall(1)));
        assert_eq!(Word::new(2, vec![]), Err(Error::EmptyWord));
        assert!(Word::new(2, vec![3]).is_err());
        assert!(RateSystem::new(1, 2, |_, _| int(1)).is_err());
        assert!(RateSystem::new(2, 0, |_, _| int(1)).is_err());
        assert!(matches!(
            RateSystem::new(2, 1, |a, _| int(a as i64 - 1)),
            Err(Error::NonPositiveRate { letter: 1, depth: 1, .. })
        ));
    }

    #[test]
    fn rank_round_trip_and_order() {
        let words: Vec<Word> = all_words(3, 3).collect();
        assert_eq!(words.len(), 27);
        for (i, word) in words.iter().enumerate() {
            assert_eq!(word.rank(), i);
        }
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn large_alphabet_uses_commas() {
        let word = Word::new(12, vec![1, 12, 3]).unwrap();
        assert_eq!(word.to_string(), "1,12,3");
        assert_eq!(Word::parse(12, "1,12,3").unwrap(), word);
    }

    #[test]
    fn rate_file_round_trip() {
        let r = r0();
        let back = RateSystem::from_json_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
        let decimal = r#"{"n":2,"L":1,"rates":{"1,1":"0.25","2,1":"3/2"}}"#;
        let s = RateSystem::from_json_str(decimal).unwrap();
        assert_eq!(s.rate(1, 1), &crate::rational::ratio(1, 4));
        assert_eq!(s.rate(2, 1), &crate::rational::ratio(3, 2));
    }

    #[test]
    fn rate_file_reports_missing_entry() {
        let text = r#"{"n":2,"L":2,"rates":{"1,1":"1","1,2":"2","2,1":"3"}}"#;
        assert_eq!(
            RateSystem::from_json_str(text),
            Err(Error::MissingRate {
                letter: 2,
                depth: 2
            })
        );
        let zero = r#"{"n":2,"L":1,"rates":{"1,1":"0","2,1":"3"}}"#;
        assert!(matches!(
            RateSystem::from_json_str(zero),
            Err(Error::NonPositiveRate { .. })
        ));
        let stray = r#"{"n":2,"L":1,"rates":{"1,1":"1","2,1":"3","3,1":"1"}}"#;
        assert!(RateSystem::from_json_str(stray).is_err());
    }
}
