//! Gillespie simulation of the de Bruijn process.
//!
//! Rates are converted to `f64` once, here and nowhere else. Self-loops
//! (`a^L` with `a` appended) are left out: they cancel in the generator.
//! Occupation is weighted by dwell time.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::stationary::StationaryVector;
use crate::words::{all_words, RateSystem, Word};

/// Counter-based generator for trajectory `stream` of experiment `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    // 1 - U lies in (0, 1], so the logarithm is finite.
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

/// Non-self jump targets and rates for every state, indexed by rank.
#[derive(Clone, Debug)]
pub struct JumpTable {
    n: usize,
    len: usize,
    targets: Vec<Vec<(usize, f64)>>,
    totals: Vec<f64>,
}

impl JumpTable {
    pub fn new(rates: &RateSystem) -> Self {
        let mut targets = Vec::with_capacity(rates.state_count());
        let mut totals = Vec::with_capacity(rates.state_count());
        for u in rates.words() {
            let out: Vec<(usize, f64)> = (1..=rates.alphabet_size())
                .map(|a| u.shift_append(a))
                .filter(|v| *v != u)
                .map(|v| (v.rank(), to_f64(rates.beta(&v))))
                .collect();
            totals.push(out.iter().map(|(_, r)| r).sum());
            targets.push(out);
        }
        Self {
            n: rates.alphabet_size(),
            len: rates.word_length(),
            targets,
            totals,
        }
    }

    /// Targets of state `rank` with their rates.
    pub fn targets(&self, rank: usize) -> &[(usize, f64)] {
        &self.targets[rank]
    }

    pub fn exit_rate(&self, rank: usize) -> f64 {
        self.totals[rank]
    }

    /// One event from state `rank`: `(dwell, next rank)`.
    pub fn step<R: Rng + ?Sized>(&self, rank: usize, rng: &mut R) -> (f64, usize) {
        let total = self.totals[rank];
        let dwell = exponential(rng, total);
        let mut pick = rng.gen::<f64>() * total;
        let targets = &self.targets[rank];
        for &(next, rate) in targets {
            if pick < rate {
                return (dwell, next);
            }
            pick -= rate;
        }
        (dwell, targets[targets.len() - 1].0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub dwell: f64,
    pub next: Word,
}

/// A single Gillespie event from `w`.
pub fn gillespie_step<R: Rng + ?Sized>(w: &Word, rates: &RateSystem, rng: &mut R) -> Result<Step> {
    rates.check_word(w)?;
    if w.len() != rates.word_length() {
        return Err(Error::LengthMismatch {
            expected: rates.word_length(),
            got: w.len(),
        });
    }
    let targets: Vec<(Word, f64)> = (1..=rates.alphabet_size())
        .map(|a| w.shift_append(a))
        .filter(|v| v != w)
        .map(|v| {
            let r = to_f64(rates.beta(&v));
            (v, r)
        })
        .collect();
    let total: f64 = targets.iter().map(|(_, r)| r).sum();
    let dwell = exponential(rng, total);
    let mut pick = rng.gen::<f64>() * total;
    for (v, r) in &targets {
        if pick < *r {
            return Ok(Step {
                dwell,
                next: v.clone(),
            });
        }
        pick -= r;
    }
    Ok(Step {
        dwell,
        next: targets[targets.len() - 1].0.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: Word,
    /// `(dwell time in the previous state, state entered)`.
    pub jumps: Vec<(f64, Word)>,
    pub total_time: f64,
}

/// Records every event up to `horizon`, starting from the first word.
pub fn simulate_trajectory(rates: &RateSystem, seed: u64, horizon: f64) -> Result<Trajectory> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidHorizon(format!("horizon {horizon} must be positive")));
    }
    let table = JumpTable::new(rates);
    let mut rng = stream_rng(seed, 0);
    let n = rates.alphabet_size();
    let len = rates.word_length();
    let mut state = 0;
    let mut t = 0.0;
    let mut jumps = Vec::new();
    loop {
        let (dwell, next) = table.step(state, &mut rng);
        if t + dwell > horizon {
            break;
        }
        t += dwell;
        jumps.push((dwell, Word::from_rank(n, len, next)));
        state = next;
    }
    Ok(Trajectory {
        initial: Word::from_rank(n, len, 0),
        jumps,
        total_time: horizon,
    })
}

/// Occupation time per state over an observation window.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    n: usize,
    len: usize,
    occupation: Vec<f64>,
    total: f64,
}

impl EmpiricalMeasure {
    pub fn empty(n: usize, len: usize) -> Self {
        Self {
            n,
            len,
            occupation: vec![0.0; n.pow(len as u32)],
            total: 0.0,
        }
    }

    pub fn occupation(&self) -> &[f64] {
        &self.occupation
    }

    pub fn total_time(&self) -> f64 {
        self.total
    }

    fn add(&mut self, rank: usize, time: f64) {
        self.occupation[rank] += time;
        self.total += time;
    }

    /// Adds occupation times of an independent run.
    pub fn merge(&mut self, other: &EmpiricalMeasure) -> Result<()> {
        if self.occupation.len() != other.occupation.len() {
            return Err(Error::SupportMismatch);
        }
        for (a, b) in self.occupation.iter_mut().zip(&other.occupation) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.occupation.iter().map(|t| t / self.total).collect()
    }

    pub fn to_map(&self) -> BTreeMap<Word, f64> {
        all_words(self.n, self.len).zip(self.probabilities()).collect()
    }
}

/// Time-weighted occupation over `[burn_in, total_time]` for trajectory
/// stream `stream`, starting from the first word.
pub fn simulate_measure_stream(
    rates: &RateSystem,
    seed: u64,
    stream: u64,
    total_time: f64,
    burn_in: f64,
) -> Result<EmpiricalMeasure> {
    if !(burn_in >= 0.0) || !(total_time > burn_in) || !total_time.is_finite() {
        return Err(Error::InvalidHorizon(format!(
            "need total_time > burn_in >= 0, got total_time={total_time}, burn_in={burn_in}"
        )));
    }
    let table = JumpTable::new(rates);
    let mut rng = stream_rng(seed, stream);
    let mut measure = EmpiricalMeasure::empty(table.n, table.len);
    let mut state = 0;
    let mut t = 0.0;
    while t < total_time {
        let (dwell, next) = table.step(state, &mut rng);
        let start = t.max(burn_in);
        let end = (t + dwell).min(total_time);
        if end > start {
            measure.add(state, end - start);
        }
        t += dwell;
        state = next;
    }
    Ok(measure)
}

pub fn simulate_measure(
    rates: &RateSystem,
    seed: u64,
    total_time: f64,
    burn_in: f64,
) -> Result<EmpiricalMeasure> {
    simulate_measure_stream(rates, seed, 0, total_time, burn_in)
}

/// Runs `trajectories` independent streams concurrently and merges them.
pub fn simulate_many(
    rates: &RateSystem,
    seed: u64,
    total_time: f64,
    burn_in: f64,
    trajectories: usize,
) -> Result<EmpiricalMeasure> {
    if trajectories == 0 {
        return Err(Error::InvalidHorizon("need at least one trajectory".into()));
    }
    let runs: Vec<Result<EmpiricalMeasure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..trajectories as u64)
            .map(|k| scope.spawn(move || simulate_measure_stream(rates, seed, k, total_time, burn_in)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    let mut iter = runs.into_iter();
    let mut merged = iter.next().expect("at least one run")?;
    for run in iter {
        merged.merge(&run?)?;
    }
    Ok(merged)
}

/// `½ Σ |p − q|` over a shared support.
pub fn total_variation(p: &BTreeMap<Word, f64>, q: &BTreeMap<Word, f64>) -> Result<f64> {
    if p.len() != q.len() || p.keys().zip(q.keys()).any(|(a, b)| a != b) {
        return Err(Error::SupportMismatch);
    }
    Ok(0.5 * p.values().zip(q.values()).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Exact probabilities as floats, keyed by word.
pub fn exact_map(v: &StationaryVector) -> BTreeMap<Word, f64> {
    v.iter().map(|(w, p)| (w, to_f64(p))).collect()
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
    fn pure_block_has_single_exit() {
        let r = r0();
        let mut rng = stream_rng(1, 0);
        for _ in 0..50 {
            assert_eq!(gillespie_step(&w("11"), &r, &mut rng).unwrap().next, w("12"));
        }
        let table = JumpTable::new(&r);
        assert_eq!(table.targets(0), &[(1, 3.0)]);
        assert_eq!(table.exit_rate(1), 6.0);
    }

    #[test]
    fn same_seed_same_step() {
        let r = r0();
        let a = gillespie_step(&w("12"), &r, &mut stream_rng(9, 3)).unwrap();
        let b = gillespie_step(&w("12"), &r, &mut stream_rng(9, 3)).unwrap();
        assert_eq!(a, b);
        assert!(a.dwell > 0.0);
    }

    #[test]
    fn horizon_validation() {
        let r = r0();
        assert!(simulate_measure(&r, 1, 10.0, 10.0).is_err());
        assert!(simulate_measure(&r, 1, 10.0, -1.0).is_err());
        assert!(simulate_measure(&r, 1, f64::NAN, 0.0).is_err());
        assert!(simulate_trajectory(&r, 1, 0.0).is_err());
    }

    #[test]
    fn tv_examples() {
        let a = w("1");
        let b = w("2");
        let p: BTreeMap<Word, f64> = [(a.clone(), 0.5), (b.clone(), 0.5)].into();
        let q: BTreeMap<Word, f64> = [(a.clone(), 1.0), (b.clone(), 0.0)].into();
        let r: BTreeMap<Word, f64> = [(a.clone(), 0.0), (b.clone(), 1.0)].into();
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&q, &r).unwrap(), 1.0);
        assert_eq!(total_variation(&p, &q).unwrap(), 0.5);
        let s: BTreeMap<Word, f64> = [(a, 1.0)].into();
        assert_eq!(total_variation(&p, &s), Err(Error::SupportMismatch));
    }
}
