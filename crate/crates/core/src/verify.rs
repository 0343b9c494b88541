//! Grid verification: every closed form against its exact oracle.
//!
//! Rate-point checks run for each `(n, L, point)` with `2 <= n <= n_max`,
//! `1 <= L <= L_max`. Specialization checks (Bernoulli, skin-deep, the
//! transfer matrix, `K_n`, block characteristic polynomials) run once per
//! `(n, L)` with the point label `"special"`.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{blockm_charpoly_check, kn, kn_inverse, null_space_vector, RationalMatrix};
use crate::matrices::{b_sum, delta_matrix, kirchhoff, transition_matrix};
use crate::rational::{format_rational, int, random_positive, random_signed, ratio, Rational};
use crate::spectrum::{eigenvalue_multiset, spectrum_verify};
use crate::specials::{
    alpha_poly, bernoulli_rates, skin_deep_mu_bar, skin_deep_rates, transfer_matrix_power,
    two_point, BernoulliSpec, SkinDeepSpec,
};
use crate::stationary::{
    mu_bar, partition_function, rho_bar, stationary_vector, CorrelationQuery,
    StationaryVector,
};
use crate::words::{all_words, RateSystem, Word};

/// Names of all checks, in report order.
pub const CHECKS: &[&str] = &[
    "first_site_marginal",
    "block_factorization",
    "balance_equation",
    "kernel_agreement",
    "normalization",
    "partition_function",
    "last_sites_marginal",
    "kirchhoff_blocks",
    "spectrum",
    "charpoly_recursion",
    "block_charpoly",
    "bernoulli_product",
    "skin_deep_density",
    "skin_deep_closed_form",
    "skin_deep_invariance",
    "skin_deep_two_point",
    "transfer_matrix_alpha",
    "kn_inverse",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridConfig {
    pub n_max: usize,
    pub len_max: usize,
    /// Random rate points per `(n, L)`.
    pub points: usize,
    pub seed: u64,
    /// Largest `n^L` allowed on the grid.
    pub cap: usize,
    /// Adds rate points with coincident `β` values.
    pub degenerate: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_max: 3,
            len_max: 4,
            points: 3,
            seed: 20_240_601,
            cap: crate::spectrum::DEFAULT_ORACLE_CAP,
            degenerate: true,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::AlphabetTooSmall(self.n_max));
        }
        if self.len_max == 0 {
            return Err(Error::EmptyWord);
        }
        let states = (self.n_max as u128).checked_pow(self.len_max as u32);
        match states {
            Some(s) if s <= self.cap as u128 => Ok(()),
            _ => Err(Error::CapExceeded {
                states: states.map_or(usize::MAX, |s| s.min(usize::MAX as u128) as usize),
                cap: self.cap,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub n: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub point: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub records: Vec<CheckRecord>,
    /// Check names exercised at least once.
    pub coverage: Vec<String>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

struct Recorder {
    n: usize,
    len: usize,
    point: String,
    out: Vec<CheckRecord>,
}

impl Recorder {
    fn new(n: usize, len: usize, point: impl Into<String>) -> Self {
        Self {
            n,
            len,
            point: point.into(),
            out: Vec::new(),
        }
    }

    fn record(&mut self, check: &str, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckRecord {
            check: check.into(),
            n: self.n,
            len: self.len,
            point: self.point.clone(),
            passed,
            detail: detail.into(),
        });
    }

    fn record_result(&mut self, check: &str, outcome: Result<(bool, String)>) {
        match outcome {
            Ok((passed, detail)) => self.record(check, passed, detail),
            Err(e) => self.record(check, false, format!("error: {e}")),
        }
    }
}

/// `x_{a,1} = 1`, `x_{a,m} = m`: `β_{a,m}` is independent of `a`.
pub fn tied_rates(n: usize, len: usize) -> Result<RateSystem> {
    RateSystem::new(n, len, |_, k| int(k as i64))
}

/// All rates one: every `β_{a,m}` equals `n`.
pub fn uniform_rates(n: usize, len: usize) -> Result<RateSystem> {
    RateSystem::new(n, len, |_, _| Rational::one())
}

fn grid_rng(seed: u64, n: usize, len: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((n * 64 + len) as u64);
    rng
}

/// Runs every check over the grid. Independent `(n, L)` cells run concurrently.
pub fn run_grid(cfg: &GridConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = (2..=cfg.n_max)
        .flat_map(|n| (1..=cfg.len_max).map(move |len| (n, len)))
        .collect();
    let per_cell: Vec<Result<Vec<CheckRecord>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(n, len)| scope.spawn(move || run_cell(cfg, n, len)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    let mut records = Vec::new();
    for cell in per_cell {
        records.extend(cell?);
    }
    let coverage = CHECKS
        .iter()
        .filter(|c| records.iter().any(|r| r.check == **c))
        .map(|c| c.to_string())
        .collect();
    let all_passed = records.iter().all(|r| r.passed);
    Ok(VerifyReport {
        records,
        coverage,
        all_passed,
    })
}

fn run_cell(cfg: &GridConfig, n: usize, len: usize) -> Result<Vec<CheckRecord>> {
    let mut rng = grid_rng(cfg.seed, n, len);
    let mut points: Vec<(String, RateSystem)> = Vec::new();
    for i in 0..cfg.points {
        points.push((format!("random-{i}"), RateSystem::random(n, len, &mut rng)?));
    }
    if cfg.degenerate {
        points.push(("tied".into(), tied_rates(n, len)?));
        points.push(("uniform".into(), uniform_rates(n, len)?));
    }
    let mut out = Vec::new();
    for (label, rates) in &points {
        let mut rec = Recorder::new(n, len, label.clone());
        check_point(&mut rec, rates, cfg.cap);
        out.extend(rec.out);
    }
    let mut rec = Recorder::new(n, len, "special");
    check_specials(&mut rec, n, len, &mut rng);
    out.extend(rec.out);
    Ok(out)
}

/// All rate-point checks for one rate system.
pub fn check_point_records(rates: &RateSystem, cap: usize, point: &str) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(rates.alphabet_size(), rates.word_length(), point);
    check_point(&mut rec, rates, cap);
    rec.out
}

fn check_point(rec: &mut Recorder, rates: &RateSystem, cap: usize) {
    let v = stationary_vector(rates);
    let len = rates.word_length();
    let n = rates.alphabet_size();

    if len >= 2 {
        rec.record_result("first_site_marginal", first_site_marginal(rates, &v));
    }
    rec.record_result("block_factorization", block_factorization(rates, &v));
    rec.record_result("balance_equation", balance_equation(rates, &v));
    rec.record_result("kernel_agreement", kernel_agreement(rates, &v));
    let total = v.total();
    rec.record("normalization", total.is_one(), format!("sum = {}", format_rational(&total)));
    rec.record_result(
        "partition_function",
        partition_function(rates).map(|z| {
            (
                z.common_denominator_matches,
                format!(
                    "common denominator {} ({}); product with upper limit L {} ({}); oracle {}",
                    format_rational(&z.common_denominator),
                    verdict(z.common_denominator_matches),
                    format_rational(&z.product_formula),
                    verdict(z.product_formula_matches),
                    format_rational(&z.lcm_oracle),
                ),
            )
        }),
    );
    rec.record_result("last_sites_marginal", last_sites_marginal(rates, &v));
    rec.record_result("kirchhoff_blocks", kirchhoff_blocks(rates));
    if rates.state_count() <= cap {
        match spectrum_verify(rates, cap) {
            Ok(report) => {
                rec.record(
                    "spectrum",
                    report.matches,
                    format!(
                        "{} distinct eigenvalues, multiplicities {} of {}",
                        report.claimed.distinct(),
                        report.degree_check.0,
                        report.degree_check.1
                    ),
                );
                if let Some(holds) = report.recursion_holds {
                    rec.record("charpoly_recursion", holds, "exact division by the L-1 polynomial");
                }
            }
            Err(e) => rec.record("spectrum", false, format!("error: {e}")),
        }
    } else {
        let claimed = eigenvalue_multiset(rates);
        rec.record(
            "spectrum",
            claimed.total_multiplicity() == rates.state_count(),
            format!("oracle skipped above cap {cap}; degree bookkeeping only (n={n})"),
        );
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "matches"
    } else {
        "differs"
    }
}

fn first_site_marginal(rates: &RateSystem, v: &StationaryVector) -> Result<(bool, String)> {
    let n = rates.alphabet_size();
    let mut bad = Vec::new();
    for u in all_words(n, rates.word_length() - 1) {
        let lhs: Rational = (1..=n).map(|a| v.get(&u.prepend(a)).clone()).sum();
        if lhs != mu_bar(&u, rates)? {
            bad.push(u.to_string());
        }
    }
    Ok((bad.is_empty(), failures_detail(&bad)))
}

fn block_factorization(rates: &RateSystem, v: &StationaryVector) -> Result<(bool, String)> {
    let len = rates.word_length();
    let mut bad = Vec::new();
    let mut checked = 0;
    for (w, p) in v.iter() {
        let blocks = w.blocks();
        // ρ̄ needs k + 1 <= L for every block after the first.
        if blocks[1..].iter().any(|b| b.run_length + 1 > len) {
            continue;
        }
        let head = Word::new(w.alphabet_size(), vec![blocks[0].letter; blocks[0].run_length])?;
        let mut value = mu_bar(&head, rates)?;
        for b in &blocks[1..] {
            value *= rho_bar(*b, rates)?;
        }
        checked += 1;
        if &value != p {
            bad.push(w.to_string());
        }
    }
    Ok((bad.is_empty(), format!("{checked} words; {}", failures_detail(&bad))))
}

fn balance_equation(rates: &RateSystem, v: &StationaryVector) -> Result<(bool, String)> {
    let lhs = transition_matrix(rates).mul_vec(v.probabilities())?;
    let rhs = delta_matrix(rates).mul_vec(v.probabilities())?;
    Ok((lhs == rhs, "M mu = Delta mu componentwise".into()))
}

fn kernel_agreement(rates: &RateSystem, v: &StationaryVector) -> Result<(bool, String)> {
    let k = kirchhoff(&transition_matrix(rates))?;
    let kernel = null_space_vector(&k.to_dense())?;
    Ok((kernel == v.probabilities(), "normalized kernel of the Kirchhoff matrix".into()))
}

fn last_sites_marginal(rates: &RateSystem, v: &StationaryVector) -> Result<(bool, String)> {
    let n = rates.alphabet_size();
    let len = rates.word_length();
    let mut bad = Vec::new();
    for k in 1..=len {
        for suffix in all_words(n, k) {
            let query = CorrelationQuery::last_sites(&suffix, len)?;
            if v.correlation(&query)? != mu_bar(&suffix, rates)? {
                bad.push(suffix.to_string());
            }
        }
    }
    Ok((bad.is_empty(), failures_detail(&bad)))
}

fn kirchhoff_blocks(rates: &RateSystem) -> Result<(bool, String)> {
    let len = rates.word_length();
    let m = kirchhoff(&transition_matrix(rates))?;
    let b = kirchhoff(&b_sum(rates, len)?)?;
    Ok((m.same_values(&b), "Kirchhoff matrices of M and B agree".into()))
}

fn failures_detail(bad: &[String]) -> String {
    if bad.is_empty() {
        "all words agree".into()
    } else {
        format!("mismatch at {}", bad.join(","))
    }
}

fn check_specials(rec: &mut Recorder, n: usize, len: usize, rng: &mut ChaCha8Rng) {
    // Block characteristic polynomials: m blocks of size k.
    let mut ok = true;
    let mut outcome = String::from("5 random instances");
    for _ in 0..5 {
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let ps: Vec<RationalMatrix> = (0..m).map(|_| random_matrix(rng, k)).collect();
        let q = random_matrix(rng, k);
        match blockm_charpoly_check(&ps, &q) {
            Ok(true) => {}
            Ok(false) => {
                ok = false;
                outcome = format!("failed at m={m}, k={k}");
            }
            Err(e) => {
                ok = false;
                outcome = format!("error: {e}");
            }
        }
    }
    rec.record("block_charpoly", ok, outcome);

    rec.record_result("bernoulli_product", bernoulli_check(n, len, rng));

    for x in [ratio(1, 3), int(1), int(3)] {
        rec.record_result("skin_deep_closed_form", skin_deep_closed_form(n, len, &x));
        rec.record_result("skin_deep_density", skin_deep_density(n, len, &x));
        rec.record_result("skin_deep_two_point", skin_deep_two_point(n, len, &x));
        rec.record_result("skin_deep_invariance", skin_deep_invariance(n, len, &x));
    }

    if len == 1 {
        rec.record_result("transfer_matrix_alpha", Ok(alpha_check(n, 6)));
        let mut bad = Vec::new();
        for _ in 0..5 {
            let s = random_signed(rng, 9, 4);
            let t = random_signed(rng, 9, 4);
            match kn_inverse(&s, &t, n) {
                Ok(inv) => {
                    if &inv * &kn(&s, &t, n) != RationalMatrix::identity(n) {
                        bad.push(format!("({}, {})", format_rational(&s), format_rational(&t)));
                    }
                }
                Err(Error::Singular(_)) => {}
                Err(e) => bad.push(format!("error: {e}")),
            }
        }
        rec.record("kn_inverse", bad.is_empty(), failures_detail(&bad));
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize) -> RationalMatrix {
    let entries: Vec<Rational> = (0..k * k).map(|_| random_signed(rng, 9, 5)).collect();
    RationalMatrix::from_fn(k, k, |i, j| entries[i * k + j].clone())
}

fn bernoulli_check(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let y: Vec<Rational> = (0..n).map(|_| random_positive(rng, 20, 6)).collect();
    let spec = BernoulliSpec::new(y, len)?;
    let v = stationary_vector(&bernoulli_rates(&spec)?);
    let rho = spec.densities();
    let product_ok = v.iter().all(|(w, p)| *p == spec.product_measure(&w));
    let mut truncated_ok = true;
    for i in 1..=len {
        for j in i + 1..=len {
            for a in 1..=n {
                for b in 1..=n {
                    let q = CorrelationQuery::new(vec![(i, a), (j, b)])?;
                    if v.correlation(&q)? != &rho[a - 1] * &rho[b - 1] {
                        truncated_ok = false;
                    }
                }
            }
        }
    }
    Ok((
        product_ok && truncated_ok,
        format!("product measure {}; truncated correlations zero {}", product_ok, truncated_ok),
    ))
}

fn skin_deep_vector(n: usize, len: usize, x: &Rational) -> Result<StationaryVector> {
    Ok(stationary_vector(&skin_deep_rates(&SkinDeepSpec::new(
        x.clone(),
        n,
        len,
    )?)?))
}

fn skin_deep_closed_form(n: usize, len: usize, x: &Rational) -> Result<(bool, String)> {
    let v = skin_deep_vector(n, len, x)?;
    let ok = v.iter().all(|(w, p)| skin_deep_mu_bar(&w, x) == *p);
    Ok((ok, format!("x = {}", format_rational(x))))
}

fn skin_deep_density(n: usize, len: usize, x: &Rational) -> Result<(bool, String)> {
    let v = skin_deep_vector(n, len, x)?;
    let target = ratio(1, n as i64);
    for i in 1..=len {
        for a in 1..=n {
            if v.correlation(&CorrelationQuery::new(vec![(i, a)])?)? != target {
                return Ok((false, format!("x = {}, site {i}, letter {a}", format_rational(x))));
            }
        }
    }
    Ok((true, format!("x = {}", format_rational(x))))
}

fn pair_query(i: usize, a: usize, j: usize, b: usize) -> Result<CorrelationQuery> {
    CorrelationQuery::new(vec![(i, a), (j, b)])
}

fn skin_deep_two_point(n: usize, len: usize, x: &Rational) -> Result<(bool, String)> {
    let v = skin_deep_vector(n, len, x)?;
    let mut bad = Vec::new();
    for i in 1..=len {
        for j in i + 1..=len {
            for b in 1..=n {
                let enumerated = v.correlation(&pair_query(i, 1, j, b)?)?;
                if enumerated != two_point(n, x, i, j, b == 1)? {
                    bad.push(format!("({i},{j},1,{b})"));
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("x = {}; {}", format_rational(x), failures_detail(&bad))))
}

/// Two-point functions depend only on `j − i` and not on `L`.
fn skin_deep_invariance(n: usize, len: usize, x: &Rational) -> Result<(bool, String)> {
    let v = skin_deep_vector(n, len, x)?;
    let longer = skin_deep_vector(n, len + 1, x)?;
    let mut bad = Vec::new();
    for i in 1..=len {
        for j in i + 1..=len {
            let q = pair_query(i, 1, j, 2)?;
            let value = v.correlation(&q)?;
            if longer.correlation(&q)? != value {
                bad.push(format!("L-dependence at ({i},{j})"));
            }
            if v.correlation(&pair_query(1, 1, 1 + j - i, 2)?)? != value {
                bad.push(format!("shift at ({i},{j})"));
            }
        }
    }
    Ok((bad.is_empty(), format!("x = {}; {}", format_rational(x), failures_detail(&bad))))
}

/// Closed-form `α_{n,k}` against powers of the transfer matrix, `k <= k_max`.
pub fn alpha_check(n: usize, k_max: usize) -> (bool, String) {
    for k in 1..=k_max {
        let t = transfer_matrix_power(n, k);
        let diag = alpha_poly(n, k, true);
        let off = alpha_poly(n, k, false);
        for (a, row) in t.iter().enumerate() {
            for (b, entry) in row.iter().enumerate() {
                let expect = if a == b { &diag } else { &off };
                if entry != expect {
                    return (false, format!("k = {k}, entry ({}, {})", a + 1, b + 1));
                }
            }
        }
    }
    (true, format!("k = 1..={k_max}"))
}
