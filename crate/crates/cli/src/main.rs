use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use debruijn::matrices::{coordinate_records, delta_matrix, dense_json, kirchhoff, transition_matrix};
use debruijn::rational::{format_rational, parse_rational, Rational};
use debruijn::simulator::{exact_map, simulate_many, total_variation};
use debruijn::specials::{bernoulli_rates, skin_deep_rates, two_point, BernoulliSpec, SkinDeepSpec};
use debruijn::spectrum::{spectrum_verify, DEFAULT_ORACLE_CAP};
use debruijn::stationary::{partition_function, stationary_vector, CorrelationQuery};
use debruijn::verify::{run_grid, GridConfig};
use debruijn::{Error, RateSystem};
use serde_json::{json, Value};

const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "debruijn", version, about = "Exact analysis and simulation of the de Bruijn process")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary probabilities of every word plus the partition-function report.
    Stationary {
        #[command(flatten)]
        source: RateSource,
    },
    /// Closed-form spectrum of the Kirchhoff matrix, checked against its characteristic polynomial.
    Spectrum {
        #[command(flatten)]
        source: RateSource,
        /// Largest number of states for the exact oracle.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
    },
    /// Correlation functions: skin-deep closed form against enumeration, or a
    /// general query on any rate system.
    Correlate(CorrelateArgs),
    /// Gillespie simulation compared with the exact stationary law.
    Simulate {
        #[command(flatten)]
        source: RateSource,
        /// Total simulated time per trajectory.
        #[arg(long)]
        time: f64,
        /// Initial time discarded from the occupation measure.
        #[arg(long = "burn-in", default_value_t = 0.0)]
        burn_in: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent trajectories, run concurrently and merged.
        #[arg(long, default_value_t = 1)]
        trajectories: usize,
    },
    /// Runs every closed form against its oracle over a grid of rate points.
    Verify {
        #[arg(long = "n-max", default_value_t = 3)]
        n_max: usize,
        #[arg(long = "L-max", default_value_t = 4)]
        len_max: usize,
        /// Random rate points per (n, L).
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = GridConfig::default().seed)]
        seed: u64,
        /// Largest n^L on the grid.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
        /// Leave out the rate points with coincident eigenvalues.
        #[arg(long)]
        no_degenerate: bool,
    },
    /// Writes M, its Kirchhoff matrix, or the diagonal of column sums.
    ExportMatrix {
        #[command(flatten)]
        source: RateSource,
        #[arg(long, value_enum, default_value_t = MatrixKind::Transition)]
        matrix: MatrixKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Transition,
    Kirchhoff,
    Delta,
}

#[derive(Clone, Copy, ValueEnum)]
enum Special {
    Bernoulli,
    SkinDeep,
}

#[derive(Args, Clone)]
struct RateSource {
    /// JSON rate file: {"n": .., "L": .., "rates": {"a,k": "p/q", ...}}.
    #[arg(long)]
    rates: Option<PathBuf>,
    /// Built-in rate specialization instead of a file.
    #[arg(long, value_enum)]
    special: Option<Special>,
    /// Bernoulli weights, comma separated (one per letter).
    #[arg(long)]
    y: Option<String>,
    /// Alphabet size for skin-deep rates.
    #[arg(long)]
    n: Option<usize>,
    /// Skin-deep depth-one rate.
    #[arg(long)]
    x: Option<String>,
    /// Word length for special rates.
    #[arg(long = "L")]
    len: Option<usize>,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Closed-form model to compare against enumeration.
    #[arg(long, value_enum)]
    model: Option<Special>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    /// Letters at sites i and j, e.g. `1,1`.
    #[arg(long, default_value = "1,1")]
    letters: String,
    /// General query `site:letter,...` evaluated by enumeration.
    #[arg(long)]
    query: Option<String>,
    #[command(flatten)]
    source: RateSource,
}

/// A failed command: exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// A completed command; `passed == false` maps to the verification-failure code.
struct Outcome {
    passed: bool,
}

type CmdResult = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stationary { source } => cmd_stationary(&source, cli.format),
        Command::Spectrum { source, cap } => cmd_spectrum(&source, cap, cli.format),
        Command::Correlate(args) => cmd_correlate(&args, cli.format),
        Command::Simulate {
            source,
            time,
            burn_in,
            seed,
            trajectories,
        } => cmd_simulate(&source, time, burn_in, seed, trajectories, cli.format),
        Command::Verify {
            n_max,
            len_max,
            points,
            seed,
            cap,
            no_degenerate,
        } => cmd_verify(
            &GridConfig {
                n_max,
                len_max,
                points,
                seed,
                cap,
                degenerate: !no_degenerate,
            },
            cli.format,
        ),
        Command::ExportMatrix { source, matrix } => cmd_export(&source, matrix, cli.format),
    };
    match result {
        Ok(Outcome { passed: true }) => ExitCode::SUCCESS,
        Ok(Outcome { passed: false }) => ExitCode::from(EXIT_VERIFY),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(Failure::from))
        .collect()
}

impl RateSource {
    fn is_empty(&self) -> bool {
        self.rates.is_none() && self.special.is_none()
    }

    fn load(&self) -> Result<RateSystem, Failure> {
        match (&self.rates, self.special) {
            (Some(_), Some(_)) => Err(input_error("give either --rates or --special, not both")),
            (None, None) => Err(input_error("a rate source is required: --rates FILE or --special")),
            (Some(path), None) => Ok(RateSystem::from_json_file(path)?),
            (None, Some(Special::Bernoulli)) => {
                let y = parse_list(self.y.as_deref().ok_or_else(|| input_error("--y is required"))?)?;
                let len = self.len.ok_or_else(|| input_error("--L is required"))?;
                Ok(bernoulli_rates(&BernoulliSpec::new(y, len)?)?)
            }
            (None, Some(Special::SkinDeep)) => Ok(skin_deep_rates(&self.skin_deep_spec()?)?),
        }
    }

    fn skin_deep_spec(&self) -> Result<SkinDeepSpec, Failure> {
        let n = self.n.ok_or_else(|| input_error("--n is required"))?;
        let x = parse_rational(self.x.as_deref().ok_or_else(|| input_error("--x is required"))?)?;
        let len = self.len.ok_or_else(|| input_error("--L is required"))?;
        Ok(SkinDeepSpec::new(x, n, len)?)
    }
}

fn print_json(value: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn csv_writer() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

/// Rounds to 12 significant digits.
fn sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn cmd_stationary(source: &RateSource, format: Format) -> CmdResult {
    let rates = source.load()?;
    let v = stationary_vector(&rates);
    let z = partition_function(&rates)?;
    let total = v.total();
    let passed = total == Rational::from_integer(1.into()) && z.common_denominator_matches;
    match format {
        Format::Json => print_json(&json!({
            "n": rates.alphabet_size(),
            "L": rates.word_length(),
            "rows": serde_json::to_value(v.rows()).expect("rows serialize"),
            "sum": format_rational(&total),
            "partition_function": {
                "common_denominator": format_rational(&z.common_denominator),
                "common_denominator_matches": z.common_denominator_matches,
                "product_formula": format_rational(&z.product_formula),
                "product_formula_matches": z.product_formula_matches,
                "lcm_oracle": format_rational(&z.lcm_oracle),
            },
        }))?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["word", "prob"])?;
            for row in v.rows() {
                w.write_record([row.word, row.prob])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome { passed })
}

fn cmd_spectrum(source: &RateSource, cap: usize, format: Format) -> CmdResult {
    let rates = source.load()?;
    let report = spectrum_verify(&rates, cap)?;
    let passed = report.matches && report.recursion_holds != Some(false);
    match format {
        Format::Json => print_json(&json!({
            "eigenvalues": serde_json::to_value(report.rows()).expect("rows serialize"),
            "verified": report.matches,
            "claimed_degree": report.degree_check.0,
            "state_count": report.degree_check.1,
            "recursion_holds": report.recursion_holds,
            "charpoly": report.charpoly.to_string(),
        }))?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["eigenvalue", "multiplicity"])?;
            for row in report.rows() {
                w.write_record([row.eigenvalue, row.multiplicity.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome { passed })
}

fn parse_letters(text: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("bad --letters {text:?}")))?;
    match parts.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(input_error("--letters needs exactly two letters")),
    }
}

fn parse_query(text: &str) -> Result<CorrelationQuery, Failure> {
    let sites = text
        .split(',')
        .map(|pair| {
            let (i, a) = pair
                .split_once(':')
                .ok_or_else(|| input_error(format!("bad query term {pair:?}, want site:letter")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| input_error(format!("bad query term {pair:?}")))
            };
            Ok((parse(i)?, parse(a)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(CorrelationQuery::new(sites)?)
}

fn cmd_correlate(args: &CorrelateArgs, format: Format) -> CmdResult {
    let (record, passed) = match args.model {
        Some(Special::SkinDeep) => {
            let i = args.i.ok_or_else(|| input_error("--i is required"))?;
            let j = args.j.ok_or_else(|| input_error("--j is required"))?;
            let (a, b) = parse_letters(&args.letters)?;
            let spec = RateSource {
                len: Some(args.source.len.unwrap_or(j)),
                ..args.source.clone()
            }
            .skin_deep_spec()?;
            if j > spec.len {
                return Err(input_error(format!("site {j} beyond length {}", spec.len)));
            }
            if a == 0 || b == 0 || a > spec.n || b > spec.n {
                return Err(input_error(format!("letters must lie in 1..={}", spec.n)));
            }
            let closed = two_point(spec.n, &spec.x, i, j, a == b)?;
            let v = stationary_vector(&skin_deep_rates(&spec)?);
            let enumerated = v.correlation(&CorrelationQuery::new(vec![(i, a), (j, b)])?)?;
            let matches = closed == enumerated;
            (
                vec![
                    ("closed_form", format_rational(&closed)),
                    ("enumeration", format_rational(&enumerated)),
                    ("matches", matches.to_string()),
                ],
                matches,
            )
        }
        Some(Special::Bernoulli) => {
            return Err(input_error(
                "the Bernoulli law is a product measure; use --special bernoulli with --query",
            ))
        }
        None => {
            if args.source.is_empty() {
                return Err(input_error("give --model skin-deep or a rate source with --query"));
            }
            let text = args.query.as_deref().ok_or_else(|| input_error("--query is required"))?;
            let rates = args.source.load()?;
            let value = stationary_vector(&rates).correlation(&parse_query(text)?)?;
            (vec![("value", format_rational(&value))], true)
        }
    };
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = record
                .iter()
                .map(|(k, v)| {
                    let value = if *k == "matches" {
                        Value::Bool(v == "true")
                    } else {
                        Value::String(v.clone())
                    };
                    (k.to_string(), value)
                })
                .collect();
            print_json(&Value::Object(map))?;
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(record.iter().map(|(k, _)| *k))?;
            w.write_record(record.iter().map(|(_, v)| v.as_str()))?;
            w.flush()?;
        }
    }
    Ok(Outcome { passed })
}

fn cmd_simulate(
    source: &RateSource,
    time: f64,
    burn_in: f64,
    seed: u64,
    trajectories: usize,
    format: Format,
) -> CmdResult {
    let rates = source.load()?;
    let measure = simulate_many(&rates, seed, time, burn_in, trajectories)?;
    let exact = exact_map(&stationary_vector(&rates));
    let empirical = measure.to_map();
    let tv = total_variation(&empirical, &exact)?;
    match format {
        Format::Json => {
            let rows: Vec<Value> = empirical
                .iter()
                .map(|(w, p)| {
                    json!({
                        "word": w.to_string(),
                        "empirical": sig12(*p),
                        "exact": sig12(exact[w]),
                    })
                })
                .collect();
            print_json(&json!({
                "seed": seed,
                "trajectories": trajectories,
                "time": time,
                "burn_in": burn_in,
                "measure": rows,
                "tv": sig12(tv),
            }))?;
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["word", "empirical", "exact"])?;
            for (word, p) in &empirical {
                w.write_record([
                    word.to_string(),
                    format!("{:.11e}", p),
                    format!("{:.11e}", exact[word]),
                ])?;
            }
            w.flush()?;
            eprintln!("tv = {:.11e}", tv);
        }
    }
    Ok(Outcome { passed: true })
}

fn cmd_verify(cfg: &GridConfig, format: Format) -> CmdResult {
    let report = run_grid(cfg)?;
    match format {
        Format::Json => print_json(&serde_json::to_value(&report).expect("report serializes"))?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["check", "n", "L", "point", "passed", "detail"])?;
            for r in &report.records {
                w.write_record([
                    r.check.clone(),
                    r.n.to_string(),
                    r.len.to_string(),
                    r.point.clone(),
                    r.passed.to_string(),
                    r.detail.clone(),
                ])?;
            }
            w.flush()?;
        }
    }
    for f in report.failures() {
        eprintln!("FAIL {} n={} L={} {}: {}", f.check, f.n, f.len, f.point, f.detail);
    }
    Ok(Outcome {
        passed: report.all_passed,
    })
}

fn cmd_export(source: &RateSource, kind: MatrixKind, format: Format) -> CmdResult {
    let rates = source.load()?;
    let m = transition_matrix(&rates);
    let matrix = match kind {
        MatrixKind::Transition => m,
        MatrixKind::Kirchhoff => kirchhoff(&m)?,
        MatrixKind::Delta => delta_matrix(&rates),
    };
    let (n, len) = (rates.alphabet_size(), rates.word_length());
    match format {
        Format::Json => print_json(&dense_json(&matrix, n, len)?)?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["row_word", "col_word", "value"])?;
            for (r, c, v) in coordinate_records(&matrix, n, len) {
                w.write_record([r, c, v])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome { passed: true })
}
