//! deckmix: exact and sampled analyses of deck-shuffling chains, emitted
//! as CSV or JSON.
//!
//! Exit codes: 0 success, 2 bad request, 3 exact-engine resource cap.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deckmix_core::analytic::{coupling_bound_curve, riffle_distance_closed_form};
use deckmix_core::decimal;
use deckmix_core::markov::{
    distance_curve_exact, evolve, matrix_power, transition_matrix, DistanceCurve, Distribution,
};
use deckmix_core::models::{
    deterministic_period, deterministic_permutation, faro_trace, ShuffleModel,
};
use deckmix_core::perm::{enumerate, DEFAULT_ENUMERATION_DECK};
use deckmix_core::sim::{
    empirical_tv, run_trials, shuffle_once, trial_rng, EmpiricalDistribution, SimulationConfig,
};
use deckmix_core::{Arrangement, Rank, Rational};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "deckmix",
    version,
    about = "Deck-shuffling analyses: exact chains, closed forms, and seeded sampling"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Render probabilities as exact rationals instead of decimals.
    #[arg(long, global = true)]
    rational: bool,

    /// Significant digits for decimal rendering.
    #[arg(long, global = true, default_value_t = 12, value_name = "DIGITS")]
    precision: usize,

    /// Seed for sampled commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Deck-size cap for exact enumeration (hard ceiling 7).
    #[arg(long, global = true, value_name = "N")]
    max_n_override: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transition matrix M^power with arrangement row/column labels.
    Matrix {
        #[command(flatten)]
        model: ModelOpts,
        /// Deck size.
        #[arg(long)]
        n: usize,
        /// Number of hands the matrix advances.
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Distance-to-uniformity curve d(k) for k = 0..=kmax.
    Distance {
        #[command(flatten)]
        model: ModelOpts,
        /// Deck size.
        #[arg(long)]
        n: usize,
        /// Largest hand count on the curve.
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        /// exact walks the chain; closed-form and bound are riffle-only.
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
    },
    /// Deterministic-shuffle period and position trace.
    Faro {
        /// Deck size.
        #[arg(long)]
        n: usize,
        /// Shuffle variant.
        #[arg(long, value_enum)]
        variant: Variant,
        #[command(flatten)]
        output: FaroOutput,
        /// Hands to trace (default: one full period).
        #[arg(long)]
        hands: Option<u32>,
    },
    /// Deal hands from the sorted deck, one row per hand.
    Simulate {
        #[command(flatten)]
        model: ModelOpts,
        /// Deck size.
        #[arg(long)]
        n: usize,
        /// Hands to deal.
        #[arg(long, default_value_t = 1)]
        hands: u32,
    },
    /// Sample trials and report arrangement counts plus a TV comparison.
    Empirical {
        #[command(flatten)]
        model: ModelOpts,
        /// Deck size.
        #[arg(long)]
        n: usize,
        /// Hands per trial.
        #[arg(long, default_value_t = 1)]
        hands: u32,
        /// Independent trials.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Reference law for the TV report.
        #[arg(long, value_enum, default_value_t = Compare::None)]
        compare: Compare,
    },
}

#[derive(Args)]
struct ModelOpts {
    /// top, gsr, physical, naive, faro-out, faro-in, or mongean.
    #[arg(long, default_value = "gsr")]
    model: String,

    /// Packet count for gsr.
    #[arg(long, default_value_t = 2)]
    packets: u32,

    /// Cut offset range for physical.
    #[arg(long, default_value_t = 5)]
    cut_spread: usize,

    /// Largest packet for physical.
    #[arg(long, default_value_t = 5)]
    max_packet: usize,
}

impl ModelOpts {
    fn resolve(&self) -> Result<ShuffleModel, Failure> {
        let model = match self.model.as_str() {
            "top" | "top-in-at-random" => ShuffleModel::TopInAtRandom,
            "gsr" | "riffle" | "gsr-riffle" => ShuffleModel::GsrRiffle {
                packets: self.packets,
            },
            "physical" | "physical-riffle" => ShuffleModel::PhysicalRiffle {
                cut_spread: self.cut_spread,
                max_packet: self.max_packet,
            },
            "naive" | "naive-uniform" => ShuffleModel::NaiveUniform,
            "faro-out" => ShuffleModel::FaroOut,
            "faro-in" => ShuffleModel::FaroIn,
            "mongean" => ShuffleModel::Mongean,
            other => {
                return Err(Failure::usage(format!(
                    "unknown model '{other}'; expected top, gsr, physical, naive, \
                     faro-out, faro-in, or mongean"
                )))
            }
        };
        model.validate()?;
        Ok(model)
    }
}

/// At least one of --period/--trace must be requested.
#[derive(Args)]
#[group(required = true, multiple = true)]
struct FaroOutput {
    /// Print the shuffle's period.
    #[arg(long)]
    period: bool,

    /// Trace this starting position hand by hand.
    #[arg(long, value_name = "POSITION")]
    trace: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Exact,
    ClosedForm,
    Bound,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Variant {
    Out,
    In,
    Mongean,
}

impl Variant {
    fn model(self) -> ShuffleModel {
        match self {
            Variant::Out => ShuffleModel::FaroOut,
            Variant::In => ShuffleModel::FaroIn,
            Variant::Mongean => ShuffleModel::Mongean,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Variant::Out => "out",
            Variant::In => "in",
            Variant::Mongean => "mongean",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Compare {
    Exact,
    Gsr,
    None,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<deckmix_core::Error> for Failure {
    fn from(e: deckmix_core::Error) -> Self {
        Failure {
            code: if e.is_resource_cap() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

/// Shared rendering choices; probabilities honor --rational/--precision.
struct Renderer {
    format: Format,
    rational: bool,
    precision: usize,
}

impl Renderer {
    fn prob(&self, r: &Rational) -> String {
        if self.rational {
            r.to_string()
        } else {
            decimal::to_decimal_string(r, self.precision)
        }
    }

    fn decimal(&self, r: &Rational) -> String {
        decimal::to_decimal_string(r, self.precision)
    }
}

/// Cells never contain quotes or newlines; only deck strings past n=9
/// carry commas.
fn csv_cell(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => match &cli.out {
            Some(path) => match std::fs::write(path, output) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(2)
                }
            },
            None => {
                print!("{output}");
                ExitCode::SUCCESS
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let rd = Renderer {
        format: cli.format,
        rational: cli.rational,
        precision: cli.precision,
    };
    let cap = cli.max_n_override.unwrap_or(DEFAULT_ENUMERATION_DECK);
    match &cli.command {
        Command::Matrix { model, n, power } => cmd_matrix(&rd, model, *n, *power, cap),
        Command::Distance {
            model,
            n,
            kmax,
            method,
        } => cmd_distance(&rd, model, *n, *kmax, *method, cap),
        Command::Faro {
            n,
            variant,
            output,
            hands,
        } => cmd_faro(&rd, *n, *variant, output, *hands),
        Command::Simulate { model, n, hands } => cmd_simulate(&rd, model, *n, *hands, cli.seed),
        Command::Empirical {
            model,
            n,
            hands,
            trials,
            compare,
        } => cmd_empirical(&rd, model, *n, *hands, *trials, *compare, cli.seed, cap),
    }
}

fn cmd_matrix(
    rd: &Renderer,
    opts: &ModelOpts,
    n: usize,
    power: u32,
    cap: usize,
) -> Result<String, Failure> {
    let model = opts.resolve()?;
    let m = transition_matrix::<Rational>(&model, n, cap)?;
    let mk = matrix_power(&m, power);
    let labels: Vec<String> = enumerate(n, cap)?
        .iter()
        .map(Arrangement::deck_string)
        .collect();
    let rows: Vec<Vec<String>> = labels
        .iter()
        .enumerate()
        .map(|(i, _)| {
            mk.row(Rank(i as u64))
                .expect("row index within enumerated range")
                .iter()
                .map(|p| rd.prob(p))
                .collect()
        })
        .collect();
    match rd.format {
        Format::Csv => {
            let mut out = String::new();
            let header: Vec<String> = std::iter::once(String::new())
                .chain(labels.iter().map(|l| csv_cell(l)))
                .collect();
            let _ = writeln!(out, "{}", header.join(","));
            for (label, row) in labels.iter().zip(&rows) {
                let _ = writeln!(out, "{},{}", csv_cell(label), row.join(","));
            }
            Ok(out)
        }
        Format::Json => Ok(pretty(&json!({
            "n": n,
            "model": model.to_string(),
            "power": power,
            "labels": labels,
            "rows": rows,
        }))),
    }
}

fn cmd_distance(
    rd: &Renderer,
    opts: &ModelOpts,
    n: usize,
    kmax: u32,
    method: Method,
    cap: usize,
) -> Result<String, Failure> {
    let model = opts.resolve()?;
    let curve: DistanceCurve<Rational> = match method {
        Method::Exact => distance_curve_exact(&model, n, kmax, cap)?,
        Method::ClosedForm | Method::Bound => {
            if !matches!(model, ShuffleModel::GsrRiffle { packets: 2 }) {
                return Err(Failure::usage(format!(
                    "method '{}' applies only to the two-packet gsr riffle, not to {model}",
                    if method == Method::Bound { "bound" } else { "closed-form" }
                )));
            }
            if method == Method::Bound {
                coupling_bound_curve(n, kmax)?
            } else {
                riffle_distance_closed_form(n, kmax)?
            }
        }
    };
    match rd.format {
        Format::Csv => {
            let mut out = String::from("k,d_rational,d_decimal\n");
            for (k, d) in curve.points() {
                let _ = writeln!(out, "{k},{d},{}", rd.decimal(d));
            }
            Ok(out)
        }
        Format::Json => {
            let points: Vec<_> = curve
                .points()
                .iter()
                .map(|(k, d)| {
                    json!({
                        "k": k,
                        "d_rational": d.to_string(),
                        "d_decimal": rd.decimal(d),
                    })
                })
                .collect();
            Ok(pretty(&json!({
                "n": curve.n(),
                "model": curve.model(),
                "method": curve.method().to_string(),
                "points": points,
            })))
        }
    }
}

/// Position of the card that starts at `start`, hand by hand. The
/// out-faro uses the doubling arithmetic; other variants walk the deck.
fn trace_positions(
    model: &ShuffleModel,
    n: usize,
    start: usize,
    hands: u32,
) -> Result<Vec<usize>, Failure> {
    if matches!(model, ShuffleModel::FaroOut) {
        return Ok(faro_trace(n, start, hands)?);
    }
    if start == 0 || start > n {
        return Err(deckmix_core::Error::PositionOutOfRange { position: start, n }.into());
    }
    let step = deterministic_permutation(model, n)?;
    let mut acc = Arrangement::identity(n)?;
    let mut positions = vec![start];
    for _ in 0..hands {
        acc = acc.compose(&step)?;
        positions.push(acc.position_of(start)?);
    }
    Ok(positions)
}

fn cmd_faro(
    rd: &Renderer,
    n: usize,
    variant: Variant,
    output: &FaroOutput,
    hands: Option<u32>,
) -> Result<String, Failure> {
    let model = variant.model();
    let period = deterministic_period(&model, n)?;
    let trace = match output.trace {
        Some(start) => {
            let hands = match hands {
                Some(h) => h,
                None => u32::try_from(period).map_err(|_| {
                    Failure::usage("period exceeds the traceable range; pass --hands")
                })?,
            };
            Some((start, trace_positions(&model, n, start, hands)?))
        }
        None => None,
    };
    match rd.format {
        Format::Csv => {
            let mut out = String::new();
            match (&trace, output.period) {
                (None, _) => {
                    let _ = writeln!(out, "{period}");
                }
                (Some((_, positions)), want_period) => {
                    if want_period {
                        let _ = writeln!(out, "period,{period}");
                    }
                    out.push_str("hand,position\n");
                    for (hand, position) in positions.iter().enumerate() {
                        let _ = writeln!(out, "{hand},{position}");
                    }
                }
            }
            Ok(out)
        }
        Format::Json => {
            let mut body = serde_json::Map::new();
            body.insert("n".into(), json!(n));
            body.insert("variant".into(), json!(variant.name()));
            if output.period {
                body.insert("period".into(), json!(period));
            }
            if let Some((start, positions)) = &trace {
                body.insert("start".into(), json!(start));
                let rows: Vec<_> = positions
                    .iter()
                    .enumerate()
                    .map(|(hand, position)| json!({"hand": hand, "position": position}))
                    .collect();
                body.insert("trace".into(), json!(rows));
            }
            Ok(pretty(&serde_json::Value::Object(body)))
        }
    }
}

fn cmd_simulate(
    rd: &Renderer,
    opts: &ModelOpts,
    n: usize,
    hands: u32,
    seed: u64,
) -> Result<String, Failure> {
    let model = opts.resolve()?;
    let mut rng = trial_rng(seed, 0);
    let mut deck = Arrangement::identity(n)?;
    let mut decks = vec![deck.deck_string()];
    for _ in 0..hands {
        deck = shuffle_once(&deck, &model, &mut rng)?;
        decks.push(deck.deck_string());
    }
    match rd.format {
        Format::Csv => {
            let mut out = String::from("hand,deck\n");
            for (hand, deck) in decks.iter().enumerate() {
                let _ = writeln!(out, "{hand},{}", csv_cell(deck));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<_> = decks
                .iter()
                .enumerate()
                .map(|(hand, deck)| json!({"hand": hand, "deck": deck}))
                .collect();
            Ok(pretty(&json!({
                "n": n,
                "model": model.to_string(),
                "seed": seed,
                "hands": hands,
                "decks": rows,
            })))
        }
    }
}

/// TV between the sample and the reference model's exact k-hand law.
fn tv_to_walk(
    emp: &EmpiricalDistribution,
    reference: &ShuffleModel,
    n: usize,
    hands: u32,
    cap: usize,
) -> Result<Rational, Failure> {
    let m = transition_matrix::<Rational>(reference, n, cap)?;
    let start = Distribution::<Rational>::point_mass(n, Rank(0))?;
    let law = evolve(&start, &m, hands)?;
    Ok(empirical_tv(emp, &law)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_empirical(
    rd: &Renderer,
    opts: &ModelOpts,
    n: usize,
    hands: u32,
    trials: u64,
    compare: Compare,
    seed: u64,
    cap: usize,
) -> Result<String, Failure> {
    let model = opts.resolve()?;
    let cfg = SimulationConfig::new(model.clone(), n, hands, trials, seed)?;
    let emp = run_trials(&cfg)?;
    let tv: Option<(&str, Rational)> = match compare {
        Compare::None => None,
        Compare::Exact => Some(("exact", tv_to_walk(&emp, &model, n, hands, cap)?)),
        Compare::Gsr => Some(("gsr", tv_to_walk(&emp, &ShuffleModel::gsr(), n, hands, cap)?)),
    };
    let counts: Vec<(String, u64)> = emp
        .counts()
        .map(|(rank, count)| {
            Arrangement::unrank(n, *rank)
                .map(|a| (a.deck_string(), *count))
                .map_err(Failure::from)
        })
        .collect::<Result<_, _>>()?;
    match rd.format {
        Format::Csv => {
            let mut out = String::from("key,value\n");
            let _ = writeln!(out, "n,{n}");
            let _ = writeln!(out, "trials,{trials}");
            let _ = writeln!(out, "seed,{seed}");
            for (deck, count) in &counts {
                let _ = writeln!(out, "{},{count}", csv_cell(&format!("count:{deck}")));
            }
            if let Some((reference, value)) = &tv {
                let _ = writeln!(out, "tv:{reference},{}", rd.prob(value));
            }
            Ok(out)
        }
        Format::Json => {
            let mut count_map = serde_json::Map::new();
            for (deck, count) in &counts {
                count_map.insert(deck.clone(), json!(count));
            }
            let tv_json = match &tv {
                Some((reference, value)) => json!({
                    "reference": reference,
                    "value": rd.prob(value),
                }),
                None => serde_json::Value::Null,
            };
            Ok(pretty(&json!({
                "n": n,
                "trials": trials,
                "seed": seed,
                "counts": count_map,
                "tv": tv_json,
            })))
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
