//! `altchain`: command-line front end for the altchain-core library.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 2 for bad input and 3 when a length exceeds the enumeration guard.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use altchain_core::channel::{
    apply_channel, expected_runs, run_count_tail, sample_source, RepetitionModel,
};
use altchain_core::codec::{encode_bytes, format_symbols, Encoded, InputFormat};
use altchain_core::combinatorics::{
    alternating_of, enumerate_alternating_patterns, enumerate_alternating_profiles,
    partition_count, partition_count_bounded, pattern_of, run_count, ClassCounter, Pattern,
};
use altchain_core::estimators::{BlockEstimator, SequentialEstimator};
use altchain_core::prob::{
    format_rational, AnyDistribution, FloatDistribution, LogProb, SupOptions,
};
use altchain_core::recovery::{end_to_end_estimate, RecoveryOptions, DEFAULT_ALPHA};
use altchain_core::redundancy::{sandwich_table, SandwichRow};
use altchain_core::{Error, Guard, SCHEMA_VERSION};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "altchain",
    version,
    about = "Pattern estimation for alternating Markov chains"
)]
struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pattern of a sequence and of its alternating sequence.
    Pattern(InputArgs),
    /// Profile and class size of a pattern.
    Profile(PatternArgs),
    /// Number of partitions of n, optionally with bounded parts.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_part: Option<usize>,
    },
    /// All alternating patterns (or profiles) of length n, one JSON object per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// List profiles instead of patterns.
        #[arg(long)]
        profiles: bool,
    },
    /// Block estimator table for length n, one JSON object per line.
    EstimateBlock {
        #[arg(long)]
        n: usize,
    },
    /// Per-step conditionals of the sequential estimator along a pattern.
    EstimateSeq {
        /// Pattern such as 1,2,3,1.
        #[arg(long)]
        pattern: String,
        /// Fixed horizon (default: the pattern length).
        #[arg(long, conflicts_with = "doubling")]
        horizon: Option<usize>,
        /// Horizon-free estimator with power-of-two horizons.
        #[arg(long)]
        doubling: bool,
    },
    /// Sample a source, pass it through a repetition channel, write the output.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        /// Source length.
        #[arg(long = "N")]
        n: usize,
        /// identity, geometric:<rho> or pmf:<w1>,<w2>,...
        #[arg(long, default_value = "geometric:0.5")]
        channel: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Token file for the channel output.
        #[arg(long)]
        output: PathBuf,
    },
    /// Estimate source probabilities from a channel output.
    Recover {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Anchor tokens a,b (default: the two most frequent).
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Shtarkov sums, measured redundancy and bounds for n = 1..n-max.
    Redundancy {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Symbols beyond the label count allowed in the sup search.
        #[arg(long, default_value_t = 2)]
        sup_extra: usize,
        /// Random starts per alphabet size in the sup search.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Seed of the sup search.
        #[arg(long, default_value_t = SupOptions::default().seed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Empirical lower tail of the run count.
    Concentration {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input file ("-" for stdin).
    #[arg(long)]
    input: PathBuf,
    /// How the input is split into symbols.
    #[arg(long, default_value = "auto", value_parser = parse_input_format)]
    format: InputFormat,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PatternArgs {
    /// Pattern such as 1,2,3,1 or 1231.
    #[arg(long)]
    pattern: Option<String>,
    /// Sequence file; its pattern is used.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Distribution JSON: {"probs": ["1/2", "1/4", "1/4"]} or {"probs": [0.5, 0.25, 0.25]}.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Uniform distribution over m symbols.
    #[arg(long)]
    uniform: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

fn parse_input_format(s: &str) -> Result<InputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => Failure::Guard(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = io::stdout().lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg} (set ALT_MARK_GUARD_N to raise it)");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> CliResult {
    let guard = Guard::from_env();
    match command {
        Command::Pattern(input) => {
            let seq = read_sequence(&input.input, input.format)?;
            let pattern = pattern_of(&seq.symbols)?;
            let alternating = pattern_of(&alternating_of(&seq.symbols))?;
            emit(
                out,
                &json!({
                    "schema": SCHEMA_VERSION,
                    "pattern": pattern.labels(),
                    "alternating_pattern": alternating.labels(),
                }),
            )
        }
        Command::Profile(args) => {
            let pattern = match (args.pattern, args.input) {
                (Some(text), _) => Pattern::parse(&text)?,
                (None, Some(path)) => {
                    pattern_of(&read_sequence(&path, InputFormat::Auto)?.symbols)?
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let profile = pattern.profile();
            let mut body = json!({
                "schema": SCHEMA_VERSION,
                "pattern": pattern.labels(),
                "n": pattern.len(),
                "profile": profile.to_string(),
                "parts": profile.parts_desc(),
                "phi": profile.phi(),
                "alternating": pattern.is_alternating(),
            });
            if pattern.is_alternating() {
                if let Some(class) = pattern.class() {
                    let l = ClassCounter::new().class_size(&class);
                    body["last_multiplicity"] = json!(class.last_multiplicity);
                    body["L"] = json!(l.to_string());
                }
            }
            emit(out, &body)
        }
        Command::Partitions { n, max_part } => {
            let count = match max_part {
                Some(k) => partition_count_bounded(n, k),
                None => partition_count(n),
            };
            emit(
                out,
                &json!({
                    "schema": SCHEMA_VERSION,
                    "n": n,
                    "max_part": max_part,
                    "count": count.to_string(),
                }),
            )
        }
        Command::Enumerate { n, profiles } => {
            if profiles {
                let all = enumerate_alternating_profiles(n, &guard)?;
                emit(
                    out,
                    &json!({"schema": SCHEMA_VERSION, "n": n, "profiles": all.len()}),
                )?;
                for p in all {
                    emit(
                        out,
                        &json!({"profile": p.to_string(), "parts": p.parts_desc()}),
                    )?;
                }
                return Ok(());
            }
            let patterns = enumerate_alternating_patterns(n, &guard)?;
            let mut counter = ClassCounter::new();
            emit(out, &json!({"schema": SCHEMA_VERSION, "n": n}))?;
            for p in patterns {
                let l = counter.class_size(&p.class().expect("n >= 1"));
                emit(
                    out,
                    &json!({
                        "pattern": p.labels(),
                        "profile": p.profile().to_string(),
                        "L": l.to_string(),
                    }),
                )?;
            }
            Ok(())
        }
        Command::EstimateBlock { n } => {
            let est = BlockEstimator::new(n, &guard)?;
            let patterns = enumerate_alternating_patterns(n, &guard)?;
            emit(
                out,
                &json!({"schema": SCHEMA_VERSION, "n": n, "Z": est.z().to_string()}),
            )?;
            for p in patterns {
                let e = est.estimate(&p)?;
                emit(
                    out,
                    &json!({
                        "pattern": p.labels(),
                        "L": e.l.to_string(),
                        "q": format_rational(&e.q),
                    }),
                )?;
            }
            Ok(())
        }
        Command::EstimateSeq {
            pattern,
            horizon,
            doubling,
        } => {
            let pattern = Pattern::parse(&pattern)?;
            if pattern.is_empty() {
                return Err(Error::EmptyInput.into());
            }
            let est = if doubling {
                SequentialEstimator::doubling(pattern.len(), &guard)?
            } else {
                SequentialEstimator::fixed(horizon.unwrap_or(pattern.len()), &guard)?
            };
            let mut state = est.start();
            let mut steps = Vec::new();
            for &label in pattern.labels() {
                let h = state.horizon;
                let c = state.push(&est, label)?;
                steps.push(json!({
                    "i": state.prefix.len(),
                    "label": label,
                    "horizon": h,
                    "conditional": format_rational(&c),
                    "log2": LogProb::from_rational(&c).log2(),
                }));
            }
            let total = altchain_core::estimators::PatternEstimator::prob(&est, &pattern)?;
            emit(
                out,
                &json!({
                    "schema": SCHEMA_VERSION,
                    "mode": if doubling { "doubling" } else { "fixed" },
                    "pattern": pattern.labels(),
                    "steps": steps,
                    "probability": format_rational(&total),
                    "log2_prob": state.log_prob.log2(),
                }),
            )
        }
        Command::Simulate {
            source,
            n,
            channel,
            seed,
            output,
        } => {
            let p = read_source(&source)?;
            let model: RepetitionModel = channel.parse()?;
            let seed = seed.unwrap_or_else(auto_seed);
            let x = sample_source(&p, n, seed);
            let y = apply_channel(&x, &model, seed)?;
            fs::write(&output, format_symbols(&y))?;
            emit(
                out,
                &json!({
                    "schema": SCHEMA_VERSION,
                    "N": n,
                    "output_length": y.len(),
                    "run_count": run_count(&y),
                    "expected_runs": expected_runs(&p, n),
                    "channel": model.to_string(),
                    "seed": seed,
                    "output": output.display().to_string(),
                }),
            )
        }
        Command::Recover {
            input,
            alpha,
            anchor,
        } => {
            let seq = read_sequence(&input.input, input.format)?;
            let anchor = anchor.map(|a| parse_anchor(&a, &seq)).transpose()?;
            let rec = end_to_end_estimate(&seq.symbols, &RecoveryOptions { alpha, anchor })?;
            let symbols: Vec<&str> = rec
                .symbols
                .iter()
                .map(|&s| seq.token(s))
                .collect::<Result<_, _>>()?;
            emit(
                out,
                &json!({
                    "schema": SCHEMA_VERSION,
                    "probs": rec.probs,
                    "symbols": symbols,
                    "pre_normalization_sum": rec.pre_normalization_sum,
                    "anchor": [seq.token(rec.anchor.0)?, seq.token(rec.anchor.1)?],
                    "n_alternating": rec.n_alternating,
                    "alpha": alpha,
                }),
            )
        }
        Command::Redundancy {
            n_max,
            sup_extra,
            restarts,
            seed,
            format,
        } => {
            let opts = SupOptions {
                extra_symbols: sup_extra,
                restarts,
                seed,
                ..SupOptions::default()
            };
            let table = sandwich_table(n_max, &opts, &guard)?;
            match format {
                TableFormat::Csv => {
                    writeln!(out, "{}", SandwichRow::COLUMNS.join(","))?;
                    for row in &table.rows {
                        writeln!(out, "{}", row.csv_fields().join(","))?;
                    }
                    for caveat in &table.caveats {
                        eprintln!("note: {caveat}");
                    }
                    Ok(())
                }
                TableFormat::Json => {
                    let mut body = serde_json::to_value(&table).expect("serializable");
                    body["schema"] = json!(SCHEMA_VERSION);
                    body["sup_restarts"] = json!(restarts);
                    body["sup_seed"] = json!(seed);
                    emit(out, &body)
                }
            }
        }
        Command::Concentration {
            source,
            n,
            trials,
            seed,
        } => {
            let p = read_source(&source)?;
            let seed = seed.unwrap_or_else(auto_seed);
            let res = run_count_tail(&p, n, trials, seed)?;
            if res.assumption_violated {
                eprintln!("warning: some symbol has probability at least 1/2");
            }
            let mut body = serde_json::to_value(&res).expect("serializable");
            body["schema"] = json!(SCHEMA_VERSION);
            emit(out, &body)
        }
    }
}

fn emit(out: &mut impl Write, value: &Value) -> CliResult {
    writeln!(out, "{value}")?;
    Ok(())
}

fn read_sequence(path: &Path, format: InputFormat) -> Result<Encoded, Failure> {
    let data = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::Read::read_to_end(&mut io::stdin(), &mut buf)?;
        buf
    } else {
        fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    Ok(encode_bytes(&data, format))
}

fn read_source(args: &SourceArgs) -> Result<FloatDistribution, Failure> {
    match (&args.dist, args.uniform) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok(AnyDistribution::from_json(&text)?.to_float())
        }
        (None, Some(m)) if !m.is_zero() => Ok(FloatDistribution::uniform(m)?),
        _ => Err(Failure::Input("uniform needs at least one symbol".into())),
    }
}

fn parse_anchor(text: &str, seq: &Encoded) -> Result<(u32, u32), Failure> {
    let lookup = |t: &str| {
        seq.vocabulary
            .iter()
            .position(|v| v == t.trim())
            .map(|i| i as u32)
            .ok_or_else(|| {
                Failure::Input(format!("anchor token {t:?} does not occur in the input"))
            })
    };
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Failure::Input("anchor must be two tokens a,b".into()))?;
    Ok((lookup(a)?, lookup(b)?))
}

/// Seed used when none is given; always reported in the output.
fn auto_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}
