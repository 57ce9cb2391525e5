//! i.i.d. sources, repetition channels and run-count statistics.
//!
//! Every random routine takes a 64-bit seed and draws from ChaCha8. Routines
//! with many independent trials give trial `t` its own stream `t` of the
//! seeded generator, so results do not depend on how trials are scheduled.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::Symbol;
use crate::error::{Error, Result};
use crate::prob::FloatDistribution;

/// Stream reserved for the channel so it never reuses the source's draws.
const CHANNEL_STREAM: u64 = 1 << 63;

/// Law of the number of copies the channel emits per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum RepetitionModel {
    /// Exactly one copy.
    Identity,
    /// `1 + G` copies where `P(G = g) = (1-ρ) ρ^g`.
    Geometric(f64),
    /// `pmf[i]` is the probability of `i + 1` copies.
    Pmf(Vec<f64>),
}

impl RepetitionModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Identity => Ok(()),
            Self::Geometric(rho) if (0.0..1.0).contains(rho) => Ok(()),
            Self::Geometric(rho) => Err(Error::InvalidArgument(format!(
                "geometric parameter must lie in [0, 1), got {rho}"
            ))),
            Self::Pmf(pmf) => {
                let total: f64 = pmf.iter().sum();
                if pmf.is_empty()
                    || pmf.iter().any(|&w| w.is_nan() || w < 0.0)
                    || (total - 1.0).abs() > 1e-9
                {
                    return Err(Error::InvalidArgument(
                        "copy-count pmf must be non-negative and sum to 1".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn mean_copies(&self) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Geometric(rho) => 1.0 / (1.0 - rho),
            Self::Pmf(pmf) => pmf
                .iter()
                .enumerate()
                .map(|(i, w)| (i + 1) as f64 * w)
                .sum(),
        }
    }
}

impl fmt::Display for RepetitionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Geometric(rho) => write!(f, "geometric:{rho}"),
            Self::Pmf(pmf) => {
                let parts: Vec<String> = pmf.iter().map(f64::to_string).collect();
                write!(f, "pmf:{}", parts.join(","))
            }
        }
    }
}

/// Parses `identity`, `geometric:<rho>` or `pmf:<w1>,<w2>,...`.
impl FromStr for RepetitionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown channel {s:?}"));
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let model = match kind.trim() {
            "identity" if arg.is_empty() => Self::Identity,
            "geometric" => Self::Geometric(arg.trim().parse().map_err(|_| bad())?),
            "pmf" => Self::Pmf(
                arg.split(',')
                    .map(|w| w.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

fn source_sampler(p: &FloatDistribution) -> WeightedIndex<f64> {
    WeightedIndex::new(p.probs()).expect("validated distribution")
}

/// `n` i.i.d. draws from `p`.
pub fn sample_source(p: &FloatDistribution, n: usize, seed: u64) -> Vec<Symbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = source_sampler(p);
    (0..n).map(|_| sampler.sample(&mut rng) as Symbol).collect()
}

/// Replaces every symbol of `x` by an independent number of copies.
pub fn apply_channel(x: &[Symbol], model: &RepetitionModel, seed: u64) -> Result<Vec<Symbol>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CHANNEL_STREAM);
    let mut out = Vec::with_capacity((x.len() as f64 * model.mean_copies()) as usize);
    match model {
        RepetitionModel::Identity => out.extend_from_slice(x),
        RepetitionModel::Geometric(rho) => {
            let extra = Geometric::new(1.0 - rho).expect("validated parameter");
            for &s in x {
                let copies = 1 + extra.sample(&mut rng) as usize;
                out.extend(std::iter::repeat_n(s, copies));
            }
        }
        RepetitionModel::Pmf(pmf) => {
            let copies = WeightedIndex::new(pmf).expect("validated pmf");
            for &s in x {
                out.extend(std::iter::repeat_n(s, 1 + copies.sample(&mut rng)));
            }
        }
    }
    Ok(out)
}

/// `E[R] = 1 + (n-1)(1 - Σ p_a²)` for `n ≥ 1` i.i.d. draws.
pub fn expected_runs(p: &FloatDistribution, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.0 + (n - 1) as f64 * (1.0 - p.collision_prob())
}

/// `n/2 - √(8 n ln n)`.
pub fn run_count_threshold(n: usize) -> f64 {
    let nf = n as f64;
    nf / 2.0 - (8.0 * nf * nf.ln()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailResult {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Trials whose run count was at most `threshold`.
    pub hits: usize,
    pub frequency: f64,
    pub mean_runs: f64,
    /// Sample variance of the run count.
    pub var_runs: f64,
    pub expected_runs: f64,
    /// Some symbol has probability at least 1/2.
    pub assumption_violated: bool,
}

/// Draws `trials` sources of length `n` and reports how often the number of
/// runs falls to `n/2 - √(8 n ln n)` or below.
pub fn run_count_tail(
    p: &FloatDistribution,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<TailResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let threshold = run_count_threshold(n);
    let sampler = source_sampler(p);
    let counts: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let mut runs = 0;
            let mut prev = usize::MAX;
            for _ in 0..n {
                let s = sampler.sample(&mut rng);
                if s != prev {
                    runs += 1;
                    prev = s;
                }
            }
            runs
        })
        .collect();
    let hits = counts.iter().filter(|&&r| r as f64 <= threshold).count();
    let mean = counts.iter().sum::<usize>() as f64 / trials as f64;
    let var = if trials > 1 {
        counts
            .iter()
            .map(|&r| (r as f64 - mean).powi(2))
            .sum::<f64>()
            / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(TailResult {
        n,
        trials,
        seed,
        threshold,
        hits,
        frequency: hits as f64 / trials as f64,
        mean_runs: mean,
        var_runs: var,
        expected_runs: expected_runs(p, n),
        assumption_violated: p.probs().iter().any(|&q| q >= 0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{alternating_of, run_count};
    use rand::Rng;

    fn uniform(m: usize) -> FloatDistribution {
        FloatDistribution::uniform(m).unwrap()
    }

    #[test]
    fn source_edge_cases() {
        assert!(sample_source(&uniform(3), 0, 1).is_empty());
        let point = FloatDistribution::new(vec![1.0]).unwrap();
        assert_eq!(sample_source(&point, 5, 9), vec![0; 5]);
        assert_eq!(
            sample_source(&uniform(3), 50, 4),
            sample_source(&uniform(3), 50, 4)
        );
    }

    #[test]
    fn binary_source_is_balanced() {
        let n = 100_000;
        let ones = sample_source(&uniform(2), n, 11)
            .iter()
            .filter(|&&s| s == 1)
            .count();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn channel_examples() {
        let x: Vec<u32> = "committee".bytes().map(u32::from).collect();
        assert_eq!(apply_channel(&x, &RepetitionModel::Identity, 3).unwrap(), x);
        let y: Vec<u32> = "ccommmiitttee".bytes().map(u32::from).collect();
        assert_eq!(alternating_of(&y), alternating_of(&x));
    }

    #[test]
    fn channel_preserves_alternating_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..1000u64 {
            let len = rng.random_range(0..60);
            let m = rng.random_range(1..5);
            let x = sample_source(&uniform(m), len, trial);
            let model = match trial % 3 {
                0 => RepetitionModel::Identity,
                1 => RepetitionModel::Geometric(rng.random_range(0.0..0.95)),
                _ => RepetitionModel::Pmf(vec![0.2, 0.5, 0.3]),
            };
            let y = apply_channel(&x, &model, trial).unwrap();
            assert!(y.len() >= x.len());
            assert_eq!(alternating_of(&y), alternating_of(&x));
        }
    }

    #[test]
    fn geometric_doubles_length_on_average() {
        let n = 20_000;
        let x = sample_source(&uniform(3), n, 1);
        let model = RepetitionModel::Geometric(0.5);
        let trials = 50;
        let mean = (0..trials)
            .map(|t| apply_channel(&x, &model, t).unwrap().len() as f64)
            .sum::<f64>()
            / trials as f64;
        // copies have variance ρ/(1-ρ)² = 2 per symbol
        let sigma = (2.0 * n as f64 / trials as f64).sqrt();
        assert!((mean - 2.0 * n as f64).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn model_parsing() {
        assert_eq!(
            "identity".parse::<RepetitionModel>().unwrap(),
            RepetitionModel::Identity
        );
        assert_eq!(
            "geometric:0.5".parse::<RepetitionModel>().unwrap(),
            RepetitionModel::Geometric(0.5)
        );
        assert_eq!(
            "pmf:0.5,0.5".parse::<RepetitionModel>().unwrap(),
            RepetitionModel::Pmf(vec![0.5, 0.5])
        );
        assert!("geometric:1".parse::<RepetitionModel>().is_err());
        assert!("pmf:0.5,0.2".parse::<RepetitionModel>().is_err());
        assert!("sticky".parse::<RepetitionModel>().is_err());
    }

    #[test]
    fn expected_runs_examples() {
        assert!((expected_runs(&uniform(2), 10) - 5.5).abs() < 1e-12);
        let point = FloatDistribution::new(vec![1.0]).unwrap();
        assert_eq!(expected_runs(&point, 1000), 1.0);
        let n = 77;
        assert!((expected_runs(&uniform(5), n) - (1.0 + 76.0 * 0.8)).abs() < 1e-12);
    }

    #[test]
    fn mean_run_count_matches() {
        let p = FloatDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let n = 500;
        let res = run_count_tail(&p, n, 2000, 21).unwrap();
        let sigma = (res.var_runs / 2000.0).sqrt();
        assert!((res.mean_runs - res.expected_runs).abs() < 4.0 * sigma);
        assert!(!res.assumption_violated);
        let direct = run_count(&sample_source(&p, n, 0)) as f64;
        assert!(direct > 0.0);
    }

    #[test]
    fn tail_flags_and_edge_cases() {
        let skewed = FloatDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!(
            run_count_tail(&skewed, 100, 10, 1)
                .unwrap()
                .assumption_violated
        );
        let res = run_count_tail(&uniform(4), 1, 10, 1).unwrap();
        // ln 1 = 0 leaves a threshold of 1/2, below the single run
        assert_eq!(res.threshold, 0.5);
        assert_eq!(res.frequency, 0.0);
        assert!(run_count_threshold(2) < 0.0);
        assert!(run_count_tail(&uniform(4), 10, 0, 1).is_err());
    }
}
