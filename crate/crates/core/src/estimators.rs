//! Pattern-probability estimators for alternating sequences.
//!
//! The block estimator spreads mass evenly over classes, then evenly inside a
//! class: `q(ψ) = 1/(L(ψ) Z_n)`. Its marginals `q^h(ψ^i)` give a sequential
//! estimator for a known horizon `h`, and switching horizons at powers of two
//! gives one that needs no horizon at all.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{
    class_of_counts, for_each_alternating_pattern, ClassCounter, Pattern, PatternClass,
};
use crate::error::{Error, Result};
use crate::guard::Guard;
use crate::prob::{check_alternating, LogProb, SupEstimate};

/// Anything that assigns an exact probability to a pattern.
pub trait PatternEstimator {
    fn prob(&self, pattern: &Pattern) -> Result<BigRational>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEstimate {
    pub pattern: Pattern,
    pub q: BigRational,
    pub l: BigUint,
    pub z: BigUint,
}

/// Block estimator for patterns of one fixed length.
#[derive(Debug, Clone)]
pub struct BlockEstimator {
    n: usize,
    sizes: HashMap<PatternClass, BigUint>,
    z: BigUint,
}

impl BlockEstimator {
    pub fn new(n: usize, guard: &Guard) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "pattern length must be at least 1".into(),
            ));
        }
        guard.check_patterns(n)?;
        let sizes: HashMap<_, _> = ClassCounter::new()
            .realizable_classes(n as u32)
            .into_iter()
            .collect();
        let z = BigUint::from(sizes.len());
        Ok(Self { n, sizes, z })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn z(&self) -> &BigUint {
        &self.z
    }

    pub fn estimate(&self, pattern: &Pattern) -> Result<BlockEstimate> {
        check_alternating(pattern.labels())?;
        if pattern.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "pattern has length {}, estimator was built for {}",
                pattern.len(),
                self.n
            )));
        }
        let class = pattern.class().expect("non-empty");
        let l = self.sizes[&class].clone();
        let q = BigRational::new(BigInt::one(), BigInt::from(&l * &self.z));
        Ok(BlockEstimate {
            pattern: pattern.clone(),
            q,
            l,
            z: self.z.clone(),
        })
    }
}

impl PatternEstimator for BlockEstimator {
    fn prob(&self, pattern: &Pattern) -> Result<BigRational> {
        Ok(self.estimate(pattern)?.q)
    }
}

/// `q(ψ) = 1/(L(ψ) Z_n)` with `n = |ψ|`.
pub fn block_q(pattern: &Pattern, guard: &Guard) -> Result<BlockEstimate> {
    check_alternating(pattern.labels())?;
    BlockEstimator::new(pattern.len(), guard)?.estimate(pattern)
}

type StateKey = (Vec<u32>, u32, u32);

/// Marginals `q^h(ψ^i) = Σ q(z)` over length-`h` patterns `z` extending `ψ^i`.
///
/// The sum only depends on the sorted label counts of the prefix, the count of
/// its last label and the number of steps left, so it is tabulated over those
/// states once, at construction.
#[derive(Debug, Clone)]
pub struct MarginalTable {
    horizon: usize,
    z: BigUint,
    /// State to `Σ 1/L` over completions.
    table: HashMap<StateKey, BigRational>,
}

impl MarginalTable {
    pub fn new(horizon: usize, guard: &Guard) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        guard.check_patterns(horizon)?;
        let mut counter = ClassCounter::new();
        let mut table = HashMap::new();
        let root = fill(&mut table, &mut counter, vec![1], 1, horizon as u32 - 1);
        let z = BigUint::from(counter.realizable_classes(horizon as u32).len());
        debug_assert_eq!(root, BigRational::from_integer(BigInt::from(z.clone())));
        Ok(Self { horizon, z, table })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `q^h(prefix)`; the empty prefix has marginal 1.
    pub fn marginal(&self, prefix: &Pattern) -> Result<BigRational> {
        check_alternating(prefix.labels())?;
        if prefix.len() > self.horizon {
            return Err(Error::PrefixTooLong {
                prefix_len: prefix.len(),
                horizon: self.horizon,
            });
        }
        if prefix.is_empty() {
            return Ok(BigRational::one());
        }
        let mut counts = prefix.multiplicities();
        let last = counts[*prefix.labels().last().unwrap() as usize - 1];
        counts.sort_unstable();
        let key = (counts, last, (self.horizon - prefix.len()) as u32);
        let g = &self.table[&key];
        Ok(g / BigRational::from_integer(BigInt::from(self.z.clone())))
    }

    /// `q^h(prefix · next) / q^h(prefix)`.
    pub fn conditional(&self, prefix: &Pattern, next: u32) -> Result<BigRational> {
        let extended = extend(prefix, next)?;
        if extended.len() > self.horizon {
            return Err(Error::PrefixTooLong {
                prefix_len: extended.len(),
                horizon: self.horizon,
            });
        }
        Ok(self.marginal(&extended)? / self.marginal(prefix)?)
    }
}

/// `Σ 1/L(z)` over all completions `z` of a prefix in the given state.
fn fill(
    table: &mut HashMap<StateKey, BigRational>,
    counter: &mut ClassCounter,
    counts: Vec<u32>,
    last: u32,
    remaining: u32,
) -> BigRational {
    let key = (counts, last, remaining);
    if let Some(v) = table.get(&key) {
        return v.clone();
    }
    let (counts, last, remaining) = key;
    let value = if remaining == 0 {
        let l = counter.class_size(&class_of_counts(&counts, last));
        BigRational::new(BigInt::one(), BigInt::from(l))
    } else {
        let mut total = BigRational::zero();
        let mut i = 0;
        while i < counts.len() {
            let c = counts[i];
            let mut j = i;
            while j < counts.len() && counts[j] == c {
                j += 1;
            }
            let ways = (j - i) as u32 - u32::from(c == last);
            if ways > 0 {
                // bump the last copy of `c` so the vector stays sorted
                let mut next = counts.clone();
                next[j - 1] += 1;
                let sub = fill(table, counter, next, c + 1, remaining - 1);
                total += sub * BigRational::from_integer(BigInt::from(ways));
            }
            i = j;
        }
        let mut next = counts.clone();
        next.insert(0, 1);
        total += fill(table, counter, next, 1, remaining - 1);
        total
    };
    table.insert((counts, last, remaining), value.clone());
    value
}

/// Appends `next` to `prefix`, rejecting repeats and skipped labels.
fn extend(prefix: &Pattern, next: u32) -> Result<Pattern> {
    let labels = prefix.labels();
    let fresh = prefix.num_labels() + 1;
    if next == 0 || next > fresh || labels.last() == Some(&next) {
        return Err(Error::IllegalExtension {
            label: next,
            prefix_len: labels.len(),
        });
    }
    let mut out = labels.to_vec();
    out.push(next);
    Pattern::new(out)
}

/// Labels that may follow `prefix` in an alternating pattern.
pub fn legal_extensions(prefix: &Pattern) -> Vec<u32> {
    let last = prefix.labels().last().copied();
    (1..=prefix.num_labels() + 1)
        .filter(|&l| Some(l) != last)
        .collect()
}

/// `q^h(prefix)`.
pub fn marginal_q(prefix: &Pattern, horizon: usize, guard: &Guard) -> Result<BigRational> {
    if prefix.len() > horizon {
        return Err(Error::PrefixTooLong {
            prefix_len: prefix.len(),
            horizon,
        });
    }
    MarginalTable::new(horizon, guard)?.marginal(prefix)
}

/// `q_{1/2}^h(next | prefix) = q^h(prefix · next) / q^h(prefix)`.
pub fn seq_conditional(
    prefix: &Pattern,
    next: u32,
    horizon: usize,
    guard: &Guard,
) -> Result<BigRational> {
    extend(prefix, next)?;
    if prefix.len() + 1 > horizon {
        return Err(Error::PrefixTooLong {
            prefix_len: prefix.len() + 1,
            horizon,
        });
    }
    MarginalTable::new(horizon, guard)?.conditional(prefix, next)
}

/// Smallest power of two that is at least `i`.
pub fn doubling_horizon(i: usize) -> usize {
    i.max(1).next_power_of_two()
}

/// How the sequential estimator picks its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// One horizon for every step.
    Fixed(usize),
    /// Step `i` uses the smallest power of two `≥ i`.
    Doubling,
}

/// Sequential estimator built from marginal tables.
#[derive(Debug, Clone)]
pub struct SequentialEstimator {
    mode: Horizon,
    tables: BTreeMap<usize, MarginalTable>,
}

impl SequentialEstimator {
    pub fn fixed(horizon: usize, guard: &Guard) -> Result<Self> {
        let table = MarginalTable::new(horizon, guard)?;
        Ok(Self {
            mode: Horizon::Fixed(horizon),
            tables: BTreeMap::from([(horizon, table)]),
        })
    }

    /// Horizon-free estimator for patterns of length up to `max_len`.
    pub fn doubling(max_len: usize, guard: &Guard) -> Result<Self> {
        let mut tables = BTreeMap::new();
        let mut h = 1;
        while h <= doubling_horizon(max_len) {
            tables.insert(h, MarginalTable::new(h, guard)?);
            h *= 2;
        }
        Ok(Self {
            mode: Horizon::Doubling,
            tables,
        })
    }

    pub fn mode(&self) -> Horizon {
        self.mode
    }

    /// Longest pattern the estimator can score.
    pub fn max_len(&self) -> usize {
        *self.tables.keys().next_back().unwrap()
    }

    /// Horizon used for the `i`-th symbol (1-based).
    pub fn horizon_at(&self, i: usize) -> usize {
        match self.mode {
            Horizon::Fixed(h) => h,
            Horizon::Doubling => doubling_horizon(i),
        }
    }

    pub fn table(&self, horizon: usize) -> Option<&MarginalTable> {
        self.tables.get(&horizon)
    }

    /// Conditional probability of `next` after `prefix`.
    pub fn conditional(&self, prefix: &Pattern, next: u32) -> Result<BigRational> {
        let i = prefix.len() + 1;
        let h = self.horizon_at(i);
        let table = self.tables.get(&h).ok_or(Error::PrefixTooLong {
            prefix_len: i,
            horizon: self.max_len(),
        })?;
        table.conditional(prefix, next)
    }

    pub fn start(&self) -> SequentialState {
        SequentialState {
            prefix: Pattern::new(Vec::new()).unwrap(),
            horizon: self.horizon_at(1),
            log_prob: LogProb::ONE,
        }
    }
}

impl PatternEstimator for SequentialEstimator {
    /// Product of the conditionals along `pattern`.
    fn prob(&self, pattern: &Pattern) -> Result<BigRational> {
        check_alternating(pattern.labels())?;
        let mut out = BigRational::one();
        for i in 0..pattern.len() {
            out *= self.conditional(&pattern.prefix(i), pattern.labels()[i])?;
        }
        Ok(out)
    }
}

/// Progress of a sequential estimator along one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialState {
    pub prefix: Pattern,
    /// Horizon that will score the next symbol.
    pub horizon: usize,
    pub log_prob: LogProb,
}

impl SequentialState {
    /// Scores `next`, appends it and returns its conditional probability.
    pub fn push(&mut self, est: &SequentialEstimator, next: u32) -> Result<BigRational> {
        let c = est.conditional(&self.prefix, next)?;
        self.prefix = extend(&self.prefix, next)?;
        self.horizon = est.horizon_at(self.prefix.len() + 1);
        self.log_prob = self.log_prob * LogProb::from_rational(&c);
        Ok(c)
    }
}

/// `q_{1/2}(next | prefix)` using horizon `2^⌈log₂ i⌉` for position `i`.
pub fn horizon_free_conditional(prefix: &Pattern, next: u32, guard: &Guard) -> Result<BigRational> {
    extend(prefix, next)?;
    let h = doubling_horizon(prefix.len() + 1);
    MarginalTable::new(h, guard)?.conditional(prefix, next)
}

/// `q_{1/2}(ψ)`, the product of horizon-free conditionals.
pub fn horizon_free_prob(pattern: &Pattern, guard: &Guard) -> Result<BigRational> {
    check_alternating(pattern.labels())?;
    SequentialEstimator::doubling(pattern.len(), guard)?.prob(pattern)
}

/// Worst pattern and its redundancy in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredRedundancy {
    pub bits: f64,
    pub worst: Pattern,
}

/// `max_ψ log₂(sup_p p(ψ) / q(ψ))` over alternating patterns of length `n`,
/// given the per-class sup estimates for that length.
pub fn measured_redundancy<E: PatternEstimator + ?Sized>(
    estimator: &E,
    n: usize,
    sups: &BTreeMap<PatternClass, SupEstimate>,
) -> Result<MeasuredRedundancy> {
    let mut best: Option<MeasuredRedundancy> = None;
    let mut failure = None;
    for_each_alternating_pattern(n, |labels, _| {
        if failure.is_some() {
            return;
        }
        let pattern = Pattern::new(labels.to_vec()).expect("canonical");
        let class = pattern.class().expect("non-empty");
        let sup = match sups.get(&class) {
            Some(s) => s.value,
            None => {
                failure = Some(Error::InvalidArgument(format!(
                    "no sup estimate for {pattern}"
                )));
                return;
            }
        };
        let q = match estimator.prob(&pattern) {
            Ok(q) => q,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let bits = sup.log2() - LogProb::from_rational(&q).log2();
        if best.as_ref().is_none_or(|b| bits > b.bits) {
            best = Some(MeasuredRedundancy {
                bits,
                worst: pattern,
            });
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    best.ok_or_else(|| Error::InvalidArgument("pattern length must be at least 1".into()))
}
