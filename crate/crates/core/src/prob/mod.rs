//! Probability laws induced by an i.i.d. source.
//!
//! Two arithmetic modes share one code path through the [`Scalar`] trait:
//! exact [`BigRational`] values, used wherever a claim is an identity, and
//! `f64`, used for optimization and large inputs. The mode is picked by the
//! distribution's element type; nothing converts between the two silently.

mod injection;
mod lower_bound;
mod sup;

pub use injection::{
    alt_class_prob, alt_pattern_prob, alt_pattern_prob_by_injection, iid_pattern_prob,
    iid_pattern_prob_by_injection, MAX_INJECTION_LABELS,
};
pub use lower_bound::{lb_construction_prob, LbConstruction};
pub use sup::{sup_alt_class_prob, sup_alt_pattern_prob, sup_by_class, SupEstimate, SupOptions};

use std::fmt::{self, Debug};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{is_alternating, Symbol};
use crate::error::{Error, Result};

/// Numeric type probabilities are computed in.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    fn from_u32(v: u32) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether `self` is an acceptable total for a probability vector.
    fn is_unit_sum(&self) -> bool;
}

impl Scalar for f64 {
    fn from_u32(v: u32) -> Self {
        f64::from(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_unit_sum(&self) -> bool {
        (self - 1.0).abs() <= 1e-12
    }
}

impl Scalar for BigRational {
    fn from_u32(v: u32) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_unit_sum(&self) -> bool {
        self.is_one()
    }
}

pub(crate) fn pow<T: Scalar>(base: &T, exp: u32) -> T {
    let mut out = T::one();
    for _ in 0..exp {
        out = out * base.clone();
    }
    out
}

/// Probability vector over the alphabet `0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct IidDistribution<T> {
    probs: Vec<T>,
}

pub type RationalDistribution = IidDistribution<BigRational>;
pub type FloatDistribution = IidDistribution<f64>;

impl<T: Scalar> IidDistribution<T> {
    /// Requires every entry in `(0, 1]` and a unit total (exact for
    /// rationals, within `1e-12` for floats).
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(
                "empty probability vector".into(),
            ));
        }
        for (i, p) in probs.iter().enumerate() {
            if *p <= T::zero() || *p > T::one() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} = {p:?} is not in (0, 1]"
                )));
            }
        }
        let total = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !total.is_unit_sum() {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total:?}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        let each = T::one() / T::from_u32(m as u32);
        Ok(Self {
            probs: vec![each; m],
        })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Alphabet size `m`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, s: Symbol) -> Result<&T> {
        self.probs.get(s as usize).ok_or(Error::SymbolOutOfSupport {
            symbol: s,
            alphabet: self.probs.len(),
        })
    }

    pub fn to_float(&self) -> FloatDistribution {
        let probs: Vec<f64> = self.probs.iter().map(Scalar::to_f64).collect();
        let total: f64 = probs.iter().sum();
        IidDistribution {
            probs: probs.into_iter().map(|p| p / total).collect(),
        }
    }

    /// `Σ_a p_a²`, the probability that two independent draws agree.
    pub fn collision_prob(&self) -> T {
        self.probs
            .iter()
            .fold(T::zero(), |acc, p| acc + p.clone() * p.clone())
    }
}

impl RationalDistribution {
    /// Builds from `(numerator, denominator)` pairs.
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            ratios
                .iter()
                .map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
                .collect(),
        )
    }
}

/// Parses `"1/3"`, `"2"` or an exact decimal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidDistribution(format!("cannot parse {text:?} as a rational"));
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    Ok(BigRational::from_integer(
        BigInt::from_str(text).map_err(|_| bad())?,
    ))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A distribution read from JSON, in whichever mode the file used.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyDistribution {
    Exact(RationalDistribution),
    Float(FloatDistribution),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProbEntry {
    Text(String),
    Number(f64),
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    probs: Vec<ProbEntry>,
}

impl AnyDistribution {
    /// `{"probs":["1/3","1/3","1/3"]}` is exact; `{"probs":[0.5,0.5]}` is float.
    /// Mixing the two forms is rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidDistribution(format!("bad distribution JSON: {e}")))?;
        let all_text = file.probs.iter().all(|e| matches!(e, ProbEntry::Text(_)));
        let all_num = file.probs.iter().all(|e| matches!(e, ProbEntry::Number(_)));
        if all_text {
            let probs = file
                .probs
                .iter()
                .map(|e| match e {
                    ProbEntry::Text(t) => parse_rational(t),
                    ProbEntry::Number(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Self::Exact(IidDistribution::new(probs)?))
        } else if all_num {
            let probs = file
                .probs
                .iter()
                .map(|e| match e {
                    ProbEntry::Number(x) => *x,
                    ProbEntry::Text(_) => unreachable!(),
                })
                .collect();
            Ok(Self::Float(IidDistribution::new(probs)?))
        } else {
            Err(Error::InvalidDistribution(
                "probabilities mix rational strings and numbers".into(),
            ))
        }
    }

    pub fn to_json(&self) -> String {
        let probs = match self {
            Self::Exact(d) => d
                .probs()
                .iter()
                .map(|p| ProbEntry::Text(format_rational(p)))
                .collect(),
            Self::Float(d) => d.probs().iter().map(|&p| ProbEntry::Number(p)).collect(),
        };
        serde_json::to_string(&DistributionFile { probs }).expect("serializable")
    }

    pub fn to_float(&self) -> FloatDistribution {
        match self {
            Self::Exact(d) => d.to_float(),
            Self::Float(d) => d.clone(),
        }
    }
}

/// Natural-log probability with an exact zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_prob(p: f64) -> Self {
        debug_assert!(p >= 0.0);
        LogProb(p.ln())
    }

    pub fn from_ln(value: f64) -> Self {
        LogProb(value)
    }

    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        // numerator and denominator may overflow f64 separately
        LogProb(ln_big(r.numer()) - ln_big(r.denom()))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log2(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for LogProb {
    type Output = LogProb;
    fn mul(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 + rhs.0)
    }
}

impl std::ops::Add for LogProb {
    type Output = LogProb;
    fn add(self, rhs: LogProb) -> LogProb {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogProb(hi + (lo - hi).exp().ln_1p())
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ln {}", self.0)
    }
}

fn ln_big(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top = (v.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `p^n(x) = ∏ p_{x_j}`.
pub fn seq_prob<T: Scalar>(p: &IidDistribution<T>, x: &[Symbol]) -> Result<T> {
    x.iter()
        .try_fold(T::one(), |acc, &s| Ok(acc * p.prob(s)?.clone()))
}

/// Probability of an alternating sequence under the chain induced by `p`:
/// `p_{v_1} ∏_{j≥2} p_{v_j} / (1 - p_{v_{j-1}})`.
pub fn alt_seq_prob<T: Scalar>(p: &IidDistribution<T>, v: &[Symbol]) -> Result<T> {
    if let Some(i) = v.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::NotAlternating(i + 1));
    }
    let Some((&first, rest)) = v.split_first() else {
        return Ok(T::one());
    };
    let mut out = p.prob(first)?.clone();
    let mut prev = first;
    for &s in rest {
        let stay = T::one() - p.prob(prev)?.clone();
        if stay.is_zero() {
            return Err(Error::DegenerateSymbol(prev));
        }
        out = out * p.prob(s)?.clone() / stay;
        prev = s;
    }
    Ok(out)
}

pub(crate) fn check_alternating(labels: &[u32]) -> Result<()> {
    if is_alternating(labels) {
        Ok(())
    } else {
        let i = labels.windows(2).position(|w| w[0] == w[1]).unwrap();
        Err(Error::NotAlternating(i + 1))
    }
}
