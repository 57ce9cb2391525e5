//! Recovering source probabilities from the alternating chain.
//!
//! The chain moves from `a` to `b ≠ a` with probability `p_b / (1 - p_a)`.
//! Two transition probabilities between a pair of symbols pin down both
//! source probabilities, and every other symbol follows from its ratio to the
//! second anchor symbol.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::combinatorics::{alternating_of, Symbol};
use crate::error::{Error, Result};
use crate::prob::{check_alternating, IidDistribution, Scalar};

/// Products `p12 · p21` at or above `1 - DEGENERACY_EPS` are rejected.
pub const DEGENERACY_EPS: f64 = 1e-9;

pub const DEFAULT_ALPHA: f64 = 0.5;

/// Transition probabilities between observed symbols. Row and column `i`
/// belong to `symbols[i]`; the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    pub symbols: Vec<Symbol>,
    pub probs: Vec<Vec<T>>,
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn index_of(&self, s: Symbol) -> Result<usize> {
        self.symbols
            .binary_search(&s)
            .map_err(|_| Error::UnknownSymbol(s))
    }

    pub fn get(&self, a: Symbol, b: Symbol) -> Result<&T> {
        Ok(&self.probs[self.index_of(a)?][self.index_of(b)?])
    }
}

/// Transitions of the chain induced by `p`, over symbols `0..m`.
pub fn exact_transitions<T: Scalar>(p: &IidDistribution<T>) -> Result<TransitionMatrix<T>> {
    let probs = p.probs();
    let m = probs.len();
    let mut rows = vec![vec![T::zero(); m]; m];
    for a in 0..m {
        let stay = T::one() - probs[a].clone();
        if stay.is_zero() {
            return Err(Error::DegenerateSymbol(a as Symbol));
        }
        for b in 0..m {
            if a != b {
                rows[a][b] = probs[b].clone() / stay.clone();
            }
        }
    }
    Ok(TransitionMatrix {
        symbols: (0..m as Symbol).collect(),
        probs: rows,
    })
}

/// Bigram counts of an alternating sequence with additive smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEstimate {
    pub matrix: TransitionMatrix<f64>,
    pub counts: Vec<Vec<u64>>,
    pub alpha: f64,
}

/// `p̂_ab = (count(ab) + α) / Σ_{b'≠a} (count(ab') + α)` over the symbols seen
/// in `v`. Rows with no mass stay zero.
pub fn bigram_transitions(v: &[Symbol], alpha: f64) -> Result<TransitionEstimate> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    check_alternating(v)?;
    let mut symbols: Vec<Symbol> = v.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    let m = symbols.len();
    let idx = |s: Symbol| symbols.binary_search(&s).unwrap();
    let mut counts = vec![vec![0u64; m]; m];
    for w in v.windows(2) {
        counts[idx(w[0])][idx(w[1])] += 1;
    }
    let probs = counts
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let total: f64 = row
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &c)| c as f64 + alpha)
                .sum();
            (0..m)
                .map(|b| {
                    if b == a || total == 0.0 {
                        0.0
                    } else {
                        (row[b] as f64 + alpha) / total
                    }
                })
                .collect()
        })
        .collect();
    Ok(TransitionEstimate {
        matrix: TransitionMatrix { symbols, probs },
        counts,
        alpha,
    })
}

/// Source probabilities of two symbols from the transitions between them:
/// `p1 = p21 (1 - p12) / (1 - p12 p21)`, `p2 = p12 (1 - p21) / (1 - p12 p21)`.
pub fn invert_pair<T: Scalar>(p12: &T, p21: &T) -> Result<(T, T)> {
    let product = p12.clone() * p21.clone();
    if product.to_f64() >= 1.0 - DEGENERACY_EPS {
        return Err(Error::BinaryDegenerate {
            product: product.to_f64(),
        });
    }
    let denom = T::one() - product;
    let p1 = p21.clone() * (T::one() - p12.clone()) / denom.clone();
    let p2 = p12.clone() * (T::one() - p21.clone()) / denom;
    Ok((p1, p2))
}

/// Result of inverting a transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovered<T> {
    /// Aligned with `symbols`; non-negative and summing to 1.
    pub probs: Vec<T>,
    pub symbols: Vec<Symbol>,
    /// Values before clamping and renormalization.
    pub raw: Vec<T>,
    pub pre_normalization_sum: T,
    pub anchor: (Symbol, Symbol),
}

impl<T: Scalar> Recovered<T> {
    /// Probabilities indexed by symbol, zero for symbols never observed.
    pub fn dense(&self) -> Vec<T> {
        let len = self.symbols.iter().max().map_or(0, |&s| s as usize + 1);
        let mut out = vec![T::zero(); len];
        for (&s, p) in self.symbols.iter().zip(&self.probs) {
            out[s as usize] = p.clone();
        }
        out
    }
}

/// Inverts `t` through the anchor pair `(a1, a2)`:
/// `p_j = p_{a2} · t[a1][j] / t[a1][a2]` for the remaining symbols.
pub fn invert_all<T: Scalar>(
    t: &TransitionMatrix<T>,
    anchor: (Symbol, Symbol),
) -> Result<Recovered<T>> {
    let (a1, a2) = anchor;
    if a1 == a2 {
        return Err(Error::InvalidArgument("anchor symbols must differ".into()));
    }
    let (i1, i2) = (t.index_of(a1)?, t.index_of(a2)?);
    let p12 = &t.probs[i1][i2];
    if p12.is_zero() {
        return Err(Error::ZeroAnchorTransition);
    }
    let (p1, p2) = invert_pair(p12, &t.probs[i2][i1])?;
    let raw: Vec<T> = (0..t.symbols.len())
        .map(|j| {
            if j == i1 {
                p1.clone()
            } else if j == i2 {
                p2.clone()
            } else {
                p2.clone() * t.probs[i1][j].clone() / p12.clone()
            }
        })
        .collect();
    let pre_normalization_sum = raw.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let clamped: Vec<T> = raw
        .iter()
        .map(|x| if *x < T::zero() { T::zero() } else { x.clone() })
        .collect();
    let total = clamped.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let probs = clamped.into_iter().map(|x| x / total.clone()).collect();
    Ok(Recovered {
        probs,
        symbols: t.symbols.clone(),
        raw,
        pre_normalization_sum,
        anchor,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOptions {
    pub alpha: f64,
    /// Defaults to the two most frequent symbols of the alternating sequence.
    pub anchor: Option<(Symbol, Symbol)>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub probs: Vec<f64>,
    pub symbols: Vec<Symbol>,
    pub pre_normalization_sum: f64,
    pub anchor: (Symbol, Symbol),
    pub n_alternating: usize,
}

impl Recovery {
    pub fn dense(&self) -> Vec<f64> {
        let len = self.symbols.iter().max().map_or(0, |&s| s as usize + 1);
        let mut out = vec![0.0; len];
        for (&s, &p) in self.symbols.iter().zip(&self.probs) {
            out[s as usize] = p;
        }
        out
    }
}

/// Collapses runs of `y`, estimates transitions and inverts them.
///
/// Two observed symbols always alternate deterministically, so the pair
/// transitions are both 1 and the call fails as binary-degenerate.
pub fn end_to_end_estimate(y: &[Symbol], opts: &RecoveryOptions) -> Result<Recovery> {
    let v = alternating_of(y);
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut freq: BTreeMap<Symbol, usize> = BTreeMap::new();
    for &s in &v {
        *freq.entry(s).or_insert(0) += 1;
    }
    if freq.len() < 2 {
        return Err(Error::TooFewSymbols(freq.len()));
    }
    let anchor = match opts.anchor {
        Some(a) => a,
        None => {
            let mut ranked: Vec<(Symbol, usize)> = freq.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            (ranked[0].0, ranked[1].0)
        }
    };
    let estimate = bigram_transitions(&v, opts.alpha)?;
    let rec = invert_all(&estimate.matrix, anchor)?;
    Ok(Recovery {
        probs: rec.probs,
        symbols: rec.symbols,
        pre_normalization_sum: rec.pre_normalization_sum,
        anchor,
        n_alternating: v.len(),
    })
}

/// `½ Σ |p_i - q_i|`, padding the shorter vector with zeros.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}
