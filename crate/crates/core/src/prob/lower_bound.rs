//! Explicit distribution that certifies a lower bound on `sup_p p(ψ)` for
//! patterns of the form `1 a 1 b 1 c ...`.
//!
//! One symbol carries most of the mass, `1 - 1/(2r)`, and sits at every odd
//! position; the remaining `1/(2r)` is split among the inner symbols in
//! proportion to how often they occur.

use std::collections::BTreeMap;

use super::{alt_pattern_prob, alt_seq_prob, FloatDistribution};
use crate::combinatorics::{Pattern, Profile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LbConstruction {
    /// `½ ((2r-1)/(2r))^h ∏_μ φ_μ! (μ/h)^{μ φ_μ}` with `h = ⌊n/2⌋` and `φ` the
    /// profile of the inner pattern.
    pub bound: f64,
    /// The explicit distribution; index 0 is the dominant symbol, index
    /// `j - 1` carries label `j`.
    pub distribution: Vec<f64>,
    /// Chain probability of the word `ψ - 1` under `distribution`.
    pub sequence_prob: f64,
    /// Pattern probability of `ψ` under `distribution`.
    pub pattern_prob: f64,
}

/// Evaluates the interleaved-pattern bound and the distribution behind it.
pub fn lb_construction_prob(pattern: &Pattern, r: f64) -> Result<LbConstruction> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r must be finite and at least 1, got {r}"
        )));
    }
    let labels = pattern.labels();
    let n = labels.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "interleaved pattern needs n >= 2".into(),
        ));
    }
    let interleaved = labels
        .iter()
        .enumerate()
        .all(|(i, &l)| if i % 2 == 0 { l == 1 } else { l != 1 });
    if !interleaved {
        return Err(Error::NotInterleaved);
    }
    let h = n / 2;
    let mut inner_counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &l in labels.iter().skip(1).step_by(2) {
        *inner_counts.entry(l).or_insert(0) += 1;
    }
    let inner = Profile::from_parts(inner_counts.values().copied());

    let hf = h as f64;
    let mut bound = 0.5 * ((2.0 * r - 1.0) / (2.0 * r)).powi(h as i32);
    for (mu, phi) in inner.iter() {
        let factorial: f64 = (1..=phi).map(f64::from).product();
        bound *= factorial * (f64::from(mu) / hf).powi((mu * phi) as i32);
    }

    let k = pattern.num_labels() as usize;
    let mut probs = vec![0.0; k];
    probs[0] = 1.0 - 1.0 / (2.0 * r);
    for (&label, &count) in &inner_counts {
        probs[label as usize - 1] = f64::from(count) / (2.0 * hf * r);
    }
    let distribution = FloatDistribution::new(probs.clone())?;
    let word: Vec<u32> = labels.iter().map(|l| l - 1).collect();
    let sequence_prob = alt_seq_prob(&distribution, &word)?;
    let pattern_prob = alt_pattern_prob(&distribution, pattern)?;
    Ok(LbConstruction {
        bound,
        distribution: probs,
        sequence_prob,
        pattern_prob,
    })
}
