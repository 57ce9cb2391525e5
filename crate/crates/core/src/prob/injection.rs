//! Pattern probabilities as sums over injections of labels into the alphabet.
//!
//! For an alternating word the chain probability collapses to
//! `(1 - p_{v_n}) ∏_s (p_s / (1 - p_s))^{μ_s}`, so the contribution of an
//! injection depends only on which multiplicity each symbol receives and on
//! which symbol carries the final label. The main routine therefore walks the
//! alphabet once, tracking how many labels of every multiplicity remain
//! unassigned. The literal sum over injections is kept as a reference.

use super::{alt_seq_prob, check_alternating, pow, seq_prob, IidDistribution, Scalar};
use crate::combinatorics::{Pattern, PatternClass};
use crate::error::{Error, Result};

/// Label limit for the literal injection sums.
pub const MAX_INJECTION_LABELS: usize = 8;

/// Labels grouped by multiplicity, with the final label kept apart.
pub(super) struct Shape {
    // (multiplicity, number of labels)
    pub(super) groups: Vec<(u32, u32)>,
    pub(super) last: Option<u32>,
}

impl Shape {
    pub(super) fn num_labels(&self) -> usize {
        self.groups.iter().map(|&(_, c)| c as usize).sum::<usize>() + self.last.is_some() as usize
    }

    pub(super) fn from_class(class: &PatternClass) -> Result<Self> {
        let k = class.last_multiplicity;
        if class.profile.count(k) == 0 {
            return Err(Error::InvalidPattern(format!(
                "no label of multiplicity {k} in profile {}",
                class.profile
            )));
        }
        let groups = class
            .profile
            .iter()
            .map(|(mu, c)| (mu, if mu == k { c - 1 } else { c }))
            .filter(|&(_, c)| c > 0)
            .collect();
        Ok(Self {
            groups,
            last: Some(k),
        })
    }

    fn iid(pattern: &Pattern) -> Self {
        let profile = pattern.profile();
        Self {
            groups: profile.iter().collect(),
            last: None,
        }
    }
}

/// Precomputed state space for [`Layout::sum`].
///
/// A state records how many labels of every multiplicity group are still
/// unassigned, plus whether the final label is. Transitions assign one label
/// to the symbol being processed.
pub(super) struct Layout {
    size: usize,
    // (from, to, weight index, number of interchangeable labels)
    transitions: Vec<(usize, usize, usize, u32)>,
}

impl Layout {
    pub(super) fn new(shape: &Shape) -> Self {
        let g = shape.groups.len();
        let mut strides = Vec::with_capacity(g);
        let mut size = 1usize;
        for &(_, c) in &shape.groups {
            strides.push(size);
            size *= c as usize + 1;
        }
        let last_stride = size;
        if shape.last.is_some() {
            size *= 2;
        }
        let mut transitions = Vec::new();
        for state in 0..size {
            let mut idx = state;
            for (gi, &(_, c)) in shape.groups.iter().enumerate() {
                let remaining = idx % (c as usize + 1);
                idx /= c as usize + 1;
                if remaining > 0 {
                    transitions.push((state, state - strides[gi], gi, remaining as u32));
                }
            }
            if shape.last.is_some() && idx == 1 {
                transitions.push((state, state - last_stride, g, 1));
            }
        }
        Self { size, transitions }
    }

    /// `Σ_f ∏_label weight(f(label), μ_label)` over injections `f`, processing
    /// one alphabet symbol at a time. `weights[s]` holds the per-group weights
    /// of symbol `s`, followed by its final-label weight when there is one.
    pub(super) fn sum<T: Scalar>(&self, weights: &[Vec<T>]) -> T {
        let mut table = vec![T::zero(); self.size];
        table[self.size - 1] = T::one();
        for w in weights {
            let mut next = table.clone();
            for &(from, to, wi, ways) in &self.transitions {
                if table[from].is_zero() {
                    continue;
                }
                let add = if ways == 1 {
                    table[from].clone() * w[wi].clone()
                } else {
                    table[from].clone() * T::from_u32(ways) * w[wi].clone()
                };
                next[to] = next[to].clone() + add;
            }
            table = next;
        }
        table.swap_remove(0)
    }
}

fn check_labels(labels: usize, alphabet: usize) -> Result<()> {
    if labels > alphabet {
        Err(Error::TooManyLabels { labels, alphabet })
    } else {
        Ok(())
    }
}

/// Probability that the alternating chain induced by `p` produces a word in
/// `class` at one specific pattern of that class.
pub fn alt_class_prob<T: Scalar>(p: &IidDistribution<T>, class: &PatternClass) -> Result<T> {
    let shape = Shape::from_class(class)?;
    check_labels(shape.num_labels(), p.len())?;
    let k = shape.last.unwrap();
    let mut weights = Vec::with_capacity(p.len());
    for (s, ps) in p.probs().iter().enumerate() {
        let stay = T::one() - ps.clone();
        let needs_ratio = !shape.groups.is_empty() || k > 1;
        if stay.is_zero() && needs_ratio {
            return Err(Error::DegenerateSymbol(s as u32));
        }
        let mut w: Vec<T> = shape
            .groups
            .iter()
            .map(|&(mu, _)| pow(&(ps.clone() / stay.clone()), mu))
            .collect();
        let last = if k == 1 {
            ps.clone()
        } else {
            pow(ps, k) / pow(&stay, k - 1)
        };
        w.push(last);
        weights.push(w);
    }
    Ok(Layout::new(&shape).sum(&weights))
}

/// `p(ψ)` for an alternating pattern under the alternating chain of `p`.
pub fn alt_pattern_prob<T: Scalar>(p: &IidDistribution<T>, pattern: &Pattern) -> Result<T> {
    check_alternating(pattern.labels())?;
    match pattern.class() {
        None => Ok(T::one()),
        Some(class) => alt_class_prob(p, &class),
    }
}

/// `p^n({x : Ψ(x) = ψ})` for i.i.d. draws (no alternation constraint).
pub fn iid_pattern_prob<T: Scalar>(p: &IidDistribution<T>, pattern: &Pattern) -> Result<T> {
    let shape = Shape::iid(pattern);
    check_labels(shape.num_labels(), p.len())?;
    let weights: Vec<Vec<T>> = p
        .probs()
        .iter()
        .map(|ps| shape.groups.iter().map(|&(mu, _)| pow(ps, mu)).collect())
        .collect();
    Ok(Layout::new(&shape).sum(&weights))
}

/// Literal sum of [`alt_seq_prob`] over every word with pattern `ψ`.
pub fn alt_pattern_prob_by_injection<T: Scalar>(
    p: &IidDistribution<T>,
    pattern: &Pattern,
) -> Result<T> {
    check_alternating(pattern.labels())?;
    sum_over_injections(p, pattern, |word| alt_seq_prob(p, word))
}

/// Literal sum of [`seq_prob`] over every word with pattern `ψ`.
pub fn iid_pattern_prob_by_injection<T: Scalar>(
    p: &IidDistribution<T>,
    pattern: &Pattern,
) -> Result<T> {
    sum_over_injections(p, pattern, |word| seq_prob(p, word))
}

fn sum_over_injections<T: Scalar, F>(
    p: &IidDistribution<T>,
    pattern: &Pattern,
    term: F,
) -> Result<T>
where
    F: Fn(&[u32]) -> Result<T>,
{
    let k = pattern.num_labels() as usize;
    if k > MAX_INJECTION_LABELS {
        return Err(Error::GuardExceeded {
            n: k,
            limit: MAX_INJECTION_LABELS,
        });
    }
    check_labels(k, p.len())?;

    fn rec<T: Scalar, F: Fn(&[u32]) -> Result<T>>(
        assigned: &mut Vec<u32>,
        used: &mut [bool],
        k: usize,
        pattern: &[u32],
        word: &mut [u32],
        term: &F,
    ) -> Result<T> {
        if assigned.len() == k {
            for (w, &l) in word.iter_mut().zip(pattern) {
                *w = assigned[l as usize - 1];
            }
            return term(word);
        }
        let mut total = T::zero();
        for s in 0..used.len() {
            if used[s] {
                continue;
            }
            used[s] = true;
            assigned.push(s as u32);
            total = total + rec(assigned, used, k, pattern, word, term)?;
            assigned.pop();
            used[s] = false;
        }
        Ok(total)
    }

    let mut word = vec![0; pattern.len()];
    rec(
        &mut Vec::with_capacity(k),
        &mut vec![false; p.len()],
        k,
        pattern.labels(),
        &mut word,
        &term,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{enumerate_alternating_patterns, Profile};
    use crate::guard::Guard;
    use crate::prob::RationalDistribution;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    #[test]
    fn iid_examples() {
        let any = RationalDistribution::from_ratios(&[(1, 5), (4, 5)]).unwrap();
        assert_eq!(iid_pattern_prob(&any, &pat("1")).unwrap(), q(1, 1));
        let p = RationalDistribution::from_ratios(&[(1, 3), (2, 3)]).unwrap();
        // q^2 + (1-q)^2
        assert_eq!(iid_pattern_prob(&p, &pat("11")).unwrap(), q(5, 9));
        let u2 = RationalDistribution::uniform(2).unwrap();
        assert_eq!(iid_pattern_prob(&u2, &pat("12")).unwrap(), q(1, 2));
        assert!(matches!(
            iid_pattern_prob(&u2, &pat("123")),
            Err(Error::TooManyLabels {
                labels: 3,
                alphabet: 2
            })
        ));
    }

    #[test]
    fn alternating_examples() {
        for (a, b) in [(1, 2), (1, 3), (9, 10)] {
            let p = RationalDistribution::from_ratios(&[(a, b), (b - a, b)]).unwrap();
            assert_eq!(alt_pattern_prob(&p, &pat("121")).unwrap(), q(1, 1));
        }
        let u3 = RationalDistribution::uniform(3).unwrap();
        assert_eq!(alt_pattern_prob(&u3, &pat("123")).unwrap(), q(1, 2));
        assert_eq!(alt_pattern_prob(&u3, &pat("121")).unwrap(), q(1, 2));
        assert_eq!(
            alt_pattern_prob_by_injection(&u3, &pat("123")).unwrap(),
            q(1, 2)
        );
        assert!(matches!(
            alt_pattern_prob(&u3, &pat("1221")),
            Err(Error::NotAlternating(2))
        ));
        let point = RationalDistribution::uniform(1).unwrap();
        assert_eq!(alt_pattern_prob(&point, &pat("1")).unwrap(), q(1, 1));
        assert!(alt_pattern_prob(&point, &pat("12")).is_err());
    }

    #[test]
    fn class_prob_rejects_missing_multiplicity() {
        let u3 = RationalDistribution::uniform(3).unwrap();
        let class = PatternClass {
            profile: Profile::from_parts([1, 1]),
            last_multiplicity: 2,
        };
        assert!(alt_class_prob(&u3, &class).is_err());
    }

    #[test]
    fn injection_guard() {
        let u = RationalDistribution::uniform(9).unwrap();
        let p = pat("123456789");
        assert!(matches!(
            alt_pattern_prob_by_injection(&u, &p),
            Err(Error::GuardExceeded { n: 9, limit: 8 })
        ));
        assert!(alt_pattern_prob(&u, &p).is_ok());
    }

    #[test]
    fn alternating_normalization_exact() {
        let dists = [
            RationalDistribution::from_ratios(&[(1, 2), (1, 3), (1, 6)]).unwrap(),
            RationalDistribution::from_ratios(&[(2, 5), (1, 5), (1, 5), (1, 5)]).unwrap(),
            RationalDistribution::from_ratios(&[(3, 4), (1, 4)]).unwrap(),
        ];
        for p in &dists {
            for n in 1..=8 {
                let mut total = BigRational::zero();
                for psi in enumerate_alternating_patterns(n, &Guard::default()).unwrap() {
                    if psi.num_labels() as usize <= p.len() {
                        total += alt_pattern_prob(p, &psi).unwrap();
                    }
                }
                assert!(total.is_one(), "n={n}");
            }
        }
    }

    #[test]
    fn iid_normalization_exact() {
        // all patterns of length 4 (not only alternating)
        let p = RationalDistribution::from_ratios(&[(1, 2), (1, 4), (1, 8), (1, 8)]).unwrap();
        let mut total = BigRational::zero();
        for code in 0..256u32 {
            let w: Vec<u32> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
            let psi = crate::combinatorics::pattern_of(&w).unwrap();
            if psi.labels() == w.iter().map(|x| x + 1).collect::<Vec<_>>().as_slice() {
                total += iid_pattern_prob(&p, &psi).unwrap();
            }
        }
        // only canonical words counted once each; their probabilities sum to 1
        assert!(total.is_one());
    }

    fn small_rational_dist() -> impl Strategy<Value = RationalDistribution> {
        prop::collection::vec(1i64..12, 2..=5).prop_map(|w| {
            let total: i64 = w.iter().sum();
            RationalDistribution::new(
                w.iter()
                    .map(|&a| BigRational::new(a.into(), total.into()))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn dp_matches_injection_oracle(p in small_rational_dist(), n in 1usize..=6, pick in 0usize..1000) {
            let patterns: Vec<Pattern> = enumerate_alternating_patterns(n, &Guard::default())
                .unwrap()
                .filter(|psi| psi.num_labels() as usize <= p.len())
                .collect();
            let psi = &patterns[pick % patterns.len()];
            prop_assert_eq!(
                alt_pattern_prob(&p, psi).unwrap(),
                alt_pattern_prob_by_injection(&p, psi).unwrap()
            );
            prop_assert_eq!(
                iid_pattern_prob(&p, psi).unwrap(),
                iid_pattern_prob_by_injection(&p, psi).unwrap()
            );
        }

        #[test]
        fn float_mode_tracks_exact(p in small_rational_dist(), n in 1usize..=7, pick in 0usize..1000) {
            let patterns: Vec<Pattern> = enumerate_alternating_patterns(n, &Guard::default())
                .unwrap()
                .filter(|psi| psi.num_labels() as usize <= p.len())
                .collect();
            let psi = &patterns[pick % patterns.len()];
            let exact = Scalar::to_f64(&alt_pattern_prob(&p, psi).unwrap());
            let float = alt_pattern_prob(&p.to_float(), psi).unwrap();
            prop_assert!((exact - float).abs() <= 1e-12 * exact.max(1e-300) + 1e-15);
        }
    }
}
