//! Runs, alternating sequences, patterns and profiles.
//!
//! A *pattern* replaces every symbol of a sequence by the order in which it
//! first appears, so `b a a b` becomes `1 2 2 1`. A *profile* counts how many
//! symbols appear exactly `i` times; it is the same object as an integer
//! partition of the pattern length. Alternating sequences never repeat a
//! symbol at two adjacent positions, and they are what a repetition channel
//! leaves untouched.

mod class;
mod enumerate;
mod partition;

pub(crate) use class::class_of_counts;
pub use class::{class_count_z, class_size_l, realizable_classes, ClassCounter};
pub use enumerate::{
    alternating_profiles_by_partition, enumerate_alternating_patterns,
    enumerate_alternating_profiles, for_each_alternating_pattern, AlternatingPatterns,
};
pub use partition::{partition_count, partition_count_bounded, partitions_bounded};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense alphabet index.
pub type Symbol = u32;

/// A finite word over dense alphabet indices.
pub type Sequence = Vec<Symbol>;

/// Canonical relabeling of a sequence by order of first appearance.
///
/// The empty pattern is allowed so that sequential estimators can start from
/// an empty prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    /// Validates first-appearance canonicality: `ψ_1 = 1` and every label is at
    /// most one more than the largest label seen before it.
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        let mut max = 0u32;
        for (i, &l) in labels.iter().enumerate() {
            if l == 0 || l > max + 1 {
                return Err(Error::InvalidPattern(format!(
                    "label {l} at position {} is not canonical",
                    i + 1
                )));
            }
            max = max.max(l);
        }
        Ok(Self(labels))
    }

    pub(crate) fn from_canonical(labels: Vec<u32>) -> Self {
        debug_assert!(Pattern::new(labels.clone()).is_ok());
        Self(labels)
    }

    /// Parses `"1231"` (single digits) or `"1,2,3,1"` / `"1 2 3 1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let err = || Error::InvalidPattern(format!("cannot parse {text:?}"));
        let labels: Vec<u32> = if text.contains(|c: char| c == ',' || c.is_whitespace()) {
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| err()))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(err))
                .collect::<Result<_>>()?
        };
        Self::new(labels)
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct labels, which is also the largest label.
    pub fn num_labels(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Multiplicity of each label, indexed by `label - 1`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.num_labels() as usize];
        for &l in &self.0 {
            counts[l as usize - 1] += 1;
        }
        counts
    }

    /// Multiplicity of the final label, or `None` for the empty pattern.
    pub fn last_multiplicity(&self) -> Option<u32> {
        let last = *self.0.last()?;
        Some(self.0.iter().filter(|&&l| l == last).count() as u32)
    }

    pub fn is_alternating(&self) -> bool {
        is_alternating(&self.0)
    }

    pub fn profile(&self) -> Profile {
        profile_of(self)
    }

    /// The equal-probability class of a non-empty pattern.
    pub fn class(&self) -> Option<PatternClass> {
        Some(PatternClass {
            profile: self.profile(),
            last_multiplicity: self.last_multiplicity()?,
        })
    }

    /// The first `len` labels (still canonical).
    pub fn prefix(&self, len: usize) -> Pattern {
        Pattern(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l < 10) {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

/// Multiplicities of multiplicities, stored as a partition multiset.
///
/// `parts` maps a part size `μ` to `φ_μ`, the number of symbols appearing
/// exactly `μ` times. Zero counts are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    parts: BTreeMap<u32, u32>,
}

impl Profile {
    /// Builds a profile from a list of part sizes (any order, zeros ignored).
    pub fn from_parts<I: IntoIterator<Item = u32>>(parts: I) -> Self {
        let mut map = BTreeMap::new();
        for p in parts.into_iter().filter(|&p| p > 0) {
            *map.entry(p).or_insert(0) += 1;
        }
        Self { parts: map }
    }

    /// Builds a profile from the dense vector `(φ_1, φ_2, ...)`.
    pub fn from_phi(phi: &[u32]) -> Self {
        let parts = phi
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32 + 1, c))
            .collect();
        Self { parts }
    }

    /// Total length `n = Σ μ·φ_μ`.
    pub fn n(&self) -> u32 {
        self.parts.iter().map(|(&mu, &c)| mu * c).sum()
    }

    /// `φ_μ`.
    pub fn count(&self, mu: u32) -> u32 {
        self.parts.get(&mu).copied().unwrap_or(0)
    }

    pub fn max_part(&self) -> u32 {
        self.parts.keys().next_back().copied().unwrap_or(0)
    }

    /// Number of distinct symbols.
    pub fn num_symbols(&self) -> u32 {
        self.parts.values().sum()
    }

    /// `(μ, φ_μ)` pairs with `φ_μ > 0`, by increasing `μ`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts.iter().map(|(&mu, &c)| (mu, c))
    }

    /// Dense view `(φ_1, ..., φ_n)`.
    pub fn phi(&self) -> Vec<u32> {
        let mut dense = vec![0; self.n() as usize];
        for (mu, c) in self.iter() {
            dense[mu as usize - 1] = c;
        }
        dense
    }

    /// Part sizes in non-increasing order.
    pub fn parts_desc(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.num_symbols() as usize);
        for (mu, c) in self.parts.iter().rev() {
            out.extend(std::iter::repeat_n(*mu, *c as usize));
        }
        out
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts_desc().iter().map(u32::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

/// Profile together with the multiplicity of the final label.
///
/// Every distribution assigns the same probability to all alternating
/// patterns of one class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternClass {
    pub profile: Profile,
    pub last_multiplicity: u32,
}

/// Maximal runs of equal symbols as `(symbol, run length)`.
pub fn runs(seq: &[Symbol]) -> Vec<(Symbol, usize)> {
    let mut out: Vec<(Symbol, usize)> = Vec::new();
    for &s in seq {
        match out.last_mut() {
            Some((last, len)) if *last == s => *len += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Number of runs, without allocating.
pub fn run_count(seq: &[Symbol]) -> usize {
    if seq.is_empty() {
        return 0;
    }
    1 + seq.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Collapses every run to a single symbol.
pub fn alternating_of(seq: &[Symbol]) -> Sequence {
    let mut out = seq.to_vec();
    out.dedup();
    out
}

/// True iff no two adjacent entries are equal.
pub fn is_alternating<T: PartialEq>(seq: &[T]) -> bool {
    seq.windows(2).all(|w| w[0] != w[1])
}

/// Relabels `seq` by order of first appearance.
pub fn pattern_of(seq: &[Symbol]) -> Result<Pattern> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut first_seen: HashMap<Symbol, u32> = HashMap::new();
    let labels = seq
        .iter()
        .map(|s| {
            let next = first_seen.len() as u32 + 1;
            *first_seen.entry(*s).or_insert(next)
        })
        .collect();
    Ok(Pattern(labels))
}

pub fn profile_of(pattern: &Pattern) -> Profile {
    Profile::from_parts(pattern.multiplicities())
}

/// Largest part size an alternating pattern of length `n` can have.
pub fn max_alternating_part(n: u32) -> u32 {
    n.div_ceil(2)
}

/// True iff some alternating pattern has this profile.
pub fn is_alternating_profile(profile: &Profile) -> bool {
    profile.max_part() <= max_alternating_part(profile.n())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(s: &str) -> Sequence {
        s.bytes().map(u32::from).collect()
    }

    #[test]
    fn runs_of_channel_output() {
        let r = runs(&codes("ccommmiitttee"));
        let expected: Vec<(u32, usize)> = vec![
            (b'c' as u32, 2),
            (b'o' as u32, 1),
            (b'm' as u32, 3),
            (b'i' as u32, 2),
            (b't' as u32, 3),
            (b'e' as u32, 2),
        ];
        assert_eq!(r, expected);
        assert!(runs(&[]).is_empty());
        assert_eq!(runs(&codes("aaaa")), vec![(b'a' as u32, 4)]);
        assert_eq!(run_count(&codes("ccommmiitttee")), 6);
        assert_eq!(run_count(&[]), 0);
    }

    #[test]
    fn alternating_sequence_examples() {
        assert_eq!(alternating_of(&codes("committee")), codes("comite"));
        assert_eq!(alternating_of(&codes("ccommmiitttee")), codes("comite"));
        assert_eq!(alternating_of(&codes("abab")), codes("abab"));
        assert!(alternating_of(&[]).is_empty());
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(
            pattern_of(&codes("comite")).unwrap().labels(),
            &[1, 2, 3, 4, 5, 6]
        );
        assert_eq!(pattern_of(&codes("baab")).unwrap().labels(), &[1, 2, 2, 1]);
        let p = Pattern::parse("1232421").unwrap();
        assert_eq!(pattern_of(p.labels()).unwrap(), p);
        assert_eq!(pattern_of(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn pattern_validation() {
        assert!(Pattern::new(vec![2, 1]).is_err());
        assert!(Pattern::new(vec![1, 3]).is_err());
        assert!(Pattern::new(vec![1, 0]).is_err());
        assert!(Pattern::new(vec![]).is_ok());
        assert_eq!(
            Pattern::parse("1,2,3,1").unwrap(),
            Pattern::parse("1231").unwrap()
        );
        assert!(Pattern::parse("1 2 4").is_err());
        assert!(Pattern::parse("abc").is_err());
        assert_eq!(Pattern::parse("1, 2, 3").unwrap().labels(), &[1, 2, 3]);
    }

    #[test]
    fn profile_examples() {
        let p = Pattern::parse("1232421").unwrap();
        assert_eq!(profile_of(&p).phi(), vec![2, 1, 1, 0, 0, 0, 0]);
        assert_eq!(profile_of(&Pattern::parse("1").unwrap()).phi(), vec![1]);
        assert_eq!(
            profile_of(&Pattern::parse("1212").unwrap()).phi(),
            vec![0, 2, 0, 0]
        );
        assert_eq!(profile_of(&p).to_string(), "3+2+1+1");
    }

    #[test]
    fn alternating_checks() {
        assert!(is_alternating(Pattern::parse("1212").unwrap().labels()));
        assert!(!is_alternating(Pattern::parse("1221").unwrap().labels()));
        assert!(is_alternating(&[1u32]));
        assert!(is_alternating::<u32>(&[]));
    }

    #[test]
    fn alternating_profile_examples() {
        let mut single = vec![0; 7];
        single[6] = 1;
        assert!(!is_alternating_profile(&Profile::from_phi(&single)));
        assert!(is_alternating_profile(&Profile::from_phi(&[0, 2, 0, 0])));
        assert!(is_alternating_profile(&Profile::from_phi(&[2, 0, 1, 0, 0])));
        assert!(!is_alternating_profile(&Profile::from_parts([3, 1])));
    }

    #[test]
    fn class_of_pattern() {
        let c = Pattern::parse("1231").unwrap().class().unwrap();
        assert_eq!(c.last_multiplicity, 2);
        assert_eq!(c.profile, Profile::from_parts([2, 1, 1]));
        assert!(Pattern::new(vec![]).unwrap().class().is_none());
    }
}
