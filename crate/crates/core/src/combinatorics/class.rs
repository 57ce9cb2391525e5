//! Sizes of equal-probability classes of alternating patterns.
//!
//! `L(ψ)` counts alternating patterns with the same profile as `ψ` and the
//! same multiplicity of the final label. Patterns are set partitions of the
//! positions with no block holding two neighbours; reading positions backwards
//! maps "block of the last position" to "block of the first position", so `L`
//! also counts patterns whose *first* label has that multiplicity.
//!
//! Those are counted through labeled words: fix one symbol of multiplicity `k`
//! to start the word, count alternating arrangements of the rest with a
//! memoized recursion over (multiset of remaining counts, remaining count of
//! the previous symbol), multiply by `φ_k` for the choice of starting symbol
//! and divide by `∏ φ_μ!` to forget symbol names.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{alternating_profiles_by_partition, Pattern, PatternClass, Profile};
use crate::error::{Error, Result};
use crate::guard::Guard;

/// Memoized counter for class sizes. Reuse one instance across calls.
#[derive(Debug, Default)]
pub struct ClassCounter {
    words: HashMap<(Vec<u32>, u32), BigUint>,
    sizes: HashMap<PatternClass, BigUint>,
}

impl ClassCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Alternating arrangements of labeled symbols with remaining counts
    /// `others` (sorted, positive) plus one symbol with `prev` copies left that
    /// was just placed and so cannot come next.
    fn words(&mut self, others: &[u32], prev: u32) -> BigUint {
        if others.is_empty() {
            return if prev == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let rest: u32 = others.iter().sum();
        if prev > rest {
            return BigUint::zero();
        }
        let key = (others.to_vec(), prev);
        if let Some(v) = self.words.get(&key) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        let mut i = 0;
        while i < others.len() {
            let c = others[i];
            let mut j = i;
            while j < others.len() && others[j] == c {
                j += 1;
            }
            let ways = (j - i) as u32;
            let mut next: Vec<u32> = Vec::with_capacity(others.len());
            next.extend_from_slice(&others[..i]);
            next.extend_from_slice(&others[i + 1..]);
            if prev > 0 {
                let pos = next.partition_point(|&x| x < prev);
                next.insert(pos, prev);
            }
            total += self.words(&next, c - 1) * ways;
            i = j;
        }
        self.words.insert(key, total.clone());
        total
    }

    /// `L` for a class; zero when no alternating pattern realizes it.
    pub fn class_size(&mut self, class: &PatternClass) -> BigUint {
        if let Some(v) = self.sizes.get(class) {
            return v.clone();
        }
        let k = class.last_multiplicity;
        let phi_k = class.profile.count(k);
        let size = if phi_k == 0 {
            BigUint::zero()
        } else {
            let mut others = class.profile.parts_desc();
            others.reverse();
            let pos = others.iter().position(|&x| x == k).unwrap();
            others.remove(pos);
            let labeled = self.words(&others, k - 1) * phi_k;
            let symmetry: BigUint = class.profile.iter().map(|(_, c)| factorial(c)).product();
            debug_assert!((&labeled % &symmetry).is_zero());
            labeled / symmetry
        };
        self.sizes.insert(class.clone(), size.clone());
        size
    }

    /// All classes of length-`n` alternating patterns with their sizes, ordered
    /// by profile then last multiplicity.
    pub fn realizable_classes(&mut self, n: u32) -> Vec<(PatternClass, BigUint)> {
        let mut out = Vec::new();
        for profile in alternating_profiles_by_partition(n) {
            let ks: Vec<u32> = profile.iter().map(|(mu, _)| mu).collect();
            for k in ks {
                let class = PatternClass {
                    profile: profile.clone(),
                    last_multiplicity: k,
                };
                let size = self.class_size(&class);
                if !size.is_zero() {
                    out.push((class, size));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// `L(ψ)` for an alternating pattern.
pub fn class_size_l(pattern: &Pattern) -> Result<BigUint> {
    if pattern.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = pattern.labels().windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::NotAlternating(i + 1));
    }
    let class = pattern.class().expect("non-empty");
    Ok(ClassCounter::new().class_size(&class))
}

/// Realizable classes of length `n` with their sizes.
pub fn realizable_classes(n: usize, guard: &Guard) -> Result<Vec<(PatternClass, BigUint)>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pattern length must be at least 1".into(),
        ));
    }
    guard.check_patterns(n)?;
    Ok(ClassCounter::new().realizable_classes(n as u32))
}

/// `Z_n = Σ_ψ 1/L(ψ)`, which is the number of realizable classes.
pub fn class_count_z(n: usize, guard: &Guard) -> Result<BigUint> {
    Ok(BigUint::from(realizable_classes(n, guard)?.len()))
}

/// Profile helper used by tests and estimators.
pub(crate) fn class_of_counts(counts: &[u32], last: u32) -> PatternClass {
    PatternClass {
        profile: Profile::from_parts(counts.iter().copied()),
        last_multiplicity: last,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::for_each_alternating_pattern;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn l(s: &str) -> BigUint {
        class_size_l(&Pattern::parse(s).unwrap()).unwrap()
    }

    /// Oracle: group all alternating patterns of length n by class.
    fn brute_classes(n: usize) -> HashMap<PatternClass, u64> {
        let mut out = HashMap::new();
        for_each_alternating_pattern(n, |labels, counts| {
            let last = counts[*labels.last().unwrap() as usize - 1];
            *out.entry(class_of_counts(counts, last)).or_insert(0) += 1;
        });
        out
    }

    #[test]
    fn examples_n4() {
        assert_eq!(l("1231"), BigUint::from(2u32));
        assert_eq!(l("1232"), BigUint::from(2u32));
        assert_eq!(l("1212"), BigUint::from(1u32));
        assert_eq!(l("1234"), BigUint::from(1u32));
        assert_eq!(l("1213"), BigUint::from(1u32));
        assert!(matches!(
            class_size_l(&Pattern::parse("1221").unwrap()),
            Err(Error::NotAlternating(2))
        ));
    }

    #[test]
    fn class_counts() {
        let g = Guard::default();
        assert_eq!(class_count_z(4, &g).unwrap(), BigUint::from(4u32));
        assert_eq!(class_count_z(1, &g).unwrap(), BigUint::from(1u32));
        assert_eq!(class_count_z(3, &g).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn matches_enumeration() {
        let mut counter = ClassCounter::new();
        for n in 1..=10 {
            let brute = brute_classes(n);
            let classes = counter.realizable_classes(n as u32);
            assert_eq!(classes.len(), brute.len(), "n={n}");
            for (class, size) in classes {
                assert_eq!(size, BigUint::from(brute[&class]), "n={n} {class:?}");
            }
        }
    }

    #[test]
    fn reciprocal_sum_is_class_count() {
        let g = Guard::default();
        for n in 1..=9 {
            let mut counter = ClassCounter::new();
            let mut sum = BigRational::from_integer(BigInt::from(0));
            for_each_alternating_pattern(n, |labels, counts| {
                let last = counts[*labels.last().unwrap() as usize - 1];
                let size = counter.class_size(&class_of_counts(counts, last));
                sum += BigRational::new(BigInt::from(1), BigInt::from(size));
            });
            let z = class_count_z(n, &g).unwrap();
            assert_eq!(sum, BigRational::from_integer(BigInt::from(z)), "n={n}");
        }
    }

    #[test]
    fn unrealizable_class_has_zero_size() {
        // n = 5 with a part of size 3: the triple label must sit at 1,3,5 and so
        // is always last
        let mut c = ClassCounter::new();
        let profile = Profile::from_parts([3, 1, 1]);
        let last_single = PatternClass {
            profile: profile.clone(),
            last_multiplicity: 1,
        };
        let last_triple = PatternClass {
            profile,
            last_multiplicity: 3,
        };
        assert!(c.class_size(&last_single).is_zero());
        assert_eq!(c.class_size(&last_triple), BigUint::from(1u32));
    }
}
