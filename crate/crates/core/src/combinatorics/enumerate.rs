use std::collections::BTreeSet;

use super::{max_alternating_part, partitions_bounded, Pattern, Profile};
use crate::error::{Error, Result};
use crate::guard::Guard;

/// Lexicographic stream of alternating patterns of a fixed length.
///
/// Produced by [`enumerate_alternating_patterns`].
#[derive(Debug, Clone)]
pub struct AlternatingPatterns {
    current: Vec<u32>,
    // prefix_max[i] = max(current[..i])
    prefix_max: Vec<u32>,
    started: bool,
    done: bool,
}

impl AlternatingPatterns {
    fn new(n: usize) -> Self {
        let mut it = Self {
            current: vec![0; n],
            prefix_max: vec![0; n + 1],
            started: false,
            done: n == 0,
        };
        if n > 0 {
            it.current[0] = 1;
            it.prefix_max[1] = 1;
            it.fill_smallest(1);
        }
        it
    }

    /// Smallest alternating completion of positions `from..`: 2 after a 1,
    /// otherwise 1.
    fn fill_smallest(&mut self, from: usize) {
        for i in from..self.current.len() {
            let v = if self.current[i - 1] == 1 { 2 } else { 1 };
            self.current[i] = v;
            self.prefix_max[i + 1] = self.prefix_max[i].max(v);
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        for j in (1..n).rev() {
            let cap = self.prefix_max[j] + 1;
            let mut v = self.current[j] + 1;
            if v == self.current[j - 1] {
                v += 1;
            }
            if v <= cap {
                self.current[j] = v;
                self.prefix_max[j + 1] = self.prefix_max[j].max(v);
                self.fill_smallest(j + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for AlternatingPatterns {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(Pattern::from_canonical(self.current.clone()))
    }
}

/// Every canonical alternating pattern of length `n`, once each, in
/// lexicographic order.
pub fn enumerate_alternating_patterns(n: usize, guard: &Guard) -> Result<AlternatingPatterns> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pattern length must be at least 1".into(),
        ));
    }
    guard.check_patterns(n)?;
    Ok(AlternatingPatterns::new(n))
}

/// Depth-first visit of all alternating patterns of length `n` in
/// lexicographic order. The callback sees the labels and the per-label counts.
///
/// Faster than the iterator when only summaries are needed; no guard.
pub fn for_each_alternating_pattern<F: FnMut(&[u32], &[u32])>(n: usize, mut visit: F) {
    fn rec<F: FnMut(&[u32], &[u32])>(
        n: usize,
        labels: &mut Vec<u32>,
        counts: &mut Vec<u32>,
        visit: &mut F,
    ) {
        if labels.len() == n {
            visit(labels, counts);
            return;
        }
        let prev = *labels.last().unwrap();
        let next_new = counts.len() as u32 + 1;
        for l in 1..=next_new {
            if l == prev {
                continue;
            }
            if l == next_new {
                counts.push(0);
            }
            counts[l as usize - 1] += 1;
            labels.push(l);
            rec(n, labels, counts, visit);
            labels.pop();
            counts[l as usize - 1] -= 1;
            if l == next_new {
                counts.pop();
            }
        }
    }
    if n == 0 {
        return;
    }
    let mut labels = vec![1];
    let mut counts = vec![1];
    rec(n, &mut labels, &mut counts, &mut visit);
}

/// Profiles of all alternating patterns of length `n`, collected by walking
/// the patterns themselves.
pub fn enumerate_alternating_profiles(n: usize, guard: &Guard) -> Result<BTreeSet<Profile>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pattern length must be at least 1".into(),
        ));
    }
    guard.check_patterns(n)?;
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut scratch = Vec::new();
    for_each_alternating_pattern(n, |_, counts| {
        scratch.clear();
        scratch.extend_from_slice(counts);
        scratch.sort_unstable();
        if !seen.contains(&scratch) {
            seen.insert(scratch.clone());
        }
    });
    Ok(seen.into_iter().map(Profile::from_parts).collect())
}

/// Profiles of alternating patterns of length `n`, generated as integer
/// partitions with no part above `⌈n/2⌉`.
pub fn alternating_profiles_by_partition(n: u32) -> Vec<Profile> {
    partitions_bounded(n, max_alternating_part(n))
}
