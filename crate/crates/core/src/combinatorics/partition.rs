use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::Profile;

/// Number of partitions of `n` with every part at most `max_part`.
///
/// Standard coin-change recurrence over part sizes; `p(0, r) = 1`.
pub fn partition_count_bounded(n: usize, max_part: usize) -> BigUint {
    let mut table = vec![BigUint::zero(); n + 1];
    table[0] = BigUint::one();
    for part in 1..=max_part.min(n) {
        for total in part..=n {
            let (lo, hi) = table.split_at_mut(total);
            hi[0] += &lo[total - part];
        }
    }
    std::mem::take(&mut table[n])
}

/// `p(n)`, the number of integer partitions of `n`.
pub fn partition_count(n: usize) -> BigUint {
    partition_count_bounded(n, n)
}

/// All partitions of `n` with parts at most `max_part`, as profiles, in
/// reverse lexicographic order of their non-increasing part lists.
pub fn partitions_bounded(n: u32, max_part: u32) -> Vec<Profile> {
    fn rec(remaining: u32, cap: u32, current: &mut Vec<u32>, out: &mut Vec<Profile>) {
        if remaining == 0 {
            out.push(Profile::from_parts(current.iter().copied()));
            return;
        }
        for part in (1..=cap.min(remaining)).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_part, &mut Vec::new(), &mut out);
    out
}
