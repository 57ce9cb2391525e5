//! Worst-case redundancy: Shtarkov sums, measured estimator redundancy and
//! closed-form bounds. Everything is in bits.

use std::f64::consts::{E, LOG2_E, PI};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::combinatorics::{
    max_alternating_part, partition_count, partition_count_bounded, ClassCounter,
};
use crate::error::Result;
use crate::estimators::{measured_redundancy, BlockEstimator, SequentialEstimator};
use crate::guard::Guard;
use crate::prob::{sup_by_class, SupOptions};

/// `π √(2/3)`, the exponent rate of the partition function.
fn partition_rate() -> f64 {
    PI * (2.0f64 / 3.0).sqrt()
}

/// `π √(2/3) log₂e · √n + log₂ n`.
pub fn block_upper_bound(n: usize) -> f64 {
    let nf = n as f64;
    partition_rate() * LOG2_E * nf.sqrt() + nf.log2()
}

/// `log₂ p(n) + log₂ n`, the profile-count bound on block redundancy.
pub fn profile_bound(n: usize) -> f64 {
    let p = partition_count(n).to_f64().unwrap();
    p.log2() + (n as f64).log2()
}

/// `2^{-1/3} log₂(e^{23/12} / √(2π)) · n^{1/3}`.
///
/// Only the leading term of an asymptotic lower bound; it is not a valid lower
/// bound at any particular small `n`.
pub fn minimax_lower_bound(n: usize) -> f64 {
    let c = (E.powf(23.0 / 12.0) / (2.0 * PI).sqrt()).log2();
    2f64.powf(-1.0 / 3.0) * c * (n as f64).cbrt()
}

/// `2 + (5/2) log₂ n + (1/2) log₂² n + 4π log₂e √n / (√3 (2 - √2))`.
pub fn seq_bound(n: usize) -> f64 {
    let l = (n as f64).log2();
    let tail = 4.0 * PI * LOG2_E * (n as f64).sqrt() / (3f64.sqrt() * (2.0 - 2f64.sqrt()));
    2.0 + 2.5 * l + 0.5 * l * l + tail
}

/// Bound on `log₂(sup_p p(ψ) / q^h(ψ))` for any pattern of length at most `h`:
/// `log₂(h · exp(π √(2/3) √h))`.
pub fn marginal_gap_bound(h: usize) -> f64 {
    let hf = h as f64;
    hf.log2() + partition_rate() * hf.sqrt() * LOG2_E
}

/// Bound on `log₂(q^h(ψ) / q_{1/2}(ψ))` when `h` is the doubling horizon of
/// `|ψ|`: `log₂(h^{(log₂ h - 1)/2} · exp(π √(2/3) √h / (√2 - 1)))`.
pub fn doubling_gap_bound(h: usize) -> f64 {
    let l = (h as f64).log2();
    l * (l - 1.0) / 2.0 + partition_rate() * (h as f64).sqrt() / (2f64.sqrt() - 1.0) * LOG2_E
}

/// `log₂ Σ_ψ sup_p p(ψ)` over alternating patterns of length `n`, with the
/// supremum estimated over bounded alphabets. A lower estimate.
pub fn shtarkov_redundancy(n: usize, opts: &SupOptions, guard: &Guard) -> Result<f64> {
    let sups = sup_by_class(n, opts, guard)?;
    let mut counter = ClassCounter::new();
    let total: f64 = sups
        .iter()
        .map(|(class, est)| counter.class_size(class).to_f64().unwrap() * est.value)
        .sum();
    Ok(total.log2())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub n: usize,
    /// Alternating patterns of length `n`.
    pub patterns: String,
    /// Profiles of those patterns.
    pub profiles: String,
    /// Unrestricted partitions of `n`.
    pub partitions: String,
    /// Realizable classes.
    pub z: String,
    pub shtarkov: f64,
    pub measured_block: f64,
    pub measured_doubling: f64,
    pub block_upper_bound: f64,
    pub profile_bound: f64,
    pub seq_bound: f64,
    pub lower_bound_main_term: f64,
}

impl SandwichRow {
    pub const COLUMNS: [&'static str; 12] = [
        "n",
        "patterns",
        "profiles",
        "partitions",
        "z",
        "shtarkov",
        "measured_block",
        "measured_doubling",
        "block_upper_bound",
        "profile_bound",
        "seq_bound",
        "lower_bound_main_term",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.patterns.clone(),
            self.profiles.clone(),
            self.partitions.clone(),
            self.z.clone(),
            format!("{:.12}", self.shtarkov),
            format!("{:.12}", self.measured_block),
            format!("{:.12}", self.measured_doubling),
            format!("{:.12}", self.block_upper_bound),
            format!("{:.12}", self.profile_bound),
            format!("{:.12}", self.seq_bound),
            format!("{:.12}", self.lower_bound_main_term),
        ]
    }
}

/// Caveats attached to every table.
pub const SANDWICH_CAVEATS: [&str; 3] = [
    "suprema are searched over alphabets of at most k + extra symbols, so shtarkov and measured_* are lower estimates",
    "lower_bound_main_term omits a (1 + o(1)) factor and is not a bound at small n",
    "the profile count equals p(n, ceil(n/2)) exactly; its asymptotic form carries an unevaluated o(1) term",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichTable {
    pub rows: Vec<SandwichRow>,
    pub sup_extra_symbols: usize,
    pub caveats: Vec<String>,
}

/// One row per `n` in `1..=n_max`.
pub fn sandwich_table(n_max: usize, opts: &SupOptions, guard: &Guard) -> Result<SandwichTable> {
    guard.check_shtarkov(n_max)?;
    let mut counter = ClassCounter::new();
    let doubling = SequentialEstimator::doubling(n_max.max(1), guard)?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let classes = counter.realizable_classes(n as u32);
        let patterns: num_bigint::BigUint = classes.iter().map(|(_, l)| l.clone()).sum();
        let mut profiles: Vec<_> = classes.iter().map(|(c, _)| c.profile.clone()).collect();
        profiles.dedup();
        debug_assert_eq!(
            num_bigint::BigUint::from(profiles.len()),
            partition_count_bounded(n, max_alternating_part(n as u32) as usize)
        );
        let sups = sup_by_class(n, opts, guard)?;
        let shtarkov: f64 = classes
            .iter()
            .map(|(c, l)| l.to_f64().unwrap() * sups[c].value)
            .sum::<f64>()
            .log2();
        let block = BlockEstimator::new(n, guard)?;
        rows.push(SandwichRow {
            n,
            patterns: patterns.to_string(),
            profiles: profiles.len().to_string(),
            partitions: partition_count(n).to_string(),
            z: classes.len().to_string(),
            shtarkov,
            measured_block: measured_redundancy(&block, n, &sups)?.bits,
            measured_doubling: measured_redundancy(&doubling, n, &sups)?.bits,
            block_upper_bound: block_upper_bound(n),
            profile_bound: profile_bound(n),
            seq_bound: seq_bound(n),
            lower_bound_main_term: minimax_lower_bound(n),
        });
    }
    Ok(SandwichTable {
        rows,
        sup_extra_symbols: opts.extra_symbols,
        caveats: SANDWICH_CAVEATS.iter().map(|s| s.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constants() {
        // reference values from a 30-digit evaluation
        assert!(close(block_upper_bound(1), 3.70065655933501, 1e-12));
        assert!(close(
            block_upper_bound(4),
            2.0 * 3.70065655933501 + 2.0,
            1e-12
        ));
        assert!(close(block_upper_bound(100), 43.6504217831248, 1e-11));
        assert!(close(minimax_lower_bound(1), 1.14246637154060, 1e-12));
        assert!(close(minimax_lower_bound(8), 2.0 * 1.14246637154060, 1e-12));
        assert!(close(minimax_lower_bound(1000), 11.4246637154060, 1e-11));
        assert!(close(seq_bound(1), 19.8683505104631, 1e-11));
        assert!(close(seq_bound(4), 44.7367010209261, 1e-11));
        let mut prev = 0.0;
        for n in 1..200 {
            assert!(seq_bound(n) > prev);
            prev = seq_bound(n);
        }
    }

    #[test]
    fn shtarkov_small_n() {
        let opts = SupOptions {
            restarts: 8,
            ..SupOptions::default()
        };
        let g = Guard::default();
        assert!(shtarkov_redundancy(2, &opts, &g).unwrap().abs() < 1e-9);
        let three = shtarkov_redundancy(3, &opts, &g).unwrap();
        assert!(three < 1.0 + 1e-9 && three > 0.8);
        let wide = SupOptions {
            extra_symbols: 30,
            restarts: 2,
            ..SupOptions::default()
        };
        assert!(shtarkov_redundancy(3, &wide, &g).unwrap() > three);
        for n in 1..=6 {
            let s = shtarkov_redundancy(n, &opts, &g).unwrap();
            assert!(s <= profile_bound(n) + 1e-9);
        }
    }

    #[test]
    fn table_row_four() {
        let opts = SupOptions {
            restarts: 8,
            ..SupOptions::default()
        };
        let t = sandwich_table(4, &opts, &Guard::default()).unwrap();
        let row = &t.rows[3];
        assert_eq!(
            (
                row.patterns.as_str(),
                row.profiles.as_str(),
                row.partitions.as_str(),
                row.z.as_str()
            ),
            ("5", "3", "5", "4")
        );
        for row in &t.rows {
            assert!(row.shtarkov <= row.measured_block + 1e-9);
            assert!(row.measured_block <= row.block_upper_bound);
        }
        assert_eq!(t.caveats.len(), 3);
    }
}
