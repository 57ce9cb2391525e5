//! Numeric search for `sup_p p(ψ)` over distributions with bounded support.
//!
//! The supremum runs over every distribution, including infinite alphabets.
//! Here the alphabet is capped at `k + extra_symbols` (k = labels of `ψ`),
//! so the result is a lower estimate of the true value. Alphabet sizes are
//! searched in increasing order and each size starts from the previous best,
//! which keeps the reported value non-decreasing in the cap.
//!
//! Each size uses projected gradient ascent on `ln p(ψ)` with step halving
//! from several structured starts, `restarts` random Dirichlet starts, and an
//! exhaustive simplex grid for very small alphabets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use std::collections::BTreeMap;

use super::injection::{Layout, Shape};
use crate::combinatorics::{realizable_classes, Pattern, PatternClass};
use crate::error::Result;
use crate::guard::Guard;

/// Smallest probability any coordinate may take during the search.
const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SupOptions {
    /// Symbols allowed beyond the pattern's label count.
    pub extra_symbols: usize,
    /// Random starts per alphabet size.
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Ascent stops once the step length falls below this.
    pub min_step: f64,
    /// Grid points per unit mass for the exhaustive grid.
    pub grid_resolution: u32,
    /// Largest alphabet searched by the exhaustive grid.
    pub grid_max_symbols: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            extra_symbols: 2,
            restarts: 64,
            seed: 0x5eed_a17e,
            max_iters: 400,
            min_step: 1e-10,
            grid_resolution: 24,
            grid_max_symbols: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupEstimate {
    /// Best probability found; a lower estimate of the supremum.
    pub value: f64,
    /// Distribution attaining `value`.
    pub argmax: Vec<f64>,
    /// Best value for each alphabet size searched, cumulative.
    pub by_alphabet_size: Vec<(usize, f64)>,
}

/// Lower estimate of `sup_p p(ψ)` for an alternating pattern.
pub fn sup_alt_pattern_prob(pattern: &Pattern, opts: &SupOptions) -> Result<SupEstimate> {
    super::check_alternating(pattern.labels())?;
    match pattern.class() {
        None => Ok(SupEstimate {
            value: 1.0,
            argmax: vec![1.0],
            by_alphabet_size: vec![(1, 1.0)],
        }),
        Some(class) => sup_alt_class_prob(&class, opts),
    }
}

/// Same as [`sup_alt_pattern_prob`], keyed by class: every pattern of a class
/// has the same probability under every distribution.
pub fn sup_alt_class_prob(class: &PatternClass, opts: &SupOptions) -> Result<SupEstimate> {
    let shape = Shape::from_class(class)?;
    let objective = Objective::new(shape);
    let k = objective.shape.num_labels();
    if k == 1 {
        return Ok(SupEstimate {
            value: 1.0,
            argmax: vec![1.0],
            by_alphabet_size: vec![(1, 1.0)],
        });
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut by_size = Vec::new();
    for m in k..=k + opts.extra_symbols {
        let carried = best.as_ref().map(|(_, p)| pad(p, m));
        let (value, argmax) = objective.search(m, carried, opts);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, argmax));
        }
        by_size.push((m, best.as_ref().unwrap().0));
    }
    let (value, argmax) = best.unwrap();
    Ok(SupEstimate {
        value,
        argmax,
        by_alphabet_size: by_size,
    })
}

/// Sup estimate for every realizable class of length `n`, computed in
/// parallel. Patterns of one class share the value, so this covers all of
/// `Ψ̃^n` with one search per class.
pub fn sup_by_class(
    n: usize,
    opts: &SupOptions,
    guard: &Guard,
) -> Result<BTreeMap<PatternClass, SupEstimate>> {
    guard.check_shtarkov(n)?;
    let classes = realizable_classes(n, guard)?;
    classes
        .into_par_iter()
        .map(|(class, _)| {
            let est = sup_alt_class_prob(&class, opts)?;
            Ok((class, est))
        })
        .collect()
}

struct Objective {
    shape: Shape,
    layout: Layout,
}

impl Objective {
    fn new(shape: Shape) -> Self {
        let layout = Layout::new(&shape);
        Self { shape, layout }
    }

    fn value(&self, p: &[f64]) -> f64 {
        let k = self.shape.last.unwrap();
        // 1 - p_s summed from the other coordinates; subtracting from 1 loses
        // all precision when p_s is within a few ulps of 1
        let weights: Vec<Vec<f64>> = p
            .iter()
            .enumerate()
            .map(|(s, &ps)| {
                let stay: f64 = p
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != s)
                    .map(|(_, q)| q)
                    .sum();
                let ratio = ps / stay;
                let mut w: Vec<f64> = self
                    .shape
                    .groups
                    .iter()
                    .map(|&(mu, _)| ratio.powi(mu as i32))
                    .collect();
                w.push(ps.powi(k as i32) / stay.powi(k as i32 - 1));
                w
            })
            .collect();
        self.layout.sum(&weights)
    }

    /// Gradient of `ln value` by central differences.
    fn log_gradient(&self, p: &[f64], value: f64) -> Vec<f64> {
        let mut probe = p.to_vec();
        (0..p.len())
            .map(|s| {
                let x = p[s];
                let h = (1e-6 * x.max(1e-4)).min(x / 2.0).min((1.0 - x) / 2.0);
                probe[s] = x + h;
                let up = self.value(&probe);
                probe[s] = x - h;
                let down = self.value(&probe);
                probe[s] = x;
                (up - down) / (2.0 * h) / value
            })
            .collect()
    }

    fn ascend(&self, start: Vec<f64>, opts: &SupOptions) -> (f64, Vec<f64>) {
        let mut x = project(&start);
        let mut fx = self.value(&x);
        let mut step = 0.05;
        let mut stalled = 0;
        for _ in 0..opts.max_iters {
            let g = self.log_gradient(&x, fx);
            let mut moved = false;
            while step >= opts.min_step {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                let y = project(&trial);
                let fy = self.value(&y);
                if fy > fx {
                    stalled = if (fy - fx) <= 1e-13 * fx {
                        stalled + 1
                    } else {
                        0
                    };
                    x = y;
                    fx = fy;
                    step = (step * 2.0).min(1.0);
                    moved = true;
                    break;
                }
                step /= 2.0;
            }
            if !moved || stalled >= 20 {
                break;
            }
        }
        (fx, x)
    }

    fn search(&self, m: usize, carried: Option<Vec<f64>>, opts: &SupOptions) -> (f64, Vec<f64>) {
        let mut starts = self.structured_starts(m);
        if let Some(c) = carried {
            starts.push(c);
        }
        if m <= opts.grid_max_symbols {
            starts.push(self.grid_best(m, opts.grid_resolution));
        }
        let random = (0..opts.restarts).map(|r| dirichlet_start(opts.seed, m, r));
        starts.extend(random);

        let results: Vec<(f64, Vec<f64>)> = starts
            .into_par_iter()
            .map(|s| self.ascend(s, opts))
            .collect();
        // first maximum wins, so the outcome does not depend on scheduling
        results
            .into_iter()
            .fold(None::<(f64, Vec<f64>)>, |best, cand| match best {
                Some(b) if b.0 >= cand.0 => Some(b),
                _ => Some(cand),
            })
            .unwrap()
    }

    fn structured_starts(&self, m: usize) -> Vec<Vec<f64>> {
        let mut mults: Vec<f64> = vec![f64::from(self.shape.last.unwrap())];
        for &(mu, c) in &self.shape.groups {
            mults.extend(std::iter::repeat_n(f64::from(mu), c as usize));
        }
        mults.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let k = mults.len();
        let total: f64 = mults.iter().sum();

        let uniform = vec![1.0 / m as f64; m];
        let mut proportional = vec![1e-3; m];
        for (i, mu) in mults.iter().enumerate() {
            proportional[i] = mu / total;
        }
        // one dominant symbol, the rest split by multiplicity
        let mut dominant = vec![1e-3; m];
        dominant[0] = 0.9;
        let rest: f64 = mults[1..].iter().sum();
        for i in 1..k {
            dominant[i] = 0.1 * mults[i] / rest.max(1.0);
        }
        vec![uniform, proportional, dominant]
    }

    fn grid_best(&self, m: usize, resolution: u32) -> Vec<f64> {
        let mut best = (f64::NEG_INFINITY, vec![1.0 / m as f64; m]);
        let mut parts = vec![0u32; m];
        fn rec(
            obj: &Objective,
            i: usize,
            left: u32,
            res: u32,
            parts: &mut Vec<u32>,
            best: &mut (f64, Vec<f64>),
        ) {
            let m = parts.len();
            if i == m - 1 {
                parts[i] = left;
                let p: Vec<f64> = parts
                    .iter()
                    .map(|&a| f64::from(a) / f64::from(res))
                    .collect();
                let v = obj.value(&p);
                if v > best.0 {
                    *best = (v, p);
                }
                return;
            }
            // every coordinate strictly positive
            for a in 1..=left.saturating_sub((m - 1 - i) as u32) {
                parts[i] = a;
                rec(obj, i + 1, left - a, res, parts, best);
            }
        }
        if resolution as usize >= m {
            rec(self, 0, resolution, resolution, &mut parts, &mut best);
        }
        best.1
    }
}

fn dirichlet_start(seed: u64, m: usize, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | restart as u64);
    let draws: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

fn pad(p: &[f64], m: usize) -> Vec<f64> {
    let mut out = p.to_vec();
    out.resize(m, FLOOR);
    out
}

/// Euclidean projection onto `{x : Σx = 1, x_i ≥ FLOOR}`.
fn project(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let budget = 1.0 - FLOOR * m as f64;
    let shifted: Vec<f64> = v.iter().map(|x| x - FLOOR).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - budget) / (i as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = shifted
        .iter()
        .map(|x| (x - theta).max(0.0) + FLOOR)
        .collect();
    // remove rounding drift so the result is a probability vector
    let total: f64 = out.iter().sum();
    for x in &mut out {
        *x /= total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{class_size_l, enumerate_alternating_patterns};
    use crate::guard::Guard;
    use crate::prob::{alt_pattern_prob, FloatDistribution};
    use num_traits::ToPrimitive;

    fn fast() -> SupOptions {
        SupOptions {
            restarts: 8,
            ..SupOptions::default()
        }
    }

    fn sup(s: &str, opts: &SupOptions) -> SupEstimate {
        sup_alt_pattern_prob(&Pattern::parse(s).unwrap(), opts).unwrap()
    }

    #[test]
    fn projection_lands_on_simplex() {
        for v in [vec![0.3, 0.3, 0.4], vec![2.0, -1.0, 0.5], vec![-5.0, -5.0]] {
            let p = project(&v);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= FLOOR * 0.999));
        }
        let p = project(&[0.2, 0.3, 0.5]);
        assert!((p[0] - 0.2).abs() < 1e-9 && (p[2] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn binary_pattern_reaches_one() {
        let e = sup("121", &fast());
        assert!((e.value - 1.0).abs() < 1e-9, "{}", e.value);
        assert!((sup("1", &fast()).value - 1.0).abs() < 1e-15);
        assert!((sup("12", &fast()).value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn argmax_reproduces_value() {
        let psi = Pattern::parse("12313").unwrap();
        let e = sup_alt_pattern_prob(&psi, &fast()).unwrap();
        let p = FloatDistribution::new(e.argmax.clone()).unwrap();
        let direct = alt_pattern_prob(&p, &psi).unwrap();
        assert!((direct - e.value).abs() < 1e-12);
    }

    #[test]
    fn distinct_labels_increase_with_alphabet() {
        // uniform(m) gives ∏_{j<n} (m-j)/(m-1) for 12..n
        for n in 3..=5usize {
            let labels: String = (1..=n)
                .map(|d| char::from_digit(d as u32, 10).unwrap())
                .collect();
            let mut prev = 0.0;
            for extra in 0..=3 {
                let opts = SupOptions {
                    extra_symbols: extra,
                    ..fast()
                };
                let e = sup(&labels, &opts);
                assert!(e.value >= prev - 1e-12, "n={n} extra={extra}");
                let m = (n + extra) as f64;
                let uniform: f64 = (1..n).map(|j| (m - j as f64) / (m - 1.0)).product();
                assert!(e.value >= uniform - 1e-9);
                prev = e.value;
            }
        }
    }

    #[test]
    fn never_exceeds_class_bound() {
        let opts = fast();
        for n in 1..=6 {
            for psi in enumerate_alternating_patterns(n, &Guard::default()).unwrap() {
                let l = class_size_l(&psi).unwrap().to_f64().unwrap();
                let e = sup_alt_pattern_prob(&psi, &opts).unwrap();
                assert!(e.value <= 1.0 / l + 1e-9, "{psi}: {} > 1/{l}", e.value);
                assert!(e.value > 0.0);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sup("121323", &fast());
        let b = sup("121323", &fast());
        assert_eq!(a, b);
    }
}
