//! Brute-force ground truth.
//!
//! Everything here enumerates the full sample space: all `2^n` sequences, or
//! the arrangements with a fixed success count. Enumeration is hard-capped
//! at `n <= 24` so a mistake costs seconds, never hours; larger instances
//! belong to the recursive builders in [`crate::dist`], which this module
//! exists to check.
//!
//! Sequence counts are aggregated per (count key, number of successes), so a
//! single enumeration serves the probability-weighted, exact-integer, and
//! conditional views, and results do not depend on how the enumeration is
//! partitioned across threads.

use crate::dist::{CountDistribution, CountKey, DistParam, Statistic};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::HashMap;

/// Hard enumeration cap: 2^24 sequences complete in seconds.
pub const MAX_ENUMERATION_N: u32 = 24;

/// Outcome of a brute-force enumeration.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Conditional expectation of the statistic over sequences where it is
    /// defined; `None` if it is defined nowhere.
    pub expectation: Option<f64>,
    /// The count distribution, probability-weighted.
    pub distribution: CountDistribution<f64>,
    /// Sequences visited.
    pub enumerated: u64,
    /// Sequences where the statistic is defined.
    pub defined: u64,
}

/// Counts of sequences grouped by count key and by number of successes.
struct KeyCounts {
    n: u32,
    by_key: HashMap<CountKey, Vec<u64>>,
}

fn check_enumeration_params(n: u32, k: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::parameter(format!(
            "need at least n=2 trials, got {n}"
        )));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::parameter(format!(
            "streak length k={k} must satisfy 1 <= k <= n-1 (n={n})"
        )));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::capacity(format!(
            "brute-force enumeration is capped at n={MAX_ENUMERATION_N} (got n={n})"
        )));
    }
    Ok(())
}

/// Four-way streak-follower counts of the low `n` bits of `mask`.
fn quad_counts_of_mask(mask: u64, n: u32, k: u32) -> (u32, u32, u32, u32) {
    let mut counts = (0u32, 0u32, 0u32, 0u32);
    let mut hit_run = 0u32;
    let mut miss_run = 0u32;
    for i in 0..n {
        let x = (mask >> i) & 1;
        if hit_run >= k {
            if x == 1 {
                counts.3 += 1;
            } else {
                counts.2 += 1;
            }
        } else if miss_run >= k {
            if x == 1 {
                counts.1 += 1;
            } else {
                counts.0 += 1;
            }
        }
        if x == 1 {
            hit_run += 1;
            miss_run = 0;
        } else {
            miss_run += 1;
            hit_run = 0;
        }
    }
    counts
}

fn key_of_mask(mask: u64, n: u32, k: u32, stat: Statistic) -> CountKey {
    let (m00, m10, m01, m11) = quad_counts_of_mask(mask, n, k);
    match stat {
        Statistic::Proportion => CountKey::Pair { m0: m01, m1: m11 },
        Statistic::Difference => CountKey::Quad { m00, m10, m01, m11 },
    }
}

fn count_all(n: u32, k: u32, stat: Statistic) -> KeyCounts {
    let total: u64 = 1 << n;
    let slots = n as usize + 1;
    let fold_range = |range: std::ops::Range<u64>| {
        let mut by_key: HashMap<CountKey, Vec<u64>> = HashMap::new();
        for mask in range {
            let key = key_of_mask(mask, n, k, stat);
            let s = mask.count_ones() as usize;
            by_key.entry(key).or_insert_with(|| vec![0; slots])[s] += 1;
        }
        by_key
    };
    let by_key = if n >= 18 {
        let chunk: u64 = 1 << 16;
        (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| fold_range(c * chunk..((c + 1) * chunk).min(total)))
            .reduce(HashMap::new, |mut a, b| {
                for (key, counts) in b {
                    let slot = a.entry(key).or_insert_with(|| vec![0; slots]);
                    for (x, y) in slot.iter_mut().zip(counts) {
                        *x += y;
                    }
                }
                a
            })
    } else {
        fold_range(0..total)
    };
    KeyCounts { n, by_key }
}

impl KeyCounts {
    /// Probability-weighted entries under success probability `p`.
    fn probability_entries(&self, p: f64) -> Vec<(CountKey, f64)> {
        let n = self.n;
        let q = 1.0 - p;
        let weights: Vec<f64> = (0..=n)
            .map(|s| p.powi(s as i32) * q.powi((n - s) as i32))
            .collect();
        let mut entries: Vec<(CountKey, f64)> = self
            .by_key
            .iter()
            .map(|(key, counts)| {
                let w = counts
                    .iter()
                    .zip(&weights)
                    .map(|(&c, &w)| c as f64 * w)
                    .sum();
                (*key, w)
            })
            .collect();
        entries.retain(|(_, w)| *w > 0.0);
        entries
    }

    /// Exact integer entries: each sequence with `s` successes contributes
    /// `p_num^s * (p_den - p_num)^(n - s)`.
    fn exact_entries(&self, p_num: u32, p_den: u32) -> Vec<(CountKey, BigUint)> {
        let n = self.n;
        let wp = BigUint::from(p_num);
        let wq = BigUint::from(p_den - p_num);
        let weights: Vec<BigUint> = (0..=n).map(|s| wp.pow(s) * wq.pow(n - s)).collect();
        self.by_key
            .iter()
            .map(|(key, counts)| {
                let mut w = BigUint::zero();
                for (c, wt) in counts.iter().zip(&weights) {
                    w += wt * BigUint::from(*c);
                }
                (*key, w)
            })
            .filter(|(_, w)| !w.is_zero())
            .collect()
    }

    /// Entries restricted to sequences with exactly `n1` successes, one
    /// count per arrangement.
    fn conditional_entries(&self, n1: u32) -> Vec<(CountKey, BigUint)> {
        self.by_key
            .iter()
            .filter_map(|(key, counts)| {
                let c = counts[n1 as usize];
                if c == 0 {
                    None
                } else {
                    Some((*key, BigUint::from(c)))
                }
            })
            .collect()
    }
}

/// Enumerates every sequence (or every arrangement with `conditional_n1`
/// successes) and aggregates the exact distribution and conditional
/// expectation of the statistic.
pub fn enumerate(
    n: u32,
    k: u32,
    p: f64,
    stat: Statistic,
    conditional_n1: Option<u32>,
) -> Result<OracleResult> {
    check_enumeration_params(n, k)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "success probability p={p} must lie strictly between 0 and 1"
        )));
    }
    if let Some(n1) = conditional_n1 {
        if n1 > n {
            return Err(Error::parameter(format!(
                "success count n1={n1} cannot exceed n={n}"
            )));
        }
    }
    let counts = count_all(n, k, stat);
    let (param, entries, enumerated) = match conditional_n1 {
        None => (
            DistParam::Bernoulli { p },
            counts.probability_entries(p),
            1u64 << n,
        ),
        Some(n1) => {
            let exact = counts.conditional_entries(n1);
            let total: BigUint = exact.iter().map(|(_, w)| w).sum();
            let total_f = biguint_to_f64(&total);
            let entries = exact
                .into_iter()
                .map(|(key, w)| (key, biguint_to_f64(&w) / total_f))
                .collect();
            (DistParam::SuccessCount { n1 }, entries, binomial_u64(n, n1))
        }
    };
    let distribution = CountDistribution::from_entries(n, k, param, entries);
    let mut defined_mass = 0.0;
    let mut sum = 0.0;
    for (key, w) in distribution.entries() {
        if let Some(v) = key.statistic(stat) {
            defined_mass += w;
            sum += w * (*v.numer() as f64 / *v.denom() as f64);
        }
    }
    // Defined sequence count, irrespective of the weighting.
    let defined: u64 = counts
        .by_key
        .iter()
        .filter(|(key, _)| key.statistic(stat).is_some())
        .map(|(_, c)| match conditional_n1 {
            None => c.iter().sum::<u64>(),
            Some(n1) => c[n1 as usize],
        })
        .sum();
    let expectation = if defined_mass > 0.0 {
        Some(sum / defined_mass)
    } else {
        None
    };
    Ok(OracleResult {
        expectation,
        distribution,
        enumerated,
        defined,
    })
}

/// Exact integer-weighted distribution by enumeration, for comparison with
/// the recursive builders.
pub fn enumerate_exact_bernoulli(
    n: u32,
    k: u32,
    p_num: u32,
    p_den: u32,
    stat: Statistic,
) -> Result<CountDistribution<BigUint>> {
    check_enumeration_params(n, k)?;
    if p_den == 0 || p_num == 0 || p_num >= p_den {
        return Err(Error::parameter(format!(
            "rational success probability {p_num}/{p_den} must lie strictly between 0 and 1"
        )));
    }
    let counts = count_all(n, k, stat);
    Ok(CountDistribution::from_entries(
        n,
        k,
        DistParam::BernoulliExact { p_num, p_den },
        counts.exact_entries(p_num, p_den),
    ))
}

/// Exact conditional distribution by enumeration.
pub fn enumerate_exact_conditional(
    n: u32,
    k: u32,
    n1: u32,
    stat: Statistic,
) -> Result<CountDistribution<BigUint>> {
    check_enumeration_params(n, k)?;
    if n1 > n {
        return Err(Error::parameter(format!(
            "success count n1={n1} cannot exceed n={n}"
        )));
    }
    let counts = count_all(n, k, stat);
    Ok(CountDistribution::from_entries(
        n,
        k,
        DistParam::SuccessCount { n1 },
        counts.conditional_entries(n1),
    ))
}

/// Exact rational conditional mean of the statistic given `n1` successes,
/// or `None` when it is defined for no arrangement.
pub fn exact_conditional_mean(
    n: u32,
    k: u32,
    n1: u32,
    stat: Statistic,
) -> Result<Option<BigRational>> {
    let dist = enumerate_exact_conditional(n, k, n1, stat)?;
    match dist.expectation_exact(stat) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn biguint_to_f64(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn binomial_u64(n: u32, r: u32) -> u64 {
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// Evaluation of the streak lottery: `n` fair flips, flips preceded by `k`
/// consecutive heads are recorded, the ticket pays out when the recorded
/// heads proportion exceeds one half, pays nothing when it falls below, and
/// the game redraws on an exact half or when nothing was recorded. Redraws
/// are memoryless, so the game's value equals the payout times the win
/// probability conditional on resolution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LotteryEvaluation {
    pub price: f64,
    pub payout: f64,
    /// Probability that a single round resolves (defined and not one half).
    pub resolve_probability: f64,
    /// Win probability conditional on resolution.
    pub win_probability: f64,
    /// Expected value of the ticket.
    pub expected_value: f64,
    /// Expected value minus price.
    pub expected_profit: f64,
}

/// Evaluates the lottery by enumeration over all `2^n` equally likely rounds.
pub fn lottery_ev(n: u32, k: u32, price: f64, payout: f64) -> Result<LotteryEvaluation> {
    check_enumeration_params(n, k)?;
    let total: u64 = 1 << n;
    let mut resolved: u64 = 0;
    let mut wins: u64 = 0;
    for mask in 0..total {
        let (_, _, m0, m1) = quad_counts_of_mask(mask, n, k);
        if m0 + m1 == 0 {
            continue;
        }
        // Proportion compared to 1/2 exactly: 2*m1 vs (m0+m1).
        match (2 * m1).cmp(&(m0 + m1)) {
            std::cmp::Ordering::Greater => {
                resolved += 1;
                wins += 1;
            }
            std::cmp::Ordering::Less => {
                resolved += 1;
            }
            std::cmp::Ordering::Equal => {}
        }
    }
    if resolved == 0 {
        return Err(Error::degenerate(
            "no round of the lottery can ever resolve",
        ));
    }
    let expected_value = payout * wins as f64 / resolved as f64;
    Ok(LotteryEvaluation {
        price,
        payout,
        resolve_probability: resolved as f64 / total as f64,
        win_probability: wins as f64 / resolved as f64,
        expected_value,
        expected_profit: expected_value - price,
    })
}

/// Expected per-sequence success rates of the strategy that predicts a
/// reversal on every trial following `k` identical outcomes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ReversalPredictor {
    /// Predicting a failure after each success streak only; conditional on
    /// at least one prediction.
    pub after_hit_streaks: Option<f64>,
    /// Predicting a reversal after streaks of either kind.
    pub after_both_streaks: Option<f64>,
}

/// Evaluates the reversal predictor by enumeration: the per-sequence mean
/// success rate over predicted trials, averaged over sequences with at
/// least one prediction.
pub fn reversal_predictor_rate(n: u32, k: u32, p: f64) -> Result<ReversalPredictor> {
    check_enumeration_params(n, k)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "success probability p={p} must lie strictly between 0 and 1"
        )));
    }
    let q = 1.0 - p;
    let total: u64 = 1 << n;
    let mut hit_mass = 0.0;
    let mut hit_sum = 0.0;
    let mut both_mass = 0.0;
    let mut both_sum = 0.0;
    for mask in 0..total {
        let s = mask.count_ones();
        let w = p.powi(s as i32) * q.powi((n - s) as i32);
        let (m00, m10, m01, m11) = quad_counts_of_mask(mask, n, k);
        if m01 + m11 > 0 {
            hit_mass += w;
            hit_sum += w * m01 as f64 / (m01 + m11) as f64;
        }
        let all = m00 + m10 + m01 + m11;
        if all > 0 {
            both_mass += w;
            both_sum += w * (m01 + m10) as f64 / all as f64;
        }
    }
    Ok(ReversalPredictor {
        after_hit_streaks: (hit_mass > 0.0).then(|| hit_sum / hit_mass),
        after_both_streaks: (both_mass > 0.0).then(|| both_sum / both_mass),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn three_flip_expectation_and_defined_count() {
        let r = enumerate(3, 1, 0.5, Statistic::Proportion, None).unwrap();
        assert_eq!(r.enumerated, 8);
        assert_eq!(r.defined, 6);
        assert!((r.expectation.unwrap() - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn three_flip_difference_mean() {
        let r = enumerate(3, 1, 0.5, Statistic::Difference, None).unwrap();
        assert!((r.expectation.unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn difference_mean_independent_of_p_at_n4() {
        for &p in &[0.2, 0.5, 0.73] {
            let r = enumerate(4, 1, p, Statistic::Difference, None).unwrap();
            assert!((r.expectation.unwrap() + 1.0 / 3.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn capacity_and_parameter_errors() {
        assert!(matches!(
            enumerate(25, 3, 0.5, Statistic::Proportion, None),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            enumerate(1, 1, 0.5, Statistic::Proportion, None),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            reversal_predictor_rate(100, 3, 0.5),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn lottery_is_worth_four_dollars() {
        let ev = lottery_ev(4, 1, 5.0, 10.0).unwrap();
        assert_eq!(ev.expected_value, 4.0);
        assert_eq!(ev.win_probability, 0.4);
        assert_eq!(ev.resolve_probability, 10.0 / 16.0);
        assert_eq!(ev.expected_profit, -1.0);
        let zero = lottery_ev(4, 1, 5.0, 0.0).unwrap();
        assert_eq!(zero.expected_value, 0.0);
    }

    #[test]
    fn reversal_predictor_beats_chance_on_three_flips() {
        let r = reversal_predictor_rate(3, 1, 0.5).unwrap();
        assert!((r.after_hit_streaks.unwrap() - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn reversal_predictor_has_no_edge_when_n_is_k_plus_one() {
        for &(n, k, p) in &[(2u32, 1u32, 0.5f64), (4, 3, 0.3), (5, 4, 0.7)] {
            let r = reversal_predictor_rate(n, k, p).unwrap();
            assert!(
                (r.after_hit_streaks.unwrap() - (1.0 - p)).abs() < 1e-12,
                "n={n} k={k}"
            );
        }
    }

    #[test]
    fn conditional_mean_matches_sampling_without_replacement_rule() {
        // Mean proportion given n1 successes is (n1-1)/(n-1), exactly.
        for n in 2..=9u32 {
            for n1 in 1..=n {
                let mean = exact_conditional_mean(n, 1, n1, Statistic::Proportion).unwrap();
                if n1 == 1 {
                    // A single success yields proportion 0 whenever defined.
                    if let Some(m) = mean {
                        assert_eq!(m, BigRational::from_integer(0.into()));
                    }
                    continue;
                }
                let expect = BigRational::new((n1 as i64 - 1).into(), (n as i64 - 1).into());
                assert_eq!(mean.unwrap(), expect, "n={n} n1={n1}");
            }
        }
    }
}
