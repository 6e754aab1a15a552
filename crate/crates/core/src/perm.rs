//! Permutation tests of the constant-probability null.
//!
//! Under the null that trials are i.i.d. with a fixed (unknown) success
//! probability, every rearrangement of an observed sequence is equally
//! likely given its success count, so the conditional distribution of the
//! difference statistic over rearrangements is an exact null distribution.
//! This module provides the exact test (from the recursive conditional
//! dictionary), a seeded Monte-Carlo approximation, the per-success-count
//! critical-value family, and a stratified pooled test across players that
//! standardizes each player's difference by its exact conditional null
//! moments.
//!
//! Conventions fixed here:
//! - Test p-values condition on the statistic being defined; Monte-Carlo
//!   permutations with an undefined statistic are discarded and counted.
//! - Monte-Carlo p-values use add-one smoothing `(r + 1)/(m + 1)`, so they
//!   are valid and never zero.
//! - Critical values follow the unconditional-tail convention: `c` is the
//!   smallest support value with `P(D >= c | N1 = n1) <= alpha`, the
//!   probability taken over all arrangements with undefined outcomes never
//!   rejecting.
//! - Shuffles are unbiased Fisher-Yates draws from `ChaCha8` streams keyed
//!   by `(seed, chunk index)`, so results are reproducible and independent
//!   of thread count.

use crate::dist::{
    build_conditional_distribution, conditional_difference_moments, ConditionalMoments,
};
use crate::error::{Error, Result};
use crate::seq::{difference_of_outcomes as difference_of, estimates, BinarySequence};
use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Tail direction of a test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alternative {
    /// Hot-hand direction: large differences are extreme.
    Greater,
    Less,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestMethod {
    Exact,
    MonteCarlo,
}

/// Result of a single-sequence permutation test.
#[derive(Debug, Clone, Serialize)]
pub struct PermutationTestResult {
    pub method: TestMethod,
    pub alternative: Alternative,
    pub observed: f64,
    pub p_value: f64,
    pub n: u32,
    pub n1: u32,
    pub k: u32,
    /// Monte-Carlo only: requested replications.
    pub replications: Option<u64>,
    /// Monte-Carlo only: generator seed.
    pub seed: Option<u64>,
    /// Monte-Carlo only: permutations discarded because the statistic was
    /// undefined.
    pub discarded: Option<u64>,
}

/// The conditional null distribution of the difference, collapsed to
/// statistic values. Shared by the exact test and the critical values.
struct ValueDist {
    /// Sorted ascending by value; counts are arrangement counts.
    values: Vec<(Rational64, u128)>,
    defined_total: BigUint,
    all_total: BigUint,
}

type ValueDistCache = Mutex<HashMap<(u32, u32, u32), Arc<ValueDist>>>;
type MomentsCache = Mutex<HashMap<(u32, u32), Arc<ConditionalMoments>>>;

fn value_dist_cache() -> &'static ValueDistCache {
    static CACHE: OnceLock<ValueDistCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn moments_cache() -> &'static MomentsCache {
    static CACHE: OnceLock<MomentsCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn cached_conditional_moments(n: u32, k: u32) -> Result<Arc<ConditionalMoments>> {
    if let Some(hit) = moments_cache().lock().unwrap().get(&(n, k)) {
        return Ok(hit.clone());
    }
    let fresh = Arc::new(conditional_difference_moments(n, k)?);
    moments_cache()
        .lock()
        .unwrap()
        .entry((n, k))
        .or_insert(fresh.clone());
    Ok(fresh)
}

/// The difference-value distribution given `n1` successes. Complementing a
/// sequence swaps the two streak sides but leaves the difference unchanged,
/// so the distribution for `n1` equals the one for `n - n1`; the cache is
/// keyed on the smaller of the two.
fn conditional_value_dist(n: u32, k: u32, n1: u32) -> Result<Arc<ValueDist>> {
    let canon = n1.min(n - n1);
    let key = (n, k, canon);
    if let Some(hit) = value_dist_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let dict = build_conditional_distribution(n, k, canon)?;
    let mut grouped: HashMap<Rational64, u128> = HashMap::new();
    let mut defined_total = BigUint::ZERO;
    for (ck, w) in dict.entries() {
        if let Some(v) = ck.difference() {
            let w128 = w.to_u128().expect("conditional counts fit in u128");
            *grouped.entry(v).or_insert(0) += w128;
            defined_total += w;
        }
    }
    let mut values: Vec<(Rational64, u128)> = grouped.into_iter().collect();
    values.sort_by_key(|(v, _)| *v);
    let dist = Arc::new(ValueDist {
        values,
        defined_total,
        all_total: dict.total(),
    });
    value_dist_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(dist.clone());
    Ok(dist)
}

impl ValueDist {
    /// Arrangement count with value >= c (or <= c).
    fn tail_count(&self, c: Rational64, upper: bool) -> BigUint {
        let mut acc = BigUint::ZERO;
        for (v, w) in &self.values {
            if (upper && *v >= c) || (!upper && *v <= c) {
                acc += BigUint::from(*w);
            }
        }
        acc
    }
}

fn ratio_big(num: BigUint, den: &BigUint) -> f64 {
    BigRational::new(num.into(), den.clone().into())
        .to_f64()
        .unwrap_or(f64::NAN)
}

fn observed_difference(seq: &BinarySequence, k: u32) -> Result<Rational64> {
    let est = estimates(seq, k as usize)?;
    est.difference().ok_or_else(|| {
        let empty = match (est.p_after_hits, est.q_after_misses) {
            (None, None) => "both selection sets are empty",
            (None, Some(_)) => "no trial follows a success streak",
            (Some(_), None) => "no trial follows a failure streak",
            _ => unreachable!(),
        };
        Error::undefined(format!(
            "difference statistic undefined for the observed sequence: {empty}"
        ))
    })
}

/// Exact permutation test of the observed difference against the
/// constant-probability null, conditional on the observed success count and
/// on the statistic being defined.
pub fn exact_test(
    seq: &BinarySequence,
    k: u32,
    alternative: Alternative,
) -> Result<PermutationTestResult> {
    let observed = observed_difference(seq, k)?;
    let n = seq.len() as u32;
    let n1 = seq.successes() as u32;
    let dist = conditional_value_dist(n, k, n1)?;
    let p_value = match alternative {
        Alternative::Greater => ratio_big(dist.tail_count(observed, true), &dist.defined_total),
        Alternative::Less => ratio_big(dist.tail_count(observed, false), &dist.defined_total),
        Alternative::TwoSided => {
            let up = ratio_big(dist.tail_count(observed, true), &dist.defined_total);
            let down = ratio_big(dist.tail_count(observed, false), &dist.defined_total);
            (2.0 * up.min(down)).min(1.0)
        }
    };
    Ok(PermutationTestResult {
        method: TestMethod::Exact,
        alternative,
        observed: *observed.numer() as f64 / *observed.denom() as f64,
        p_value,
        n,
        n1,
        k,
        replications: None,
        seed: None,
        discarded: None,
    })
}

const SHUFFLE_CHUNK: u64 = 4096;

/// Monte-Carlo permutation test: uniform reshuffles of the observed
/// sequence, undefined permutations discarded, add-one smoothed p-value.
pub fn mc_test(
    seq: &BinarySequence,
    k: u32,
    replications: u64,
    seed: u64,
    alternative: Alternative,
) -> Result<PermutationTestResult> {
    if replications == 0 {
        return Err(Error::parameter("need at least one replication"));
    }
    let observed = observed_difference(seq, k)?;
    let n = seq.len() as u32;
    let n1 = seq.successes() as u32;
    let chunks = replications.div_ceil(SHUFFLE_CHUNK);
    let (ge, le, defined): (u64, u64, u64) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let reps = SHUFFLE_CHUNK.min(replications - chunk * SHUFFLE_CHUNK);
            let mut outcomes = seq.outcomes().to_vec();
            let mut ge = 0u64;
            let mut le = 0u64;
            let mut defined = 0u64;
            for _ in 0..reps {
                outcomes.shuffle(&mut rng);
                if let Some(d) = difference_of(&outcomes, k as usize) {
                    defined += 1;
                    if d >= observed {
                        ge += 1;
                    }
                    if d <= observed {
                        le += 1;
                    }
                }
            }
            (ge, le, defined)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if defined == 0 {
        return Err(Error::degenerate(
            "every permutation left the statistic undefined",
        ));
    }
    let smoothed = |r: u64| (r as f64 + 1.0) / (defined as f64 + 1.0);
    let p_value = match alternative {
        Alternative::Greater => smoothed(ge),
        Alternative::Less => smoothed(le),
        Alternative::TwoSided => (2.0 * smoothed(ge).min(smoothed(le))).min(1.0),
    };
    Ok(PermutationTestResult {
        method: TestMethod::MonteCarlo,
        alternative,
        observed: *observed.numer() as f64 / *observed.denom() as f64,
        p_value,
        n,
        n1,
        k,
        replications: Some(replications),
        seed: Some(seed),
        discarded: Some(replications - defined),
    })
}

/// Critical value for one success count, or the untestable marker.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalValueEntry {
    pub n1: u32,
    /// Smallest support value `c` with `P(D >= c | N1 = n1) <= alpha`;
    /// `None` when no such value exists (the stratum is untestable).
    pub critical: Option<f64>,
    /// The achieved tail probability at the critical value.
    pub tail_probability: Option<f64>,
}

/// A family of per-success-count critical values at a common level.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalValueFamily {
    pub n: u32,
    pub k: u32,
    pub alpha: f64,
    pub entries: Vec<CriticalValueEntry>,
}

impl CriticalValueFamily {
    pub fn entry(&self, n1: u32) -> &CriticalValueEntry {
        &self.entries[n1 as usize]
    }

    /// Rejection decision for an observed difference.
    pub fn rejects(&self, n1: u32, observed: f64) -> bool {
        match self.entry(n1).critical {
            Some(c) => observed >= c - 1e-12,
            None => false,
        }
    }
}

/// Builds the critical-value family over every success count `0..=n`.
pub fn critical_values(n: u32, k: u32, alpha: f64) -> Result<CriticalValueFamily> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter(format!(
            "significance level alpha={alpha} must lie strictly between 0 and 1"
        )));
    }
    // Warm the stratum distributions in parallel; the loop below then reads
    // from the cache.
    (0..=n / 2)
        .into_par_iter()
        .try_for_each(|n1| conditional_value_dist(n, k, n1).map(|_| ()))?;
    let mut entries = Vec::with_capacity(n as usize + 1);
    for n1 in 0..=n {
        let dist = conditional_value_dist(n, k, n1)?;
        let mut entry = CriticalValueEntry {
            n1,
            critical: None,
            tail_probability: None,
        };
        // Walk the support from the top; the tail probability is taken over
        // all arrangements, so undefined outcomes never reject.
        let mut tail = BigUint::ZERO;
        for (v, w) in dist.values.iter().rev() {
            tail += BigUint::from(*w);
            let tail_p = ratio_big(tail.clone(), &dist.all_total);
            if tail_p <= alpha {
                entry.critical = Some(*v.numer() as f64 / *v.denom() as f64);
                entry.tail_probability = Some(tail_p);
            } else {
                break;
            }
        }
        entries.push(entry);
    }
    Ok(CriticalValueFamily {
        n,
        k,
        alpha,
        entries,
    })
}

/// Why a player was left out of the pooled statistic.
#[derive(Debug, Clone, Serialize)]
pub struct ExcludedPlayer {
    pub index: usize,
    pub reason: String,
}

/// Result of the stratified pooled permutation test.
#[derive(Debug, Clone, Serialize)]
pub struct PooledTestResult {
    /// Mean over included players of the standardized difference.
    pub observed: f64,
    /// One-sided (hot-hand direction) add-one smoothed p-value.
    pub p_value: f64,
    pub replications: u64,
    pub seed: u64,
    pub included: usize,
    pub excluded: Vec<ExcludedPlayer>,
}

const RESHUFFLE_ATTEMPT_CAP: u32 = 100_000;

/// Pooled test across players: each player's difference is standardized by
/// its exact conditional null moments, the statistic is the mean of the
/// standardized differences, and permutations reshuffle every player
/// independently (redrawing any shuffle whose statistic is undefined, which
/// matches the conditioning of the single-player tests).
///
/// Players whose observed difference is undefined, or whose null standard
/// deviation is zero, are excluded and reported.
pub fn pooled_stratified_test(
    sequences: &[BinarySequence],
    k: u32,
    replications: u64,
    seed: u64,
) -> Result<PooledTestResult> {
    if replications == 0 {
        return Err(Error::parameter("need at least one replication"));
    }
    struct Stratum<'a> {
        seq: &'a BinarySequence,
        observed: f64,
        mean: f64,
        sd: f64,
    }
    let mut included: Vec<Stratum> = Vec::new();
    let mut excluded = Vec::new();
    for (index, seq) in sequences.iter().enumerate() {
        let est = estimates(seq, k as usize)?;
        let Some(diff) = est.difference() else {
            excluded.push(ExcludedPlayer {
                index,
                reason: "difference undefined for the observed sequence".into(),
            });
            continue;
        };
        let n = seq.len() as u32;
        let n1 = seq.successes() as u32;
        let moments = cached_conditional_moments(n, k)?;
        let entry = moments.entry(n1).expect("observed arrangement is defined");
        if entry.sd <= 1e-14 {
            excluded.push(ExcludedPlayer {
                index,
                reason: "null standard deviation is zero".into(),
            });
            continue;
        }
        included.push(Stratum {
            seq,
            observed: *diff.numer() as f64 / *diff.denom() as f64,
            mean: entry.mean,
            sd: entry.sd,
        });
    }
    if included.is_empty() {
        return Err(Error::degenerate(
            "no player has a defined difference statistic",
        ));
    }
    let observed = included
        .iter()
        .map(|s| (s.observed - s.mean) / s.sd)
        .sum::<f64>()
        / included.len() as f64;

    let chunks = replications.div_ceil(SHUFFLE_CHUNK);
    let exceed: Result<u64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let reps = SHUFFLE_CHUNK.min(replications - chunk * SHUFFLE_CHUNK);
            let mut buffers: Vec<Vec<u8>> =
                included.iter().map(|s| s.seq.outcomes().to_vec()).collect();
            let mut count = 0u64;
            for _ in 0..reps {
                let mut stat = 0.0f64;
                for (stratum, buf) in included.iter().zip(buffers.iter_mut()) {
                    let mut attempts = 0u32;
                    let draw = loop {
                        buf.shuffle(&mut rng);
                        if let Some(d) = difference_of(buf, k as usize) {
                            break *d.numer() as f64 / *d.denom() as f64;
                        }
                        attempts += 1;
                        if attempts >= RESHUFFLE_ATTEMPT_CAP {
                            return Err(Error::degenerate(format!(
                                "could not draw a defined permutation in \
                                 {RESHUFFLE_ATTEMPT_CAP} attempts"
                            )));
                        }
                    };
                    stat += (draw - stratum.mean) / stratum.sd;
                }
                if stat / included.len() as f64 >= observed - 1e-12 {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b));
    let exceed = exceed?;
    Ok(PooledTestResult {
        observed,
        p_value: (exceed as f64 + 1.0) / (replications as f64 + 1.0),
        replications,
        seed,
        included: included.len(),
        excluded,
    })
}
