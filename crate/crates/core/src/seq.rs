//! Binary sequences and the streak-conditional selection sets and estimators
//! built on them.
//!
//! A trial either succeeds (1) or fails (0). For a streak length `k`, the
//! selection set `I_k` collects the trials that immediately follow `k`
//! consecutive successes, and `J_k` the trials that immediately follow `k`
//! consecutive failures. "Follow `k` consecutive" means the `k` trials
//! immediately before the selected one all share the outcome; longer
//! preceding runs qualify too (a streak of five successes contains streaks
//! of length three ending at three different trials).
//!
//! All reported trial indices are 1-based.

use crate::error::{Error, Result};
use num_rational::Rational64;

/// An ordered, finite sequence of binary trials (1 = success, 0 = failure).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySequence {
    outcomes: Vec<u8>,
}

impl BinarySequence {
    /// Builds a sequence from raw outcomes. Every element must be 0 or 1 and
    /// the sequence must be nonempty.
    pub fn new(outcomes: Vec<u8>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::parameter("a sequence needs at least one trial"));
        }
        if let Some(bad) = outcomes.iter().find(|&&x| x > 1) {
            return Err(Error::parameter(format!(
                "trial outcomes must be 0 or 1, got {bad}"
            )));
        }
        Ok(BinarySequence { outcomes })
    }

    /// Parses a sequence from text. Accepts `0`/`1` as well as `H`/`h`/`T`/`t`
    /// (heads count as successes) and `X`/`x`/`O`/`o` (hit/miss shorthand).
    pub fn parse(text: &str) -> Result<Self> {
        let mut outcomes = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '1' | 'H' | 'h' | 'X' | 'x' => outcomes.push(1),
                '0' | 'T' | 't' | 'O' | 'o' => outcomes.push(0),
                c if c.is_whitespace() => {}
                other => {
                    return Err(Error::data(format!(
                        "cannot read {other:?} as a binary trial outcome"
                    )))
                }
            }
        }
        BinarySequence::new(outcomes)
    }

    /// Builds the length-`n` sequence encoded by the low `n` bits of `mask`,
    /// bit 0 being trial 1. Used by enumeration code.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        let outcomes = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        BinarySequence { outcomes }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    /// Number of successes.
    pub fn successes(&self) -> usize {
        self.outcomes.iter().map(|&x| x as usize).sum()
    }

    /// The sequence with every outcome flipped.
    pub fn complement(&self) -> Self {
        BinarySequence {
            outcomes: self.outcomes.iter().map(|&x| 1 - x).collect(),
        }
    }
}

impl std::fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &x in &self.outcomes {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// The selection sets `I_k` (trials after `k` consecutive successes) and
/// `J_k` (trials after `k` consecutive failures), as 1-based trial indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreakWindows {
    pub k: usize,
    pub after_hits: Vec<usize>,
    pub after_misses: Vec<usize>,
}

/// A proportion carried as an exact count pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proportion {
    pub successes: u32,
    pub opportunities: u32,
}

impl Proportion {
    pub fn value(&self) -> Rational64 {
        Rational64::new(self.successes as i64, self.opportunities as i64)
    }

    pub fn to_f64(&self) -> f64 {
        self.successes as f64 / self.opportunities as f64
    }
}

/// The realized streak-conditional estimates for one sequence: the proportion
/// of successes after success streaks, the proportion of failures after
/// failure streaks, and their induced difference. Each component exists only
/// when its selection set is nonempty; absence is a value here, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreakEstimates {
    /// Proportion of successes on trials in `I_k`.
    pub p_after_hits: Option<Proportion>,
    /// Proportion of failures on trials in `J_k`.
    pub q_after_misses: Option<Proportion>,
}

impl StreakEstimates {
    /// The hot-hand estimator: the success rate after success streaks minus
    /// the success rate after failure streaks. Defined only when both
    /// selection sets are nonempty.
    pub fn difference(&self) -> Option<Rational64> {
        match (self.p_after_hits, self.q_after_misses) {
            (Some(p), Some(q)) => Some(p.value() - (Rational64::from_integer(1) - q.value())),
            _ => None,
        }
    }

    pub fn difference_f64(&self) -> Option<f64> {
        self.difference()
            .map(|d| *d.numer() as f64 / *d.denom() as f64)
    }
}

/// Counts of (failures, successes) on the trials following success streaks.
pub type PairCounts = (u32, u32);

/// Counts ordered as (failures after miss streaks, successes after miss
/// streaks, failures after hit streaks, successes after hit streaks).
pub type QuadCounts = (u32, u32, u32, u32);

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k + 1 > n {
        return Err(Error::parameter(format!(
            "streak length k={k} must satisfy 1 <= k <= n-1 (n={n})"
        )));
    }
    Ok(())
}

/// Computes both selection sets for streak length `k`.
pub fn select_streak_windows(seq: &BinarySequence, k: usize) -> Result<StreakWindows> {
    check_k(seq.len(), k)?;
    let mut after_hits = Vec::new();
    let mut after_misses = Vec::new();
    let mut hit_run = 0usize;
    let mut miss_run = 0usize;
    for (i, &x) in seq.outcomes().iter().enumerate() {
        if hit_run >= k {
            after_hits.push(i + 1);
        } else if miss_run >= k {
            after_misses.push(i + 1);
        }
        if x == 1 {
            hit_run += 1;
            miss_run = 0;
        } else {
            miss_run += 1;
            hit_run = 0;
        }
    }
    Ok(StreakWindows {
        k,
        after_hits,
        after_misses,
    })
}

/// Counts (m0, m1) of failures and successes on the trials following `k`
/// consecutive successes.
pub fn streak_counts(seq: &BinarySequence, k: usize) -> Result<PairCounts> {
    let (_, _, m01, m11) = streak_counts_four_way(seq, k)?;
    Ok((m01, m11))
}

/// Four-way counts (m0_0, m1_0, m0_1, m1_1): failures/successes following
/// `k` consecutive failures, then failures/successes following `k`
/// consecutive successes.
pub fn streak_counts_four_way(seq: &BinarySequence, k: usize) -> Result<QuadCounts> {
    check_k(seq.len(), k)?;
    let mut counts = (0u32, 0u32, 0u32, 0u32);
    let mut hit_run = 0usize;
    let mut miss_run = 0usize;
    for &x in seq.outcomes() {
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
    Ok(counts)
}

/// Difference statistic straight from an outcome slice, without range
/// checks or sequence construction; used by the resampling loops. `None`
/// when a selection set is empty.
pub(crate) fn difference_of_outcomes(outcomes: &[u8], k: usize) -> Option<Rational64> {
    let mut hit_run = 0usize;
    let mut miss_run = 0usize;
    let (mut m00, mut m10, mut m01, mut m11) = (0i64, 0i64, 0i64, 0i64);
    for &x in outcomes {
        if hit_run >= k {
            if x == 1 {
                m11 += 1;
            } else {
                m01 += 1;
            }
        } else if miss_run >= k {
            if x == 1 {
                m10 += 1;
            } else {
                m00 += 1;
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
    if m01 + m11 == 0 || m00 + m10 == 0 {
        None
    } else {
        Some(Rational64::new(m11, m01 + m11) - Rational64::new(m10, m00 + m10))
    }
}

/// Computes the realized streak-conditional estimates for one sequence.
pub fn estimates(seq: &BinarySequence, k: usize) -> Result<StreakEstimates> {
    let (m00, m10, m01, m11) = streak_counts_four_way(seq, k)?;
    let p_after_hits = if m01 + m11 > 0 {
        Some(Proportion {
            successes: m11,
            opportunities: m01 + m11,
        })
    } else {
        None
    };
    let q_after_misses = if m00 + m10 > 0 {
        Some(Proportion {
            successes: m00,
            opportunities: m00 + m10,
        })
    } else {
        None
    };
    Ok(StreakEstimates {
        p_after_hits,
        q_after_misses,
    })
}
