//! Closed forms for streak length one, and the sampling-without-replacement
//! benchmark curve.
//!
//! For `k = 1` the expected streak-follower proportion has a closed form,
//! and conditional on the number of successes it reduces to the
//! sampling-without-replacement value `(n1 - 1)/(n - 1)`. The expected
//! difference collapses to `-1/(n - 1)` for every success probability. For
//! `k > 1` no simple representation is known; the benchmark here is the
//! expectation under literal sampling-without-replacement, which the streak
//! proportion matches at `k = 1` and falls below for longer streaks.
//!
//! Conditioning events differ across these functions and the distinction
//! matters: [`conditional_expected_proportion_k1`] conditions on a nonempty
//! selection set *and* a known success count, [`expected_proportion_k1`]
//! conditions only on a nonempty selection set, and [`swor_expected`]
//! conditions on at least `k` successes in total, which is a strictly
//! weaker event than a nonempty selection set when `k > 1`.

use crate::error::{Error, Result};
use num_rational::Rational64;
use statrs::distribution::{Binomial, Discrete};

/// Mean streak-follower proportion for `k = 1` given `n1` total successes:
/// `(n1 - 1)/(n - 1)`.
///
/// The value is the exact conditional mean whenever the selection set can be
/// nonempty; for `n1 = 0` the conditioning event is empty and the formula
/// value is returned as stated.
pub fn conditional_expected_proportion_k1(n: u32, n1: u32) -> Result<Rational64> {
    if n < 2 {
        return Err(Error::parameter(format!("need n > 1, got n={n}")));
    }
    if n1 > n {
        return Err(Error::parameter(format!(
            "success count n1={n1} cannot exceed n={n}"
        )));
    }
    Ok(Rational64::new(n1 as i64 - 1, n as i64 - 1))
}

/// Expected streak-follower proportion for `k = 1` under i.i.d. trials,
/// conditional on a nonempty selection set:
/// `[p - (1 - q^n)/n] * n/(n-1) / (1 - q^(n-1))` with `q = 1 - p`.
pub fn expected_proportion_k1(n: u32, p: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::parameter(format!("need n > 2, got n={n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "success probability p={p} must lie strictly between 0 and 1"
        )));
    }
    let nf = n as f64;
    let q = 1.0 - p;
    let numerator = (p - (1.0 - q.powi(n as i32)) / nf) * nf / (nf - 1.0);
    Ok(numerator / (1.0 - q.powi(n as i32 - 1)))
}

/// Expected difference for `k = 1`: exactly `-1/(n - 1)`, independent of the
/// success probability.
pub fn expected_difference_k1(n: u32) -> Result<Rational64> {
    if n < 3 {
        return Err(Error::parameter(format!("need n > 2, got n={n}")));
    }
    Ok(Rational64::new(-1, n as i64 - 1))
}

/// The sampling-without-replacement benchmark:
/// `E[(N1 - k)/(n - k) | N1 >= k]` with `N1 ~ Binomial(n, p)`, by exact
/// summation over the binomial distribution.
pub fn swor_expected(n: u32, k: u32, p: f64) -> Result<f64> {
    if k == 0 || n <= k {
        return Err(Error::parameter(format!(
            "sampling-without-replacement needs n > k >= 1 (got n={n}, k={k})"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "success probability p={p} must lie strictly between 0 and 1"
        )));
    }
    let bin = Binomial::new(p, n as u64).expect("validated parameters");
    let mut mass = 0.0;
    let mut sum = 0.0;
    for n1 in k..=n {
        let w = bin.pmf(n1 as u64);
        mass += w;
        sum += w * (n1 - k) as f64 / (n - k) as f64;
    }
    if mass <= 0.0 {
        return Err(Error::undefined(format!(
            "P(N1 >= {k}) underflows to zero at n={n}, p={p}"
        )));
    }
    Ok(sum / mass)
}
