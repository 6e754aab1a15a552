//! Hot-hand data-generating processes and the bias of the difference
//! statistic under them.
//!
//! Three families beyond the i.i.d. baseline:
//! - regime shift: a hidden two-state Markov chain ("normal"/"hot")
//!   modulates the success probability by `d`, starting from its stationary
//!   distribution;
//! - positive feedback: the success probability moves by `d/2` up after a
//!   window of consecutive successes and `d/2` down after a window of
//!   consecutive failures;
//! - positive feedback for hits: the probability moves up by `d` after a
//!   window of consecutive successes only.
//!
//! The measured quantity is the mean difference statistic over simulated
//! sequences minus the true probability shift `d`. Simulations draw from
//! `ChaCha8` streams keyed by `(seed, chunk index)`, so estimates are
//! reproducible and independent of thread count.

use crate::error::{Error, Result};
use crate::seq::{difference_of_outcomes, BinarySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Parameterization of one data-generating process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DgpSpec {
    /// i.i.d. trials; the zero-shift special case of every other variant.
    Bernoulli { p: f64 },
    /// Hidden two-state chain. Success probability is `p_normal` in the
    /// normal state and `p_normal + shift` in the hot state. `pi_hot` is the
    /// stationary weight of the hot state and `q_hot_hot` its
    /// self-transition probability; the normal-to-hot rate follows from
    /// stationarity.
    RegimeShift {
        p_normal: f64,
        shift: f64,
        pi_hot: f64,
        q_hot_hot: f64,
    },
    /// Success probability `p_base + shift/2` after `window` consecutive
    /// successes, `p_base - shift/2` after `window` consecutive failures,
    /// `p_base` otherwise.
    PositiveFeedback {
        p_base: f64,
        shift: f64,
        window: u32,
    },
    /// Success probability `p_base + shift` after `window` consecutive
    /// successes, `p_base` otherwise.
    PositiveFeedbackHits {
        p_base: f64,
        shift: f64,
        window: u32,
    },
}

fn check_prob(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::parameter(format!(
            "{name}={x} must lie strictly between 0 and 1"
        )));
    }
    Ok(())
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DgpSpec::Bernoulli { p } => check_prob("p", p),
            DgpSpec::RegimeShift {
                p_normal,
                shift,
                pi_hot,
                q_hot_hot,
            } => {
                check_prob("p_normal", p_normal)?;
                check_prob("p_normal + shift", p_normal + shift)?;
                check_prob("pi_hot", pi_hot)?;
                check_prob("q_hot_hot", q_hot_hot)?;
                let q_nh = pi_hot * (1.0 - q_hot_hot) / (1.0 - pi_hot);
                if q_nh > 1.0 {
                    return Err(Error::parameter(format!(
                        "implied normal-to-hot rate {q_nh:.4} exceeds 1"
                    )));
                }
                Ok(())
            }
            DgpSpec::PositiveFeedback {
                p_base,
                shift,
                window,
            } => {
                if window == 0 {
                    return Err(Error::parameter("feedback window must be positive"));
                }
                check_prob("p_base - shift/2", p_base - shift / 2.0)?;
                check_prob("p_base + shift/2", p_base + shift / 2.0)
            }
            DgpSpec::PositiveFeedbackHits {
                p_base,
                shift,
                window,
            } => {
                if window == 0 {
                    return Err(Error::parameter("feedback window must be positive"));
                }
                check_prob("p_base", p_base)?;
                check_prob("p_base + shift", p_base + shift)
            }
        }
    }

    /// The true shift in success probability the difference statistic is
    /// estimating.
    pub fn shift(&self) -> f64 {
        match *self {
            DgpSpec::Bernoulli { .. } => 0.0,
            DgpSpec::RegimeShift { shift, .. }
            | DgpSpec::PositiveFeedback { shift, .. }
            | DgpSpec::PositiveFeedbackHits { shift, .. } => shift,
        }
    }
}

/// Draws one sequence of `n` trials from the process.
pub fn simulate_sequence<R: Rng + ?Sized>(
    spec: &DgpSpec,
    n: u32,
    rng: &mut R,
) -> Result<BinarySequence> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::parameter("need at least one trial"));
    }
    let mut outcomes = Vec::with_capacity(n as usize);
    match *spec {
        DgpSpec::Bernoulli { p } => {
            for _ in 0..n {
                outcomes.push(rng.gen_bool(p) as u8);
            }
        }
        DgpSpec::RegimeShift {
            p_normal,
            shift,
            pi_hot,
            q_hot_hot,
        } => {
            let q_nh = pi_hot * (1.0 - q_hot_hot) / (1.0 - pi_hot);
            let mut hot = rng.gen_bool(pi_hot);
            for _ in 0..n {
                let p = if hot { p_normal + shift } else { p_normal };
                outcomes.push(rng.gen_bool(p) as u8);
                hot = if hot {
                    rng.gen_bool(q_hot_hot)
                } else {
                    rng.gen_bool(q_nh)
                };
            }
        }
        DgpSpec::PositiveFeedback {
            p_base,
            shift,
            window,
        } => {
            let mut hit_run = 0u32;
            let mut miss_run = 0u32;
            for _ in 0..n {
                let p = if hit_run >= window {
                    p_base + shift / 2.0
                } else if miss_run >= window {
                    p_base - shift / 2.0
                } else {
                    p_base
                };
                let x = rng.gen_bool(p);
                outcomes.push(x as u8);
                if x {
                    hit_run += 1;
                    miss_run = 0;
                } else {
                    miss_run += 1;
                    hit_run = 0;
                }
            }
        }
        DgpSpec::PositiveFeedbackHits {
            p_base,
            shift,
            window,
        } => {
            let mut hit_run = 0u32;
            for _ in 0..n {
                let p = if hit_run >= window {
                    p_base + shift
                } else {
                    p_base
                };
                let x = rng.gen_bool(p);
                outcomes.push(x as u8);
                hit_run = if x { hit_run + 1 } else { 0 };
            }
        }
    }
    BinarySequence::new(outcomes)
}

/// Exact expected fraction of successes over `n` trials, starting with no
/// active streak (feedback variants evolve a run-state chain; the regime
/// chain starts stationary, so its rate is flat in `t`).
pub fn expected_mean_rate(spec: &DgpSpec, n: u32) -> Result<f64> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::parameter("need at least one trial"));
    }
    match *spec {
        DgpSpec::Bernoulli { p } => Ok(p),
        DgpSpec::RegimeShift {
            p_normal,
            shift,
            pi_hot,
            ..
        } => Ok(p_normal + pi_hot * shift),
        DgpSpec::PositiveFeedback { window, .. } | DgpSpec::PositiveFeedbackHits { window, .. } => {
            let w = window as usize;
            let p_of = |state: usize| -> f64 {
                match *spec {
                    DgpSpec::PositiveFeedback { p_base, shift, .. } => {
                        if state == w {
                            p_base + shift / 2.0
                        } else if state == 2 * w {
                            p_base - shift / 2.0
                        } else {
                            p_base
                        }
                    }
                    DgpSpec::PositiveFeedbackHits { p_base, shift, .. } => {
                        if state == w {
                            p_base + shift
                        } else {
                            p_base
                        }
                    }
                    _ => unreachable!(),
                }
            };
            // States: 0 start, 1..=w success runs (capped), w+1..=2w failure
            // runs (capped).
            let mut prob = vec![0.0f64; 2 * w + 1];
            prob[0] = 1.0;
            let mut expected_hits = 0.0;
            for _ in 0..n {
                let mut next = vec![0.0f64; 2 * w + 1];
                for (state, &mass) in prob.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    let p = p_of(state);
                    expected_hits += mass * p;
                    let hit_run = if (1..=w).contains(&state) { state } else { 0 };
                    let miss_run = state.saturating_sub(w);
                    next[(hit_run + 1).min(w)] += mass * p;
                    next[w + (miss_run + 1).min(w)] += mass * (1.0 - p);
                }
                prob = next;
            }
            Ok(expected_hits / n as f64)
        }
    }
}

/// Which DGP family a surface is built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DgpKind {
    Bernoulli,
    RegimeShift,
    PositiveFeedback,
    PositiveFeedbackHits,
}

/// Nuisance grid for the regime-shift family; surface points average over
/// the full cross product.
#[derive(Debug, Clone)]
pub struct RegimeGrid {
    pub pi_hot: Vec<f64>,
    pub q_hot_hot: Vec<f64>,
}

impl Default for RegimeGrid {
    fn default() -> Self {
        RegimeGrid {
            pi_hot: vec![0.05, 0.10, 0.15, 0.20],
            q_hot_hot: vec![0.82, 0.86, 0.90, 0.94, 0.98],
        }
    }
}

/// Builds the spec of `kind` whose expected overall success rate over `n`
/// trials equals `fg` at shift `d`. Feedback base rates are solved by
/// bisection against the exact run-state chain.
pub fn spec_for_target(
    kind: DgpKind,
    fg: f64,
    d: f64,
    window: u32,
    n: u32,
    pi_hot: f64,
    q_hot_hot: f64,
) -> Result<DgpSpec> {
    check_prob("fg", fg)?;
    let spec = match kind {
        DgpKind::Bernoulli => {
            if d != 0.0 {
                return Err(Error::parameter(
                    "the i.i.d. process has no probability shift; set d = 0",
                ));
            }
            DgpSpec::Bernoulli { p: fg }
        }
        DgpKind::RegimeShift => DgpSpec::RegimeShift {
            p_normal: fg - pi_hot * d,
            shift: d,
            pi_hot,
            q_hot_hot,
        },
        DgpKind::PositiveFeedback => {
            let base = solve_base_rate(fg, n, |b| DgpSpec::PositiveFeedback {
                p_base: b,
                shift: d,
                window,
            })?;
            DgpSpec::PositiveFeedback {
                p_base: base,
                shift: d,
                window,
            }
        }
        DgpKind::PositiveFeedbackHits => {
            let base = solve_base_rate(fg, n, |b| DgpSpec::PositiveFeedbackHits {
                p_base: b,
                shift: d,
                window,
            })?;
            DgpSpec::PositiveFeedbackHits {
                p_base: base,
                shift: d,
                window,
            }
        }
    };
    spec.validate().map_err(|e| {
        Error::parameter(format!(
            "no valid {kind:?} process reaches rate {fg} with shift {d}: {e}"
        ))
    })?;
    Ok(spec)
}

/// Bisection on the base rate: the expected mean rate is strictly
/// increasing in it.
fn solve_base_rate(target: f64, n: u32, make: impl Fn(f64) -> DgpSpec) -> Result<f64> {
    let eps = 1e-9;
    let feasible = |b: f64| make(b).validate().is_ok();
    let mut lo = eps;
    let mut hi = 1.0 - eps;
    while !feasible(lo) && lo < hi {
        lo += 1e-4;
    }
    while !feasible(hi) && hi > lo {
        hi -= 1e-4;
    }
    if lo >= hi {
        return Err(Error::parameter(
            "no feasible base rate: the shift leaves no room in (0, 1)",
        ));
    }
    let rate = |b: f64| expected_mean_rate(&make(b), n).expect("feasible by construction");
    if rate(lo) > target || rate(hi) < target {
        return Err(Error::parameter(format!(
            "target rate {target} is outside the reachable range [{:.4}, {:.4}]",
            rate(lo),
            rate(hi)
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if rate(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Simulated bias of the difference statistic under a process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasEstimate {
    /// Mean difference statistic over replications where it was defined.
    pub mean_diff: f64,
    /// The process's true probability shift.
    pub true_shift: f64,
    /// `mean_diff - true_shift`.
    pub bias: f64,
    /// Monte-Carlo standard error of `mean_diff`.
    pub mc_se: f64,
    pub replications: u64,
    /// Replications where the statistic was defined.
    pub defined: u64,
}

const SIM_CHUNK: u64 = 1024;

/// Simulates `replications` sequences of `n` trials and measures the bias
/// of the difference statistic at streak length `k`. Replications with an
/// undefined statistic are dropped and counted.
pub fn estimate_bias(
    spec: &DgpSpec,
    n: u32,
    k: u32,
    replications: u64,
    seed: u64,
) -> Result<BiasEstimate> {
    spec.validate()?;
    if replications == 0 {
        return Err(Error::parameter("need at least one replication"));
    }
    if k == 0 || k >= n {
        return Err(Error::parameter(format!(
            "streak length k={k} must satisfy 1 <= k <= n-1 (n={n})"
        )));
    }
    let chunks = replications.div_ceil(SIM_CHUNK);
    let (count, sum, sumsq) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let reps = SIM_CHUNK.min(replications - chunk * SIM_CHUNK);
            let mut count = 0u64;
            let mut sum = 0.0f64;
            let mut sumsq = 0.0f64;
            for _ in 0..reps {
                let seq = simulate_sequence(spec, n, &mut rng).expect("validated spec");
                if let Some(d) = difference_of_outcomes(seq.outcomes(), k as usize) {
                    let v = *d.numer() as f64 / *d.denom() as f64;
                    count += 1;
                    sum += v;
                    sumsq += v * v;
                }
            }
            (count, sum, sumsq)
        })
        .reduce(|| (0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if count == 0 {
        return Err(Error::degenerate(
            "the statistic was undefined in every replication",
        ));
    }
    let mean = sum / count as f64;
    let var = (sumsq / count as f64 - mean * mean).max(0.0);
    let mc_se = if count > 1 {
        (var / (count - 1) as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(BiasEstimate {
        mean_diff: mean,
        true_shift: spec.shift(),
        bias: mean - spec.shift(),
        mc_se,
        replications,
        defined: count,
    })
}

/// One point of a bias surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub fg: f64,
    pub d: f64,
    pub bias: f64,
    pub mc_se: f64,
}

/// Bias of the difference statistic over a grid of expected success rates
/// and probability shifts. Regime-shift points average over the nuisance
/// grid of stationary weights and self-transition rates.
#[allow(clippy::too_many_arguments)]
pub fn bias_surface(
    kind: DgpKind,
    fg_grid: &[f64],
    d_set: &[f64],
    n: u32,
    k: u32,
    replications: u64,
    seed: u64,
    regime_grid: &RegimeGrid,
) -> Result<Vec<SurfaceRow>> {
    let mut rows = Vec::new();
    let mut point_index: u64 = 0;
    for &fg in fg_grid {
        for &d in d_set {
            let nuisance: Vec<(f64, f64)> = match kind {
                DgpKind::RegimeShift => regime_grid
                    .pi_hot
                    .iter()
                    .flat_map(|&a| regime_grid.q_hot_hot.iter().map(move |&b| (a, b)))
                    .collect(),
                _ => vec![(0.1, 0.9)], // unused by the other kinds
            };
            let mut biases = Vec::with_capacity(nuisance.len());
            let mut vars = 0.0f64;
            for &(pi_hot, q_hh) in &nuisance {
                let spec = spec_for_target(kind, fg, d, k, n, pi_hot, q_hh)?;
                let est = estimate_bias(
                    &spec,
                    n,
                    k,
                    replications,
                    seed.wrapping_add(point_index.wrapping_mul(0x9E37_79B9)),
                )?;
                point_index += 1;
                biases.push(est.bias);
                vars += est.mc_se * est.mc_se;
            }
            let bias = biases.iter().sum::<f64>() / biases.len() as f64;
            let mc_se = vars.sqrt() / biases.len() as f64;
            rows.push(SurfaceRow { fg, d, bias, mc_se });
        }
    }
    Ok(rows)
}
