//! Shared helpers for the integration suites: a Kolmogorov-Smirnov
//! uniformity check and deterministic Bernoulli sequence generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streakbias::BinarySequence;

/// Asymptotic Kolmogorov-Smirnov p-value of a sample against the uniform
/// distribution on [0, 1].
pub fn ks_uniform_p(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    let x = n.sqrt() * d;
    // Upper tail of the Kolmogorov distribution.
    let mut sum = 0.0;
    for j in 1..=100u32 {
        let term = (-2.0 * (j as f64).powi(2) * x * x).exp();
        if term < 1e-18 {
            break;
        }
        sum += if j % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Deterministic i.i.d. sequence for a given stream id.
#[allow(dead_code)]
pub fn bernoulli_sequence(p: f64, n: usize, seed: u64, stream: u64) -> BinarySequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    BinarySequence::new((0..n).map(|_| rng.gen_bool(p) as u8).collect()).unwrap()
}
