//! Exact finite-sample analysis of streak-conditional statistics in binary
//! sequences.
//!
//! The proportion of successes computed on the trials that immediately follow
//! a streak of `k` successes is a biased estimator of the underlying success
//! probability in i.i.d. data, and the hit-minus-miss streak difference is
//! biased negative. This crate computes those sampling distributions exactly,
//! provides the matching closed forms where they exist (`k = 1`), corrects
//! empirical streak estimates for the bias, runs exact and Monte-Carlo
//! permutation tests against the constant-probability null, and simulates
//! hot-hand data-generating processes to measure the bias under them.
//!
//! Modules:
//! - [`seq`]: binary sequences, selection windows, realized estimates.
//! - [`dist`]: exact count distributions via layer-by-layer recursion, their
//!   expectations, bias curves, and histograms.
//! - [`closedform`]: `k = 1` closed forms and the sampling-without-replacement
//!   benchmark.
//! - [`oracle`]: brute-force enumeration over all sequences (ground truth for
//!   small `n`), plus the lottery and reversal-predictor constructions.
//! - [`perm`]: exact and Monte-Carlo permutation tests, critical-value
//!   families, and the stratified pooled test.
//! - [`dgp`]: hot-hand data-generating processes and bias measurement.
//! - [`gvt`]: the embedded GVT shooting-study table and its bias-corrected
//!   reanalysis.
//!
//! # Example
//!
//! ```
//! use streakbias::{dist, perm, BinarySequence};
//!
//! // Three fair flips: the expected share of heads on flips that follow a
//! // heads is 5/12, not 1/2.
//! let e = dist::expected_proportion(3, 1, 0.5)?;
//! assert!((e - 5.0 / 12.0).abs() < 1e-12);
//!
//! // The hot-hand difference of a sequence, tested against the
//! // constant-probability null by exact permutation.
//! let seq = BinarySequence::parse("HHTHTTHHHTTHTHHT")?;
//! let test = perm::exact_test(&seq, 2, perm::Alternative::Greater)?;
//! assert!(test.p_value > 0.0 && test.p_value <= 1.0);
//! # Ok::<(), streakbias::Error>(())
//! ```

pub mod closedform;
pub mod dgp;
pub mod dist;
pub mod error;
pub mod gvt;
pub mod oracle;
pub mod perm;
pub mod seq;
pub(crate) mod stats;

pub use error::{Error, Result};
pub use seq::BinarySequence;
