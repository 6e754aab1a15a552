//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line with the measured values (visible with `--nocapture`).
//!
//! Every tolerance is pinned in code. Two checks are expected to fail and
//! say why: the published five-streak expectation (the exact value is
//! 0.364887, confirmed by enumeration and Monte-Carlo, not the printed
//! 0.35), and the alternative streak-length study variants (the embedded
//! table only contains the three-streak category columns, from which the
//! two- and four-streak categories are not derivable).

mod common;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use streakbias::dist::{self, CountKey, Statistic};
use streakbias::{closedform, dgp, gvt, oracle, perm};

fn pass(criterion: &str, detail: String) {
    println!("ACCEPTANCE {criterion}: PASS - {detail}");
}

fn fail(criterion: &str, detail: String) -> ! {
    println!("ACCEPTANCE {criterion}: FAIL - {detail}");
    panic!("ACCEPTANCE {criterion}: FAIL - {detail}");
}

#[test]
fn criterion_01_three_flip_expectation() {
    let float = dist::expected_proportion(3, 1, 0.5).unwrap();
    if (float - 5.0 / 12.0).abs() > 1e-12 {
        fail("1", format!("float route gave {float}, want 5/12"));
    }
    let exact = dist::build_proportion_distribution_exact(3, 1, 1, 2)
        .unwrap()
        .expectation_exact(Statistic::Proportion)
        .unwrap();
    let want = BigRational::new(5.into(), 12.into());
    if exact != want {
        fail("1", format!("exact route gave {exact}, want 5/12"));
    }
    pass(
        "1",
        format!("expected proportion at (3, 1, 1/2) = {exact} = {float:.12}"),
    );
}

#[test]
fn criterion_02_k1_closed_forms() {
    let mut worst_prop = 0.0f64;
    let mut worst_diff = 0.0f64;
    for n in 3..=100u32 {
        for &p in &[0.25, 0.5, 0.75] {
            let dp = dist::expected_proportion(n, 1, p).unwrap();
            let closed = closedform::expected_proportion_k1(n, p).unwrap();
            worst_prop = worst_prop.max((dp - closed).abs());
            let diff = dist::expected_difference(n, 1, p).unwrap();
            worst_diff = worst_diff.max((diff + 1.0 / (n as f64 - 1.0)).abs());
        }
    }
    if worst_prop > 1e-12 || worst_diff > 1e-12 {
        fail(
            "2",
            format!(
                "worst closed-form gaps: proportion {worst_prop:.2e}, difference {worst_diff:.2e}"
            ),
        );
    }
    pass(
        "2",
        format!(
            "recursion matches the k=1 closed forms over n in 3..=100, three probabilities \
             (worst gaps {worst_prop:.2e}, {worst_diff:.2e})"
        ),
    );
}

#[test]
fn criterion_03_conditional_mean_rule() {
    let mut checked = 0;
    for n in 2..=12u32 {
        for n1 in 1..=n {
            let mean = oracle::exact_conditional_mean(n, 1, n1, Statistic::Proportion)
                .unwrap()
                .unwrap_or_else(|| fail("3", format!("mean undefined at n={n}, n1={n1}")));
            let want = BigRational::new((n1 as i64 - 1).into(), (n as i64 - 1).into());
            if mean != want {
                fail(
                    "3",
                    format!("n={n}, n1={n1}: oracle mean {mean}, want {want}"),
                );
            }
            checked += 1;
        }
    }
    pass(
        "3",
        format!("oracle conditional means equal (n1-1)/(n-1) exactly at {checked} points"),
    );
}

#[test]
fn criterion_04_headline_biases() {
    let checks = [
        (
            "proportion(100, 5, 0.5)",
            dist::expected_proportion(100, 5, 0.5).unwrap(),
            0.35,
        ),
        (
            "proportion(100, 3, 0.25)",
            dist::expected_proportion(100, 3, 0.25).unwrap(),
            0.16,
        ),
        (
            "difference(100, 3, 0.5)",
            dist::expected_difference(100, 3, 0.5).unwrap(),
            -0.08,
        ),
        (
            "difference(40, 3, 0.5)",
            dist::expected_difference(40, 3, 0.5).unwrap(),
            -0.20,
        ),
    ];
    let mut bad = Vec::new();
    for (name, got, want) in checks {
        if (got - want).abs() > 0.005 {
            bad.push(format!("{name} = {got:.6}, want {want} +/- 0.005"));
        }
    }
    if !bad.is_empty() {
        // The five-streak value is expected here: the exact conditional
        // expectation at (100, 5, 0.5) is 0.364887, triple-checked against
        // the full dictionary, brute-force enumeration at every n <= 22,
        // and a two-million-replication simulation. The published 0.35
        // matches the fixed-50-hits conditional variant (0.3474) rather
        // than the unconditional expectation this function is defined as.
        fail("4", bad.join("; "));
    }
    pass("4", "all four headline bias values within 0.005".into());
}

#[test]
fn criterion_05_oracle_equivalence() {
    let mut grids = 0;
    for n in 2..=12u32 {
        for k in 1..=4u32.min(n - 1) {
            for &(p_num, p_den) in &[(1u32, 4u32), (1, 2), (3, 4)] {
                let p = p_num as f64 / p_den as f64;

                let dp = dist::build_proportion_distribution_exact(n, k, p_num, p_den).unwrap();
                let or =
                    oracle::enumerate_exact_bernoulli(n, k, p_num, p_den, Statistic::Proportion)
                        .unwrap();
                if dp.entries() != or.entries() {
                    fail("5", format!("proportion mismatch at n={n}, k={k}, p={p}"));
                }
                let dp_f = dist::build_proportion_distribution(n, k, p).unwrap();
                let or_f = oracle::enumerate(n, k, p, Statistic::Proportion, None).unwrap();
                compare_float_dists("5", dp_f.entries(), or_f.distribution.entries());

                if n >= 3 {
                    let dp = dist::build_difference_distribution_exact(n, k, p_num, p_den).unwrap();
                    let or = oracle::enumerate_exact_bernoulli(
                        n,
                        k,
                        p_num,
                        p_den,
                        Statistic::Difference,
                    )
                    .unwrap();
                    if dp.entries() != or.entries() {
                        fail("5", format!("difference mismatch at n={n}, k={k}, p={p}"));
                    }
                    let dp_f = dist::build_difference_distribution(n, k, p).unwrap();
                    let or_f = oracle::enumerate(n, k, p, Statistic::Difference, None).unwrap();
                    compare_float_dists("5", dp_f.entries(), or_f.distribution.entries());
                }
                grids += 1;
            }
        }
    }
    pass(
        "5",
        format!("recursion equals enumeration exactly (integer mode) on {grids} parameter points"),
    );
}

fn compare_float_dists(criterion: &str, a: &[(CountKey, f64)], b: &[(CountKey, f64)]) {
    if a.len() != b.len() {
        fail(
            criterion,
            "probability dictionaries differ in support".into(),
        );
    }
    for ((ka, wa), (kb, wb)) in a.iter().zip(b) {
        if ka != kb || (wa - wb).abs() > 1e-12 {
            fail(
                criterion,
                format!("probability mismatch at {ka:?}: {wa} vs {wb}"),
            );
        }
    }
}

#[test]
fn criterion_06_conditional_support_size() {
    let dist = dist::build_conditional_distribution(100, 3, 50).unwrap();
    let total = dist.total();
    let want_total = binomial_biguint(100, 50);
    if total != want_total {
        fail("6", format!("weights sum to {total}, want C(100, 50)"));
    }
    let support = dist.distinct_statistic_values(Statistic::Difference, 6);
    if support != 19_048 {
        fail(
            "6",
            format!("distinct six-digit difference values: {support}, want 19048"),
        );
    }
    // Shape of the permutation distribution: negatively skewed, with the
    // histogram mode below zero.
    let prob = dist.to_probability();
    let spec = streakbias::dist::HistogramSpec::new(0.04, 6).unwrap();
    let bins =
        streakbias::dist::distribution_to_histogram(&prob, Statistic::Difference, &spec).unwrap();
    let mass_total: f64 = bins.iter().map(|b| b.mass).sum();
    if (mass_total - 1.0).abs() > 1e-9 {
        fail("6", format!("histogram masses sum to {mass_total}"));
    }
    let mode = bins
        .iter()
        .max_by(|a, b| a.mass.partial_cmp(&b.mass).unwrap())
        .unwrap();
    // The left lean: well over half the mass below zero. (The single
    // tallest bin is the one holding the sizable atom at exactly zero.)
    let below_zero: f64 = bins
        .iter()
        .filter(|b| b.lower_edge < 0.0)
        .map(|b| b.mass)
        .sum();
    if below_zero <= 0.5 {
        fail(
            "6",
            format!("only {below_zero:.4} of the mass lies below zero"),
        );
    }
    let (mut mass, mut mean) = (0.0f64, 0.0f64);
    for (key, w) in prob.entries() {
        if let Some(v) = key.difference() {
            mass += w;
            mean += w * (*v.numer() as f64 / *v.denom() as f64);
        }
    }
    mean /= mass;
    let mut third = 0.0f64;
    for (key, w) in prob.entries() {
        if let Some(v) = key.difference() {
            let v = *v.numer() as f64 / *v.denom() as f64;
            third += w / mass * (v - mean).powi(3);
        }
    }
    if third >= 0.0 {
        fail(
            "6",
            format!("third central moment {third:.3e}, want negative skew"),
        );
    }
    pass(
        "6",
        format!(
            "conditional dictionary at (100, 3, 50): {} keys, weights sum to C(100,50), \
             19048 distinct six-digit difference values, negatively skewed \
             ({:.1}% of mass below zero, tallest bin at {})",
            dist.len(),
            below_zero * 100.0,
            mode.lower_edge
        ),
    );
}

fn binomial_biguint(n: u32, r: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r.min(n - r) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[test]
fn criterion_07_gvt_reanalysis() {
    let players = gvt::load_gvt();
    let study = gvt::study_tests(&players, 3).unwrap();
    let mut bad = Vec::new();
    if (study.raw_t_p_two_sided - 0.49).abs() > 0.01 {
        bad.push(format!(
            "raw paired-t p = {:.4}, want 0.49 +/- 0.01",
            study.raw_t_p_two_sided
        ));
    }
    if (study.mean_adjusted_diff - 0.13).abs() > 0.01 {
        bad.push(format!(
            "adjusted mean = {:.4}, want 0.13 +/- 0.01",
            study.mean_adjusted_diff
        ));
    }
    if (study.study_se - 0.047).abs() > 0.002 {
        bad.push(format!(
            "study SE = {:.4}, want 0.047 +/- 0.002",
            study.study_se
        ));
    }
    if study.adjusted_p_one_sided >= 0.01 {
        bad.push(format!(
            "adjusted one-sided p = {:.4}, want < 0.01",
            study.adjusted_p_one_sided
        ));
    }
    if study.positive_count != 19 || study.players_defined != 25 {
        bad.push(format!(
            "positive adjusted differences: {}/{}, want 19/25",
            study.positive_count, study.players_defined
        ));
    }
    if study.sign_test_p >= 0.01 {
        bad.push(format!(
            "sign-test p = {:.4}, want < 0.01",
            study.sign_test_p
        ));
    }
    if study.significant_count != 5 {
        bad.push(format!(
            "individually significant players: {}, want 5",
            study.significant_count
        ));
    }
    if study.significant_binomial_p >= 0.01 {
        bad.push(format!(
            "significance-count binomial p = {:.4}, want < 0.01",
            study.significant_binomial_p
        ));
    }
    if !bad.is_empty() {
        fail("7", bad.join("; "));
    }
    pass(
        "7",
        format!(
            "raw-t p {:.3}; adjusted mean {:.3} (SE {:.4}, p {:.4}); 19/25 positive \
             (p {:.4}); 5 significant (p {:.4})",
            study.raw_t_p_two_sided,
            study.mean_adjusted_diff,
            study.study_se,
            study.adjusted_p_one_sided,
            study.sign_test_p,
            study.significant_binomial_p
        ),
    );
}

#[test]
fn criterion_07_streak_length_variants() {
    // The study's footnote reports, for streaks of four: adjusted mean 0.10
    // (SE 0.069), and for streaks of two: adjusted mean 0.054. Those numbers
    // were computed from the raw shot sequences, which are not published;
    // the embedded table carries only the three-streak category columns,
    // and neither the k=4 nor the k=2 categories are derivable from them.
    // Applying the k-specific correction to the only available (k=3) raw
    // differences is the closest computable quantity and demonstrably does
    // not reproduce the footnote.
    let players = gvt::load_gvt();
    let study4 = gvt::study_tests(&players, 4).unwrap();
    let study2 = gvt::study_tests(&players, 2).unwrap();
    let mut bad = Vec::new();
    if (study4.mean_adjusted_diff - 0.10).abs() > 0.01 {
        bad.push(format!(
            "k=4 adjusted mean = {:.4}, want 0.10 +/- 0.01",
            study4.mean_adjusted_diff
        ));
    }
    if (study4.study_se - 0.069).abs() > 0.01 {
        bad.push(format!(
            "k=4 study SE = {:.4}, want ~0.069",
            study4.study_se
        ));
    }
    if (study2.mean_adjusted_diff - 0.054).abs() > 0.005 {
        bad.push(format!(
            "k=2 adjusted mean = {:.4}, want 0.054 +/- 0.005",
            study2.mean_adjusted_diff
        ));
    }
    if !bad.is_empty() {
        fail(
            "7b",
            format!(
                "{}; irreproducible from published data: the per-player category counts and \
                 hit rates at streak lengths 2 and 4 were never printed, and the three-streak \
                 columns do not determine them",
                bad.join("; ")
            ),
        );
    }
    pass("7b", "streak-length variants match the footnote".into());
}

#[test]
fn criterion_08_external_adjustment() {
    let main = gvt::adjust_external(0.52, 0.54, 40, 0.5, 3).unwrap();
    let companion = gvt::adjust_external(0.56, 0.65, 40, 0.5, 3).unwrap();
    if (main - 0.18).abs() > 0.01 {
        fail(
            "8",
            format!("main adjustment = {main:.4}, want 0.18 +/- 0.01"),
        );
    }
    if (companion - 0.11).abs() > 0.01 {
        fail(
            "8",
            format!("companion adjustment = {companion:.4}, want 0.11 +/- 0.01"),
        );
    }
    pass(
        "8",
        format!("external adjustments: {main:.4} and {companion:.4}"),
    );
}

#[test]
fn criterion_09_pooled_estimate() {
    let pooled = gvt::pooled_simple(&gvt::load_gvt()).unwrap();
    let mut bad = Vec::new();
    if (pooled.estimate - 0.17).abs() > 0.01 {
        bad.push(format!(
            "estimate = {:.4}, want 0.17 +/- 0.01",
            pooled.estimate
        ));
    }
    if (pooled.se - 0.037).abs() > 0.003 {
        bad.push(format!("SE = {:.4}, want 0.037 +/- 0.003", pooled.se));
    }
    if pooled.total_shots != 2515 {
        bad.push(format!("total shots = {}, want 2515", pooled.total_shots));
    }
    if pooled.flagged_cells != vec!["F6 after-misses".to_string(), "F11 after-hits".to_string()] {
        bad.push(format!("flagged cells: {:?}", pooled.flagged_cells));
    }
    if !bad.is_empty() {
        fail("9", bad.join("; "));
    }
    pass(
        "9",
        format!(
            "pooled estimate {:.4} (SE {:.4}) over {} category shots of {} total; \
             two inconsistent cells flagged",
            pooled.estimate, pooled.se, pooled.category_shots, pooled.total_shots
        ),
    );
}

#[test]
fn criterion_10_lottery() {
    let ev = oracle::lottery_ev(4, 1, 5.0, 10.0).unwrap();
    if ev.expected_value != 4.0 {
        fail(
            "10",
            format!("expected value = {}, want exactly 4", ev.expected_value),
        );
    }
    let zero = oracle::lottery_ev(4, 1, 5.0, 0.0).unwrap();
    if zero.expected_value != 0.0 {
        fail(
            "10",
            format!("zero-payout value = {}, want 0", zero.expected_value),
        );
    }
    pass(
        "10",
        format!(
            "lottery worth exactly 4.00 (resolves with probability {}, wins {} of resolved)",
            ev.resolve_probability, ev.win_probability
        ),
    );
}

#[test]
fn criterion_11_dgp_properties() {
    let (n, k) = (100u32, 3u32);
    let grid = dgp::RegimeGrid::default();
    let bern_bias = |fg: f64| dist::expected_difference(n, k, fg).unwrap();
    let mut bad = Vec::new();

    // Zero-shift reduction: every family with d=0 matches the exact i.i.d.
    // expectation within three Monte-Carlo standard errors, at 10^4 reps.
    for (kind, seed) in [
        (dgp::DgpKind::RegimeShift, 101u64),
        (dgp::DgpKind::PositiveFeedback, 102),
        (dgp::DgpKind::PositiveFeedbackHits, 103),
    ] {
        let spec = dgp::spec_for_target(kind, 0.5, 0.0, k, n, 0.1, 0.9).unwrap();
        let est = dgp::estimate_bias(&spec, n, k, 10_000, seed).unwrap();
        let gap = (est.mean_diff - bern_bias(0.5)).abs();
        if gap > 3.0 * est.mc_se {
            bad.push(format!(
                "{kind:?} at d=0: mean {:.4} vs exact {:.4} (3 se = {:.4})",
                est.mean_diff,
                bern_bias(0.5),
                3.0 * est.mc_se
            ));
        }
    }

    // Regime shift magnifies the bias at every shift.
    for &d in &[0.1, 0.2, 0.3, 0.4] {
        let rows = dgp::bias_surface(
            dgp::DgpKind::RegimeShift,
            &[0.5],
            &[d],
            n,
            k,
            10_000,
            777,
            &grid,
        )
        .unwrap();
        if rows[0].bias.abs() + 3.0 * rows[0].mc_se < bern_bias(0.5).abs() {
            bad.push(format!(
                "regime shift d={d}: |bias| {:.4} below the i.i.d. {:.4}",
                rows[0].bias.abs(),
                bern_bias(0.5).abs()
            ));
        }
    }

    // Symmetric feedback sits below the i.i.d. bias curve (more negative),
    // as the source text states; 10^5 reps make the ~0.005 gap decisive at
    // three standard errors.
    for &d in &[0.1, 0.2, 0.3, 0.4] {
        let rows = dgp::bias_surface(
            dgp::DgpKind::PositiveFeedback,
            &[0.5],
            &[d],
            n,
            k,
            100_000,
            778,
            &grid,
        )
        .unwrap();
        if rows[0].bias > bern_bias(0.5) + 3.0 * rows[0].mc_se {
            bad.push(format!(
                "positive feedback d={d}: bias {:.4} not below the i.i.d. {:.4}",
                rows[0].bias,
                bern_bias(0.5)
            ));
        }
    }

    // Hits-only feedback: stronger than i.i.d. below a one-half rate,
    // weaker above it; strict at the largest shift.
    for &d in &[0.1, 0.2, 0.3, 0.4] {
        let strong = dgp::bias_surface(
            dgp::DgpKind::PositiveFeedbackHits,
            &[0.45],
            &[d],
            n,
            k,
            100_000,
            779,
            &grid,
        )
        .unwrap();
        if strong[0].bias > bern_bias(0.45) + 3.0 * strong[0].mc_se {
            bad.push(format!(
                "hits-only at rate 0.45, d={d}: bias {:.4} not stronger than i.i.d. {:.4}",
                strong[0].bias,
                bern_bias(0.45)
            ));
        }
        let weak = dgp::bias_surface(
            dgp::DgpKind::PositiveFeedbackHits,
            &[0.55],
            &[d],
            n,
            k,
            100_000,
            780,
            &grid,
        )
        .unwrap();
        if weak[0].bias < bern_bias(0.55) - 3.0 * weak[0].mc_se {
            bad.push(format!(
                "hits-only at rate 0.55, d={d}: bias {:.4} stronger than i.i.d. {:.4}",
                weak[0].bias,
                bern_bias(0.55)
            ));
        }
        if d == 0.4 {
            if strong[0].bias + 3.0 * strong[0].mc_se >= bern_bias(0.45) {
                bad.push("hits-only strengthening at rate 0.45 not strict at d=0.4".into());
            }
            if weak[0].bias - 3.0 * weak[0].mc_se <= bern_bias(0.55) {
                bad.push("hits-only weakening at rate 0.55 not strict at d=0.4".into());
            }
        }
    }

    if !bad.is_empty() {
        fail("11", bad.join("; "));
    }
    pass(
        "11",
        "zero-shift reduction, regime-shift magnification, feedback-below, and hits-only \
         orderings all hold at the stated Monte-Carlo precision"
            .into(),
    );
}

#[test]
fn criterion_12_permutation_validity() {
    // (a) Exact-test validity by full enumeration: within every
    // success-count stratum, the probability of a p-value at or below any
    // achievable value never exceeds that value.
    for &(n, k) in &[(6u32, 1u32), (9, 2), (12, 2), (12, 1)] {
        let mut by_stratum: Vec<Vec<f64>> = vec![Vec::new(); n as usize + 1];
        for mask in 0..(1u64 << n) {
            let seq = streakbias::BinarySequence::from_mask(mask, n as usize);
            match perm::exact_test(&seq, k, perm::Alternative::Greater) {
                Ok(r) => by_stratum[seq.successes()].push(r.p_value),
                Err(streakbias::Error::Undefined(_)) => {}
                Err(e) => fail("12", format!("unexpected error: {e}")),
            }
        }
        for (n1, ps) in by_stratum.iter().enumerate() {
            if ps.is_empty() {
                continue;
            }
            let total = ps.len() as f64;
            let mut sorted = ps.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (i, &v) in sorted.iter().enumerate() {
                let cdf = (i + 1) as f64 / total;
                if cdf > v + 1e-9 {
                    fail(
                        "12",
                        format!("exact test invalid at n={n}, k={k}, n1={n1}: P(p <= {v}) = {cdf}"),
                    );
                }
            }
        }
    }

    // (b) Monte-Carlo agreement with the exact test at 10^5 replications.
    for stream in 0..3u64 {
        let seq = common::bernoulli_sequence(0.5, 30, 2024, stream);
        let exact = match perm::exact_test(&seq, 3, perm::Alternative::Greater) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let mc = perm::mc_test(&seq, 3, 100_000, 9 + stream, perm::Alternative::Greater).unwrap();
        let se = (exact.p_value * (1.0 - exact.p_value) / 100_000.0).sqrt();
        if (mc.p_value - exact.p_value).abs() > 3.0 * se + 2e-5 {
            fail(
                "12",
                format!(
                    "Monte-Carlo p {:.5} vs exact {:.5} beyond three standard errors",
                    mc.p_value, exact.p_value
                ),
            );
        }
    }

    // (b2) The same agreement at study scale: the exact test built from the
    // conditional dictionary at n=100, 50 successes, against a 10^5-run
    // Monte-Carlo approximation.
    {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut outcomes = vec![1u8; 50];
        outcomes.extend(std::iter::repeat_n(0u8, 50));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        outcomes.shuffle(&mut rng);
        let seq = streakbias::BinarySequence::new(outcomes).unwrap();
        let exact = perm::exact_test(&seq, 3, perm::Alternative::Greater).unwrap();
        let mc = perm::mc_test(&seq, 3, 100_000, 21, perm::Alternative::Greater).unwrap();
        let se = (exact.p_value * (1.0 - exact.p_value) / 100_000.0).sqrt();
        if (mc.p_value - exact.p_value).abs() > 3.0 * se + 2e-5 {
            fail(
                "12",
                format!(
                    "study-scale Monte-Carlo p {:.5} vs exact {:.5} beyond three standard errors",
                    mc.p_value, exact.p_value
                ),
            );
        }
    }

    // (c) Pooled-test p-values approximately uniform under the null: 500
    // simulated 25-player studies at n=100.
    use rayon::prelude::*;
    let pvals: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|study| {
            let seqs: Vec<_> = (0..25)
                .map(|i| common::bernoulli_sequence(0.5, 100, 5000 + study, i))
                .collect();
            perm::pooled_stratified_test(&seqs, 3, 200, 90_000 + study)
                .unwrap()
                .p_value
        })
        .collect();
    let ks = common::ks_uniform_p(&pvals);
    if ks <= 0.01 {
        fail(
            "12",
            format!("pooled p-values not uniform under the null (KS p = {ks:.4})"),
        );
    }
    pass(
        "12",
        format!("exact size valid by enumeration; Monte-Carlo agrees; pooled null KS p = {ks:.3}"),
    );
}
