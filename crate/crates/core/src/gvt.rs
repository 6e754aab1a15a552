//! Reanalysis of the GVT controlled shooting experiment.
//!
//! The study's published table reports, per player, the shot count, overall
//! hit rate, and the hit rates (with opportunity counts) after streaks of
//! three hits and after streaks of three misses. That table ships embedded
//! here, checksummed. Because the published proportions are rounded to two
//! decimals, integer hit counts are recovered by nearest-integer rounding
//! of `proportion * count`, flagging any cell where no integer (or more
//! than one) is consistent with the printed value.
//!
//! The reanalysis pipeline: the raw streak difference per player, the exact
//! null expectation of that difference for an i.i.d. shooter with the
//! player's own hit rate (the mean correction), normal-approximation
//! standard errors, and the study-level tests — the original paired t-test,
//! the bias-adjusted mean test, a sign test, and per-player significance
//! counts against a binomial yardstick.

use crate::dist::expected_difference;
use crate::error::{Error, Result};
use crate::seq::{estimates, BinarySequence};
use crate::stats;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// The embedded shooting table (one row per player).
const GVT_TABLE: &str = include_str!("gvt_shooting.csv");

/// SHA-256 of the embedded table, fixed at packaging time.
pub const GVT_TABLE_SHA256: &str =
    "5049ed37316c378dde26dc890ed513e893304342db99eb0f548669124dd47a52";

/// Hit rate and opportunity count for one streak category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CategoryStat {
    /// Hit rate in the category (possibly rounded, if transcribed).
    pub proportion: f64,
    /// Number of shots in the category.
    pub count: u32,
}

impl CategoryStat {
    /// Recovers the integer hit count behind a possibly rounded proportion.
    /// The flag is set when no integer count (or more than one) rounds to
    /// the recorded proportion at two decimals.
    pub fn recovered_hits(&self) -> (u32, bool) {
        let m = self.count;
        let nearest = (self.proportion * m as f64).round() as i64;
        let nearest = nearest.clamp(0, m as i64) as u32;
        let consistent = (0..=m)
            .filter(|&h| (h as f64 / m as f64 - self.proportion).abs() <= 0.005 + 1e-9)
            .count();
        (nearest, consistent != 1)
    }
}

/// One row of the shooting table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerSummary {
    pub id: String,
    pub group: String,
    pub n_shots: u32,
    pub p_overall: f64,
    pub after_hits: Option<CategoryStat>,
    pub after_misses: Option<CategoryStat>,
}

impl PlayerSummary {
    /// The raw streak difference from recovered hit counts, defined when
    /// both categories have shots.
    pub fn gvt_diff(&self) -> Option<f64> {
        let (h, m) = (self.after_hits?, self.after_misses?);
        let (hh, _) = h.recovered_hits();
        let (hm, _) = m.recovered_hits();
        Some(hh as f64 / h.count as f64 - hm as f64 / m.count as f64)
    }
}

/// Loads the embedded shooting table, verifying its checksum.
pub fn load_gvt() -> Vec<PlayerSummary> {
    let digest = Sha256::digest(GVT_TABLE.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, GVT_TABLE_SHA256, "embedded shooting table corrupted");
    parse_summaries(GVT_TABLE).expect("embedded table parses")
}

/// Parses summary rows: header `player,group,n,p,ph,mh,pm,mm`, empty
/// proportion cells allowed when the matching count is zero.
pub fn parse_summaries(text: &str) -> Result<Vec<PlayerSummary>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::data("summary input is empty"))?;
    let expect = "player,group,n,p,ph,mh,pm,mm";
    if header.trim() != expect {
        return Err(Error::data(format!(
            "summary input must start with header `{expect}`, got `{header}`"
        )));
    }
    let mut players = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::data(format!(
                "summary row {} has {} fields, expected 8",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::data(format!("cannot parse {what} `{s}` on row {}", lineno + 2))
            })
        };
        let parse_u32 = |s: &str, what: &str| -> Result<u32> {
            s.parse::<u32>().map_err(|_| {
                Error::data(format!("cannot parse {what} `{s}` on row {}", lineno + 2))
            })
        };
        let category = |p: &str, m: &str, what: &str| -> Result<Option<CategoryStat>> {
            let count = parse_u32(m, what)?;
            if count == 0 {
                return Ok(None);
            }
            Ok(Some(CategoryStat {
                proportion: parse_f64(p, what)?,
                count,
            }))
        };
        players.push(PlayerSummary {
            id: fields[0].to_string(),
            group: fields[1].to_string(),
            n_shots: parse_u32(fields[2], "shot count")?,
            p_overall: parse_f64(fields[3], "overall rate")?,
            after_hits: category(fields[4], fields[5], "after-hits category")?,
            after_misses: category(fields[6], fields[7], "after-misses category")?,
        });
    }
    if players.is_empty() {
        return Err(Error::data("summary input has no rows"));
    }
    Ok(players)
}

/// Parses raw sequences: header `player,outcomes`, outcomes a string of
/// 0/1 (or H/T, X/O).
pub fn parse_sequences(text: &str) -> Result<Vec<(String, BinarySequence)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::data("sequence input is empty"))?;
    if header.trim() != "player,outcomes" {
        return Err(Error::data(format!(
            "sequence input must start with header `player,outcomes`, got `{header}`"
        )));
    }
    let mut out = Vec::new();
    for line in lines {
        let Some((id, outcomes)) = line.split_once(',') else {
            return Err(Error::data(format!("sequence row `{line}` has no comma")));
        };
        out.push((
            id.trim().to_string(),
            BinarySequence::parse(outcomes.trim())?,
        ));
    }
    if out.is_empty() {
        return Err(Error::data("sequence input has no rows"));
    }
    Ok(out)
}

/// Builds a summary row from a raw sequence at streak length `k`.
pub fn summarize_sequence(id: &str, seq: &BinarySequence, k: u32) -> Result<PlayerSummary> {
    let est = estimates(seq, k as usize)?;
    let after_hits = est.p_after_hits.map(|p| CategoryStat {
        proportion: p.to_f64(),
        count: p.opportunities,
    });
    // The summary schema stores hit rates on both sides; the after-misses
    // estimate carries the failure rate, so flip it.
    let after_misses = est.q_after_misses.map(|q| CategoryStat {
        proportion: 1.0 - q.to_f64(),
        count: q.opportunities,
    });
    Ok(PlayerSummary {
        id: id.to_string(),
        group: String::new(),
        n_shots: seq.len() as u32,
        p_overall: seq.successes() as f64 / seq.len() as f64,
        after_hits,
        after_misses,
    })
}

/// Which variance convention the per-player standard error uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeConvention {
    /// Binomial variance at the player's overall hit rate in both
    /// categories (the default; reproduces the published study-level
    /// standard error).
    OverallRate,
    /// Binomial variance at each category's own hit rate.
    CategoryRates,
}

/// Normal-approximation standard error of a player's difference:
/// `sqrt(v_h / m_h + v_m / m_m)` with the variance convention above.
pub fn player_se(summary: &PlayerSummary, convention: SeConvention) -> Option<f64> {
    let (h, m) = (summary.after_hits?, summary.after_misses?);
    let (vh, vm) = match convention {
        SeConvention::OverallRate => {
            let v = summary.p_overall * (1.0 - summary.p_overall);
            (v, v)
        }
        SeConvention::CategoryRates => {
            let (hh, _) = h.recovered_hits();
            let (hm, _) = m.recovered_hits();
            let ph = hh as f64 / h.count as f64;
            let pm = hm as f64 / m.count as f64;
            (ph * (1.0 - ph), pm * (1.0 - pm))
        }
    };
    Some((vh / h.count as f64 + vm / m.count as f64).sqrt())
}

type NullDiffCache = Mutex<HashMap<(u32, u32, u64), f64>>;

fn cached_expected_difference(n: u32, k: u32, p: f64) -> Result<f64> {
    static CACHE: OnceLock<NullDiffCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, k, p.to_bits());
    if let Some(&hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit);
    }
    let value = expected_difference(n, k, p)?;
    cache.lock().unwrap().insert(key, value);
    Ok(value)
}

/// A player's bias-corrected difference.
#[derive(Debug, Clone, Serialize)]
pub struct AdjustedResult {
    pub id: String,
    pub n_shots: u32,
    pub p_overall: f64,
    /// Raw difference from recovered hit counts; `None` when a category is
    /// empty (the player is excluded from study aggregates).
    pub raw_diff: Option<f64>,
    /// Exact expectation of the difference for an i.i.d. shooter with this
    /// player's rate and shot count.
    pub null_expected_diff: f64,
    /// `raw_diff - null_expected_diff`.
    pub adjusted_diff: Option<f64>,
    pub se: Option<f64>,
    /// One-sided (hot-hand) normal test of the adjusted difference.
    pub p_one_sided: Option<f64>,
}

/// Bias-corrects one player's difference under the i.i.d. null at the
/// player's own overall rate.
pub fn bias_adjust(summary: &PlayerSummary, k: u32) -> Result<AdjustedResult> {
    bias_adjust_with(summary, k, SeConvention::OverallRate)
}

pub fn bias_adjust_with(
    summary: &PlayerSummary,
    k: u32,
    convention: SeConvention,
) -> Result<AdjustedResult> {
    if !(summary.p_overall > 0.0 && summary.p_overall < 1.0) {
        return Err(Error::parameter(format!(
            "player {} has overall rate {} outside (0, 1)",
            summary.id, summary.p_overall
        )));
    }
    if k == 0 || k >= summary.n_shots {
        return Err(Error::parameter(format!(
            "streak length k={k} must satisfy 1 <= k <= n-1 (n={})",
            summary.n_shots
        )));
    }
    let null_expected_diff = cached_expected_difference(summary.n_shots, k, summary.p_overall)?;
    let raw_diff = summary.gvt_diff();
    let adjusted_diff = raw_diff.map(|d| d - null_expected_diff);
    let se = player_se(summary, convention);
    let p_one_sided = match (adjusted_diff, se) {
        (Some(adj), Some(se)) if se > 0.0 => Some(stats::normal_sf(adj / se)),
        _ => None,
    };
    Ok(AdjustedResult {
        id: summary.id.clone(),
        n_shots: summary.n_shots,
        p_overall: summary.p_overall,
        raw_diff,
        null_expected_diff,
        adjusted_diff,
        se,
        p_one_sided,
    })
}

/// Study-level reanalysis results.
#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub k: u32,
    /// Players with a defined difference.
    pub players_defined: usize,
    /// Players excluded because a category was empty.
    pub excluded: Vec<String>,
    pub mean_raw_diff: f64,
    /// Two-sided paired t-test of the raw differences against zero.
    pub raw_t_statistic: f64,
    pub raw_t_p_two_sided: f64,
    pub mean_adjusted_diff: f64,
    /// Standard error of the mean adjusted difference.
    pub study_se: f64,
    pub adjusted_z: f64,
    /// One-sided (hot-hand) p-value of the adjusted mean.
    pub adjusted_p_one_sided: f64,
    /// Players with a positive adjusted difference.
    pub positive_count: usize,
    /// One-sided binomial p-value of the positive count at rate one half.
    pub sign_test_p: f64,
    /// Players individually significant at the 0.05 one-sided level.
    pub significant_count: usize,
    /// One-sided binomial p-value of that count at rate 0.05.
    pub significant_binomial_p: f64,
    pub per_player: Vec<AdjustedResult>,
}

/// Runs the full battery of study-level tests at streak length `k`.
pub fn study_tests(players: &[PlayerSummary], k: u32) -> Result<StudyResult> {
    study_tests_with(players, k, SeConvention::OverallRate)
}

pub fn study_tests_with(
    players: &[PlayerSummary],
    k: u32,
    convention: SeConvention,
) -> Result<StudyResult> {
    let per_player: Vec<AdjustedResult> = players
        .iter()
        .map(|p| bias_adjust_with(p, k, convention))
        .collect::<Result<_>>()?;
    let excluded: Vec<String> = per_player
        .iter()
        .filter(|r| r.raw_diff.is_none())
        .map(|r| r.id.clone())
        .collect();
    let defined: Vec<&AdjustedResult> =
        per_player.iter().filter(|r| r.raw_diff.is_some()).collect();
    let m = defined.len();
    if m < 2 {
        return Err(Error::degenerate(format!(
            "study tests need at least two players with defined differences, got {m}"
        )));
    }
    let raw: Vec<f64> = defined.iter().map(|r| r.raw_diff.unwrap()).collect();
    let mean_raw_diff = raw.iter().sum::<f64>() / m as f64;
    let raw_var = raw.iter().map(|d| (d - mean_raw_diff).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    let raw_t_statistic = mean_raw_diff / (raw_var / m as f64).sqrt();
    let raw_t_p_two_sided = stats::t_two_sided(raw_t_statistic, m as f64 - 1.0);

    let adjusted: Vec<f64> = defined.iter().map(|r| r.adjusted_diff.unwrap()).collect();
    let mean_adjusted_diff = adjusted.iter().sum::<f64>() / m as f64;
    let sum_var: f64 = defined
        .iter()
        .map(|r| {
            let se = r.se.expect("defined players have both categories");
            se * se
        })
        .sum();
    let study_se = sum_var.sqrt() / m as f64;
    let adjusted_z = mean_adjusted_diff / study_se;
    let adjusted_p_one_sided = stats::normal_sf(adjusted_z);

    let positive_count = adjusted.iter().filter(|&&d| d > 0.0).count();
    let sign_test_p = stats::binomial_upper_tail(positive_count as u64, m as u64, 0.5);

    let significant_count = defined
        .iter()
        .filter(|r| r.p_one_sided.is_some_and(|p| p < 0.05))
        .count();
    let significant_binomial_p =
        stats::binomial_upper_tail(significant_count as u64, m as u64, 0.05);

    Ok(StudyResult {
        k,
        players_defined: m,
        excluded,
        mean_raw_diff,
        raw_t_statistic,
        raw_t_p_two_sided,
        mean_adjusted_diff,
        study_se,
        adjusted_z,
        adjusted_p_one_sided,
        positive_count,
        sign_test_p,
        significant_count,
        significant_binomial_p,
        per_player,
    })
}

/// The simple pooled estimate: all category shots pooled across players,
/// difference of the two pooled hit rates.
#[derive(Debug, Clone, Serialize)]
pub struct PooledSimpleResult {
    pub estimate: f64,
    /// Two-sample binomial standard error.
    pub se: f64,
    pub hits_after_hits: u32,
    pub shots_after_hits: u32,
    pub hits_after_misses: u32,
    pub shots_after_misses: u32,
    /// Shots in either category.
    pub category_shots: u32,
    /// All shots taken in the study, including those in neither category.
    pub total_shots: u32,
    /// Cells whose printed proportion is inconsistent with every integer
    /// hit count (recovery proceeds with the nearest).
    pub flagged_cells: Vec<String>,
}

pub fn pooled_simple(players: &[PlayerSummary]) -> Result<PooledSimpleResult> {
    let mut hits_h = 0u32;
    let mut shots_h = 0u32;
    let mut hits_m = 0u32;
    let mut shots_m = 0u32;
    let mut total_shots = 0u32;
    let mut flagged = Vec::new();
    for p in players {
        total_shots += p.n_shots;
        if let Some(h) = p.after_hits {
            let (hh, flag) = h.recovered_hits();
            if flag {
                flagged.push(format!("{} after-hits", p.id));
            }
            hits_h += hh;
            shots_h += h.count;
        }
        if let Some(m) = p.after_misses {
            let (hm, flag) = m.recovered_hits();
            if flag {
                flagged.push(format!("{} after-misses", p.id));
            }
            hits_m += hm;
            shots_m += m.count;
        }
    }
    if shots_h == 0 || shots_m == 0 {
        return Err(Error::degenerate(
            "pooling needs shots in both streak categories",
        ));
    }
    let ph = hits_h as f64 / shots_h as f64;
    let pm = hits_m as f64 / shots_m as f64;
    let pooled = (hits_h + hits_m) as f64 / (shots_h + shots_m) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / shots_h as f64 + 1.0 / shots_m as f64)).sqrt();
    Ok(PooledSimpleResult {
        estimate: ph - pm,
        se,
        hits_after_hits: hits_h,
        shots_after_hits: shots_h,
        hits_after_misses: hits_m,
        shots_after_misses: shots_m,
        category_shots: shots_h + shots_m,
        total_shots,
        flagged_cells: flagged,
    })
}

/// Bias-corrects an externally reported pair of category hit rates:
/// `(p_after_hits - p_after_misses) - E[difference | i.i.d.(p), n trials]`.
pub fn adjust_external(
    p_after_hits: f64,
    p_after_misses: f64,
    n: u32,
    p: f64,
    k: u32,
) -> Result<f64> {
    for (name, x) in [
        ("p_after_hits", p_after_hits),
        ("p_after_misses", p_after_misses),
    ] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::parameter(format!("{name}={x} must lie in [0, 1]")));
        }
    }
    let null = cached_expected_difference(n, k, p)?;
    Ok((p_after_hits - p_after_misses) - null)
}
