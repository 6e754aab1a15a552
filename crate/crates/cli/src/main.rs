//! Command-line surface for the streak-bias library.
//!
//! Every subcommand emits either delimited text (default, with a header row
//! for tabular output) or JSON (`--format json`), to standard output or to
//! `--out PATH`. All numerical output is deterministic given identical
//! flags, including `--seed` for the Monte-Carlo commands.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid parameter, 4 capacity
//! exceeded, 5 undefined statistic or degenerate input, 6 bad input data or
//! I/O failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;
use streakbias::dist::{self, CountDistribution, DistParam, HistogramSpec, Statistic};
use streakbias::error::Error;
use streakbias::{closedform, dgp, gvt, oracle, perm, BinarySequence};

mod render;

use render::{Format, Sink, Table};

#[derive(Parser)]
#[command(
    name = "streakbias",
    about = "Exact distributions, bias corrections, permutation tests, and simulators \
             for streak-conditional statistics of binary sequences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatArg {
    Proportion,
    Difference,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Statistic {
        match s {
            StatArg::Proportion => Statistic::Proportion,
            StatArg::Difference => Statistic::Difference,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AltArg {
    Greater,
    Less,
    TwoSided,
}

impl From<AltArg> for perm::Alternative {
    fn from(a: AltArg) -> perm::Alternative {
        match a {
            AltArg::Greater => perm::Alternative::Greater,
            AltArg::Less => perm::Alternative::Less,
            AltArg::TwoSided => perm::Alternative::TwoSided,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Decimal digits for floating-point text output.
    #[arg(long, global = true, default_value_t = 6)]
    digits: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Expected streak-follower proportion or difference under i.i.d. trials.
    Expect {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value = "proportion")]
        stat: StatArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expected value over a grid of (n, k, p), one row per point.
    Curve {
        #[arg(long, value_enum, default_value = "proportion")]
        stat: StatArg,
        #[arg(long)]
        n_from: u32,
        #[arg(long)]
        n_to: u32,
        #[arg(long, default_value_t = 1)]
        n_step: u32,
        /// Comma-separated streak lengths.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        k: Vec<u32>,
        /// Comma-separated success probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        p: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact count distribution (or its histogram) at one parameter point.
    Dist {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Success probability (i.i.d. mode).
        #[arg(long, conflicts_with = "conditional_n1")]
        p: Option<f64>,
        /// Build the distribution conditional on this success count instead.
        #[arg(long)]
        conditional_n1: Option<u32>,
        #[arg(long, value_enum, default_value = "proportion")]
        stat: StatArg,
        /// Emit a histogram of the statistic with this bin width instead of
        /// raw dictionary entries.
        #[arg(long)]
        hist_bin: Option<f64>,
        /// Decimal digits at which statistic values are grouped.
        #[arg(long, default_value_t = 6)]
        round_digits: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-sequence streak estimates from a `player,outcomes` file.
    Estimate {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Permutation tests of the constant-probability null per player, or
    /// pooled across players.
    Permtest {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "greater")]
        alternative: AltArg,
        /// Run the stratified pooled test over all players instead of
        /// per-player tests.
        #[arg(long)]
        pooled: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical values of the exact test for every success count (exact
    /// conditional distributions; takes minutes at n=100).
    Critical {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate a hot-hand process and measure the bias of the difference.
    Simulate {
        /// Process family: bernoulli, regime, feedback, feedback-hits.
        #[arg(long)]
        dgp: String,
        /// Expected overall success rate.
        #[arg(long)]
        fg: f64,
        /// True probability shift.
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Feedback window (defaults to the streak length `k`).
        #[arg(long)]
        window: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Regime-shift stationary hot-state weight (single-point runs).
        #[arg(long, default_value_t = 0.1)]
        pi_hot: f64,
        /// Regime-shift hot-state self-transition (single-point runs).
        #[arg(long, default_value_t = 0.9)]
        q_hh: f64,
        /// Sweep a grid of rates and shifts instead of a single point;
        /// regime-shift points average over the nuisance grid.
        #[arg(long)]
        surface: bool,
        #[arg(long, default_value_t = 0.4)]
        fg_from: f64,
        #[arg(long, default_value_t = 0.6)]
        fg_to: f64,
        #[arg(long, default_value_t = 0.05)]
        fg_step: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
        d_list: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reanalyze the embedded shooting study (or your own data): raw and
    /// bias-corrected differences, study-level tests, pooled estimate.
    Reanalyze {
        /// Use the embedded 26-player shooting table.
        #[arg(long, conflicts_with = "input")]
        gvt: bool,
        /// Summary table (`player,group,n,p,ph,mh,pm,mm`) or, with
        /// `--sequences`, raw sequences (`player,outcomes`).
        #[arg(long)]
        input: Option<std::path::PathBuf>,
        /// Treat `--input` as raw sequences.
        #[arg(long)]
        sequences: bool,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Variance convention for player standard errors: overall or
        /// category.
        #[arg(long, default_value = "overall")]
        se_convention: String,
        /// Also print the simple pooled estimate.
        #[arg(long)]
        pooled_simple: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bias-correct an externally reported pair of category hit rates.
    AdjustExternal {
        #[arg(long)]
        p_after_hits: f64,
        #[arg(long)]
        p_after_misses: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Brute-force enumeration: distributions, the streak lottery, and the
    /// reversal predictor.
    Oracle {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, value_enum, default_value = "proportion")]
        stat: StatArg,
        #[arg(long)]
        conditional_n1: Option<u32>,
        /// Evaluate the streak lottery instead of a distribution.
        #[arg(long)]
        lottery: bool,
        #[arg(long, default_value_t = 5.0)]
        price: f64,
        #[arg(long, default_value_t = 10.0)]
        payout: f64,
        /// Evaluate the reversal predictor instead of a distribution.
        #[arg(long)]
        reversal: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampling-without-replacement benchmark expectation.
    Swor {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n_from: Option<u32>,
        #[arg(long)]
        n_to: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Honors STREAKBIAS_THREADS for the default worker count.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("STREAKBIAS_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) => 3,
        Error::Capacity(_) => 4,
        Error::Undefined(_) | Error::Degenerate(_) => 5,
        Error::Data(_) => 6,
    }
}

fn read_input(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Expect {
            n,
            k,
            p,
            stat,
            output,
        } => {
            let value = match stat.into() {
                Statistic::Proportion => dist::expected_proportion(n, k, p)?,
                Statistic::Difference => dist::expected_difference(n, k, p)?,
            };
            let mut sink = Sink::open(&output)?;
            match output.format {
                Format::Text => sink.line(&format!("{value:.*}", output.digits))?,
                Format::Json => sink.json(&serde_json::json!({
                    "n": n, "k": k, "p": p,
                    "statistic": stat_name(stat), "value": value,
                }))?,
            }
            sink.finish()
        }
        Command::Curve {
            stat,
            n_from,
            n_to,
            n_step,
            k,
            p,
            output,
        } => {
            if n_step == 0 || n_to < n_from {
                return Err(Error::Parameter(
                    "need n_from <= n_to and a positive n_step".into(),
                ));
            }
            let ns: Vec<u32> = (n_from..=n_to).step_by(n_step as usize).collect();
            let rows = dist::bias_curve(&ns, &k, &p, stat.into())?;
            let mut table = Table::new(&["n", "k", "p", "value"]);
            for r in &rows {
                table.row(&[
                    r.n.to_string(),
                    r.k.to_string(),
                    trim_float(r.p),
                    format!("{:.*}", output.digits, r.value),
                ]);
            }
            table.emit(
                &output,
                |r| serde_json::json!({"n": r[0], "k": r[1], "p": r[2], "value": r[3]}),
            )
        }
        Command::Dist {
            n,
            k,
            p,
            conditional_n1,
            stat,
            hist_bin,
            round_digits,
            output,
        } => run_dist(
            n,
            k,
            p,
            conditional_n1,
            stat,
            hist_bin,
            round_digits,
            output,
        ),
        Command::Estimate { input, k, output } => {
            let players = gvt::parse_sequences(&read_input(&input)?)?;
            let mut table = Table::new(&[
                "player",
                "n",
                "n1",
                "after_hits",
                "hits_rate",
                "after_misses",
                "misses_rate",
                "difference",
            ]);
            for (id, seq) in &players {
                let est = streakbias::seq::estimates(seq, k as usize)?;
                let fmt_opt = |v: Option<f64>| match v {
                    Some(v) => format!("{:.*}", output.digits, v),
                    None => ".".to_string(),
                };
                table.row(&[
                    id.clone(),
                    seq.len().to_string(),
                    seq.successes().to_string(),
                    est.p_after_hits.map_or(0, |c| c.opportunities).to_string(),
                    fmt_opt(est.p_after_hits.map(|c| c.to_f64())),
                    est.q_after_misses
                        .map_or(0, |c| c.opportunities)
                        .to_string(),
                    fmt_opt(est.q_after_misses.map(|c| 1.0 - c.to_f64())),
                    fmt_opt(est.difference_f64()),
                ]);
            }
            table.emit(&output, |r| {
                serde_json::json!({
                    "player": r[0], "n": r[1], "n1": r[2],
                    "after_hits": r[3], "hits_rate": r[4],
                    "after_misses": r[5], "misses_rate": r[6],
                    "difference": r[7],
                })
            })
        }
        Command::Permtest {
            input,
            k,
            method,
            reps,
            seed,
            alternative,
            pooled,
            output,
        } => run_permtest(input, k, method, reps, seed, alternative, pooled, output),
        Command::Critical {
            n,
            k,
            alpha,
            output,
        } => {
            let fam = perm::critical_values(n, k, alpha)?;
            let mut table = Table::new(&["n1", "critical", "tail_probability"]);
            for e in &fam.entries {
                table.row(&[
                    e.n1.to_string(),
                    e.critical
                        .map_or(".".into(), |c| format!("{:.*}", output.digits, c)),
                    e.tail_probability
                        .map_or(".".into(), |t| format!("{:.*}", output.digits, t)),
                ]);
            }
            table.emit(
                &output,
                |r| serde_json::json!({"n1": r[0], "critical": r[1], "tail_probability": r[2]}),
            )
        }
        Command::Simulate {
            dgp,
            fg,
            d,
            trials,
            k,
            window,
            reps,
            seed,
            pi_hot,
            q_hh,
            surface,
            fg_from,
            fg_to,
            fg_step,
            d_list,
            output,
        } => {
            let kind = match dgp.as_str() {
                "bernoulli" => dgp::DgpKind::Bernoulli,
                "regime" => dgp::DgpKind::RegimeShift,
                "feedback" => dgp::DgpKind::PositiveFeedback,
                "feedback-hits" => dgp::DgpKind::PositiveFeedbackHits,
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown process family `{other}`; use bernoulli, regime, \
                         feedback, or feedback-hits"
                    )))
                }
            };
            let window = window.unwrap_or(k);
            if surface {
                let mut fgs = Vec::new();
                let mut x = fg_from;
                while x <= fg_to + 1e-12 {
                    fgs.push(x);
                    x += fg_step;
                }
                let rows = dgp::bias_surface(
                    kind,
                    &fgs,
                    &d_list,
                    trials,
                    k,
                    reps,
                    seed,
                    &dgp::RegimeGrid::default(),
                )?;
                let mut table = Table::new(&["fg", "d", "bias", "mc_se"]);
                for r in &rows {
                    table.row(&[
                        format!("{:.*}", output.digits, r.fg),
                        trim_float(r.d),
                        format!("{:.*}", output.digits, r.bias),
                        format!("{:.*}", output.digits, r.mc_se),
                    ]);
                }
                table.emit(
                    &output,
                    |r| serde_json::json!({"fg": r[0], "d": r[1], "bias": r[2], "mc_se": r[3]}),
                )
            } else {
                let spec = dgp::spec_for_target(kind, fg, d, window, trials, pi_hot, q_hh)?;
                let est = dgp::estimate_bias(&spec, trials, k, reps, seed)?;
                let mut sink = Sink::open(&output)?;
                match output.format {
                    Format::Text => {
                        sink.line("mean_diff,true_shift,bias,mc_se,replications,defined")?;
                        sink.line(&format!(
                            "{:.*},{},{:.*},{:.*},{},{}",
                            output.digits,
                            est.mean_diff,
                            trim_float(est.true_shift),
                            output.digits,
                            est.bias,
                            output.digits,
                            est.mc_se,
                            est.replications,
                            est.defined
                        ))?;
                    }
                    Format::Json => sink.json(&serde_json::json!({
                        "spec": spec, "n": trials, "k": k,
                        "mean_diff": est.mean_diff, "true_shift": est.true_shift,
                        "bias": est.bias, "mc_se": est.mc_se,
                        "replications": est.replications, "defined": est.defined,
                    }))?,
                }
                sink.finish()
            }
        }
        Command::Reanalyze {
            gvt: use_gvt,
            input,
            sequences,
            k,
            se_convention,
            pooled_simple,
            output,
        } => run_reanalyze(
            use_gvt,
            input,
            sequences,
            k,
            se_convention,
            pooled_simple,
            output,
        ),
        Command::AdjustExternal {
            p_after_hits,
            p_after_misses,
            n,
            p,
            k,
            output,
        } => {
            let adjusted = gvt::adjust_external(p_after_hits, p_after_misses, n, p, k)?;
            let null = dist::expected_difference(n, k, p)?;
            let mut sink = Sink::open(&output)?;
            match output.format {
                Format::Text => {
                    sink.line(&format!(
                        "raw_difference,null_expected_diff,adjusted\n{:.*},{:.*},{:.*}",
                        output.digits,
                        p_after_hits - p_after_misses,
                        output.digits,
                        null,
                        output.digits,
                        adjusted
                    ))?;
                }
                Format::Json => sink.json(&serde_json::json!({
                    "raw_difference": p_after_hits - p_after_misses,
                    "null_expected_diff": null,
                    "adjusted": adjusted,
                }))?,
            }
            sink.finish()
        }
        Command::Oracle {
            n,
            k,
            p,
            stat,
            conditional_n1,
            lottery,
            price,
            payout,
            reversal,
            output,
        } => run_oracle(
            n,
            k,
            p,
            stat,
            conditional_n1,
            lottery,
            price,
            payout,
            reversal,
            output,
        ),
        Command::Swor {
            n,
            k,
            p,
            n_from,
            n_to,
            output,
        } => {
            let mut sink = Sink::open(&output)?;
            match (n, n_from, n_to) {
                (Some(n), None, None) => {
                    let v = closedform::swor_expected(n, k, p)?;
                    match output.format {
                        Format::Text => sink.line(&format!("{v:.*}", output.digits))?,
                        Format::Json => {
                            sink.json(&serde_json::json!({"n": n, "k": k, "p": p, "value": v}))?
                        }
                    }
                }
                (None, Some(a), Some(b)) => {
                    let mut rows = Vec::new();
                    for n in a..=b {
                        rows.push((n, closedform::swor_expected(n, k, p)?));
                    }
                    match output.format {
                        Format::Text => {
                            sink.line("n,k,p,value")?;
                            for (n, v) in rows {
                                sink.line(&format!(
                                    "{n},{k},{},{v:.*}",
                                    trim_float(p),
                                    output.digits
                                ))?;
                            }
                        }
                        Format::Json => {
                            let items: Vec<_> = rows
                                .iter()
                                .map(|(n, v)| {
                                    serde_json::json!({"n": n, "k": k, "p": p, "value": v})
                                })
                                .collect();
                            sink.json(&serde_json::Value::Array(items))?;
                        }
                    }
                }
                _ => {
                    return Err(Error::Parameter(
                        "give either --n or both --n-from and --n-to".into(),
                    ))
                }
            }
            sink.finish()
        }
    }
}

fn stat_name(stat: StatArg) -> &'static str {
    match stat {
        StatArg::Proportion => "proportion",
        StatArg::Difference => "difference",
    }
}

/// Shortest-roundtrip float text, for parameter echo columns.
fn trim_float(x: f64) -> String {
    format!("{x}")
}

#[allow(clippy::too_many_arguments)]
fn run_dist(
    n: u32,
    k: u32,
    p: Option<f64>,
    conditional_n1: Option<u32>,
    stat: StatArg,
    hist_bin: Option<f64>,
    round_digits: u32,
    output: OutputArgs,
) -> Result<(), Error> {
    enum Built {
        Prob(CountDistribution<f64>),
        Exact(CountDistribution<num_bigint::BigUint>),
    }
    let built = match (p, conditional_n1) {
        (Some(p), None) => match stat.into() {
            Statistic::Proportion => Built::Prob(dist::build_proportion_distribution(n, k, p)?),
            Statistic::Difference => Built::Prob(dist::build_difference_distribution(n, k, p)?),
        },
        (None, Some(n1)) => Built::Exact(dist::build_conditional_distribution(n, k, n1)?),
        (None, None) => {
            return Err(Error::Parameter(
                "give either --p or --conditional-n1".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(width) = hist_bin {
        let spec = HistogramSpec::new(width, round_digits)?;
        let prob = match &built {
            Built::Prob(d) => d.clone(),
            Built::Exact(d) => d.to_probability(),
        };
        let bins = dist::distribution_to_histogram(&prob, stat.into(), &spec)?;
        let mut table = Table::new(&["bin_lower", "mass"]);
        for b in &bins {
            table.row(&[
                format!("{:.*}", output.digits, b.lower_edge),
                format!("{:.*}", output.digits, b.mass),
            ]);
        }
        return table.emit(
            &output,
            |r| serde_json::json!({"bin_lower": r[0], "mass": r[1]}),
        );
    }
    let (param_json, weight_kind) = match &built {
        Built::Prob(d) => (param_json(&d.param), "probability"),
        Built::Exact(d) => (param_json(&d.param), "sequence_count"),
    };
    let key_header: &[&str] = match stat.into() {
        Statistic::Proportion => &["m0", "m1"],
        Statistic::Difference => &["m00", "m10", "m01", "m11"],
    };
    match output.format {
        Format::Text => {
            let mut sink = Sink::open(&output)?;
            let mut header = key_header.join(",");
            header.push_str(",weight");
            sink.line(&header)?;
            match &built {
                Built::Prob(d) => {
                    for (key, w) in d.entries() {
                        let parts: Vec<String> =
                            key.components().iter().map(|c| c.to_string()).collect();
                        sink.line(&format!("{},{}", parts.join(","), w))?;
                    }
                }
                Built::Exact(d) => {
                    for (key, w) in d.entries() {
                        let parts: Vec<String> =
                            key.components().iter().map(|c| c.to_string()).collect();
                        sink.line(&format!("{},{}", parts.join(","), w))?;
                    }
                }
            }
            sink.finish()
        }
        Format::Json => {
            let entries: Vec<serde_json::Value> = match &built {
                Built::Prob(d) => d
                    .entries()
                    .iter()
                    .map(|(key, w)| serde_json::json!({"key": key.components(), "weight": w}))
                    .collect(),
                Built::Exact(d) => d
                    .entries()
                    .iter()
                    .map(|(key, w)| {
                        serde_json::json!({"key": key.components(), "weight": w.to_string()})
                    })
                    .collect(),
            };
            let mut sink = Sink::open(&output)?;
            sink.json(&serde_json::json!({
                "n": n, "k": k, "param": param_json,
                "weight_kind": weight_kind,
                "entries": entries,
            }))?;
            sink.finish()
        }
    }
}

fn param_json(param: &DistParam) -> serde_json::Value {
    match param {
        DistParam::Bernoulli { p } => serde_json::json!({"p": p}),
        DistParam::BernoulliExact { p_num, p_den } => {
            serde_json::json!({"p_num": p_num, "p_den": p_den})
        }
        DistParam::SuccessCount { n1 } => serde_json::json!({"n1": n1}),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_permtest(
    input: std::path::PathBuf,
    k: u32,
    method: String,
    reps: u64,
    seed: u64,
    alternative: AltArg,
    pooled: bool,
    output: OutputArgs,
) -> Result<(), Error> {
    let players = gvt::parse_sequences(&read_input(&input)?)?;
    if pooled {
        let seqs: Vec<BinarySequence> = players.iter().map(|(_, s)| s.clone()).collect();
        let r = perm::pooled_stratified_test(&seqs, k, reps, seed)?;
        let mut sink = Sink::open(&output)?;
        match output.format {
            Format::Text => {
                sink.line("observed,p_value,replications,seed,included,excluded")?;
                let excluded: Vec<String> = r
                    .excluded
                    .iter()
                    .map(|e| players[e.index].0.clone())
                    .collect();
                sink.line(&format!(
                    "{:.*},{:.*},{},{},{},{}",
                    output.digits,
                    r.observed,
                    output.digits,
                    r.p_value,
                    r.replications,
                    r.seed,
                    r.included,
                    if excluded.is_empty() {
                        ".".to_string()
                    } else {
                        excluded.join(";")
                    }
                ))?;
            }
            Format::Json => sink.json(&serde_json::json!({
                "observed": r.observed, "p_value": r.p_value,
                "replications": r.replications, "seed": r.seed,
                "included": r.included,
                "excluded": r.excluded.iter().map(|e| serde_json::json!({
                    "player": players[e.index].0, "reason": e.reason,
                })).collect::<Vec<_>>(),
            }))?,
        }
        return sink.finish();
    }
    let mut table = Table::new(&[
        "player",
        "n",
        "n1",
        "observed",
        "p_value",
        "method",
        "discarded",
    ]);
    for (id, seq) in &players {
        let r = match method.as_str() {
            "exact" => perm::exact_test(seq, k, alternative.into())?,
            "mc" => perm::mc_test(seq, k, reps, seed, alternative.into())?,
            other => {
                return Err(Error::Parameter(format!(
                    "unknown method `{other}`; use exact or mc"
                )))
            }
        };
        table.row(&[
            id.clone(),
            r.n.to_string(),
            r.n1.to_string(),
            format!("{:.*}", output.digits, r.observed),
            format!("{:.*}", output.digits, r.p_value),
            match r.method {
                perm::TestMethod::Exact => "exact".into(),
                perm::TestMethod::MonteCarlo => "mc".into(),
            },
            r.discarded.map_or(".".into(), |d| d.to_string()),
        ]);
    }
    table.emit(&output, |r| {
        serde_json::json!({
            "player": r[0], "n": r[1], "n1": r[2], "observed": r[3],
            "p_value": r[4], "method": r[5], "discarded": r[6],
        })
    })
}

fn run_reanalyze(
    use_gvt: bool,
    input: Option<std::path::PathBuf>,
    sequences: bool,
    k: u32,
    se_convention: String,
    pooled_simple: bool,
    output: OutputArgs,
) -> Result<(), Error> {
    let convention = match se_convention.as_str() {
        "overall" => gvt::SeConvention::OverallRate,
        "category" => gvt::SeConvention::CategoryRates,
        other => {
            return Err(Error::Parameter(format!(
                "unknown SE convention `{other}`; use overall or category"
            )))
        }
    };
    let players: Vec<gvt::PlayerSummary> = if use_gvt {
        gvt::load_gvt()
    } else {
        let path = input.ok_or_else(|| Error::Parameter("give --gvt or --input".into()))?;
        let text = read_input(&path)?;
        if sequences {
            gvt::parse_sequences(&text)?
                .iter()
                .map(|(id, seq)| gvt::summarize_sequence(id, seq, k))
                .collect::<Result<_, _>>()?
        } else {
            gvt::parse_summaries(&text)?
        }
    };
    let study = gvt::study_tests_with(&players, k, convention)?;
    let mut sink = Sink::open(&output)?;
    match output.format {
        Format::Json => {
            let mut value = serde_json::to_value(&study)
                .map_err(|e| Error::Data(format!("serialization failed: {e}")))?;
            if pooled_simple {
                let pooled = gvt::pooled_simple(&players)?;
                value["pooled_simple"] = serde_json::to_value(&pooled)
                    .map_err(|e| Error::Data(format!("serialization failed: {e}")))?;
            }
            sink.json(&value)?;
        }
        Format::Text => {
            let d = output.digits;
            sink.line("player,n,p,raw_diff,null_expected,adjusted,se,p_one_sided")?;
            for r in &study.per_player {
                let fmt = |v: Option<f64>| match v {
                    Some(v) => format!("{v:.d$}"),
                    None => ".".into(),
                };
                sink.line(&format!(
                    "{},{},{},{},{:.d$},{},{},{}",
                    r.id,
                    r.n_shots,
                    trim_float(r.p_overall),
                    fmt(r.raw_diff),
                    r.null_expected_diff,
                    fmt(r.adjusted_diff),
                    fmt(r.se),
                    fmt(r.p_one_sided),
                ))?;
            }
            sink.line("")?;
            sink.line(&format!(
                "players_defined,{} (excluded: {})",
                study.players_defined,
                if study.excluded.is_empty() {
                    ".".to_string()
                } else {
                    study.excluded.join(";")
                }
            ))?;
            sink.line(&format!("mean_raw_diff,{:.d$}", study.mean_raw_diff))?;
            sink.line(&format!(
                "raw_paired_t,{:.3} (two-sided p {:.d$})",
                study.raw_t_statistic, study.raw_t_p_two_sided
            ))?;
            sink.line(&format!(
                "mean_adjusted_diff,{:.d$}",
                study.mean_adjusted_diff
            ))?;
            sink.line(&format!("study_se,{:.d$}", study.study_se))?;
            sink.line(&format!(
                "adjusted_z,{:.3} (one-sided p {:.d$})",
                study.adjusted_z, study.adjusted_p_one_sided
            ))?;
            sink.line(&format!(
                "positive,{}/{} (sign-test p {:.d$})",
                study.positive_count, study.players_defined, study.sign_test_p
            ))?;
            sink.line(&format!(
                "significant_at_05,{} (binomial p {:.d$})",
                study.significant_count, study.significant_binomial_p
            ))?;
            if pooled_simple {
                let pooled = gvt::pooled_simple(&players)?;
                sink.line("")?;
                sink.line(&format!(
                    "pooled_simple,{:.d$} (se {:.d$}, category shots {}, total shots {})",
                    pooled.estimate, pooled.se, pooled.category_shots, pooled.total_shots
                ))?;
                if !pooled.flagged_cells.is_empty() {
                    sink.line(&format!(
                        "pooled_flagged_cells,{}",
                        pooled.flagged_cells.join(";")
                    ))?;
                }
            }
        }
    }
    sink.finish()
}

#[allow(clippy::too_many_arguments)]
fn run_oracle(
    n: u32,
    k: u32,
    p: f64,
    stat: StatArg,
    conditional_n1: Option<u32>,
    lottery: bool,
    price: f64,
    payout: f64,
    reversal: bool,
    output: OutputArgs,
) -> Result<(), Error> {
    let mut sink = Sink::open(&output)?;
    if lottery {
        let ev = oracle::lottery_ev(n, k, price, payout)?;
        match output.format {
            Format::Text => {
                sink.line("expected_value,resolve_probability,win_probability,expected_profit")?;
                sink.line(&format!(
                    "{:.*},{:.*},{:.*},{:.*}",
                    output.digits,
                    ev.expected_value,
                    output.digits,
                    ev.resolve_probability,
                    output.digits,
                    ev.win_probability,
                    output.digits,
                    ev.expected_profit
                ))?;
            }
            Format::Json => sink.json(&serde_json::to_value(ev).unwrap())?,
        }
        return sink.finish();
    }
    if reversal {
        let r = oracle::reversal_predictor_rate(n, k, p)?;
        match output.format {
            Format::Text => {
                let fmt = |v: Option<f64>| match v {
                    Some(v) => format!("{:.*}", output.digits, v),
                    None => ".".into(),
                };
                sink.line("after_hit_streaks,after_both_streaks")?;
                sink.line(&format!(
                    "{},{}",
                    fmt(r.after_hit_streaks),
                    fmt(r.after_both_streaks)
                ))?;
            }
            Format::Json => sink.json(&serde_json::to_value(r).unwrap())?,
        }
        return sink.finish();
    }
    let result = oracle::enumerate(n, k, p, stat.into(), conditional_n1)?;
    match output.format {
        Format::Text => {
            sink.line(&format!(
                "expectation,{}",
                result
                    .expectation
                    .map_or(".".into(), |e| format!("{:.*}", output.digits, e))
            ))?;
            sink.line(&format!("enumerated,{}", result.enumerated))?;
            sink.line(&format!("defined,{}", result.defined))?;
        }
        Format::Json => sink.json(&serde_json::json!({
            "expectation": result.expectation,
            "enumerated": result.enumerated,
            "defined": result.defined,
        }))?,
    }
    sink.finish()
}
