//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification reports a failure, 2 on
//! usage, configuration or runtime errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::{self, BoundReport, HypMode, Verdict, WalkSpec};
use crate::config::{RunConfig, CONFIG_ENV};
use crate::engine::{self, Sense};
use crate::error::{Error, Result};
use crate::model::{DeckSpec, FeedbackModel};
use crate::montecarlo;
use crate::numeric::ratio;
use crate::report::{self, Provenance, ReportRow, Value};
use crate::strategies::StrategySpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_TRIALS: u64 = 10_000;
const DEFAULT_BOUND_TRIALS: u64 = 2_000;
const DEFAULT_MAX_TOTAL: usize = 8;
const DEFAULT_TABLE_STATE_LIMIT: usize = 200_000;
const WITNESS_PREVIEW: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "guessbench", version, about = "Exact and simulated card-guessing games")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact expected score of a deterministic strategy by enumeration.
    ExactValue(Flags),
    /// Optimal expected score for a feedback model and sense.
    Optimal(Flags),
    /// Monte Carlo estimate of a strategy's score.
    Simulate(Flags),
    /// Exhaustive check of the pointwise next-card bound.
    VerifyPointwise(Flags),
    /// Numeric checks of the concentration bounds.
    VerifyBounds(Flags),
    /// Survival function of the first j-th repeat time.
    Tj(Flags),
    /// States where an incorrect optimal guess stops being optimal.
    Persistence(Flags),
    /// The increasing-subsequence statistic L against the partial optimum.
    Lstat(Flags),
    /// Sweep over m and n comparing the optimal values of the three models.
    Table(Flags),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ExactValue(_) => "exact-value",
            Command::Optimal(_) => "optimal",
            Command::Simulate(_) => "simulate",
            Command::VerifyPointwise(_) => "verify-pointwise",
            Command::VerifyBounds(_) => "verify-bounds",
            Command::Tj(_) => "tj",
            Command::Persistence(_) => "persistence",
            Command::Lstat(_) => "lstat",
            Command::Table(_) => "table",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::ExactValue(f)
            | Command::Optimal(f)
            | Command::Simulate(f)
            | Command::VerifyPointwise(f)
            | Command::VerifyBounds(f)
            | Command::Tj(f)
            | Command::Persistence(f)
            | Command::Lstat(f)
            | Command::Table(f) => f,
        }
    }
}

#[derive(clap::Args, Debug, Default)]
struct Flags {
    /// Copies of each card type.
    #[arg(short = 'm', long = "m")]
    m: Option<String>,
    /// Number of card types.
    #[arg(short = 'n', long = "n")]
    n: Option<String>,
    /// none | partial | complete
    #[arg(long)]
    model: Option<String>,
    /// Strategy as id or id:key=value,...
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// max | min
    #[arg(long)]
    sense: Option<String>,
    #[arg(long = "max-total")]
    max_total: Option<String>,
    /// Repeat order for `tj`.
    #[arg(long)]
    j: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long = "enumeration-limit")]
    enumeration_limit: Option<String>,
    #[arg(long = "state-limit")]
    state_limit: Option<String>,
    /// key=value config file; defaults to the GUESSBENCH_CONFIG variable.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let pairs = [
            ("m", &self.m),
            ("n", &self.n),
            ("model", &self.model),
            ("strategy", &self.strategy),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("epsilon", &self.epsilon),
            ("sense", &self.sense),
            ("max-total", &self.max_total),
            ("j", &self.j),
            ("format", &self.format),
            ("out", &self.out),
            ("enumeration-limit", &self.enumeration_limit),
            ("state-limit", &self.state_limit),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Rows produced by a run plus whether every verification passed.
#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

/// Parses arguments, runs the command, writes the report and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match resolve(&cli).and_then(|cfg| execute(&cfg).map(|o| (cfg, o))) {
        Ok((cfg, outcome)) => {
            let format = cfg.format.unwrap_or_default();
            if let Err(e) = report::emit_table(&outcome.rows, format, cfg.out.as_deref()) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            if outcome.pass {
                EXIT_OK
            } else {
                eprintln!("verification failed");
                EXIT_VERIFY_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::LimitExceeded { .. } = e {
                eprintln!("hint: choose a smaller deck or raise --enumeration-limit / --state-limit");
            }
            EXIT_USAGE
        }
    }
}

/// Layers defaults, the config file (flag or environment) and flags.
fn resolve(cli: &Cli) -> Result<RunConfig> {
    let flags = cli.command.flags();
    let path = flags.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let file = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &file.command {
        if c != name {
            return Err(Error::Config(format!("config is for command {c:?}, not {name:?}")));
        }
    }
    let mut cfg = file.merge(flags.to_config()?);
    cfg.command = Some(name.to_string());
    Ok(cfg)
}

fn workers(cfg: &RunConfig) -> usize {
    cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn enum_limit(cfg: &RunConfig) -> u64 {
    cfg.enumeration_limit.unwrap_or(engine::DEFAULT_ENUMERATION_LIMIT)
}

fn state_limit(cfg: &RunConfig) -> usize {
    cfg.state_limit.unwrap_or(engine::DEFAULT_STATE_LIMIT)
}

fn strategy_or(cfg: &RunConfig, default: StrategySpec) -> Result<StrategySpec> {
    Ok(cfg.strategy_spec()?.unwrap_or(default))
}

fn deck_row(name: &str, prov: &Provenance, spec: &DeckSpec) -> ReportRow {
    ReportRow::new(name, prov).input("m", spec.multiplicity()).input("n", spec.num_types())
}

/// Runs a resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let prov = Provenance::now();
    let command = cfg.command.as_deref().ok_or_else(|| Error::Config("no command given".into()))?;
    let ok = |rows| Ok(Outcome { rows, pass: true });
    match command {
        "exact-value" => {
            let spec = cfg.deck()?;
            let strategy = strategy_or(cfg, StrategySpec::CompleteGreedyMax)?;
            let model = cfg.model.unwrap_or(strategy.required_model());
            let value = engine::exact_value(&spec, &strategy, model, enum_limit(cfg))?;
            ok(vec![deck_row(command, &prov, &spec)
                .input("model", model)
                .input("strategy", &strategy)
                .output("value", value)
                .output("shuffles", engine::check_enumerable(&spec, enum_limit(cfg))?)])
        }
        "optimal" => {
            let spec = cfg.deck()?;
            let model = cfg.model.unwrap_or(FeedbackModel::Complete);
            let sense = cfg.sense.unwrap_or(Sense::Max);
            let value = optimal_value(&spec, model, sense, state_limit(cfg))?;
            ok(vec![deck_row(command, &prov, &spec).input("model", model).input("sense", sense).output("value", value)])
        }
        "simulate" => {
            let spec = cfg.deck()?;
            let strategy = strategy_or(cfg, StrategySpec::CompleteGreedyMax)?;
            let model = cfg.model.unwrap_or(strategy.required_model());
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = cfg.seed.unwrap_or(0);
            let s = montecarlo::estimate_value(&spec, model, &strategy, trials, seed, workers(cfg))?;
            ok(vec![deck_row(command, &prov, &spec)
                .input("model", model)
                .input("strategy", &strategy)
                .input("trials", trials)
                .input("seed", seed)
                .output("mean", s.mean())
                .output("sd", s.sd())
                .output("se", s.se())
                .output("min", s.min())
                .output("max", s.max())
                .output("exact_mean", s.exact_mean())])
        }
        "verify-pointwise" => {
            let max_total = cfg.max_total.unwrap_or(DEFAULT_MAX_TOTAL);
            let r = engine::verify_pointwise(max_total)?;
            let preview: Vec<String> = r
                .witnesses
                .iter()
                .take(WITNESS_PREVIEW)
                .map(|w| format!("m={};a={};i={}", dotted(&w.m), dotted(&w.a), w.card))
                .collect();
            let row = ReportRow::new(command, &prov)
                .input("max_total", max_total)
                .output("verdict", r.pass)
                .output("max_ratio", Value::Exact(crate::numeric::parse_ratio(&r.max_ratio)?))
                .output("states", r.states)
                .output("empty_states", r.empty_states)
                .output("pairs", r.pairs)
                .output("count_mismatches", r.count_mismatches.len())
                .output("witness_count", r.witnesses.len())
                .output("witnesses", preview.join(" "));
            Ok(Outcome { rows: vec![row], pass: r.pass })
        }
        "verify-bounds" => {
            let reports = bound_battery(cfg)?;
            let pass = reports.iter().all(|r| r.verdict != Verdict::Fail);
            let rows = reports.iter().map(|r| bound_row(command, &prov, r)).collect();
            Ok(Outcome { rows, pass })
        }
        "tj" => {
            let spec = cfg.deck()?;
            let j = cfg.j.unwrap_or(2);
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = cfg.seed.unwrap_or(0);
            let sv = montecarlo::estimate_tj(&spec, j, trials, seed, workers(cfg))?;
            let top = sv.summary.max().unwrap_or(0) as usize;
            let rows = (1..=top)
                .map(|t| {
                    let exact = (j == 2).then(|| montecarlo::exact_t2_survival(&spec, t));
                    deck_row(command, &prov, &spec)
                        .input("j", j)
                        .input("trials", trials)
                        .input("seed", seed)
                        .input("t", t)
                        .output("survival", sv.survival(t))
                        .output("se", sv.survival_se(t))
                        .output("exact", exact)
                })
                .collect();
            ok(rows)
        }
        "persistence" => {
            let spec = cfg.deck()?;
            let v = engine::probe_persistence(&spec, state_limit(cfg))?;
            let preview: Vec<String> = v
                .iter()
                .take(WITNESS_PREVIEW)
                .map(|x| {
                    format!(
                        "m={};a={};guess={};then={}",
                        dotted(&x.before_m),
                        dotted(&x.before_a),
                        x.guess,
                        dotted(&x.successor_optimal)
                    )
                })
                .collect();
            ok(vec![deck_row(command, &prov, &spec)
                .output("violations", v.len())
                .output("examples", preview.join(" "))])
        }
        "lstat" => {
            let spec = cfg.deck()?;
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = cfg.seed.unwrap_or(0);
            let exact_l = optional(engine::exact_l(&spec, enum_limit(cfg)))?;
            let p_plus = optional(engine::optimal_partial(&spec, Sense::Max, state_limit(cfg)))?;
            let mc = montecarlo::estimate_l(&spec, trials, seed, workers(cfg))?;
            let pass = match (&exact_l, &p_plus) {
                (Some(l), Some(p)) => l <= p,
                _ => true,
            };
            let row = deck_row(command, &prov, &spec)
                .input("trials", trials)
                .input("seed", seed)
                .output("exact_l", exact_l)
                .output("p_plus", p_plus)
                .output("mc_mean", mc.mean())
                .output("mc_se", mc.se())
                .output("l_le_p_plus", pass);
            Ok(Outcome { rows: vec![row], pass })
        }
        "table" => {
            let (mmax, nmax) = (cfg.m.unwrap_or(3), cfg.n.unwrap_or(4));
            let limit = cfg.state_limit.unwrap_or(DEFAULT_TABLE_STATE_LIMIT);
            let mut rows = Vec::new();
            for m in 1..=mmax {
                for n in 1..=nmax {
                    let spec = DeckSpec::new(m, n)?;
                    let mut row = deck_row(command, &prov, &spec);
                    for (label, model) in [("n", FeedbackModel::None), ("p", FeedbackModel::Partial), ("c", FeedbackModel::Complete)] {
                        for sense in [Sense::Max, Sense::Min] {
                            let v = optional(optimal_value(&spec, model, sense, limit))?;
                            let sign = if sense == Sense::Max { "plus" } else { "minus" };
                            row = row.output(&format!("{label}_{sign}"), v);
                        }
                    }
                    let (mf, lg) = (m as f64, (m as f64).ln());
                    row = row
                        .output("err_m34_log14", mf.powf(0.75) * lg.powf(0.25))
                        .output("err_m34_log", mf.powf(0.75) * lg);
                    rows.push(row);
                }
            }
            ok(rows)
        }
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

/// Optimal value in any model; without feedback every strategy scores `m`
/// in expectation.
fn optimal_value(spec: &DeckSpec, model: FeedbackModel, sense: Sense, limit: usize) -> Result<BigRational> {
    match model {
        FeedbackModel::None => Ok(BigRational::from_integer(BigInt::from(spec.multiplicity()))),
        FeedbackModel::Partial => engine::optimal_partial(spec, sense, limit),
        FeedbackModel::Complete => engine::optimal_complete_with_limit(spec, sense, limit),
    }
}

/// Maps size-limit errors to `None`.
fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::LimitExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn dotted(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

fn bound_row(command: &str, prov: &Provenance, r: &BoundReport) -> ReportRow {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    ReportRow::new(command, prov)
        .input("bound", &r.bound)
        .input("params", params.join(";"))
        .output("rhs", r.rhs)
        .output("lhs", r.lhs)
        .output("lhs_exact", r.lhs_exact.clone())
        .output("radius", r.radius)
        .output("trials", r.trials)
        .output("verdict", r.verdict.to_string())
        .output("notes", r.notes.join("; "))
}

/// The fixed verification battery. The simulated parts use `trials` and
/// `seed` from the config; the regime report uses the configured deck
/// (default `m=4, n=16`) and strategy (default `partial-mle`).
fn bound_battery(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let trials = cfg.trials.unwrap_or(DEFAULT_BOUND_TRIALS);
    let seed = cfg.seed.unwrap_or(0);
    let w = workers(cfg);
    let mut out = Vec::new();
    for (n, p, l) in [(20, ratio(1, 2), ratio(1, 2)), (60, ratio(1, 10), ratio(1, 1)), (100, ratio(1, 3), ratio(1, 4))] {
        out.push(bounds::chernoff_report(n, &p, &l)?);
    }
    out.push(bounds::empirical_maximal(WalkSpec::new(0.5, 256)?, 1.0, 16, 256, trials, seed, w)?);
    out.push(bounds::empirical_maximal(WalkSpec::new(0.2, 4096)?, 1.0, 64, 4096, trials, seed, w)?);
    for lambda in [0.25, 0.5, 1.0, 2.0] {
        out.push(hyp_grid_report(60, lambda)?);
    }
    out.push(bounds::hyp_tail_report(600, 20, 0, 1.0, HypMode::Maximal { b0: 50, b1: 600, trials, seed })?);
    let mut dominated = 0usize;
    let mut checked = 0usize;
    for spec in engine::enumerable_specs(10_000).into_iter().filter(|s| s.num_types() >= 3) {
        for s in StrategySpec::zoo() {
            let (_, r) = bounds::first_third_domination(&spec, &s, 10_000)?;
            checked += 1;
            if r.verdict == Verdict::Fail {
                out.push(r);
            } else {
                dominated += 1;
            }
        }
    }
    let mut summary = BoundReport {
        bound: "first-third-domination-sweep".into(),
        params: [("specs".to_string(), "|S|<=10000, n>=3".to_string())].into(),
        rhs: None,
        lhs: dominated as f64,
        lhs_exact: None,
        radius: 0.0,
        trials: None,
        verdict: if dominated == checked { Verdict::Pass } else { Verdict::Fail },
        notes: vec![format!("{dominated} of {checked} (spec, strategy) pairs dominated")],
    };
    if checked == 0 {
        summary.verdict = Verdict::Inconclusive;
    }
    out.push(summary);
    let toy_ok = [(6, 2, 4), (8, 3, 4), (10, 2, 4)]
        .iter()
        .map(|&(n, m, k)| bounds::toy_adaptive_check(n, m, k))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flatten()
        .all(|(_, d)| d.holds);
    out.push(BoundReport {
        bound: "adaptive-hypergeometric-domination".into(),
        params: [("k".to_string(), "4".to_string())].into(),
        rhs: None,
        lhs: 0.0,
        lhs_exact: None,
        radius: 0.0,
        trials: None,
        verdict: if toy_ok { Verdict::Pass } else { Verdict::Fail },
        notes: vec!["capped adaptive processes vs Hyp(N, m, k)".into()],
    });
    let spec = match (cfg.m, cfg.n) {
        (Some(m), Some(n)) => DeckSpec::new(m, n)?,
        _ => DeckSpec::new(4, 16)?,
    };
    let strategy = strategy_or(cfg, StrategySpec::PartialMle)?;
    let eps = cfg.epsilon.unwrap_or(0.125);
    let (a, b) = bounds::regime_bound_report(&spec, &strategy, eps, trials, seed, w)?;
    out.extend([a, b]);
    Ok(out)
}

/// Worst case of the exact single hypergeometric tail over every
/// `N <= n_max`, `N >= m^2 + m` and `b <= N`.
pub fn hyp_grid_report(n_max: usize, lambda: f64) -> Result<BoundReport> {
    let mut cases = 0u64;
    let mut fails = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for n_total in 1..=n_max {
        for good in 0..=n_total {
            if n_total < good * good + good {
                break;
            }
            for b in 0..=n_total {
                let r = bounds::hyp_tail_report(n_total, good, b, lambda, HypMode::Single)?;
                cases += 1;
                worst = worst.max(r.lhs - r.rhs.unwrap_or(f64::INFINITY));
                if r.verdict == Verdict::Fail {
                    fails.push(format!("N={n_total},m={good},b={b}"));
                }
            }
        }
    }
    let mut notes = vec![format!("{cases} cases, worst lhs - rhs = {worst:.6e}")];
    if !fails.is_empty() {
        notes.push(format!("{} failures, e.g. {}", fails.len(), fails.iter().take(5).cloned().collect::<Vec<_>>().join(" ")));
    }
    Ok(BoundReport {
        bound: "hypergeometric-single-grid".into(),
        params: [("N_max".to_string(), n_max.to_string()), ("lambda".to_string(), lambda.to_string())].into(),
        rhs: None,
        lhs: fails.len() as f64,
        lhs_exact: None,
        radius: 0.0,
        trials: None,
        verdict: if fails.is_empty() { Verdict::Pass } else { Verdict::Fail },
        notes,
    })
}
