//! Reproducible Monte Carlo simulation.
//!
//! Trial `t` of a run with root seed `s` draws its deck from stream `t` of a
//! ChaCha8 generator keyed by `s`, and a seeded strategy draws from stream
//! `t` of its own seed. Results are therefore identical for any worker count:
//! workers only decide which trial indices they process, and integer
//! histograms merge by addition.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::play_prefix;
use crate::error::{Error, Result};
use crate::model::{observe, Card, DeckSpec, FeedbackModel, GameRecord, ShuffleWord};
use crate::strategies::StrategySpec;

/// Generator family recorded in reports.
pub const RNG_FAMILY: &str = "chacha8/rand_chacha-0.9/seed_from_u64+set_stream";

/// Confidence multiplier used for normal-approximation intervals.
pub const CI_MULTIPLIER: f64 = 4.0;

/// A (root seed, stream index) pair naming one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform in-place shuffle by sequential swaps (Fisher-Yates).
pub fn shuffle_in_place<R: Rng + ?Sized>(word: &mut [Card], rng: &mut R) {
    for i in (1..word.len()).rev() {
        let j = rng.random_range(0..=i);
        word.swap(i, j);
    }
}

/// Uniform draw from `S_{m,n}`.
pub fn sample_shuffle(spec: &DeckSpec, stream: RngStream) -> ShuffleWord {
    let mut word = spec.canonical_word();
    shuffle_in_place(&mut word, &mut stream.rng());
    ShuffleWord::new_unchecked(word)
}

/// Plays one full game and records the transcript. Seeded strategies use
/// stream `stream` of their own seed.
pub fn play_game(
    spec: &DeckSpec,
    model: FeedbackModel,
    strategy: &StrategySpec,
    shuffle: &ShuffleWord,
    stream: u64,
) -> Result<GameRecord> {
    if !crate::model::validate_shuffle(shuffle.symbols(), spec) {
        return Err(Error::InvalidDeck(format!("shuffle is not a word of {spec}")));
    }
    let strategy = strategy.prepared(spec)?;
    let mut state = strategy.start(spec, model)?;
    state.reset(stream, &strategy);
    let total = spec.total();
    let (mut guesses, mut feedback, mut correct) =
        (Vec::with_capacity(total), Vec::with_capacity(total), Vec::with_capacity(total));
    for &card in shuffle.symbols() {
        let g = strategy.next_guess(&mut state);
        let obs = observe(model, g, card);
        strategy.update(&mut state, obs)?;
        guesses.push(g);
        feedback.push(obs);
        correct.push(g == card);
    }
    let score = correct.iter().filter(|&&c| c).count();
    Ok(GameRecord {
        spec: *spec,
        model,
        strategy: strategy.to_string(),
        seed: strategy.seed().unwrap_or(0),
        shuffle: shuffle.clone(),
        guesses,
        feedback,
        correct,
        score,
    })
}

/// Guess counts by regime: a guess of `i` at time `t` is subcritical if
/// `a_i(H_{t-1}) < eps*mn`, critical if `eps*mn <= a_i < (1-eps)*mn`, and
/// supercritical otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeCounts {
    pub epsilon: f64,
    pub b0: usize,
    pub y0: usize,
    /// `(type, b_i, Y_i)` for each type with at least one critical guess.
    pub critical: Vec<(Card, usize, usize)>,
    pub b_inf: usize,
    pub y_inf: usize,
}

impl RegimeCounts {
    pub fn critical_guesses(&self) -> usize {
        self.critical.iter().map(|c| c.1).sum()
    }

    pub fn critical_correct(&self) -> usize {
        self.critical.iter().map(|c| c.2).sum()
    }
}

pub fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    Ok(())
}

pub fn classify_guesses(record: &GameRecord, epsilon: f64) -> Result<RegimeCounts> {
    check_epsilon(epsilon)?;
    let mn = record.spec.total() as f64;
    let (lo, hi) = (epsilon * mn, (1.0 - epsilon) * mn);
    let mut out = RegimeCounts { epsilon, b0: 0, y0: 0, critical: Vec::new(), b_inf: 0, y_inf: 0 };
    for ((&g, &before), &hit) in record.guesses.iter().zip(record.prior_guess_counts().iter()).zip(&record.correct) {
        let a = before as f64;
        let hit = hit as usize;
        if a < lo {
            out.b0 += 1;
            out.y0 += hit;
        } else if a < hi {
            match out.critical.iter_mut().find(|c| c.0 == g) {
                Some(c) => {
                    c.1 += 1;
                    c.2 += hit;
                }
                None => out.critical.push((g, 1, hit)),
            }
        } else {
            out.b_inf += 1;
            out.y_inf += hit;
        }
    }
    Ok(out)
}

/// `min(1/8, m^{-1/4} (log m)^{1/4})`; `1/8` when `m = 1`, where the formula
/// degenerates to zero.
pub fn default_epsilon(multiplicity: usize) -> f64 {
    let m = multiplicity as f64;
    let e = m.powf(-0.25) * m.ln().max(0.0).powf(0.25);
    if e > 0.0 {
        e.min(0.125)
    } else {
        0.125
    }
}

/// Merged integer histogram of a per-trial statistic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatSummary {
    pub trials: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl StatSummary {
    pub fn record(&mut self, value: u64) {
        self.trials += 1;
        *self.histogram.entry(value).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &StatSummary) {
        self.trials += other.trials;
        for (&k, &v) in &other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
    }

    /// Exact sample mean.
    pub fn exact_mean(&self) -> BigRational {
        let sum: u128 = self.histogram.iter().map(|(&k, &v)| k as u128 * v as u128).sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.trials.max(1)))
    }

    pub fn mean(&self) -> f64 {
        crate::numeric::to_f64(&self.exact_mean())
    }

    /// Unbiased sample variance, zero for fewer than two trials.
    pub fn variance(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let t = self.trials as u128;
        let s1: u128 = self.histogram.iter().map(|(&k, &v)| k as u128 * v as u128).sum();
        let s2: u128 = self.histogram.iter().map(|(&k, &v)| k as u128 * k as u128 * v as u128).sum();
        // (t*s2 - s1^2) / (t (t-1)), exact in integers before the division.
        let num = BigInt::from(t) * BigInt::from(s2) - BigInt::from(s1) * BigInt::from(s1);
        let den = BigInt::from(t) * BigInt::from(t - 1);
        crate::numeric::to_f64(&BigRational::new(num, den))
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn se(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.sd() / (self.trials as f64).sqrt()
    }

    pub fn min(&self) -> Option<u64> {
        self.histogram.keys().next().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.histogram.keys().next_back().copied()
    }

    /// Fraction of trials with value strictly above `threshold`.
    pub fn frequency_above(&self, threshold: f64) -> f64 {
        let hits: u64 = self.histogram.iter().filter(|(&k, _)| k as f64 > threshold).map(|(_, &v)| v).sum();
        hits as f64 / self.trials.max(1) as f64
    }
}

/// Splits `0..trials` into `workers` contiguous ranges, processes them
/// (concurrently with the `parallel` feature) and returns per-range results
/// in range order.
pub fn run_partitioned<T, F>(trials: u64, workers: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> Result<T> + Sync + Send,
{
    let workers = workers.max(1) as u64;
    let chunk = trials.div_ceil(workers).max(1);
    let ranges: Vec<Range<u64>> =
        (0..workers).map(|w| (w * chunk).min(trials)..((w + 1) * chunk).min(trials)).filter(|r| !r.is_empty()).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        pool.install(|| ranges.into_par_iter().map(&work).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(work).collect()
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

/// Score histogram over `trials` independent uniform shuffles.
pub fn estimate_value(
    spec: &DeckSpec,
    model: FeedbackModel,
    strategy: &StrategySpec,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<StatSummary> {
    check_trials(trials)?;
    let strategy = strategy.prepared(spec)?;
    strategy.start(spec, model)?;
    let parts = run_partitioned(trials, workers, |range| {
        let mut state = strategy.start(spec, model)?;
        let mut word = spec.canonical_word();
        let mut summary = StatSummary::default();
        for t in range {
            word.sort_unstable();
            shuffle_in_place(&mut word, &mut RngStream::new(seed, t).rng());
            state.reset(t, &strategy);
            summary.record(play_prefix(&strategy, &mut state, &word, model, word.len())? as u64);
        }
        Ok(summary)
    })?;
    Ok(merge_all(parts))
}

fn merge_all(parts: Vec<StatSummary>) -> StatSummary {
    parts.into_iter().fold(StatSummary::default(), |mut acc, p| {
        acc.merge(&p);
        acc
    })
}

/// Empirical `Pr[P(G, pi) > lambda * mn]`.
pub fn estimate_tail(
    spec: &DeckSpec,
    model: FeedbackModel,
    strategy: &StrategySpec,
    lambda: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    let summary = estimate_value(spec, model, strategy, trials, seed, workers)?;
    Ok(summary.frequency_above(lambda * spec.total() as f64))
}

/// First time some type reaches its `j`-th occurrence.
pub fn first_jth_occurrence(word: &[Card], num_types: usize, j: usize) -> Option<usize> {
    let mut counts = vec![0usize; num_types];
    for (t, &c) in word.iter().enumerate() {
        counts[c - 1] += 1;
        if counts[c - 1] == j {
            return Some(t + 1);
        }
    }
    None
}

/// Empirical distribution of `T_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TjSurvival {
    pub j: usize,
    pub summary: StatSummary,
}

impl TjSurvival {
    /// Empirical `Pr[T_j > t]`.
    pub fn survival(&self, t: usize) -> f64 {
        self.summary.frequency_above(t as f64)
    }

    /// Binomial standard error of [`TjSurvival::survival`].
    pub fn survival_se(&self, t: usize) -> f64 {
        let p = self.survival(t);
        (p * (1.0 - p) / self.summary.trials as f64).sqrt()
    }
}

pub fn estimate_tj(spec: &DeckSpec, j: usize, trials: u64, seed: u64, workers: usize) -> Result<TjSurvival> {
    check_trials(trials)?;
    if j == 0 || j > spec.multiplicity() {
        return Err(Error::InvalidParameter(format!("need 1 <= j <= m, got j={j}, m={}", spec.multiplicity())));
    }
    let parts = run_partitioned(trials, workers, |range| {
        let mut word = spec.canonical_word();
        let mut summary = StatSummary::default();
        for t in range {
            word.sort_unstable();
            shuffle_in_place(&mut word, &mut RngStream::new(seed, t).rng());
            let tj = first_jth_occurrence(&word, spec.num_types(), j).expect("every type occurs m >= j times");
            summary.record(tj as u64);
        }
        Ok(summary)
    })?;
    Ok(TjSurvival { j, summary: merge_all(parts) })
}

/// `Pr[T_2 > t] = prod_{k=1}^{t-1} m(n-k)/(mn-k)`: the first `t` cards are
/// pairwise distinct.
pub fn exact_t2_survival(spec: &DeckSpec, t: usize) -> BigRational {
    let (m, n) = (spec.multiplicity() as i64, spec.num_types() as i64);
    let mut acc = BigRational::from_integer(1.into());
    for k in 1..t as i64 {
        if k >= n {
            return BigRational::from_integer(0.into());
        }
        acc *= BigRational::new((m * (n - k)).into(), (m * n - k).into());
    }
    acc
}

/// Histogram of `L(pi)` over uniform shuffles.
pub fn estimate_l(spec: &DeckSpec, trials: u64, seed: u64, workers: usize) -> Result<StatSummary> {
    check_trials(trials)?;
    let parts = run_partitioned(trials, workers, |range| {
        let mut word = spec.canonical_word();
        let mut summary = StatSummary::default();
        for t in range {
            word.sort_unstable();
            shuffle_in_place(&mut word, &mut RngStream::new(seed, t).rng());
            summary.record(crate::engine::l_statistic(&word) as u64);
        }
        Ok(summary)
    })?;
    Ok(merge_all(parts))
}

/// Plays `trials` recorded games and folds each record into a per-range
/// accumulator.
#[allow(clippy::too_many_arguments)]
pub fn fold_games<T, F>(
    spec: &DeckSpec,
    model: FeedbackModel,
    strategy: &StrategySpec,
    trials: u64,
    seed: u64,
    workers: usize,
    init: impl Fn() -> T + Sync + Send,
    fold: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut T, &GameRecord) -> Result<()> + Sync + Send,
{
    check_trials(trials)?;
    let strategy = strategy.prepared(spec)?;
    strategy.start(spec, model)?;
    run_partitioned(trials, workers, |range| {
        let mut acc = init();
        for t in range {
            let shuffle = sample_shuffle(spec, RngStream::new(seed, t));
            let rec = play_game(spec, model, &strategy, &shuffle, t)?;
            fold(&mut acc, &rec)?;
        }
        Ok(acc)
    })
}
