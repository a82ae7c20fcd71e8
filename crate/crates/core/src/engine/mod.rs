//! Exact expected scores, optimal game values and small-case probes.
//!
//! Everything here is exact rational arithmetic. Full enumeration visits
//! every word of `S_{m,n}` with equal weight; the dynamic programs work over
//! canonical (type-relabeling invariant) sufficient statistics.

mod complete;
mod partial;
mod pointwise;
mod table;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{multinomial_size, Pmf};
use crate::error::{limit_exceeded, Error, Result};
use crate::model::{observe, Card, DeckSpec, FeedbackModel};
use crate::strategies::{StrategySpec, StrategyState};

pub use complete::{complete_value_table, optimal_complete, optimal_complete_with_limit};
pub use partial::{
    optimal_partial, optimal_partial_policy, probe_persistence, PartialSolver, PersistenceViolation, PolicyTable,
};
pub use pointwise::{verify_pointwise, PointwiseReport, PointwiseWitness, POINTWISE_MAX_TYPES, POINTWISE_TOTAL_LIMIT};
pub use table::{ValueRow, ValueTable};

/// Default cap on `|S_{m,n}|` for full enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;

/// Default cap on the number of canonical states a dynamic program may store.
pub const DEFAULT_STATE_LIMIT: usize = 2_000_000;

/// Whether a game value maximizes or minimizes expected correct guesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

impl Sense {
    pub fn better(&self, a: &BigRational, b: &BigRational) -> bool {
        match self {
            Sense::Max => a > b,
            Sense::Min => a < b,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Max => "max",
            Sense::Min => "min",
        })
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "+" => Ok(Sense::Max),
            "min" | "-" => Ok(Sense::Min),
            other => Err(Error::InvalidParameter(format!("unknown sense {other:?}"))),
        }
    }
}

/// All words of `S_{m,n}` in lexicographic order.
pub struct Shuffles {
    word: Vec<Card>,
    started: bool,
    done: bool,
}

impl Shuffles {
    pub fn new(spec: &DeckSpec) -> Self {
        Self { word: spec.canonical_word(), started: false, done: false }
    }
}

impl Iterator for Shuffles {
    type Item = Vec<Card>;

    fn next(&mut self) -> Option<Vec<Card>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.word.clone());
        }
        // Standard next-permutation step; handles repeated letters.
        let w = &mut self.word;
        let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1]) else {
            self.done = true;
            return None;
        };
        let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).expect("pivot has a successor");
        w.swap(i, j);
        w[i + 1..].reverse();
        Some(w.clone())
    }
}

/// Errors unless `|S_{m,n}| <= limit`; returns the size.
pub fn check_enumerable(spec: &DeckSpec, limit: u64) -> Result<u64> {
    let size = multinomial_size(spec);
    match size.to_u64() {
        Some(s) if s <= limit => Ok(s),
        _ => Err(limit_exceeded("|S_{m,n}|", size, limit)),
    }
}

/// Caps `m` when `n = 1`, where every `S_{m,1}` has a single word.
pub const SINGLE_TYPE_MAX_M: usize = 8;

/// Every deck with `|S_{m,n}| <= limit`, ordered by `(m, n)`. For `n = 1`
/// only `m <= SINGLE_TYPE_MAX_M` is listed.
pub fn enumerable_specs(limit: u64) -> Vec<DeckSpec> {
    let mut out = Vec::new();
    for m in 1.. {
        let first = out.len();
        for n in 1.. {
            if n == 1 && m > SINGLE_TYPE_MAX_M {
                continue;
            }
            let spec = DeckSpec::new(m, n).expect("positive sizes");
            if check_enumerable(&spec, limit).is_err() {
                break;
            }
            out.push(spec);
        }
        // Sizes grow in m at n = 2, so the first m with nothing at n >= 2 ends the scan.
        if out[first..].iter().all(|s| s.num_types() == 1) {
            break;
        }
    }
    out
}

/// Plays the first `steps` cards of `deck`; returns the number of correct
/// guesses. The state must be freshly reset.
pub(crate) fn play_prefix(
    strategy: &StrategySpec,
    state: &mut StrategyState,
    deck: &[Card],
    model: FeedbackModel,
    steps: usize,
) -> Result<usize> {
    let mut score = 0;
    for &card in &deck[..steps] {
        let guess = strategy.next_guess(state);
        if guess == card {
            score += 1;
        }
        strategy.update(state, observe(model, guess, card))?;
    }
    Ok(score)
}

fn require_deterministic(strategy: &StrategySpec) -> Result<()> {
    if strategy.is_randomized() {
        return Err(Error::UnsupportedStrategy {
            strategy: strategy.to_string(),
            reason: "randomized strategies are evaluated by Monte Carlo".into(),
        });
    }
    Ok(())
}

/// Exact `E[P(G, pi)]` for a deterministic strategy, averaging over all of
/// `S_{m,n}`.
pub fn exact_value(
    spec: &DeckSpec,
    strategy: &StrategySpec,
    model: FeedbackModel,
    limit: u64,
) -> Result<BigRational> {
    require_deterministic(strategy)?;
    let size = check_enumerable(spec, limit)?;
    let strategy = strategy.prepared(spec)?;
    let mut state = strategy.start(spec, model)?;
    let mut total: u64 = 0;
    for deck in Shuffles::new(spec) {
        state.reset(0, &strategy);
        total += play_prefix(&strategy, &mut state, &deck, model, spec.total())? as u64;
    }
    Ok(BigRational::new(BigInt::from(total), BigInt::from(size)))
}

/// Score of a deterministic strategy on each shuffle, in enumeration order.
pub fn scores_by_shuffle(
    spec: &DeckSpec,
    strategy: &StrategySpec,
    model: FeedbackModel,
    limit: u64,
) -> Result<Vec<(Vec<Card>, usize)>> {
    require_deterministic(strategy)?;
    check_enumerable(spec, limit)?;
    let strategy = strategy.prepared(spec)?;
    let mut state = strategy.start(spec, model)?;
    Shuffles::new(spec)
        .map(|deck| {
            state.reset(0, &strategy);
            let s = play_prefix(&strategy, &mut state, &deck, model, spec.total())?;
            Ok((deck, s))
        })
        .collect()
}

/// Largest `p` such that `1, 2, ..., p` occur in `word` at increasing
/// positions.
pub fn l_statistic(word: &[Card]) -> usize {
    let mut want = 1;
    for &c in word {
        if c == want {
            want += 1;
        }
    }
    want - 1
}

/// Exact `E[L(pi)]` over `S_{m,n}`.
pub fn exact_l(spec: &DeckSpec, limit: u64) -> Result<BigRational> {
    let size = check_enumerable(spec, limit)?;
    let total: u64 = Shuffles::new(spec).map(|w| l_statistic(&w) as u64).sum();
    Ok(BigRational::new(BigInt::from(total), BigInt::from(size)))
}

/// Number of guesses in the first third of the game, `floor(mn/3)`.
pub fn first_third_len(spec: &DeckSpec) -> usize {
    spec.total() / 3
}

/// Cap on guess scripts times shuffles when integrating out the guesses of a
/// randomized strategy.
const SCRIPT_WORK_LIMIT: u64 = 100_000_000;

/// Exact pmf of the number of correct guesses among the first
/// `floor(mn/3)` trials.
///
/// The uniform random strategy ignores feedback, so its guesses are
/// integrated out exactly by averaging over every guess script.
pub fn first_third_distribution(
    spec: &DeckSpec,
    strategy: &StrategySpec,
    model: FeedbackModel,
    limit: u64,
) -> Result<Pmf> {
    let size = check_enumerable(spec, limit)?;
    let k = first_third_len(spec);
    let mut hist = vec![BigUint::zero(); k + 1];
    if let StrategySpec::PartialUniform { .. } = strategy {
        let n = spec.num_types();
        let scripts = (n as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        if scripts.saturating_mul(size) > SCRIPT_WORK_LIMIT {
            return Err(limit_exceeded("guess scripts x shuffles", scripts.saturating_mul(size), SCRIPT_WORK_LIMIT));
        }
        let mut counts = vec![0u64; k + 1];
        let mut script = vec![1usize; k];
        for deck in Shuffles::new(spec) {
            script.iter_mut().for_each(|g| *g = 1);
            loop {
                let s = script.iter().zip(&deck).filter(|(g, c)| g == c).count();
                counts[s] += 1;
                // Odometer over [n]^k.
                let Some(pos) = script.iter().rposition(|&g| g < n) else { break };
                script[pos] += 1;
                script[pos + 1..].iter_mut().for_each(|g| *g = 1);
            }
        }
        for (h, c) in hist.iter_mut().zip(counts) {
            *h = BigUint::from(c);
        }
        return Pmf::from_counts(&hist);
    }
    require_deterministic(strategy)?;
    let strategy = strategy.prepared(spec)?;
    let mut state = strategy.start(spec, model)?;
    let mut counts = vec![0u64; k + 1];
    for deck in Shuffles::new(spec) {
        state.reset(0, &strategy);
        counts[play_prefix(&strategy, &mut state, &deck, model, k)?] += 1;
    }
    for (h, c) in hist.iter_mut().zip(counts) {
        *h = BigUint::from(c);
    }
    Pmf::from_counts(&hist)
}
