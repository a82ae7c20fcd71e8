//! Guessing strategies for each feedback model.
//!
//! A [`StrategySpec`] is an immutable description; a [`StrategyState`] holds
//! the per-game memory. Strategies see only observations coarsened to their
//! own feedback level, so a partial-feedback strategy run in a
//! complete-feedback game still learns only right/wrong.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::distribution_unchecked;
use crate::engine::{PolicyTable, Sense};
use crate::error::{Error, Result};
use crate::model::{validate_shuffle, Card, DeckSpec, FeedbackModel, Observation};

/// Switch rule of the two-phase strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// `m/2 + sqrt(m)`.
    Auto,
    Value(f64),
}

#[derive(Clone, Debug)]
pub enum StrategySpec {
    /// Guess a type with the most copies left; ties to the lowest index.
    CompleteGreedyMax,
    /// Guess a type with the fewest copies left (possibly none).
    CompleteGreedyMin,
    NofbConstant { card: Card },
    /// Guess `word[t]` at step `t`; defaults to `1 2 .. n` repeated `m` times.
    NofbCyclic { word: Option<Vec<Card>> },
    /// Maximum posterior probability guess.
    PartialMle,
    /// Minimum posterior probability guess.
    PartialMinMle,
    PartialUniform { seed: u64 },
    /// Guess `first` for `phase` trials (default `floor(mn/2)`); switch to
    /// `second` for the rest if at least `threshold` of them were correct.
    PartialTwoPhase { phase: Option<usize>, threshold: Threshold, first: Card, second: Card },
    /// Guess 1 until correct, then 2 until correct, ...; repeats `n` at the end.
    PartialLadder,
    /// Replays an optimal partial-feedback policy computed by the exact engine.
    PartialOptimal { sense: Sense, table: Option<Arc<PolicyTable>> },
}

impl PartialEq for StrategySpec {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl StrategySpec {
    /// Every deterministic or seeded strategy, with default parameters.
    pub fn zoo() -> Vec<StrategySpec> {
        vec![
            StrategySpec::CompleteGreedyMax,
            StrategySpec::CompleteGreedyMin,
            StrategySpec::NofbConstant { card: 1 },
            StrategySpec::NofbCyclic { word: None },
            StrategySpec::PartialMle,
            StrategySpec::PartialMinMle,
            StrategySpec::PartialUniform { seed: 0 },
            StrategySpec::two_phase(),
            StrategySpec::PartialLadder,
        ]
    }

    pub fn two_phase() -> Self {
        StrategySpec::PartialTwoPhase { phase: None, threshold: Threshold::Auto, first: 1, second: 2 }
    }

    pub fn id(&self) -> &'static str {
        match self {
            StrategySpec::CompleteGreedyMax => "complete-greedy-max",
            StrategySpec::CompleteGreedyMin => "complete-greedy-min",
            StrategySpec::NofbConstant { .. } => "nofb-constant",
            StrategySpec::NofbCyclic { .. } => "nofb-cyclic",
            StrategySpec::PartialMle => "partial-mle",
            StrategySpec::PartialMinMle => "partial-min-mle",
            StrategySpec::PartialUniform { .. } => "partial-uniform",
            StrategySpec::PartialTwoPhase { .. } => "partial-two-phase",
            StrategySpec::PartialLadder => "partial-ladder",
            StrategySpec::PartialOptimal { .. } => "partial-optimal",
        }
    }

    /// The least informative feedback model this strategy can be played under.
    pub fn required_model(&self) -> FeedbackModel {
        match self {
            StrategySpec::CompleteGreedyMax | StrategySpec::CompleteGreedyMin => FeedbackModel::Complete,
            StrategySpec::NofbConstant { .. } | StrategySpec::NofbCyclic { .. } => FeedbackModel::None,
            _ => FeedbackModel::Partial,
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, StrategySpec::PartialUniform { .. })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            StrategySpec::PartialUniform { seed } => Some(*seed),
            _ => None,
        }
    }

    /// Resolves parameters that depend on the deck (the optimal policy table).
    pub fn prepared(&self, deck: &DeckSpec) -> Result<StrategySpec> {
        match self {
            StrategySpec::PartialOptimal { sense, table } => {
                if let Some(t) = table {
                    if t.spec() == deck {
                        return Ok(self.clone());
                    }
                }
                let table = crate::engine::optimal_partial_policy(deck, *sense, crate::engine::DEFAULT_STATE_LIMIT)?;
                Ok(StrategySpec::PartialOptimal { sense: *sense, table: Some(Arc::new(table)) })
            }
            _ => Ok(self.clone()),
        }
    }

    fn validate(&self, deck: &DeckSpec) -> Result<()> {
        let bad = |reason: String| Error::UnsupportedStrategy { strategy: self.to_string(), reason };
        match self {
            StrategySpec::NofbConstant { card } => deck.check_card(*card),
            StrategySpec::NofbCyclic { word: Some(w) } => {
                if validate_shuffle(w, deck) {
                    Ok(())
                } else {
                    Err(bad(format!("word must contain each type exactly {} times", deck.multiplicity())))
                }
            }
            StrategySpec::PartialTwoPhase { phase, first, second, .. } => {
                deck.check_card(*first)?;
                deck.check_card(*second)?;
                match phase {
                    Some(p) if *p > deck.total() => Err(bad(format!("phase {p} exceeds {}", deck.total()))),
                    _ => Ok(()),
                }
            }
            StrategySpec::PartialOptimal { table: Some(t), .. } if t.spec() != deck => {
                Err(bad(format!("policy table built for {}", t.spec())))
            }
            _ => Ok(()),
        }
    }

    /// Fresh per-game state for a game on `deck` under `model`.
    pub fn start(&self, deck: &DeckSpec, model: FeedbackModel) -> Result<StrategyState> {
        if model < self.required_model() {
            return Err(Error::UnsupportedStrategy {
                strategy: self.to_string(),
                reason: format!("needs at least {} feedback, game has {model}", self.required_model()),
            });
        }
        self.validate(deck)?;
        let mut state = StrategyState {
            deck: *deck,
            level: self.required_model(),
            time: 0,
            left: vec![deck.multiplicity(); deck.num_types()],
            incorrect: vec![0; deck.num_types()],
            corrects: 0,
            last_guess: None,
            ladder: 1,
            switched: None,
            rng: None,
            cache: HashMap::new(),
        };
        state.reset(0, self);
        Ok(state)
    }

    /// Next guess; records it as pending until [`StrategySpec::update`].
    pub fn next_guess(&self, state: &mut StrategyState) -> Card {
        let n = state.deck.num_types();
        let guess = match self {
            StrategySpec::CompleteGreedyMax => argbest(&state.left, |a, b| a > b),
            StrategySpec::CompleteGreedyMin => argbest(&state.left, |a, b| a < b),
            StrategySpec::NofbConstant { card } => *card,
            StrategySpec::NofbCyclic { word } => match word {
                Some(w) => w[state.time % w.len()],
                None => state.time % n + 1,
            },
            StrategySpec::PartialMle => state.mle_guess(true),
            StrategySpec::PartialMinMle => state.mle_guess(false),
            StrategySpec::PartialUniform { .. } => {
                state.rng.as_mut().expect("uniform strategy carries an rng").random_range(1..=n)
            }
            StrategySpec::PartialTwoPhase { phase, threshold, first, second } => {
                let phase = phase.unwrap_or(state.deck.total() / 2);
                if state.time < phase {
                    *first
                } else {
                    let switch = *state.switched.get_or_insert_with(|| {
                        let m = state.deck.multiplicity() as f64;
                        let cut = match threshold {
                            Threshold::Auto => m / 2.0 + m.sqrt(),
                            Threshold::Value(v) => *v,
                        };
                        state.corrects as f64 >= cut
                    });
                    if switch {
                        *second
                    } else {
                        *first
                    }
                }
            }
            StrategySpec::PartialLadder => state.ladder,
            StrategySpec::PartialOptimal { table, .. } => {
                let table = table.as_ref().expect("PartialOptimal must be prepared before play");
                table.action(&state.left, &state.incorrect)
            }
        };
        state.last_guess = Some(guess);
        guess
    }

    /// Folds the observation for the pending guess into the state.
    pub fn update(&self, state: &mut StrategyState, obs: Observation) -> Result<()> {
        let guess = state
            .last_guess
            .take()
            .ok_or_else(|| Error::InvalidParameter("update without a pending guess".into()))?;
        let obs = obs.coarsen(guess, state.level)?;
        match obs {
            Observation::Nothing => {}
            Observation::Revealed(card) => {
                state.deck.check_card(card)?;
                if state.left[card - 1] == 0 {
                    return Err(Error::InconsistentHistory(format!("card {card} revealed too often")));
                }
                state.left[card - 1] -= 1;
                if card == guess {
                    state.corrects += 1;
                }
            }
            Observation::Correct(true) => {
                if state.left[guess - 1] == 0 {
                    return Err(Error::InconsistentHistory(format!("card {guess} found too often")));
                }
                state.left[guess - 1] -= 1;
                state.corrects += 1;
                if matches!(self, StrategySpec::PartialLadder) && guess == state.ladder {
                    state.ladder = (state.ladder + 1).min(state.deck.num_types());
                }
            }
            Observation::Correct(false) => state.incorrect[guess - 1] += 1,
        }
        state.time += 1;
        Ok(())
    }
}

fn argbest(values: &[usize], better: impl Fn(usize, usize) -> bool) -> Card {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = i;
        }
    }
    best + 1
}

type PairKey = Vec<(usize, usize)>;
type PairLaw = Vec<((usize, usize), BigRational)>;

/// Per-game strategy memory.
#[derive(Clone, Debug)]
pub struct StrategyState {
    deck: DeckSpec,
    level: FeedbackModel,
    time: usize,
    /// Complete feedback: copies still in the deck. Partial: copies not yet found.
    left: Vec<usize>,
    /// Incorrect guesses per type (partial feedback).
    incorrect: Vec<usize>,
    corrects: usize,
    last_guess: Option<Card>,
    ladder: Card,
    switched: Option<bool>,
    rng: Option<ChaCha8Rng>,
    /// Posterior next-card probabilities keyed by the sorted `(m_i, a_i)` pairs.
    cache: HashMap<PairKey, PairLaw>,
}

impl StrategyState {
    /// Starts a new game, keeping caches. Seeded strategies draw from stream
    /// `stream` of their own seed.
    pub fn reset(&mut self, stream: u64, spec: &StrategySpec) {
        self.time = 0;
        self.left.iter_mut().for_each(|x| *x = self.deck.multiplicity());
        self.incorrect.iter_mut().for_each(|x| *x = 0);
        self.corrects = 0;
        self.last_guess = None;
        self.ladder = 1;
        self.switched = None;
        self.rng = spec.seed().map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            rng
        });
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn corrects(&self) -> usize {
        self.corrects
    }

    /// Copies left per type, as tracked by the strategy.
    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn incorrect(&self) -> &[usize] {
        &self.incorrect
    }

    fn posterior(&mut self) -> &[((usize, usize), BigRational)] {
        let mut key: PairKey = self.left.iter().copied().zip(self.incorrect.iter().copied()).collect();
        key.sort_unstable();
        if !self.cache.contains_key(&key) {
            let (m, a): (Vec<usize>, Vec<usize>) = key.iter().copied().unzip();
            let dist = distribution_unchecked(&m, &a).expect("reachable partial-feedback state");
            let mut entries: Vec<((usize, usize), BigRational)> = Vec::new();
            for (pair, f) in key.iter().zip(dist) {
                if !entries.iter().any(|(p, _)| p == pair) {
                    entries.push((*pair, f));
                }
            }
            self.cache.insert(key.clone(), entries);
        }
        &self.cache[&key]
    }

    fn mle_guess(&mut self, maximize: bool) -> Card {
        let pairs: Vec<(usize, usize)> =
            self.left.iter().copied().zip(self.incorrect.iter().copied()).collect();
        let post = self.posterior().to_vec();
        let lookup = |pair: &(usize, usize)| -> BigRational {
            post.iter().find(|(p, _)| p == pair).map(|(_, f)| f.clone()).unwrap_or_else(BigRational::zero)
        };
        let mut best = 0;
        let mut best_f = lookup(&pairs[0]);
        for (i, pair) in pairs.iter().enumerate().skip(1) {
            let f = lookup(pair);
            if (maximize && f > best_f) || (!maximize && f < best_f) {
                best = i;
                best_f = f;
            }
        }
        best + 1
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())?;
        match self {
            StrategySpec::NofbConstant { card } => write!(f, ":card={card}"),
            StrategySpec::NofbCyclic { word: Some(w) } => {
                let w: Vec<String> = w.iter().map(|c| c.to_string()).collect();
                write!(f, ":word={}", w.join("."))
            }
            StrategySpec::PartialUniform { seed } => write!(f, ":seed={seed}"),
            StrategySpec::PartialTwoPhase { phase, threshold, first, second } => {
                let phase = phase.map_or("auto".to_string(), |p| p.to_string());
                let threshold = match threshold {
                    Threshold::Auto => "auto".to_string(),
                    Threshold::Value(v) => v.to_string(),
                };
                write!(f, ":phase={phase},threshold={threshold},first={first},second={second}")
            }
            StrategySpec::PartialOptimal { sense, .. } => write!(f, ":sense={sense}"),
            _ => Ok(()),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    /// Parses `id` or `id:key=value,key=value`.
    fn from_str(s: &str) -> Result<Self> {
        let (id, params) = match s.split_once(':') {
            Some((id, rest)) => (id.trim(), rest.trim()),
            None => (s.trim(), ""),
        };
        let mut kv: Vec<(String, String)> = Vec::new();
        for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("strategy parameter {part:?} is not key=value")))?;
            kv.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
        let mut take = |key: &str| -> Option<String> {
            let pos = kv.iter().position(|(k, _)| k == key)?;
            Some(kv.remove(pos).1)
        };
        let num = |key: &str, v: String| -> Result<usize> {
            v.parse().map_err(|_| Error::InvalidParameter(format!("{key}={v:?} is not an integer")))
        };
        let spec = match id.to_ascii_lowercase().replace('_', "-").as_str() {
            "complete-greedy-max" => StrategySpec::CompleteGreedyMax,
            "complete-greedy-min" => StrategySpec::CompleteGreedyMin,
            "nofb-constant" => {
                StrategySpec::NofbConstant { card: take("card").map(|v| num("card", v)).transpose()?.unwrap_or(1) }
            }
            "nofb-cyclic" => {
                let word = take("word")
                    .map(|w| w.split('.').map(|c| num("word", c.to_string())).collect::<Result<Vec<_>>>())
                    .transpose()?;
                StrategySpec::NofbCyclic { word }
            }
            "partial-mle" => StrategySpec::PartialMle,
            "partial-min-mle" => StrategySpec::PartialMinMle,
            "partial-uniform" => {
                let seed = take("seed")
                    .map(|v| v.parse::<u64>().map_err(|_| Error::InvalidParameter(format!("seed={v:?}"))))
                    .transpose()?
                    .unwrap_or(0);
                StrategySpec::PartialUniform { seed }
            }
            "partial-two-phase" => {
                let phase = match take("phase") {
                    None => None,
                    Some(v) if v == "auto" => None,
                    Some(v) => Some(num("phase", v)?),
                };
                let threshold = match take("threshold") {
                    None => Threshold::Auto,
                    Some(v) if v == "auto" => Threshold::Auto,
                    Some(v) => Threshold::Value(
                        v.parse().map_err(|_| Error::InvalidParameter(format!("threshold={v:?}")))?,
                    ),
                };
                let first = take("first").map(|v| num("first", v)).transpose()?.unwrap_or(1);
                let second = take("second").map(|v| num("second", v)).transpose()?.unwrap_or(2);
                StrategySpec::PartialTwoPhase { phase, threshold, first, second }
            }
            "partial-ladder" => StrategySpec::PartialLadder,
            "partial-optimal" => {
                let sense = take("sense").map(|v| v.parse()).transpose()?.unwrap_or(Sense::Max);
                StrategySpec::PartialOptimal { sense, table: None }
            }
            other => return Err(Error::InvalidParameter(format!("unknown strategy {other:?}"))),
        };
        if let Some((k, _)) = kv.first() {
            return Err(Error::InvalidParameter(format!("unknown parameter {k:?} for {id}")));
        }
        Ok(spec)
    }
}
