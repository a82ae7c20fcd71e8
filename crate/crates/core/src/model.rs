//! Decks, shuffles, feedback semantics and tally bookkeeping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A card type, 1-based: valid values are `1..=num_types`.
pub type Card = usize;

/// `m` copies of each of `n` card types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeckSpec {
    #[serde(rename = "m")]
    multiplicity: usize,
    #[serde(rename = "n")]
    num_types: usize,
}

impl DeckSpec {
    pub fn new(multiplicity: usize, num_types: usize) -> Result<Self> {
        if multiplicity == 0 || num_types == 0 {
            return Err(Error::InvalidDeck(format!(
                "need m >= 1 and n >= 1, got m={multiplicity}, n={num_types}"
            )));
        }
        if multiplicity.checked_mul(num_types).is_none() {
            return Err(Error::InvalidDeck("m*n overflows".into()));
        }
        Ok(Self { multiplicity, num_types })
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn total(&self) -> usize {
        self.multiplicity * self.num_types
    }

    pub fn check_card(&self, card: Card) -> Result<()> {
        if card == 0 || card > self.num_types {
            return Err(Error::CardOutOfRange { card, num_types: self.num_types });
        }
        Ok(())
    }

    /// The sorted word `1^m 2^m ... n^m`.
    pub fn canonical_word(&self) -> Vec<Card> {
        (1..=self.num_types)
            .flat_map(|c| std::iter::repeat_n(c, self.multiplicity))
            .collect()
    }
}

impl fmt::Display for DeckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={},n={}", self.multiplicity, self.num_types)
    }
}

/// A hidden deck order: a word in which each type occurs exactly `m` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShuffleWord(Vec<Card>);

impl ShuffleWord {
    pub fn new(symbols: Vec<Card>, spec: &DeckSpec) -> Result<Self> {
        if !validate_shuffle(&symbols, spec) {
            return Err(Error::InvalidDeck(format!("{symbols:?} is not a shuffle of {spec}")));
        }
        Ok(Self(symbols))
    }

    /// Wraps symbols already known to be a valid shuffle.
    pub(crate) fn new_unchecked(symbols: Vec<Card>) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[Card] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Card> {
        self.0
    }
}

/// True iff `word` has length `m*n` and every type occurs exactly `m` times.
pub fn validate_shuffle(word: &[Card], spec: &DeckSpec) -> bool {
    if word.len() != spec.total() {
        return false;
    }
    let mut counts = vec![0usize; spec.num_types()];
    for &c in word {
        if c == 0 || c > spec.num_types() {
            return false;
        }
        counts[c - 1] += 1;
    }
    counts.iter().all(|&k| k == spec.multiplicity())
}

/// What the guesser learns after each guess. Variants are ordered by
/// information content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackModel {
    None,
    Partial,
    Complete,
}

impl FeedbackModel {
    pub const ALL: [FeedbackModel; 3] = [FeedbackModel::None, FeedbackModel::Partial, FeedbackModel::Complete];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeedbackModel::None => "none",
            FeedbackModel::Partial => "partial",
            FeedbackModel::Complete => "complete",
        }
    }
}

impl fmt::Display for FeedbackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeedbackModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "nofb" => Ok(FeedbackModel::None),
            "partial" => Ok(FeedbackModel::Partial),
            "complete" => Ok(FeedbackModel::Complete),
            other => Err(Error::InvalidParameter(format!("unknown feedback model {other:?}"))),
        }
    }
}

/// One observation after a guess. Serializes as `null`, a boolean, or the
/// revealed card type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observation {
    Nothing,
    Correct(bool),
    Revealed(Card),
}

impl Observation {
    pub fn model(&self) -> FeedbackModel {
        match self {
            Observation::Nothing => FeedbackModel::None,
            Observation::Correct(_) => FeedbackModel::Partial,
            Observation::Revealed(_) => FeedbackModel::Complete,
        }
    }

    /// Drops information down to what `model` would reveal, given the guess
    /// that produced this observation.
    pub fn coarsen(self, guess: Card, model: FeedbackModel) -> Result<Observation> {
        if model > self.model() {
            return Err(Error::ObservationMismatch(model.as_str()));
        }
        Ok(match (model, self) {
            (FeedbackModel::None, _) => Observation::Nothing,
            (FeedbackModel::Partial, Observation::Revealed(c)) => Observation::Correct(c == guess),
            (_, obs) => obs,
        })
    }
}

/// Feedback for `guess` when the dealt card is `true_card`.
pub fn observe(model: FeedbackModel, guess: Card, true_card: Card) -> Observation {
    match model {
        FeedbackModel::None => Observation::Nothing,
        FeedbackModel::Partial => Observation::Correct(guess == true_card),
        FeedbackModel::Complete => Observation::Revealed(true_card),
    }
}

/// Append-only record of guesses and observations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    spec: DeckSpec,
    model: FeedbackModel,
    guesses: Vec<Card>,
    feedback: Vec<Observation>,
    tally: TallyState,
}

impl History {
    pub fn new(spec: DeckSpec, model: FeedbackModel) -> Self {
        Self { spec, model, guesses: Vec::new(), feedback: Vec::new(), tally: TallyState::initial(&spec) }
    }

    /// Builds a history from parallel vectors, validating every step.
    pub fn from_parts(
        spec: DeckSpec,
        model: FeedbackModel,
        guesses: &[Card],
        feedback: &[Observation],
    ) -> Result<Self> {
        if guesses.len() != feedback.len() {
            return Err(Error::InconsistentHistory(format!(
                "{} guesses but {} observations",
                guesses.len(),
                feedback.len()
            )));
        }
        let mut h = Self::new(spec, model);
        for (&g, &o) in guesses.iter().zip(feedback) {
            h.push(g, o)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, guess: Card, obs: Observation) -> Result<()> {
        if self.guesses.len() >= self.spec.total() {
            return Err(Error::InconsistentHistory("game already over".into()));
        }
        if obs.model() != self.model {
            return Err(Error::ObservationMismatch(self.model.as_str()));
        }
        self.tally.apply(&self.spec, guess, obs)?;
        self.guesses.push(guess);
        self.feedback.push(obs);
        Ok(())
    }

    pub fn spec(&self) -> &DeckSpec {
        &self.spec
    }

    pub fn model(&self) -> FeedbackModel {
        self.model
    }

    pub fn guesses(&self) -> &[Card] {
        &self.guesses
    }

    pub fn feedback(&self) -> &[Observation] {
        &self.feedback
    }

    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }

    /// Incrementally maintained tallies; equal to [`derive_tallies`].
    pub fn tally(&self) -> &TallyState {
        &self.tally
    }
}

/// Per-type sufficient statistics of a history.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TallyState {
    /// Copies of each type not yet found by a correct guess.
    pub remaining: Vec<usize>,
    /// Times each type has been guessed, correct or not.
    pub guess_counts: Vec<usize>,
    pub correct_total: usize,
    pub time: usize,
    /// Revealed copies per type (complete feedback only).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub revealed: Vec<usize>,
}

impl TallyState {
    pub fn initial(spec: &DeckSpec) -> Self {
        Self {
            remaining: vec![spec.multiplicity(); spec.num_types()],
            guess_counts: vec![0; spec.num_types()],
            correct_total: 0,
            time: 0,
            revealed: Vec::new(),
        }
    }

    pub fn apply(&mut self, spec: &DeckSpec, guess: Card, obs: Observation) -> Result<()> {
        spec.check_card(guess)?;
        let correct = match obs {
            Observation::Nothing => false,
            Observation::Correct(c) => c,
            Observation::Revealed(card) => {
                spec.check_card(card)?;
                if self.revealed.is_empty() {
                    self.revealed = vec![0; spec.num_types()];
                }
                if self.revealed[card - 1] >= spec.multiplicity() {
                    return Err(Error::InconsistentHistory(format!(
                        "more than {} copies of card {card} revealed",
                        spec.multiplicity()
                    )));
                }
                self.revealed[card - 1] += 1;
                card == guess
            }
        };
        if correct {
            if self.remaining[guess - 1] == 0 {
                return Err(Error::InconsistentHistory(format!(
                    "card {guess} guessed correctly more than {} times",
                    spec.multiplicity()
                )));
            }
            self.remaining[guess - 1] -= 1;
            self.correct_total += 1;
        }
        self.guess_counts[guess - 1] += 1;
        self.time += 1;
        Ok(())
    }

    /// Incorrect guesses per type: the forbidden-position counts of the
    /// constrained-permutation posterior.
    pub fn incorrect_counts(&self, spec: &DeckSpec) -> Vec<usize> {
        self.guess_counts
            .iter()
            .zip(&self.remaining)
            .map(|(&a, &r)| a - (spec.multiplicity() - r))
            .collect()
    }
}

/// Recomputes tallies from scratch.
pub fn derive_tallies(history: &History, spec: &DeckSpec) -> Result<TallyState> {
    let mut tally = TallyState::initial(spec);
    for (&g, &o) in history.guesses().iter().zip(history.feedback()) {
        tally.apply(spec, g, o)?;
    }
    Ok(tally)
}

/// Transcript of one complete game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub spec: DeckSpec,
    pub model: FeedbackModel,
    pub strategy: String,
    pub seed: u64,
    pub shuffle: ShuffleWord,
    pub guesses: Vec<Card>,
    pub feedback: Vec<Observation>,
    pub correct: Vec<bool>,
    pub score: usize,
}

impl GameRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    /// Times `guesses[t]` had been guessed before step `t`.
    pub fn prior_guess_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.spec.num_types()];
        self.guesses
            .iter()
            .map(|&g| {
                let before = counts[g - 1];
                counts[g - 1] += 1;
                before
            })
            .collect()
    }
}
