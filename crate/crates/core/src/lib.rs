//! Card-guessing games over decks with `m` copies of each of `n` card types.
//!
//! A shuffled deck is dealt one card at a time and a guesser names the next
//! card before it is revealed. After each guess the guesser learns nothing
//! ([`FeedbackModel::None`]), whether the guess was right
//! ([`FeedbackModel::Partial`]), or the identity of the card
//! ([`FeedbackModel::Complete`]).
//!
//! The crate provides
//! - exact counting of constrained multiset permutations ([`combinatorics`]),
//! - a zoo of guessing strategies ([`strategies`]),
//! - exact expected scores and optimal game values ([`engine`]),
//! - reproducible Monte Carlo estimation ([`montecarlo`]),
//! - numeric checks of the concentration bounds used in the analysis of the
//!   partial-feedback game ([`bounds`]),
//! - CSV/JSON reporting and the command-line front end ([`report`], [`config`]).

pub mod bounds;
pub mod combinatorics;
pub mod config;
pub mod engine;
mod error;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod report;
pub mod strategies;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use model::{Card, DeckSpec, FeedbackModel, History, Observation, ShuffleWord, TallyState};
pub use numeric::{ExactCount, ExactRational};
pub use strategies::StrategySpec;

/// Library version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
