//! Monte Carlo estimates against exact oracles.

mod common;

use common::q;
use guessbench::engine::{optimal_complete, Sense};
use guessbench::montecarlo::{estimate_l, estimate_tj, estimate_value, exact_t2_survival, CI_MULTIPLIER};
use guessbench::numeric::to_f64;
use guessbench::{DeckSpec, FeedbackModel, StrategySpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn deck(m: usize, n: usize) -> DeckSpec {
    DeckSpec::new(m, n).unwrap()
}

fn within(mean: f64, se: f64, target: f64) -> bool {
    (mean - target).abs() <= CI_MULTIPLIER * se.max(1e-12)
}

fn choose(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// Exact mean of the two-phase strategy: with `x` ones and `z` twos among
/// the first `h = floor(mn/2)` cards, it scores `x + (m - z)` after switching
/// and `m` otherwise.
fn two_phase_exact(m: usize, n: usize, cut: f64) -> BigRational {
    let (total, h) = (m * n, m * n / 2);
    let den = choose(total, h);
    let mut gain = BigRational::zero();
    for x in 0..=m.min(h) {
        if (x as f64) < cut {
            continue;
        }
        for z in 0..=m.min(h - x) {
            let ways = choose(m, x) * choose(m, z) * choose(total - 2 * m, h - x - z);
            gain += BigRational::new(ways * (BigInt::from(x) - BigInt::from(z)), den.clone());
        }
    }
    gain + BigRational::from_integer(m.into())
}

#[test]
fn greedy_matches_exact_value() {
    let d = deck(2, 2);
    let s = estimate_value(&d, FeedbackModel::Complete, &StrategySpec::CompleteGreedyMax, 40_000, 1, 2).unwrap();
    assert!(within(s.mean(), s.se(), 17.0 / 6.0), "{} +- {}", s.mean(), s.se());
    let exact = to_f64(&optimal_complete(&deck(3, 4), Sense::Max).unwrap());
    let s = estimate_value(&deck(3, 4), FeedbackModel::Complete, &StrategySpec::CompleteGreedyMax, 40_000, 2, 1)
        .unwrap();
    assert!(within(s.mean(), s.se(), exact));
}

#[test]
fn replayed_policy_matches_partial_optimum() {
    let strat = StrategySpec::from_str_checked("partial-optimal:sense=max");
    let s = estimate_value(&deck(1, 3), FeedbackModel::Partial, &strat, 40_000, 3, 1).unwrap();
    assert!(within(s.mean(), s.se(), 5.0 / 3.0));
    let s = estimate_value(&deck(1, 2), FeedbackModel::Partial, &StrategySpec::PartialLadder, 40_000, 7, 1).unwrap();
    assert!(within(s.mean(), s.se(), 1.5));
}

trait Checked {
    fn from_str_checked(s: &str) -> Self;
}

impl Checked for StrategySpec {
    fn from_str_checked(s: &str) -> Self {
        s.parse().unwrap()
    }
}

#[test]
fn two_phase_matches_hypergeometric_oracle() {
    for (m, n) in [(4, 6), (9, 5)] {
        let cut = m as f64 / 2.0 + (m as f64).sqrt();
        let exact = to_f64(&two_phase_exact(m, n, cut));
        let s = estimate_value(&deck(m, n), FeedbackModel::Partial, &StrategySpec::two_phase(), 60_000, 5, 1).unwrap();
        assert!(within(s.mean(), s.se(), exact), "({m},{n}) {} +- {} vs {exact}", s.mean(), s.se());
        assert!(exact > m as f64);
    }
}

#[test]
fn repeat_time_survival() {
    let sv = estimate_tj(&deck(2, 2), 2, 30_000, 0, 1).unwrap();
    // T_2 = 2 exactly when the first two cards match: probability 1/3.
    let p2 = 1.0 - sv.survival(2);
    assert!((p2 - 1.0 / 3.0).abs() <= CI_MULTIPLIER * sv.survival_se(2));
    for t in 1..=5 {
        let sv = estimate_tj(&deck(3, 4), 2, 30_000, 9, 1).unwrap();
        let exact = to_f64(&exact_t2_survival(&deck(3, 4), t));
        assert!((sv.survival(t) - exact).abs() <= CI_MULTIPLIER * sv.survival_se(t).max(1e-9), "t={t}");
    }
    assert_eq!(exact_t2_survival(&deck(2, 3), 4), q(0, 1));
    assert_eq!(exact_t2_survival(&deck(2, 3), 3), q(2, 5));
}

#[test]
fn l_estimate_matches_exact() {
    let s = estimate_l(&deck(2, 2), 40_000, 4, 1).unwrap();
    assert!(within(s.mean(), s.se(), 11.0 / 6.0));
}
