//! Property-based tests for the model, counting, bounds and config layers.

mod common;

use std::str::FromStr;

use guessbench::bounds::{add_conditional_bernoulli, dominance_check_exact};
use guessbench::combinatorics::{
    binomial_pmf, count_ma, next_card_distribution, ConstraintState, Pmf,
};
use guessbench::config::RunConfig;
use guessbench::engine::Sense;
use guessbench::model::{derive_tallies, observe, GameRecord, TallyState};
use guessbench::montecarlo::{estimate_value, play_game, sample_shuffle, RngStream, StatSummary};
use guessbench::report::OutputFormat;
use guessbench::strategies::{StrategySpec, Threshold};
use guessbench::{DeckSpec, FeedbackModel, History};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn deck_strategy() -> impl Strategy<Value = DeckSpec> {
    (1usize..=4, 1usize..=6).prop_map(|(m, n)| DeckSpec::new(m, n).unwrap())
}

fn any_strategy() -> impl Strategy<Value = StrategySpec> {
    prop_oneof![
        Just(StrategySpec::CompleteGreedyMax),
        Just(StrategySpec::CompleteGreedyMin),
        (1usize..=3).prop_map(|card| StrategySpec::NofbConstant { card }),
        Just(StrategySpec::NofbCyclic { word: None }),
        Just(StrategySpec::PartialMle),
        Just(StrategySpec::PartialMinMle),
        any::<u64>().prop_map(|seed| StrategySpec::PartialUniform { seed }),
        Just(StrategySpec::two_phase()),
        Just(StrategySpec::PartialLadder),
    ]
}

fn state_strategy() -> impl Strategy<Value = ConstraintState> {
    prop::collection::vec(1usize..=3, 1..=5)
        .prop_flat_map(|m| {
            let total: usize = m.iter().sum();
            let len = m.len();
            (Just(m), prop::collection::vec(0usize..total, len))
        })
        .prop_filter_map("forbidden total must stay below |m|", |(m, a)| ConstraintState::new(m, a).ok())
}

fn pmf_strategy(max_len: usize) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(0u32..20, 1..=max_len)
        .prop_filter("positive mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| Pmf::from_counts(&w.into_iter().map(BigUint::from).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn games_conserve_tallies(spec in deck_strategy(), strat in any_strategy(), seed in any::<u64>()) {
        let model = strat.required_model();
        prop_assume!(strat.start(&spec, model).is_ok());
        let shuffle = sample_shuffle(&spec, RngStream::new(seed, 0));
        let rec = play_game(&spec, model, &strat, &shuffle, 0).unwrap();
        prop_assert_eq!(rec.score, rec.correct.iter().filter(|&&c| c).count());
        prop_assert_eq!(rec.guesses.len(), spec.total());
        for ((&g, &c), &ok) in rec.guesses.iter().zip(shuffle.symbols()).zip(&rec.correct) {
            prop_assert_eq!(ok, g == c);
        }
        let history = History::from_parts(spec, model, &rec.guesses, &rec.feedback).unwrap();
        let tally = derive_tallies(&history, &spec).unwrap();
        prop_assert_eq!(&tally, history.tally());
        prop_assert_eq!(tally.remaining.iter().sum::<usize>() + tally.correct_total, spec.total());
        if model != FeedbackModel::None {
            prop_assert_eq!(tally.incorrect_counts(&spec).iter().sum::<usize>(), spec.total() - rec.score);
        }
        let back = GameRecord::from_json(&rec.to_json()).unwrap();
        prop_assert_eq!(back, rec);
    }

    #[test]
    fn coarsened_observations_agree(spec in deck_strategy(), guess in 1usize..=6, card in 1usize..=6) {
        prop_assume!(guess <= spec.num_types() && card <= spec.num_types());
        let full = observe(FeedbackModel::Complete, guess, card);
        for model in FeedbackModel::ALL {
            prop_assert_eq!(full.coarsen(guess, model).unwrap(), observe(model, guess, card));
        }
        let mut t = TallyState::initial(&spec);
        t.apply(&spec, guess, full).unwrap();
        prop_assert_eq!(t.time, 1);
    }

    #[test]
    fn next_card_law_sums_to_one_and_obeys_pointwise_bound(state in state_strategy()) {
        prop_assume!(!count_ma(&state).is_zero());
        let f = next_card_distribution(&state).unwrap();
        let total: BigRational = f.iter().sum();
        prop_assert!(total.is_one());
        for (i, fi) in f.iter().enumerate() {
            let bound = BigRational::new(
                BigInt::from(state.m()[i]),
                BigInt::from(state.total() - state.a()[i].min(state.total())),
            );
            prop_assert!(*fi <= bound);
        }
    }

    #[test]
    fn relabeling_is_equivariant(state in state_strategy(), rot in 0usize..5) {
        let k = state.num_types();
        let r = rot % k;
        let mut m = state.m().to_vec();
        let mut a = state.a().to_vec();
        m.rotate_left(r);
        a.rotate_left(r);
        let moved = ConstraintState::new(m, a).unwrap();
        prop_assert_eq!(count_ma(&moved), count_ma(&state));
        if !count_ma(&state).is_zero() {
            let mut f = next_card_distribution(&state).unwrap();
            f.rotate_left(r);
            prop_assert_eq!(next_card_distribution(&moved).unwrap(), f);
        }
    }

    #[test]
    fn dominance_is_a_partial_order(x in pmf_strategy(5), y in pmf_strategy(5), z in pmf_strategy(5)) {
        prop_assert!(dominance_check_exact(&x, &x).holds);
        if dominance_check_exact(&x, &y).holds && dominance_check_exact(&y, &x).holds {
            prop_assert_eq!(&x, &y);
        }
        if dominance_check_exact(&x, &y).holds && dominance_check_exact(&y, &z).holds {
            prop_assert!(dominance_check_exact(&x, &z).holds);
        }
    }

    #[test]
    fn domination_step(
        x in pmf_strategy(5),
        shifts in prop::collection::vec(0u32..=4, 5),
        px in prop::collection::vec(0u32..=8, 6),
        cut in prop::collection::vec(0u32..=8, 6),
    ) {
        // Y moves part of X's mass one step down, so X dominates Y.
        let mut y = vec![BigRational::zero(); x.max_value() + 1];
        for (v, p) in x.probs().iter().enumerate() {
            let frac = BigRational::new(BigInt::from(shifts[v]), BigInt::from(4));
            let down = if v > 0 { p * &frac } else { BigRational::zero() };
            y[v] += p - &down;
            if v > 0 {
                y[v - 1] += down;
            }
        }
        let y = Pmf::new(y).unwrap();
        prop_assert!(dominance_check_exact(&x, &y).holds);
        let px: Vec<BigRational> = px.iter().map(|&a| BigRational::new(a.into(), 8.into())).collect();
        let py: Vec<BigRational> =
            px.iter().zip(&cut).map(|(p, &c)| p * BigRational::new(c.into(), 8.into())).collect();
        let sx = add_conditional_bernoulli(&x, &px).unwrap();
        let sy = add_conditional_bernoulli(&y, &py).unwrap();
        prop_assert!(dominance_check_exact(&sx, &sy).holds);
    }

    #[test]
    fn binomials_convolve(n1 in 0usize..6, n2 in 0usize..6, num in 0i64..=6) {
        let p = BigRational::new(num.into(), 6.into());
        let a = binomial_pmf(n1, &p).unwrap();
        let b = binomial_pmf(n2, &p).unwrap();
        prop_assert_eq!(a.convolve(&b), binomial_pmf(n1 + n2, &p).unwrap());
    }

    #[test]
    fn binomial_dominance_is_monotone_in_p(n in 1usize..8, lo in 0i64..=10, gap in 0i64..=10) {
        let hi = (lo + gap).min(10);
        let x = binomial_pmf(n, &BigRational::new(hi.into(), 10.into())).unwrap();
        let y = binomial_pmf(n, &BigRational::new(lo.into(), 10.into())).unwrap();
        prop_assert!(dominance_check_exact(&x, &y).holds);
    }

    #[test]
    fn strategy_strings_round_trip(strat in any_strategy(), phase in proptest::option::of(1usize..50), thr in 0.0f64..20.0) {
        let text = strat.to_string();
        prop_assert_eq!(StrategySpec::from_str(&text).unwrap(), strat);
        let tp = StrategySpec::PartialTwoPhase { phase, threshold: Threshold::Value(thr), first: 2, second: 1 };
        prop_assert_eq!(StrategySpec::from_str(&tp.to_string()).unwrap(), tp);
    }

    #[test]
    fn summaries_merge_like_concatenation(a in prop::collection::vec(0u64..30, 0..40), b in prop::collection::vec(0u64..30, 0..40)) {
        let mut sa = StatSummary::default();
        a.iter().for_each(|&v| sa.record(v));
        let mut sb = StatSummary::default();
        b.iter().for_each(|&v| sb.record(v));
        let mut joined = StatSummary::default();
        a.iter().chain(&b).for_each(|&v| joined.record(v));
        let mut ab = sa.clone();
        ab.merge(&sb);
        let mut ba = sb;
        ba.merge(&sa);
        prop_assert_eq!(&ab, &joined);
        prop_assert_eq!(ba, joined);
    }
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    let strategies = prop::sample::select(vec![
        "complete-greedy-max",
        "partial-mle",
        "partial-uniform:seed=4",
        "nofb-cyclic:word=1.2.2.1",
        "partial-two-phase:phase=auto,threshold=auto,first=1,second=2",
    ]);
    (
        (
            proptest::option::of(prop::sample::select(vec!["simulate", "optimal", "tj"])),
            proptest::option::of(1usize..100),
            proptest::option::of(1usize..100),
            proptest::option::of(prop::sample::select(FeedbackModel::ALL.to_vec())),
            proptest::option::of(strategies),
            proptest::option::of(1u64..1_000_000),
            proptest::option::of(any::<u64>()),
            proptest::option::of(1usize..64),
        ),
        (
            proptest::option::of(1e-6f64..0.4999),
            proptest::option::of(prop::sample::select(vec![Sense::Max, Sense::Min])),
            proptest::option::of(1usize..10),
            proptest::option::of(1usize..5),
            proptest::option::of(prop::sample::select(vec![OutputFormat::Csv, OutputFormat::Json])),
            proptest::option::of("[a-z][a-z0-9_/]{0,12}\\.csv"),
            proptest::option::of(1u64..u64::MAX),
            proptest::option::of(1usize..10_000_000),
        ),
    )
        .prop_map(|((command, m, n, model, strategy, trials, seed, workers), (epsilon, sense, max_total, j, format, out, el, sl))| {
            RunConfig {
                command: command.map(str::to_string),
                m,
                n,
                model,
                strategy: strategy.map(str::to_string),
                trials,
                seed,
                workers,
                epsilon,
                sense,
                max_total,
                j,
                format,
                out: out.map(Into::into),
                enumeration_limit: el,
                state_limit: sl,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn config_round_trips(cfg in config_strategy()) {
        prop_assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_ignore_worker_count(seed in any::<u64>(), workers in 2usize..6, strat in any_strategy()) {
        let spec = DeckSpec::new(2, 3).unwrap();
        let model = strat.required_model();
        prop_assume!(strat.start(&spec, model).is_ok());
        let one = estimate_value(&spec, model, &strat, 300, seed, 1).unwrap();
        let many = estimate_value(&spec, model, &strat, 300, seed, workers).unwrap();
        prop_assert_eq!(one, many);
    }
}
