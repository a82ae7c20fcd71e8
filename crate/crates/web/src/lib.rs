//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every function returns a JSON string. Failures are reported as
//! `{"error": "..."}` rather than thrown.

use guessbench::engine::{optimal_complete, optimal_partial, Sense};
use guessbench::montecarlo::{estimate_tj, estimate_value};
use guessbench::numeric::{format_ratio, to_f64};
use guessbench::{DeckSpec, ExactRational, Result, StrategySpec};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Partial-feedback DP states allowed in the browser.
const STATE_LIMIT: usize = 200_000;
const MAX_TRIALS: u64 = 200_000;

fn respond(r: Result<Value>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

fn exact(q: &ExactRational) -> Value {
    json!({ "exact": format_ratio(q), "decimal": to_f64(q) })
}

fn check_trials(trials: u32) -> Result<u64> {
    let t = trials as u64;
    if t == 0 || t > MAX_TRIALS {
        return Err(guessbench::Error::InvalidParameter(format!("trials must lie in 1..={MAX_TRIALS}")));
    }
    Ok(t)
}

/// Optimal expected scores under complete and partial feedback.
/// Partial-feedback values are `null` when the deck is too large.
#[wasm_bindgen]
pub fn optimal_values(m: u32, n: u32) -> String {
    respond((|| {
        let spec = DeckSpec::new(m as usize, n as usize)?;
        let partial = |sense| optimal_partial(&spec, sense, STATE_LIMIT).ok().map(|q| exact(&q));
        Ok(json!({
            "m": m,
            "n": n,
            "complete_max": exact(&optimal_complete(&spec, Sense::Max)?),
            "complete_min": exact(&optimal_complete(&spec, Sense::Min)?),
            "partial_max": partial(Sense::Max),
            "partial_min": partial(Sense::Min),
            "none": m,
        }))
    })())
}

/// Simulated score distribution of `strategy` under the feedback it needs.
#[wasm_bindgen]
pub fn simulate(m: u32, n: u32, strategy: &str, trials: u32, seed: u32) -> String {
    respond((|| {
        let spec = DeckSpec::new(m as usize, n as usize)?;
        let strat: StrategySpec = strategy.parse()?;
        let s = estimate_value(&spec, strat.required_model(), &strat, check_trials(trials)?, seed as u64, 1)?;
        let histogram: Vec<[u64; 2]> = s.histogram.iter().map(|(&k, &v)| [k, v]).collect();
        Ok(json!({
            "strategy": strat.to_string(),
            "model": strat.required_model().as_str(),
            "trials": s.trials,
            "mean": s.mean(),
            "se": s.se(),
            "sd": s.sd(),
            "histogram": histogram,
        }))
    })())
}

/// Empirical `Pr[T_j > t]` for `t = 0..=mn`.
#[wasm_bindgen]
pub fn tj_survival(m: u32, n: u32, j: u32, trials: u32, seed: u32) -> String {
    respond((|| {
        let spec = DeckSpec::new(m as usize, n as usize)?;
        let sv = estimate_tj(&spec, j as usize, check_trials(trials)?, seed as u64, 1)?;
        let survival: Vec<f64> = (0..=spec.total()).map(|t| sv.survival(t)).collect();
        Ok(json!({ "j": j, "trials": sv.summary.trials, "mean": sv.summary.mean(), "survival": survival }))
    })())
}
