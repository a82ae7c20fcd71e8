//! Concentration-bound evaluators and their empirical or exact checks.
//!
//! Every right-hand side is a pure formula. Left-hand sides are either exact
//! rationals (reported with zero radius) or simulated frequencies with a
//! `4 SE` binomial radius.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_upper_tail, chernoff_rhs, hypergeom_distribution, Pmf};
use crate::error::{Error, Result};
use crate::model::DeckSpec;
use crate::montecarlo::{classify_guesses, fold_games, run_partitioned, RngStream, CI_MULTIPLIER};
use crate::numeric::{format_ratio, from_f64, to_f64};
use crate::strategies::StrategySpec;

/// Relative slack allowed when comparing an exact left-hand side with a floating RHS.
pub const EXACT_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub params: BTreeMap<String, String>,
    pub rhs: Option<f64>,
    pub lhs: f64,
    /// Exact LHS as `num/den` when it was computed exactly.
    pub lhs_exact: Option<String>,
    pub radius: f64,
    pub trials: Option<u64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(bound: &str, params: &[(&str, String)]) -> Self {
        Self {
            bound: bound.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            rhs: None,
            lhs: 0.0,
            lhs_exact: None,
            radius: 0.0,
            trials: None,
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
        }
    }

    /// Exact LHS: PASS or FAIL by direct comparison with slack.
    fn judge_exact(mut self, lhs: &BigRational, rhs: f64) -> Self {
        self.lhs = to_f64(lhs);
        self.lhs_exact = Some(format_ratio(lhs));
        self.rhs = Some(rhs);
        self.verdict = if self.lhs <= rhs * (1.0 + EXACT_SLACK) { Verdict::Pass } else { Verdict::Fail };
        if rhs >= 1.0 {
            self.notes.push("rhs >= 1, bound is vacuous".into());
        }
        self
    }

    /// Simulated LHS: FAIL only when the lower confidence limit exceeds the
    /// RHS, INCONCLUSIVE when the RHS is vacuous or inside the interval.
    fn judge_simulated(mut self, hits: u64, trials: u64, rhs: f64) -> Self {
        let p = hits as f64 / trials as f64;
        self.lhs = p;
        self.radius = CI_MULTIPLIER * (p * (1.0 - p) / trials as f64).sqrt();
        self.trials = Some(trials);
        self.rhs = Some(rhs);
        self.verdict = if rhs >= 1.0 {
            self.notes.push("rhs >= 1, bound is vacuous".into());
            Verdict::Inconclusive
        } else if p - self.radius > rhs {
            Verdict::Fail
        } else if p + self.radius <= rhs {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        self
    }

    fn hypothesis_violated(mut self, note: String) -> Self {
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
        self.notes.push(note);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// A walk of independent Bernoulli(`p`) steps, centered as
/// `Z_k = successes(k) - p k`, so every increment is at least `-p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub p: f64,
    pub horizon: u64,
}

impl WalkSpec {
    pub fn new(p: f64, horizon: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("walk probability {p} outside [0,1]")));
        }
        Ok(Self { p, horizon })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// `(8 c' k1)/(lambda k0) * exp(-c lambda^3 p k0 / 256)`.
pub fn union_bound_rhs(c: f64, c_prime: f64, lambda: f64, p: f64, k0: u64, k1: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(c > 0.0 && c_prime > 0.0) {
        return Err(Error::InvalidParameter(format!("constants must be positive, got c={c}, c'={c_prime}")));
    }
    if (k0 as f64) < 2.0 / lambda || k1 < k0 {
        return Err(Error::InvalidParameter(format!("need k1 >= k0 >= 2/lambda, got k0={k0}, k1={k1}, lambda={lambda}")));
    }
    let (k0, k1) = (k0 as f64, k1 as f64);
    Ok(8.0 * c_prime * k1 / (lambda * k0) * (-c * lambda.powi(3) * p * k0 / 256.0).exp())
}

/// Frequency of `exists k in [k0, k1]: Z_k > lambda p k` over simulated walks,
/// judged against the binomial instantiation `c = 1/2, c' = 1`.
pub fn empirical_maximal(
    walk: WalkSpec,
    lambda: f64,
    k0: u64,
    k1: u64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<BoundReport> {
    let rhs = union_bound_rhs(0.5, 1.0, lambda, walk.p, k0, k1)?;
    if k1 > walk.horizon {
        return Err(Error::InvalidParameter(format!("k1={k1} exceeds walk horizon {}", walk.horizon)));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let parts = run_partitioned(trials, workers, |range| {
        let mut hits = 0u64;
        for t in range {
            let mut rng = RngStream::new(seed, t).rng();
            let mut successes = 0u64;
            for k in 1..=k1 {
                successes += rng.random_bool(walk.p) as u64;
                if k >= k0 && successes as f64 - walk.p * k as f64 > lambda * walk.p * k as f64 {
                    hits += 1;
                    break;
                }
            }
        }
        Ok(hits)
    })?;
    let report = BoundReport::new(
        "adaptive-maximal",
        &[
            ("p", walk.p.to_string()),
            ("lambda", lambda.to_string()),
            ("k0", k0.to_string()),
            ("k1", k1.to_string()),
            ("c", "1/2".into()),
            ("c_prime", "1".into()),
            ("seed", seed.to_string()),
        ],
    );
    Ok(report.judge_simulated(parts.iter().sum(), trials, rhs))
}

/// Exact check of the binomial upper tail against `exp(-lambda^2 p N / 2)`.
pub fn chernoff_report(trials: usize, p: &BigRational, lambda: &BigRational) -> Result<BoundReport> {
    let lhs = binomial_upper_tail(trials, p, lambda)?;
    let rhs = chernoff_rhs(trials as u64, to_f64(p), to_f64(lambda));
    let report = BoundReport::new(
        "chernoff",
        &[("trials", trials.to_string()), ("p", format_ratio(p)), ("lambda", format_ratio(lambda))],
    );
    Ok(report.judge_exact(&lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypMode {
    Single,
    Maximal { b0: usize, b1: usize, trials: u64, seed: u64 },
}

/// `3 exp(-lambda^2 b m / 2N)`.
pub fn hyp_single_rhs(n_total: usize, good: usize, draws: usize, lambda: f64) -> f64 {
    3.0 * (-lambda * lambda * (draws * good) as f64 / (2.0 * n_total as f64)).exp()
}

/// `(24 b1)/(lambda b0) exp(-lambda^3 b0 m / 512 N)`.
pub fn hyp_maximal_rhs(n_total: usize, good: usize, b0: usize, b1: usize, lambda: f64) -> f64 {
    24.0 * b1 as f64 / (lambda * b0 as f64) * (-lambda.powi(3) * (b0 * good) as f64 / (512.0 * n_total as f64)).exp()
}

/// Exact `Pr[S_b > (1 + lambda) b m / N]` for `S_b ~ Hyp(N, m, b)`.
pub fn hyp_single_lhs(n_total: usize, good: usize, draws: usize, lambda: &BigRational) -> Result<BigRational> {
    let pmf = hypergeom_distribution(n_total, good, draws)?;
    let threshold = (BigRational::one() + lambda) * BigInt::from(draws * good) / BigInt::from(n_total);
    Ok(pmf
        .probs()
        .iter()
        .enumerate()
        .filter(|(k, _)| BigRational::from_integer(BigInt::from(*k)) > threshold)
        .map(|(_, q)| q)
        .sum())
}

pub fn hyp_tail_report(n_total: usize, good: usize, draws: usize, lambda: f64, mode: HypMode) -> Result<BoundReport> {
    check_lambda(lambda)?;
    if n_total == 0 || good > n_total || draws > n_total {
        return Err(Error::InvalidParameter(format!(
            "hypergeometric needs 0 < N and m, b <= N, got N={n_total}, m={good}, b={draws}"
        )));
    }
    let hypothesis = n_total >= good * good + good;
    let mut params = vec![("N", n_total.to_string()), ("m", good.to_string()), ("lambda", lambda.to_string())];
    let report = match mode {
        HypMode::Single => {
            params.push(("b", draws.to_string()));
            let lhs = hyp_single_lhs(n_total, good, draws, &from_f64(lambda)?)?;
            BoundReport::new("hypergeometric-single", &params).judge_exact(&lhs, hyp_single_rhs(n_total, good, draws, lambda))
        }
        HypMode::Maximal { b0, b1, trials, seed } => {
            if (b0 as f64) < 2.0 / lambda || b1 < b0 || b1 > n_total {
                return Err(Error::InvalidParameter(format!(
                    "need 2/lambda <= b0 <= b1 <= N, got b0={b0}, b1={b1}, N={n_total}"
                )));
            }
            if trials == 0 {
                return Err(Error::InvalidParameter("trials must be at least 1".into()));
            }
            params.extend([("b0", b0.to_string()), ("b1", b1.to_string()), ("seed", seed.to_string())]);
            let hits: u64 = run_partitioned(trials, 1, |range| {
                let mut hits = 0u64;
                for t in range {
                    let mut rng = RngStream::new(seed, t).rng();
                    let mut s = 0usize;
                    for b in 1..=b1 {
                        // Pr[R_b = 1] = (m - S_{b-1}) / (N - b + 1).
                        s += (rng.random_range(0..n_total - b + 1) < good - s) as usize;
                        if b >= b0 && (s * n_total) as f64 > (1.0 + lambda) * (b * good) as f64 {
                            hits += 1;
                            break;
                        }
                    }
                }
                Ok(hits)
            })?
            .iter()
            .sum();
            let mut r = BoundReport::new("hypergeometric-maximal", &params).judge_simulated(
                hits,
                trials,
                hyp_maximal_rhs(n_total, good, b0, b1, lambda),
            );
            r.notes.push("constant c read as 1/2 (the printed -1/2 makes the bound diverge)".into());
            r
        }
    };
    Ok(if hypothesis { report } else { report.hypothesis_violated(format!("hypothesis N >= m^2+m fails ({n_total} < {})", good * good + good)) })
}

/// Outcome of an exact stochastic-dominance test `X >= Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dominance {
    pub holds: bool,
    /// Smallest `x` with `Pr[X >= x] < Pr[Y >= x]`.
    pub witness: Option<usize>,
}

/// Checks `Pr[X >= x] >= Pr[Y >= x]` for every integer `x`.
pub fn dominance_check_exact(x: &Pmf, y: &Pmf) -> Dominance {
    let top = x.max_value().max(y.max_value());
    let (mut sx, mut sy) = (BigRational::zero(), BigRational::zero());
    // Scan survival functions from the top down.
    let mut witness = None;
    for v in (0..=top).rev() {
        sx += x.prob(v);
        sy += y.prob(v);
        if sx < sy {
            witness = Some(v);
        }
    }
    Dominance { holds: witness.is_none(), witness }
}

/// Law of `X + X'` where `X'` is `{0,1}`-valued with
/// `Pr[X' = 1 | X = v] = cond[v]`.
pub fn add_conditional_bernoulli(x: &Pmf, cond: &[BigRational]) -> Result<Pmf> {
    let mut out = vec![BigRational::zero(); x.max_value() + 2];
    for (v, p) in x.probs().iter().enumerate() {
        let q = cond.get(v).cloned().unwrap_or_else(BigRational::zero);
        if q.is_negative() || q > BigRational::one() {
            return Err(Error::InvalidParameter(format!("conditional probability {q} outside [0,1]")));
        }
        out[v + 1] += p * &q;
        out[v] += p * (BigRational::one() - q);
    }
    Pmf::new(out)
}

/// `min(1, (m - sum)/(N - t + 1))`; the ratio exceeds one only on histories
/// with more than `N - m` misses.
fn hyp_cap(n_total: usize, good: usize, t: usize, sum: usize) -> BigRational {
    let cap = BigRational::new(BigInt::from(good.saturating_sub(sum)), BigInt::from(n_total - t + 1));
    cap.min(BigRational::one())
}

/// Exact law of `P_1 + ... + P_k` for an adaptive `{0,1}` process with
/// `Pr[P_t = 1 | P_1..P_{t-1}] = rule(t, history)`. Errors if the rule
/// exceeds the hypergeometric cap `(m - sum)/(N - t + 1)`.
pub fn adaptive_sum_pmf<F>(n_total: usize, good: usize, k: usize, rule: F) -> Result<Pmf>
where
    F: Fn(usize, &[bool]) -> BigRational,
{
    if k > n_total || good > n_total {
        return Err(Error::InvalidParameter(format!("need k, m <= N, got k={k}, m={good}, N={n_total}")));
    }
    let mut out = vec![BigRational::zero(); k + 1];
    let mut stack: Vec<(Vec<bool>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    while let Some((hist, w)) = stack.pop() {
        let t = hist.len() + 1;
        if t > k {
            out[hist.iter().filter(|&&b| b).count()] += w;
            continue;
        }
        let sum = hist.iter().filter(|&&b| b).count();
        let cap = hyp_cap(n_total, good, t, sum);
        let q = rule(t, &hist);
        if q.is_negative() || q > cap {
            return Err(Error::InvalidParameter(format!("rule gives {q} above cap {cap} at t={t}")));
        }
        if !q.is_zero() {
            let mut h = hist.clone();
            h.push(true);
            stack.push((h, &w * &q));
        }
        let miss = BigRational::one() - &q;
        if !miss.is_zero() {
            let mut h = hist;
            h.push(false);
            stack.push((h, w * miss));
        }
    }
    Pmf::new(out)
}

/// Compares a family of capped adaptive processes of length `k` against
/// `Hyp(N, m, k)`. Returns one result per rule.
pub fn toy_adaptive_check(n_total: usize, good: usize, k: usize) -> Result<Vec<(String, Dominance)>> {
    let hyp = hypergeom_distribution(n_total, good, k)?;
    let cap = |t: usize, h: &[bool]| hyp_cap(n_total, good, t, h.iter().filter(|&&b| b).count());
    type Rule<'a> = Box<dyn Fn(usize, &[bool]) -> BigRational + 'a>;
    let rules: Vec<(&str, Rule)> = vec![
        ("cap", Box::new(cap)),
        ("half-cap", Box::new(move |t, h| cap(t, h) / BigInt::from(2))),
        ("zero", Box::new(|_, _| BigRational::zero())),
        ("cap-after-miss", Box::new(move |t, h| if h.last() == Some(&true) { BigRational::zero() } else { cap(t, h) })),
        ("cap-on-even", Box::new(move |t, h| if t % 2 == 0 { cap(t, h) } else { cap(t, h) / BigInt::from(3) })),
    ];
    rules
        .into_iter()
        .map(|(name, rule)| Ok((name.to_string(), dominance_check_exact(&hyp, &adaptive_sum_pmf(n_total, good, k, rule)?))))
        .collect()
}

/// Exact check that the first-third score of `strategy` (played under its
/// least informative model) is dominated by `Binomial(floor(mn/3), min(1, 3/n))`.
pub fn first_third_domination(spec: &DeckSpec, strategy: &StrategySpec, limit: u64) -> Result<(Dominance, BoundReport)> {
    let model = strategy.required_model();
    let score = crate::engine::first_third_distribution(spec, strategy, model, limit)?;
    let k = crate::engine::first_third_len(spec);
    let p = BigRational::new(BigInt::from(3), BigInt::from(spec.num_types())).min(BigRational::one());
    let bin = crate::combinatorics::binomial_pmf(k, &p)?;
    let dom = dominance_check_exact(&bin, &score);
    let mut r = BoundReport::new(
        "first-third-domination",
        &[("spec", spec.to_string()), ("strategy", strategy.to_string()), ("model", model.to_string())],
    );
    r.lhs = to_f64(&score.mean());
    r.lhs_exact = Some(format_ratio(&score.mean()));
    r.rhs = Some(to_f64(&bin.mean()));
    r.verdict = if dom.holds { Verdict::Pass } else { Verdict::Fail };
    r.notes.push("lhs and rhs are the means of the two laws".into());
    if let Some(x) = dom.witness {
        r.notes.push(format!("survival order fails at x={x}"));
    }
    Ok((dom, r))
}

/// `-1000 ln p + 1`.
pub fn conditional_tail_rhs(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("probability must lie in (0, 1], got {p}")));
    }
    Ok(-1000.0 * p.ln() + 1.0)
}

/// Frequencies of the subcritical event `Y_0 > (1+4e) b_0/n` and of the
/// critical event `exists i: Y_i > (1+4e) b_i/n + e^2 m`. Descriptive only:
/// both reports carry no RHS.
pub fn regime_bound_report(
    spec: &DeckSpec,
    strategy: &StrategySpec,
    epsilon: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(BoundReport, BoundReport)> {
    if !(epsilon > 0.0 && epsilon <= 0.125) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/8], got {epsilon}")));
    }
    let model = strategy.required_model();
    let (n, m) = (spec.num_types() as f64, spec.multiplicity() as f64);
    let scale = 1.0 + 4.0 * epsilon;
    let parts = fold_games(spec, model, strategy, trials, seed, workers, || (0u64, 0u64, 0u64), |acc, rec| {
        let r = classify_guesses(rec, epsilon)?;
        acc.0 += (r.y0 as f64 > scale * r.b0 as f64 / n) as u64;
        acc.1 += r.critical.iter().any(|&(_, b, y)| y as f64 > scale * b as f64 / n + epsilon * epsilon * m) as u64;
        acc.2 += (r.b0 == 0) as u64;
        Ok(())
    })?;
    let (sub, crit, empty) = parts.iter().fold((0, 0, 0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    let params = [
        ("spec", spec.to_string()),
        ("strategy", strategy.to_string()),
        ("model", model.to_string()),
        ("epsilon", epsilon.to_string()),
        ("seed", seed.to_string()),
    ];
    let describe = |bound: &str, hits: u64, event: &str| {
        let p = hits as f64 / trials as f64;
        let mut r = BoundReport::new(bound, &params);
        r.lhs = p;
        r.radius = CI_MULTIPLIER * (p * (1.0 - p) / trials as f64).sqrt();
        r.trials = Some(trials);
        r.notes.push(format!("event: {event}"));
        r.notes.push("descriptive: constants in the bound are unspecified".into());
        r
    };
    let mut sub_r = describe("subcritical-concentration", sub, "Y0 > (1+4e)*b0/n");
    if empty > 0 {
        sub_r.notes.push(format!("{empty} games had b0 = 0"));
    }
    let crit_r = describe("critical-concentration", crit, "exists i: Yi > (1+4e)*bi/n + e^2*m");
    Ok((sub_r, crit_r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial_pmf;
    use crate::numeric::ratio;

    #[test]
    fn union_bound_values() {
        let v = union_bound_rhs(0.5, 1.0, 1.0, 0.5, 64, 64).unwrap();
        assert!((v - 8.0 * (-1.0f64 / 16.0).exp()).abs() < 1e-12);
        let w = union_bound_rhs(0.5, 2.0, 1.0, 0.5, 64, 64).unwrap();
        assert!((w - 2.0 * v).abs() < 1e-12);
        assert!(union_bound_rhs(0.5, 1.0, 1.0, 0.5, 1, 64).is_err());
        assert!(union_bound_rhs(0.5, 1.0, 1.0, 0.5, 8, 4).is_err());
    }

    #[test]
    fn maximal_walks() {
        let zero = empirical_maximal(WalkSpec::new(0.0, 64).unwrap(), 1.0, 2, 64, 200, 1, 1).unwrap();
        assert_eq!(zero.lhs, 0.0);
        let huge = empirical_maximal(WalkSpec::new(0.5, 512).unwrap(), 100.0, 1, 512, 200, 1, 1).unwrap();
        assert_eq!(huge.lhs, 0.0);
        assert_eq!(huge.verdict, Verdict::Pass);
    }

    #[test]
    fn hypergeometric_examples() {
        let r = hyp_tail_report(20, 4, 5, 1.0, HypMode::Single).unwrap();
        // Pr[S_5 >= 3] = (C(5,3)C(15,1) + C(5,4)) / C(20,4) = 155/4845.
        assert_eq!(r.lhs_exact.as_deref(), Some("31/969"));
        assert!((r.rhs.unwrap() - 3.0 * (-0.5f64).exp()).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = hyp_tail_report(20, 4, 0, 1.0, HypMode::Single).unwrap();
        assert_eq!((r.lhs, r.verdict), (0.0, Verdict::Pass));
        let r = hyp_tail_report(12, 3, 12, 0.1, HypMode::Single).unwrap();
        assert_eq!((r.lhs, r.verdict), (0.0, Verdict::Pass));
        let r = hyp_tail_report(10, 3, 5, 1.0, HypMode::Single).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = hyp_tail_report(60, 6, 0, 1.0, HypMode::Maximal { b0: 2, b1: 60, trials: 500, seed: 3 }).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("1/2")));
        assert!(hyp_tail_report(60, 6, 0, 1.0, HypMode::Maximal { b0: 1, b1: 60, trials: 10, seed: 3 }).is_err());
    }

    #[test]
    fn rhs_golden_values() {
        assert!((hyp_single_rhs(20, 4, 5, 1.0) - 1.819591979137).abs() < 1e-11);
        assert!((hyp_single_rhs(60, 7, 30, 0.5) - 1.936945579284).abs() < 1e-11);
        assert!((hyp_single_rhs(30, 5, 0, 2.0) - 3.0).abs() < 1e-15);
        assert!((hyp_maximal_rhs(60, 6, 8, 16, 1.0) - 47.925058563244).abs() < 1e-10);
        assert!((chernoff_rhs(100, 0.5, 0.5) - (-6.25f64).exp()).abs() < 1e-15);
        assert!((chernoff_rhs(10, 0.1, 1.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(chernoff_rhs(0, 0.3, 1.0), 1.0);
    }

    #[test]
    fn conditional_tail_values() {
        assert_eq!(conditional_tail_rhs(1.0).unwrap(), 1.0);
        assert!((conditional_tail_rhs((-1.0f64).exp()).unwrap() - 1001.0).abs() < 1e-9);
        assert!((conditional_tail_rhs((-5.0f64).exp()).unwrap() - 5001.0).abs() < 1e-9);
        assert!(conditional_tail_rhs(0.0).is_err());
    }

    #[test]
    fn dominance_examples() {
        let x = binomial_pmf(2, &ratio(1, 2)).unwrap();
        let y = binomial_pmf(2, &ratio(1, 4)).unwrap();
        assert!(dominance_check_exact(&x, &y).holds);
        assert!(dominance_check_exact(&x, &x).holds);
        let d = dominance_check_exact(&y, &x);
        assert_eq!(d, Dominance { holds: false, witness: Some(1) });
    }

    #[test]
    fn adaptive_processes_are_dominated() {
        for (n_total, good, k) in [(6, 2, 4), (8, 3, 4), (5, 5, 3), (7, 0, 2)] {
            for (name, d) in toy_adaptive_check(n_total, good, k).unwrap() {
                assert!(d.holds, "{name} at N={n_total}, m={good}, k={k}");
            }
        }
        assert!(adaptive_sum_pmf(6, 2, 2, |_, _| ratio(1, 2)).is_err());
        let exact = adaptive_sum_pmf(6, 2, 3, |t, h| {
            let s = h.iter().filter(|&&b| b).count();
            ratio((2 - s) as i64, (7 - t) as i64)
        })
        .unwrap();
        assert_eq!(exact, hypergeom_distribution(6, 2, 3).unwrap());
    }

    #[test]
    fn first_third_small() {
        let d = DeckSpec::new(2, 3).unwrap();
        for s in StrategySpec::zoo() {
            let (dom, r) = first_third_domination(&d, &s, 10_000).unwrap();
            assert!(dom.holds, "{s}");
            assert_eq!(r.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn chernoff_exact() {
        let r = chernoff_report(20, &ratio(1, 2), &ratio(1, 2)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn regime_reports() {
        let d = DeckSpec::new(2, 4).unwrap();
        let (s, c) = regime_bound_report(&d, &StrategySpec::NofbConstant { card: 1 }, 0.125, 50, 0, 1).unwrap();
        assert!(s.rhs.is_none() && c.rhs.is_none());
        assert!(regime_bound_report(&d, &StrategySpec::PartialMle, 0.2, 10, 0, 1).is_err());
    }
}
