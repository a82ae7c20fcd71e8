use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{count_ma, enumerate_ma, next_card_distribution, ConstraintState};
use crate::error::{limit_exceeded, Result};
use crate::model::Card;
use crate::numeric::format_ratio;

/// Largest `|m|` accepted by [`verify_pointwise`].
pub const POINTWISE_TOTAL_LIMIT: usize = 10;

/// Most types in the verification grid.
pub const POINTWISE_MAX_TYPES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointwiseWitness {
    pub m: Vec<usize>,
    pub a: Vec<usize>,
    pub card: Card,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub max_total: usize,
    pub states: u64,
    /// States with no `(m, a)`-permutation; only the count check applies.
    pub empty_states: u64,
    pub pairs: u64,
    /// Largest `f_i (|m| - a_i) / m_i`, as `num/den`.
    pub max_ratio: String,
    pub witnesses: Vec<PointwiseWitness>,
    pub count_mismatches: Vec<PointwiseWitness>,
    pub pass: bool,
}

fn compositions(total: usize, parts: usize, min: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if cur.len() == parts {
        out.push(cur.clone());
        return;
    }
    let left = parts - cur.len() - 1;
    if left == 0 {
        if total >= min {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for v in min..=total.saturating_sub(left * min) {
        cur.push(v);
        compositions(total - v, parts, min, out, cur);
        cur.pop();
    }
}

/// All vectors of `parts` entries `>= min` with sum at most `bound`.
fn bounded_vectors(bound: usize, parts: usize, min: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=bound {
        compositions(total, parts, min, &mut out, &mut Vec::new());
    }
    out
}

/// Checks `f_i(m, a) <= m_i / (|m| - a_i)` and `N(m, a) = |enumeration|` for
/// every state with `1 <= m_i`, up to four types, `|m| <= max_total` and
/// `|a| < |m|`.
pub fn verify_pointwise(max_total: usize) -> Result<PointwiseReport> {
    if max_total > POINTWISE_TOTAL_LIMIT {
        return Err(limit_exceeded("max total", max_total, POINTWISE_TOTAL_LIMIT));
    }
    let mut report = PointwiseReport {
        max_total,
        states: 0,
        empty_states: 0,
        pairs: 0,
        max_ratio: String::new(),
        witnesses: Vec::new(),
        count_mismatches: Vec::new(),
        pass: true,
    };
    let mut best = BigRational::zero();
    for parts in 1..=POINTWISE_MAX_TYPES {
        for m in bounded_vectors(max_total, parts, 1) {
            let total: usize = m.iter().sum();
            if total == 0 {
                continue;
            }
            for a in bounded_vectors(total - 1, parts, 0) {
                let state = ConstraintState::new(m.clone(), a.clone())?;
                report.states += 1;
                let count = count_ma(&state);
                let listed = enumerate_ma(&state, POINTWISE_TOTAL_LIMIT)?.count();
                if count != listed.into() {
                    report.count_mismatches.push(PointwiseWitness { m: m.clone(), a: a.clone(), card: 0 });
                }
                if count.is_zero() {
                    report.empty_states += 1;
                    continue;
                }
                let f = next_card_distribution(&state)?;
                for i in 0..parts {
                    report.pairs += 1;
                    let ratio = &f[i] * BigInt::from(total - a[i].min(total)) / BigInt::from(m[i]);
                    let witness = || PointwiseWitness { m: m.clone(), a: a.clone(), card: i + 1 };
                    if ratio > best {
                        best = ratio;
                        report.witnesses = vec![witness()];
                    } else if ratio == best {
                        report.witnesses.push(witness());
                    }
                }
            }
        }
    }
    report.pass = best <= BigRational::one() && report.count_mismatches.is_empty();
    report.max_ratio = format_ratio(&best);
    Ok(report)
}
