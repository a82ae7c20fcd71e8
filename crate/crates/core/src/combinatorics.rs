//! Counting of constrained multiset permutations and exact distribution
//! primitives.
//!
//! An `(m, a)`-permutation is a word with `m[i]` copies of type `i + 1` whose
//! first `a[0]` letters are not type 1, the next `a[1]` letters are not type
//! 2, and so on. Under partial feedback the uniform distribution over these
//! words is exactly the posterior over the unseen part of the deck, with `m`
//! the copies not yet found and `a` the incorrect-guess counts.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Card, DeckSpec};
use crate::numeric::{binomial, factorial, falling};

/// Default cap on word length for [`enumerate_ma`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;

/// Remaining copies and forbidden-position counts per type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintState {
    m: Vec<usize>,
    a: Vec<usize>,
}

impl ConstraintState {
    pub fn new(m: Vec<usize>, a: Vec<usize>) -> Result<Self> {
        if m.is_empty() || m.len() != a.len() {
            return Err(Error::InvalidConstraint(format!(
                "vectors must be nonempty and equal length, got {} and {}",
                m.len(),
                a.len()
            )));
        }
        let (sm, sa): (usize, usize) = (m.iter().sum(), a.iter().sum());
        if sa >= sm {
            return Err(Error::InvalidConstraint(format!("need |a| < |m|, got |a|={sa}, |m|={sm}")));
        }
        Ok(Self { m, a })
    }

    /// Fresh deck: `m` copies of each of `n` types, nothing forbidden.
    pub fn fresh(spec: &DeckSpec) -> Self {
        Self { m: vec![spec.multiplicity(); spec.num_types()], a: vec![0; spec.num_types()] }
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn num_types(&self) -> usize {
        self.m.len()
    }

    pub fn total(&self) -> usize {
        self.m.iter().sum()
    }

    pub fn forbidden_total(&self) -> usize {
        self.a.iter().sum()
    }

    fn check_card(&self, i: Card) -> Result<()> {
        if i == 0 || i > self.num_types() {
            return Err(Error::CardOutOfRange { card: i, num_types: self.num_types() });
        }
        Ok(())
    }
}

// Counting works with N(m, a) * prod(m_i!), an integer polynomial evaluation:
// grouping the inclusion-exclusion sum by the total number K of violated
// forbidden positions gives
//   N(m, a) * prod m_i! = sum_K (-1)^K (|m| - K)! [x^K] prod_i P_i(x),
//   P_i(x) = sum_k C(a_i, k) (m_i)_k x^k.

fn type_factor(m: usize, a: usize) -> Vec<BigInt> {
    (0..=m.min(a)).map(|k| BigInt::from(binomial(a, k) * falling(m, k))).collect()
}

fn poly_mul(p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact quotient of `q` by `p` where `p[0] == 1` and `p` divides `q`.
fn poly_div_exact(q: &[BigInt], p: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(p[0].is_one());
    if p.len() == 1 {
        return q.to_vec();
    }
    let len = q.len() + 1 - p.len();
    let mut rem = q.to_vec();
    let mut out = vec![BigInt::zero(); len];
    for k in 0..len {
        let c = rem[k].clone();
        if !c.is_zero() {
            for (j, pj) in p.iter().enumerate().skip(1) {
                rem[k + j] -= &c * pj;
            }
        }
        out[k] = c;
    }
    out
}

fn alternating_eval(poly: &[BigInt], total: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for (k, c) in poly.iter().enumerate().take(total + 1) {
        let term = c * BigInt::from(factorial(total - k));
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn product_poly(m: &[usize], a: &[usize]) -> Vec<BigInt> {
    m.iter().zip(a).fold(vec![BigInt::one()], |acc, (&mi, &ai)| {
        if mi.min(ai) == 0 {
            acc
        } else {
            poly_mul(&acc, &type_factor(mi, ai))
        }
    })
}

fn to_count(x: BigInt) -> BigUint {
    match x.sign() {
        Sign::Minus => panic!("negative count {x}"),
        _ => x.magnitude().clone(),
    }
}

/// `N(m, a)` without the strict `|a| < |m|` requirement; used for terminal
/// and successor states. Requires `|a| <= |m|`.
pub fn count_unchecked(m: &[usize], a: &[usize]) -> BigUint {
    let total: usize = m.iter().sum();
    let poly = product_poly(m, a);
    let scaled = alternating_eval(&poly, total);
    let denom: BigUint = m.iter().map(|&k| factorial(k)).product();
    let scaled = to_count(scaled);
    debug_assert!((&scaled % &denom).is_zero());
    scaled / denom
}

/// Number of `(m, a)`-permutations.
pub fn count_ma(state: &ConstraintState) -> BigUint {
    count_unchecked(&state.m, &state.a)
}

/// Iterator over all `(m, a)`-permutations in lexicographic order.
pub struct MaPermutations {
    counts: Vec<usize>,
    forbidden: Vec<Option<usize>>,
    word: Vec<usize>,
    next: Vec<usize>,
    yielded: bool,
    exhausted: bool,
}

impl Iterator for MaPermutations {
    type Item = Vec<Card>;

    fn next(&mut self) -> Option<Vec<Card>> {
        if self.exhausted {
            return None;
        }
        let total = self.forbidden.len();
        loop {
            let depth = self.word.len();
            if depth == total {
                if !self.yielded {
                    self.yielded = true;
                    return Some(self.word.iter().map(|&t| t + 1).collect());
                }
                self.yielded = false;
                self.pop();
                continue;
            }
            let start = self.next[depth];
            let choice = (start..self.counts.len())
                .find(|&t| self.counts[t] > 0 && self.forbidden[depth] != Some(t));
            match choice {
                Some(t) => {
                    self.counts[t] -= 1;
                    self.word.push(t);
                    self.next[depth] = t + 1;
                    if depth + 1 < total {
                        self.next[depth + 1] = 0;
                    }
                }
                None => {
                    if depth == 0 {
                        self.exhausted = true;
                        return None;
                    }
                    self.pop();
                }
            }
        }
    }
}

impl MaPermutations {
    fn pop(&mut self) {
        if let Some(t) = self.word.pop() {
            self.counts[t] += 1;
        }
    }
}

/// Streams every `(m, a)`-permutation exactly once. Errors if `|m|` exceeds
/// `limit`.
pub fn enumerate_ma(state: &ConstraintState, limit: usize) -> Result<MaPermutations> {
    let total = state.total();
    if total > limit {
        return Err(crate::error::limit_exceeded("word length", total, limit));
    }
    let mut forbidden = Vec::with_capacity(total);
    for (t, &k) in state.a.iter().enumerate() {
        forbidden.extend(std::iter::repeat_n(Some(t), k));
    }
    forbidden.resize(total, None);
    Ok(MaPermutations {
        counts: state.m.clone(),
        forbidden,
        word: Vec::with_capacity(total),
        next: vec![0; total],
        yielded: false,
        exhausted: false,
    })
}

/// Fraction of `(m, a)`-permutations ending in `i`: the posterior probability
/// that the next card is `i`.
pub fn last_fraction(state: &ConstraintState, i: Card) -> Result<BigRational> {
    state.check_card(i)?;
    let dist = next_card_distribution(state)?;
    Ok(dist[i - 1].clone())
}

/// `(f_1, ..., f_n)`; sums to exactly one.
pub fn next_card_distribution(state: &ConstraintState) -> Result<Vec<BigRational>> {
    distribution_unchecked(&state.m, &state.a)
}

/// Next-card distribution for any `(m, a)` with `|a| < |m|`. Errors when no
/// `(m, a)`-permutation exists.
pub(crate) fn distribution_unchecked(m: &[usize], a: &[usize]) -> Result<Vec<BigRational>> {
    let total: usize = m.iter().sum();
    let poly = product_poly(m, a);
    let base = alternating_eval(&poly, total);
    if !base.is_positive() {
        return Err(Error::InvalidConstraint(format!("no (m,a)-permutations for m={m:?}, a={a:?}")));
    }
    let mut out: Vec<BigRational> = vec![BigRational::zero(); m.len()];
    // Types sharing (m_i, a_i) share f_i.
    let mut seen: Vec<((usize, usize), BigRational)> = Vec::new();
    for i in 0..m.len() {
        if m[i] == 0 {
            continue;
        }
        let key = (m[i], a[i]);
        if let Some((_, f)) = seen.iter().find(|(k, _)| *k == key) {
            out[i] = f.clone();
            continue;
        }
        let own = type_factor(m[i], a[i]);
        let reduced = type_factor(m[i] - 1, a[i]);
        let without = poly_div_exact(&poly, &own);
        let with_reduced = poly_mul(&without, &reduced);
        let scaled = alternating_eval(&with_reduced, total - 1) * BigInt::from(m[i]);
        let f = BigRational::new(scaled, base.clone());
        seen.push((key, f.clone()));
        out[i] = f;
    }
    Ok(out)
}

/// `|S_{m,n}| = (mn)! / (m!)^n`.
pub fn multinomial_size(spec: &DeckSpec) -> BigUint {
    factorial(spec.total()) / factorial(spec.multiplicity()).pow(spec.num_types() as u32)
}

/// Exact probability mass function on `0..len`.
#[derive(Clone, Debug)]
pub struct Pmf(Vec<BigRational>);

impl PartialEq for Pmf {
    /// Equal as distributions: trailing zero mass is ignored.
    fn eq(&self, other: &Self) -> bool {
        let len = self.0.len().max(other.0.len());
        (0..len).all(|k| self.prob(k) == other.prob(k))
    }
}

impl Eq for Pmf {}

impl Pmf {
    /// Wraps probabilities, rejecting negative mass or a total other than one.
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::NotNormalized("negative mass".into()));
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(crate::numeric::format_ratio(&total)));
        }
        Ok(Self(probs))
    }

    pub fn point_mass(at: usize) -> Self {
        let mut probs = vec![BigRational::zero(); at + 1];
        probs[at] = BigRational::one();
        Self(probs)
    }

    /// Normalizes integer weights.
    pub fn from_counts(counts: &[BigUint]) -> Result<Self> {
        let total: BigUint = counts.iter().sum();
        if total.is_zero() {
            return Err(Error::NotNormalized("0".into()));
        }
        let total = BigInt::from(total);
        Ok(Self(counts.iter().map(|c| BigRational::new(BigInt::from(c.clone()), total.clone())).collect()))
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn prob(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest index in the stored range.
    pub fn max_value(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// `Pr[X >= x]`.
    pub fn survival(&self, x: usize) -> BigRational {
        self.0.iter().skip(x).sum()
    }

    pub fn mean(&self) -> BigRational {
        self.0.iter().enumerate().map(|(k, p)| p * BigInt::from(k)).sum()
    }

    /// Distribution of the sum of two independent variables.
    pub fn convolve(&self, other: &Pmf) -> Pmf {
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, p) in self.0.iter().enumerate() {
            for (j, q) in other.0.iter().enumerate() {
                out[i + j] += p * q;
            }
        }
        Pmf(out)
    }
}

/// `Binomial(trials, p)` with exact rational `p`.
pub fn binomial_pmf(trials: usize, p: &BigRational) -> Result<Pmf> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0,1]")));
    }
    let q = BigRational::one() - p;
    let probs = (0..=trials)
        .map(|k| {
            BigRational::from_integer(BigInt::from(binomial(trials, k)))
                * num_traits::pow(p.clone(), k)
                * num_traits::pow(q.clone(), trials - k)
        })
        .collect();
    Ok(Pmf(probs))
}

/// `Pr[S = k]` for `S ~ Hyp(N, m, b)`: good cards among the first `b` draws
/// from `N` cards of which `m` are good. Normalized by `C(N, m)`.
pub fn hypergeom_pmf(n_total: usize, good: usize, draws: usize, k: usize) -> Result<BigRational> {
    if good > n_total || draws > n_total {
        return Err(Error::InvalidParameter(format!(
            "hypergeometric needs m, b <= N, got N={n_total}, m={good}, b={draws}"
        )));
    }
    let lo = (good + draws).saturating_sub(n_total);
    let hi = good.min(draws);
    if k < lo || k > hi {
        return Ok(BigRational::zero());
    }
    let num = binomial(draws, k) * binomial(n_total - draws, good - k);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(binomial(n_total, good))))
}

/// Full `Hyp(N, m, b)` pmf on `0..=min(m, b)`.
pub fn hypergeom_distribution(n_total: usize, good: usize, draws: usize) -> Result<Pmf> {
    let hi = good.min(draws);
    let probs = (0..=hi).map(|k| hypergeom_pmf(n_total, good, draws, k)).collect::<Result<Vec<_>>>()?;
    Ok(Pmf(probs))
}

/// `exp(-lambda^2 p N / 2)`, the upper bound on `Pr[B(N, p) > (1 + lambda) p N]`.
pub fn chernoff_rhs(trials: u64, p: f64, lambda: f64) -> f64 {
    (-0.5 * lambda * lambda * p * trials as f64).exp()
}

/// Exact `Pr[B(N, p) > (1 + lambda) p N]`.
pub fn binomial_upper_tail(trials: usize, p: &BigRational, lambda: &BigRational) -> Result<BigRational> {
    let pmf = binomial_pmf(trials, p)?;
    let threshold = (BigRational::one() + lambda) * p * BigInt::from(trials);
    Ok(pmf
        .probs()
        .iter()
        .enumerate()
        .filter(|(k, _)| BigRational::from_integer(BigInt::from(*k)) > threshold)
        .map(|(_, q)| q)
        .sum())
}
