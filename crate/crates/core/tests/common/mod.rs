//! Brute-force oracles shared by the integration tests. None of these use
//! the library's counting or dynamic-programming code.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// All distinct arrangements of the multiset with `counts[i]` copies of
/// `i + 1`, by recursive choice of the next symbol.
pub fn arrangements(counts: &[usize]) -> Vec<Vec<u8>> {
    fn go(counts: &mut Vec<usize>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if counts.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                cur.push(i as u8 + 1);
                go(counts, cur, out);
                cur.pop();
                counts[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut counts.to_vec(), &mut Vec::new(), &mut out);
    out
}

pub fn deck_words(m: usize, n: usize) -> Vec<Vec<u8>> {
    arrangements(&vec![m; n])
}

/// `(m, a)`-permutations by filtering every arrangement: the first `a_1`
/// positions avoid 1, the next `a_2` avoid 2, and so on.
pub fn filtered_ma(m: &[usize], a: &[usize]) -> Vec<Vec<u8>> {
    let mut forbidden = Vec::new();
    for (i, &k) in a.iter().enumerate() {
        forbidden.extend(std::iter::repeat_n(i as u8 + 1, k));
    }
    arrangements(m).into_iter().filter(|w| forbidden.iter().zip(w).all(|(f, c)| f != c)).collect()
}

fn fact(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn choose(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    fact(n) / (fact(k) * fact(n - k))
}

/// Inclusion-exclusion summed term by term over every vector `k <= a`:
/// `sum (-1)^{|k|} prod C(a_i, k_i) * (|m| - |k|)! / prod (m_i - k_i)!`.
pub fn naive_count(m: &[usize], a: &[usize]) -> BigInt {
    let mut total = BigInt::zero();
    let mut k = vec![0usize; m.len()];
    loop {
        if k.iter().zip(m).all(|(ki, mi)| ki <= mi) {
            let kk: usize = k.iter().sum();
            let rest: usize = m.iter().sum::<usize>() - kk;
            let mut term = BigInt::from(fact(rest));
            for i in 0..m.len() {
                term *= BigInt::from(choose(a[i], k[i]));
                term /= BigInt::from(fact(m[i] - k[i]));
            }
            if kk.is_odd() {
                total -= term;
            } else {
                total += term;
            }
        }
        // Odometer over 0..=a_i.
        let Some(pos) = (0..k.len()).rev().find(|&i| k[i] < a[i]) else { break };
        k[pos] += 1;
        for v in &mut k[pos + 1..] {
            *v = 0;
        }
    }
    total
}

/// `L(w)` by asking, for decreasing `p`, whether `1..=p` is a subsequence.
pub fn brute_l(word: &[u8]) -> usize {
    let is_subseq = |p: usize| {
        let mut it = word.iter();
        (1..=p as u8).all(|want| it.any(|&c| c == want))
    };
    (0..=word.len()).rev().find(|&p| is_subseq(p)).unwrap()
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Max,
    Min,
}

fn better(goal: Goal, a: &BigRational, b: &BigRational) -> bool {
    match goal {
        Goal::Max => a > b,
        Goal::Min => a < b,
    }
}

/// Posterior over remaining suffixes: sorted `(suffix, weight)` with weights
/// divided by their gcd.
type Posterior = Vec<(Vec<u8>, u64)>;

fn normalize(mut post: Posterior) -> Posterior {
    post.sort();
    let mut merged: Posterior = Vec::with_capacity(post.len());
    for (w, c) in post {
        match merged.last_mut() {
            Some((lw, lc)) if *lw == w => *lc += c,
            _ => merged.push((w, c)),
        }
    }
    let g = merged.iter().fold(0u64, |g, (_, c)| g.gcd(c));
    for (_, c) in &mut merged {
        *c /= g.max(1);
    }
    merged
}

/// Game value by expectimax over explicit posteriors on the unseen suffix.
/// `partial` selects partial feedback; otherwise the card is revealed.
pub struct TreeSearch {
    n: u8,
    goal: Goal,
    partial: bool,
    memo: HashMap<Posterior, BigRational>,
}

impl TreeSearch {
    pub fn new(n: usize, goal: Goal, partial: bool) -> Self {
        Self { n: n as u8, goal, partial, memo: HashMap::new() }
    }

    pub fn solve(&mut self, m: usize, n: usize) -> BigRational {
        let post = normalize(deck_words(m, n).into_iter().map(|w| (w, 1)).collect());
        self.value(post)
    }

    fn value(&mut self, post: Posterior) -> BigRational {
        if post[0].0.is_empty() {
            return BigRational::zero();
        }
        if let Some(v) = self.memo.get(&post) {
            return v.clone();
        }
        let total: u64 = post.iter().map(|(_, c)| c).sum();
        let mut best: Option<BigRational> = None;
        for g in 1..=self.n {
            let mut v = BigRational::zero();
            if self.partial {
                let (hit, miss): (Posterior, Posterior) = post.iter().cloned().partition(|(w, _)| w[0] == g);
                for (part, correct) in [(hit, true), (miss, false)] {
                    let mass: u64 = part.iter().map(|(_, c)| c).sum();
                    if mass == 0 {
                        continue;
                    }
                    let next = normalize(part.into_iter().map(|(w, c)| (w[1..].to_vec(), c)).collect());
                    let reward = if correct { BigRational::one() } else { BigRational::zero() };
                    v += q(mass as i64, total as i64) * (reward + self.value(next));
                }
            } else {
                for card in 1..=self.n {
                    let part: Posterior = post.iter().filter(|(w, _)| w[0] == card).cloned().collect();
                    let mass: u64 = part.iter().map(|(_, c)| c).sum();
                    if mass == 0 {
                        continue;
                    }
                    let next = normalize(part.into_iter().map(|(w, c)| (w[1..].to_vec(), c)).collect());
                    let reward = if card == g { BigRational::one() } else { BigRational::zero() };
                    v += q(mass as i64, total as i64) * (reward + self.value(next));
                }
            }
            if best.as_ref().is_none_or(|b| better(self.goal, &v, b)) {
                best = Some(v);
            }
        }
        let best = best.unwrap();
        self.memo.insert(post, best.clone());
        best
    }
}

/// Posterior next-card law after a partial-feedback history, by filtering
/// every deck word consistent with the history.
pub fn posterior_next(m: usize, n: usize, history: &[(u8, bool)]) -> Option<Vec<BigRational>> {
    let t = history.len();
    let words: Vec<Vec<u8>> = deck_words(m, n)
        .into_iter()
        .filter(|w| history.iter().enumerate().all(|(i, &(g, ok))| (w[i] == g) == ok))
        .collect();
    if words.is_empty() || t >= m * n {
        return None;
    }
    let mut counts = vec![0i64; n];
    for w in &words {
        counts[w[t] as usize - 1] += 1;
    }
    Some(counts.iter().map(|&c| q(c, words.len() as i64)).collect())
}
