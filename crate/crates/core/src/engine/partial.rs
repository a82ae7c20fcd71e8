use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::table::{ValueRow, ValueTable};
use super::Sense;
use crate::combinatorics::distribution_unchecked;
use crate::error::{limit_exceeded, Result};
use crate::model::{Card, DeckSpec};

/// Type pair `(copies not yet found, incorrect guesses)`.
type Pair = (u16, u16);
/// Sorted multiset of pairs; invariant under relabeling types.
type PartialKey = Vec<Pair>;

fn key_of(m: &[usize], a: &[usize]) -> PartialKey {
    let mut key: PartialKey = m.iter().zip(a).map(|(&x, &y)| (x as u16, y as u16)).collect();
    key.sort_unstable();
    key
}

fn is_terminal(key: &PartialKey) -> bool {
    let (m, a) = key.iter().fold((0usize, 0usize), |(m, a), p| (m + p.0 as usize, a + p.1 as usize));
    m == a
}

fn replace_pair(key: &PartialKey, from: Pair, to: Pair) -> PartialKey {
    let mut next = key.clone();
    let pos = next.iter().position(|p| *p == from).expect("pair present");
    next[pos] = to;
    next.sort_unstable();
    next
}

/// Memoized partial-feedback dynamic program over canonical `(m, a)` states.
///
/// `V(m, a) = opt_g [ f_g (1 + V(m - e_g, a)) + (1 - f_g) V(m, a + e_g) ]`,
/// with `V = 0` once no draws remain (`|a| = |m|`). Guessing a type with no
/// copies left is allowed and has `f_g = 0`.
pub struct PartialSolver {
    spec: DeckSpec,
    sense: Sense,
    limit: usize,
    values: HashMap<PartialKey, (BigRational, Vec<Pair>)>,
}

struct ActionValue {
    pair: Pair,
    value: BigRational,
}

impl PartialSolver {
    pub fn new(spec: &DeckSpec, sense: Sense, limit: usize) -> Self {
        Self { spec: *spec, sense, limit, values: HashMap::new() }
    }

    pub fn spec(&self) -> &DeckSpec {
        &self.spec
    }

    pub fn root_value(&mut self) -> Result<BigRational> {
        let n = self.spec.num_types();
        let key = key_of(&vec![self.spec.multiplicity(); n], &vec![0; n]);
        self.value(&key)
    }

    pub fn states(&self) -> usize {
        self.values.len()
    }

    fn action_values(&mut self, key: &PartialKey) -> Result<Vec<ActionValue>> {
        let (m, a): (Vec<usize>, Vec<usize>) = key.iter().map(|&(x, y)| (x as usize, y as usize)).unzip();
        let dist = distribution_unchecked(&m, &a)?;
        let mut out: Vec<ActionValue> = Vec::new();
        for (idx, &pair) in key.iter().enumerate() {
            if out.iter().any(|av| av.pair == pair) {
                continue;
            }
            let f = dist[idx].clone();
            let mut value = BigRational::zero();
            if !f.is_zero() {
                let hit = self.value(&replace_pair(key, pair, (pair.0 - 1, pair.1)))?;
                value += &f * (BigRational::one() + hit);
            }
            if !f.is_one() {
                let miss = self.value(&replace_pair(key, pair, (pair.0, pair.1 + 1)))?;
                value += (BigRational::one() - &f) * miss;
            }
            out.push(ActionValue { pair, value });
        }
        Ok(out)
    }

    fn value(&mut self, key: &PartialKey) -> Result<BigRational> {
        if is_terminal(key) {
            return Ok(BigRational::zero());
        }
        if let Some((v, _)) = self.values.get(key) {
            return Ok(v.clone());
        }
        if self.values.len() >= self.limit {
            return Err(limit_exceeded("partial-feedback states", self.values.len(), self.limit));
        }
        let actions = self.action_values(key)?;
        let mut best = actions[0].value.clone();
        for av in &actions[1..] {
            if self.sense.better(&av.value, &best) {
                best = av.value.clone();
            }
        }
        let optimal: Vec<Pair> = actions.iter().filter(|av| av.value == best).map(|av| av.pair).collect();
        self.values.insert(key.clone(), (best.clone(), optimal));
        Ok(best)
    }

    /// Value of an arbitrary (not necessarily canonical) state.
    pub fn state_value(&mut self, m: &[usize], a: &[usize]) -> Result<BigRational> {
        self.value(&key_of(m, a))
    }

    /// Optimal guesses (1-based types) at a labeled state, with the posterior
    /// next-card probability of each type.
    pub fn optimal_types(&mut self, m: &[usize], a: &[usize]) -> Result<(Vec<Card>, Vec<BigRational>)> {
        let key = key_of(m, a);
        self.value(&key)?;
        let optimal = self.values[&key].1.clone();
        let dist = distribution_unchecked(m, a)?;
        let types = (0..m.len())
            .filter(|&i| optimal.contains(&(m[i] as u16, a[i] as u16)))
            .map(|i| i + 1)
            .collect();
        Ok((types, dist))
    }

    pub fn value_table(&self) -> ValueTable {
        let fmt_pair = |p: &Pair| format!("{}:{}", p.0, p.1);
        let mut rows: Vec<ValueRow> = self
            .values
            .iter()
            .map(|(key, (value, actions))| ValueRow {
                state: key.iter().map(fmt_pair).collect::<Vec<_>>().join("|"),
                value: value.clone(),
                actions: actions.iter().map(fmt_pair).collect::<Vec<_>>().join(";"),
            })
            .collect();
        rows.sort_by(|a, b| a.state.cmp(&b.state));
        ValueTable { rows }
    }
}

/// Optimal partial-feedback value `P^{+/-}(m, n)`.
pub fn optimal_partial(spec: &DeckSpec, sense: Sense, limit: usize) -> Result<BigRational> {
    PartialSolver::new(spec, sense, limit).root_value()
}

/// An optimal partial-feedback policy: optimal action pairs per canonical
/// state, ties broken to the lowest type index at play time.
#[derive(Debug)]
pub struct PolicyTable {
    spec: DeckSpec,
    sense: Sense,
    value: BigRational,
    actions: HashMap<PartialKey, Vec<Pair>>,
}

impl PolicyTable {
    pub fn spec(&self) -> &DeckSpec {
        &self.spec
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Lowest-index optimal guess at the labeled state.
    pub fn action(&self, m: &[usize], a: &[usize]) -> Card {
        let key = key_of(m, a);
        let optimal = self.actions.get(&key).expect("policy covers every reachable state");
        (0..m.len())
            .find(|&i| optimal.contains(&(m[i] as u16, a[i] as u16)))
            .map(|i| i + 1)
            .expect("an optimal pair occurs in the state")
    }
}

pub fn optimal_partial_policy(spec: &DeckSpec, sense: Sense, limit: usize) -> Result<PolicyTable> {
    let mut solver = PartialSolver::new(spec, sense, limit);
    let value = solver.root_value()?;
    let actions = solver.values.into_iter().map(|(k, (_, acts))| (k, acts)).collect();
    Ok(PolicyTable { spec: *spec, sense, value, actions })
}

/// A state reached by an incorrect optimal guess of `guess` where guessing
/// `guess` again is no longer optimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PersistenceViolation {
    /// State before the incorrect guess.
    pub before_m: Vec<usize>,
    pub before_a: Vec<usize>,
    pub guess: Card,
    /// Optimal guesses in the successor state.
    pub successor_optimal: Vec<Card>,
}

/// Explores every state reachable under some optimal (max) policy and
/// reports each incorrect optimal guess after which the same type stops
/// being optimal.
pub fn probe_persistence(spec: &DeckSpec, limit: usize) -> Result<Vec<PersistenceViolation>> {
    let mut solver = PartialSolver::new(spec, Sense::Max, limit);
    solver.root_value()?;
    let n = spec.num_types();
    let start = (vec![spec.multiplicity(); n], vec![0usize; n]);
    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    let mut violations = Vec::new();
    while let Some((m, a)) = queue.pop_front() {
        if m.iter().sum::<usize>() == a.iter().sum::<usize>() {
            continue;
        }
        let (optimal, dist) = solver.optimal_types(&m, &a)?;
        for &g in &optimal {
            let f = &dist[g - 1];
            if !f.is_zero() {
                let mut next_m = m.clone();
                next_m[g - 1] -= 1;
                let next = (next_m, a.clone());
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            if !f.is_one() {
                let mut next_a = a.clone();
                next_a[g - 1] += 1;
                if m.iter().sum::<usize>() > next_a.iter().sum::<usize>() {
                    let (succ_opt, _) = solver.optimal_types(&m, &next_a)?;
                    if !succ_opt.contains(&g) {
                        violations.push(PersistenceViolation {
                            before_m: m.clone(),
                            before_a: a.clone(),
                            guess: g,
                            successor_optimal: succ_opt,
                        });
                    }
                }
                let next = (m.clone(), next_a);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn deck(m: usize, n: usize) -> DeckSpec {
        DeckSpec::new(m, n).unwrap()
    }

    #[test]
    fn small_optima() {
        assert_eq!(optimal_partial(&deck(1, 2), Sense::Max, 1000).unwrap(), ratio(3, 2));
        assert_eq!(optimal_partial(&deck(1, 3), Sense::Max, 1000).unwrap(), ratio(5, 3));
        assert_eq!(optimal_partial(&deck(2, 2), Sense::Max, 1000).unwrap(), ratio(17, 6));
    }

    #[test]
    fn single_type_decks() {
        assert_eq!(optimal_partial(&deck(3, 1), Sense::Min, 1000).unwrap(), ratio(3, 1));
    }

    #[test]
    fn limit_enforced() {
        assert!(optimal_partial(&deck(2, 4), Sense::Max, 3).is_err());
    }

    #[test]
    fn policy_replays_tie_break() {
        let p = optimal_partial_policy(&deck(1, 3), Sense::Max, 1000).unwrap();
        assert_eq!(p.value(), &ratio(5, 3));
        assert_eq!(p.action(&[1, 1, 1], &[0, 0, 0]), 1);
        assert!(!p.is_empty());
    }

    #[test]
    fn persistence_small() {
        assert!(probe_persistence(&deck(1, 2), 1000).unwrap().is_empty());
        assert!(probe_persistence(&deck(2, 2), 1000).unwrap().is_empty());
    }

    #[test]
    fn value_table_has_root() {
        let mut s = PartialSolver::new(&deck(1, 2), Sense::Max, 100);
        s.root_value().unwrap();
        let t = s.value_table();
        let root = t.rows.iter().find(|r| r.state == "1:0|1:0").unwrap();
        assert_eq!(root.value, ratio(3, 2));
        assert_eq!(root.actions, "1:0");
        assert!(t.to_csv().starts_with("state,value_num,value_den,value,optimal_actions\n"));
    }
}
