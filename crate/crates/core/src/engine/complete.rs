use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::table::{ValueRow, ValueTable};
use super::{Sense, DEFAULT_STATE_LIMIT};
use crate::error::{limit_exceeded, Result};
use crate::model::DeckSpec;

/// Remaining copies per type, sorted descending (zeros kept).
type CountKey = Vec<u16>;

struct CompleteSolver {
    sense: Sense,
    limit: usize,
    values: HashMap<CountKey, (BigRational, Vec<u16>)>,
}

impl CompleteSolver {
    // V(c) = opt_i c_i/S + sum_j (c_j/S) V(c - e_j): the card is revealed
    // whatever is guessed, so the guess only affects the immediate reward.
    fn value(&mut self, counts: &CountKey) -> Result<BigRational> {
        if let Some((v, _)) = self.values.get(counts) {
            return Ok(v.clone());
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total == 0 {
            return Ok(BigRational::zero());
        }
        if self.values.len() >= self.limit {
            return Err(limit_exceeded("complete-feedback states", self.values.len(), self.limit));
        }
        let s = BigInt::from(total);
        let mut distinct: Vec<(u16, usize)> = Vec::new();
        for &c in counts {
            match distinct.last_mut() {
                Some((v, k)) if *v == c => *k += 1,
                _ => distinct.push((c, 1)),
            }
        }
        let target = match self.sense {
            Sense::Max => distinct.first().map(|d| d.0),
            Sense::Min => distinct.last().map(|d| d.0),
        }
        .unwrap_or(0);
        let immediate = BigRational::new(BigInt::from(target), s.clone());
        let mut future = BigRational::zero();
        let mut pos = 0;
        for &(c, mult) in &distinct {
            if c > 0 {
                let mut next = counts.clone();
                // Decrementing the last entry equal to c keeps the key sorted.
                next[pos + mult - 1] -= 1;
                let v = self.value(&next)?;
                future += v * BigRational::new(BigInt::from(c as u64 * mult as u64), s.clone());
            }
            pos += mult;
        }
        let v = immediate + future;
        self.values.insert(counts.clone(), (v.clone(), vec![target]));
        Ok(v)
    }
}

/// Optimal complete-feedback value `C^{+/-}(m, n)`.
pub fn optimal_complete(spec: &DeckSpec, sense: Sense) -> Result<BigRational> {
    optimal_complete_with_limit(spec, sense, DEFAULT_STATE_LIMIT)
}

pub fn optimal_complete_with_limit(spec: &DeckSpec, sense: Sense, limit: usize) -> Result<BigRational> {
    let mut solver = CompleteSolver { sense, limit, values: HashMap::new() };
    solver.value(&vec![spec.multiplicity() as u16; spec.num_types()])
}

/// Value table over every canonical count vector reachable from a full deck.
/// The optimal action column lists the remaining-count values worth guessing.
pub fn complete_value_table(spec: &DeckSpec, sense: Sense, limit: usize) -> Result<ValueTable> {
    let mut solver = CompleteSolver { sense, limit, values: HashMap::new() };
    solver.value(&vec![spec.multiplicity() as u16; spec.num_types()])?;
    let mut rows: Vec<ValueRow> = solver
        .values
        .into_iter()
        .map(|(key, (value, actions))| ValueRow {
            state: key.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|"),
            value,
            actions: actions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
        })
        .collect();
    rows.sort_by(|a, b| a.state.cmp(&b.state));
    Ok(ValueTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{harmonic, ratio};

    fn deck(m: usize, n: usize) -> DeckSpec {
        DeckSpec::new(m, n).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(optimal_complete(&deck(1, 3), Sense::Max).unwrap(), ratio(11, 6));
        assert_eq!(optimal_complete(&deck(1, 3), Sense::Min).unwrap(), ratio(1, 3));
        assert_eq!(optimal_complete(&deck(2, 2), Sense::Max).unwrap(), ratio(17, 6));
        assert_eq!(optimal_complete(&deck(1, 10), Sense::Max).unwrap(), harmonic(10));
    }

    #[test]
    fn one_type_always_correct() {
        assert_eq!(optimal_complete(&deck(5, 1), Sense::Min).unwrap(), ratio(5, 1));
    }

    #[test]
    fn state_limit() {
        assert!(optimal_complete_with_limit(&deck(4, 13), Sense::Max, 10).is_err());
    }

    #[test]
    fn value_table_rows() {
        let t = complete_value_table(&deck(2, 2), Sense::Max, 100).unwrap();
        let root = t.rows.iter().find(|r| r.state == "2|2").unwrap();
        assert_eq!(root.value, ratio(17, 6));
        assert_eq!(root.actions, "2");
    }
}
