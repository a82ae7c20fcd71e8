//! Exact integer and rational arithmetic helpers.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative count.
pub type ExactCount = BigUint;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type ExactRational = BigRational;

/// Factorials below this bound are served from a shared table.
pub const FACTORIAL_CACHE_CAP: usize = 512;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_CACHE_CAP);
        let mut acc = BigUint::one();
        table.push(acc.clone());
        for k in 1..FACTORIAL_CACHE_CAP {
            acc *= k as u64;
            table.push(acc.clone());
        }
        table
    })
}

pub fn factorial(k: usize) -> BigUint {
    let table = factorial_table();
    if k < table.len() {
        return table[k].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for j in table.len()..=k {
        acc *= j as u64;
    }
    acc
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= (n - j) as u64;
        acc /= (j + 1) as u64;
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= (n - j) as u64;
    }
    acc
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn from_count(c: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(c.clone()))
}

pub fn counts_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {x}")))
}

/// `"num/den"` encoding; integers still carry an explicit denominator.
pub fn format_ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Six-decimal rendering used alongside exact values.
pub fn format_decimal(x: f64) -> String {
    format!("{x:.6}")
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, k| acc + ratio(1, k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_past_cache() {
        let big = factorial(FACTORIAL_CACHE_CAP + 3);
        let expect = factorial(FACTORIAL_CACHE_CAP - 1)
            * BigUint::from(FACTORIAL_CACHE_CAP as u64)
            * BigUint::from((FACTORIAL_CACHE_CAP + 1) as u64)
            * BigUint::from((FACTORIAL_CACHE_CAP + 2) as u64)
            * BigUint::from((FACTORIAL_CACHE_CAP + 3) as u64);
        assert_eq!(big, expect);
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(52, 4), BigUint::from(270725u32));
        assert_eq!(falling(5, 2), BigUint::from(20u32));
    }

    #[test]
    fn ratio_encoding() {
        let q = ratio(17, 6);
        assert_eq!(format_ratio(&q), "17/6");
        assert_eq!(parse_ratio("17/6").unwrap(), q);
        assert_eq!(parse_ratio("34/12").unwrap(), q);
        assert_eq!(format_ratio(&ratio(3, 1)), "3/1");
        assert!(parse_ratio("1/0").is_err());
        assert_eq!(format_decimal(to_f64(&q)), "2.833333");
    }

    #[test]
    fn harmonic_small() {
        assert_eq!(harmonic(3), ratio(11, 6));
        assert_eq!(harmonic(0), BigRational::zero());
    }
}
