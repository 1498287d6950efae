//! Exact arithmetic shared by every engine: big rationals, memoized binomial
//! coefficients and harmonic numbers, and a summation kernel for series whose
//! denominators have known prime factorizations.
//!
//! Everything here is exact. Floating point only appears in [`to_f64`] and
//! [`format_decimal`], which are meant for the output boundary.

use std::collections::BTreeMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

/// Rows of Pascal's triangle are cached up to this index; larger rows fall back
/// to the multiplicative formula.
const PASCAL_CACHE_ROWS: usize = 1024;

static PASCAL: RwLock<Vec<Vec<BigUint>>> = RwLock::new(Vec::new());
static HARMONIC: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// `num / den` as a reduced rational. Panics if `den == 0`.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> ExactRational {
    BigRational::new(num.into(), den.into())
}

pub fn integer(n: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(n.into())
}

pub fn from_biguint(n: BigUint) -> ExactRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// Binomial coefficient with the convention that any negative or impossible
/// argument (`k < 0`, `n < 0`, `k > n`) yields zero.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let (n, k) = (n as usize, k as usize);
    if n < PASCAL_CACHE_ROWS {
        return pascal_entry(n, k);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// [`binomial`] as a signed integer, convenient inside alternating sums.
pub fn binomial_int(n: i64, k: i64) -> BigInt {
    BigInt::from_biguint(Sign::Plus, binomial(n, k))
}

fn pascal_entry(n: usize, k: usize) -> BigUint {
    {
        let rows = PASCAL.read().expect("pascal cache poisoned");
        if let Some(row) = rows.get(n) {
            return row[k].clone();
        }
    }
    let mut rows = PASCAL.write().expect("pascal cache poisoned");
    if rows.is_empty() {
        rows.push(vec![BigUint::one()]);
    }
    while rows.len() <= n {
        let prev = rows.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() + 1);
        next.push(BigUint::one());
        for w in prev.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        rows.push(next);
    }
    rows[n][k].clone()
}

/// `H_n = 1 + 1/2 + ... + 1/n` exactly, with `H_0 = 0`.
pub fn harmonic(n: u64) -> ExactRational {
    let n = n as usize;
    {
        let cache = HARMONIC.read().expect("harmonic cache poisoned");
        if let Some(h) = cache.get(n) {
            return h.clone();
        }
    }
    let mut cache = HARMONIC.write().expect("harmonic cache poisoned");
    if cache.is_empty() {
        cache.push(BigRational::zero());
    }
    while cache.len() <= n {
        let k = cache.len();
        let next = cache.last().unwrap() + ratio(1, k as u64);
        cache.push(next);
    }
    cache[n].clone()
}

/// Round-to-nearest conversion.
pub fn to_f64(r: &ExactRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Digits after the decimal point in [`format_decimal`].
pub const DECIMAL_PLACES: usize = 15;

/// Exact rounding to [`DECIMAL_PLACES`] places, halves away from zero, with
/// trailing zeros dropped down to one fractional digit (`3.666666666666667`, `5.0`).
pub fn format_decimal(r: &ExactRational) -> String {
    let scale = BigInt::from(10u32).pow(DECIMAL_PLACES as u32);
    let scaled = (r.abs() * &scale).round().to_integer();
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    let frac = format!("{frac:0>width$}", width = DECIMAL_PLACES);
    let frac = frac.trim_end_matches('0');
    let frac = if frac.is_empty() { "0" } else { frac };
    format!("{sign}{whole}.{frac}")
}

/// Parses `p/q`, a bare integer, or a plain decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let text = text.trim();
    let bad = || Error::input(format!("cannot parse `{text}` as a rational"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::input(format!("zero denominator in `{text}`")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// `sum_s c_s / C(m, s)` over one row of Pascal's triangle.
///
/// Every `1 / C(m, s)` equals `s! (m - s)! / m!`, so the sum is one big-integer
/// numerator over `m!` and a single reduction at the end.
pub fn sum_over_binomial_row(m: u64, terms: &[(u64, BigInt)]) -> ExactRational {
    let m_us = m as usize;
    let mut fact = Vec::with_capacity(m_us + 1);
    fact.push(BigInt::one());
    for i in 1..=m_us {
        let next = &fact[i - 1] * BigInt::from(i);
        fact.push(next);
    }
    let numer: BigInt = terms
        .par_iter()
        .map(|(s, c)| {
            assert!(*s <= m, "index {s} outside row {m}");
            c * &fact[*s as usize] * &fact[m_us - *s as usize]
        })
        .sum();
    BigRational::new(numer, fact[m_us].clone())
}

/// Smallest-prime-factor table for `0..=limit`.
pub(crate) fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Prime factorization by trial division. Intended for small inputs.
pub(crate) fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// One summand `numer / prod(prime^exp)`.
#[derive(Clone, Debug)]
pub(crate) struct FactoredTerm {
    pub numer: BigInt,
    pub den: BTreeMap<u64, u32>,
}

/// Sums terms whose denominators are given as prime factorizations.
///
/// Terms are merged pairwise over the least common multiple of their
/// denominators, which is read off the exponent maps, so no big gcd is ever
/// taken. The final fraction is reduced prime by prime.
pub(crate) fn sum_factored(terms: Vec<FactoredTerm>) -> ExactRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    let merged = merge_range(terms);
    reduce_factored(merged)
}

fn merge_range(mut terms: Vec<FactoredTerm>) -> FactoredTerm {
    if terms.len() == 1 {
        return terms.pop().unwrap();
    }
    let right = terms.split_off(terms.len() / 2);
    let (a, b) = rayon::join(|| merge_range(terms), || merge_range(right));
    merge_pair(a, b)
}

fn merge_pair(a: FactoredTerm, b: FactoredTerm) -> FactoredTerm {
    let mut lcm = a.den.clone();
    for (&p, &e) in &b.den {
        let slot = lcm.entry(p).or_insert(0);
        *slot = (*slot).max(e);
    }
    let cofactor = |den: &BTreeMap<u64, u32>| {
        let powers: Vec<BigUint> = lcm
            .iter()
            .filter_map(|(&p, &e)| {
                let have = den.get(&p).copied().unwrap_or(0);
                (e > have).then(|| num_traits::pow(BigUint::from(p), (e - have) as usize))
            })
            .collect();
        BigInt::from_biguint(Sign::Plus, product_tree(powers))
    };
    let numer = a.numer * cofactor(&a.den) + b.numer * cofactor(&b.den);
    FactoredTerm { numer, den: lcm }
}

fn reduce_factored(term: FactoredTerm) -> ExactRational {
    let FactoredTerm { mut numer, den } = term;
    if numer.is_zero() {
        return BigRational::zero();
    }
    let mut remaining = Vec::with_capacity(den.len());
    for (p, mut e) in den {
        let prime = BigInt::from(p);
        while e > 0 {
            let (q, r) = numer.div_rem(&prime);
            if !r.is_zero() {
                break;
            }
            numer = q;
            e -= 1;
        }
        if e > 0 {
            remaining.push(num_traits::pow(BigUint::from(p), e as usize));
        }
    }
    let den = BigInt::from_biguint(Sign::Plus, product_tree(remaining));
    // Every prime of the denominator has been stripped from the numerator.
    BigRational::new_raw(numer, den)
}

pub(crate) fn product_tree(mut items: Vec<BigUint>) -> BigUint {
    if items.is_empty() {
        return BigUint::one();
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_vanishes_outside_range() {
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(-1, 0), BigUint::zero());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
    }

    #[test]
    fn binomial_cache_agrees_with_multiplicative_formula() {
        let n = PASCAL_CACHE_ROWS as i64 + 7;
        // Pascal's rule across the cache boundary.
        for k in [0, 1, 5, 300, 600] {
            let lhs = binomial(n, k + 1);
            let rhs = binomial(n - 1, k) + binomial(n - 1, k + 1);
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn binomial_row_sum_matches_direct_sum() {
        let terms: Vec<(u64, BigInt)> = (0..=9u64).map(|s| (s, BigInt::from(s as i64 * 3 - 7))).collect();
        let mut direct = BigRational::zero();
        for (s, c) in &terms {
            direct += BigRational::new(c.clone(), BigInt::from_biguint(Sign::Plus, binomial(9, *s as i64)));
        }
        assert_eq!(sum_over_binomial_row(9, &terms), direct);
        assert_eq!(sum_over_binomial_row(0, &[]), BigRational::zero());
    }

    #[test]
    fn harmonic_small_values() {
        assert_eq!(harmonic(0), BigRational::zero());
        assert_eq!(harmonic(1), integer(1));
        assert_eq!(harmonic(3), ratio(11, 6));
        assert_eq!(harmonic(4), ratio(25, 12));
    }

    #[test]
    fn decimal_rendering_rounds_exactly() {
        assert_eq!(format_decimal(&ratio(11, 3)), "3.666666666666667");
        assert_eq!(format_decimal(&integer(5)), "5.0");
        assert_eq!(format_decimal(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_decimal(&ratio(1, 3_000_000_000_000_000u64)), "0.0");
        assert_eq!(format_decimal(&ratio(2, 3)), "0.666666666666667");
        assert_eq!(to_f64(&ratio(1, 3)), 1.0 / 3.0);
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("7").unwrap(), integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn factored_sum_matches_plain_accumulation() {
        let spf = smallest_prime_factors(40);
        let factor = |mut k: usize| {
            let mut m = BTreeMap::new();
            while k > 1 {
                let p = spf[k] as usize;
                *m.entry(p as u64).or_insert(0) += 1;
                k /= p;
            }
            m
        };
        let mut terms = Vec::new();
        let mut plain = BigRational::zero();
        for k in 1..=30usize {
            let sign = if k % 3 == 0 { -1 } else { 1 };
            let numer = BigInt::from(sign * (k as i64 * 7 + 3));
            let mut den = factor(k);
            for e in den.values_mut() {
                *e *= (k % 4 + 1) as u32;
            }
            let den_value: BigUint = den
                .iter()
                .map(|(&p, &e)| num_traits::pow(BigUint::from(p), e as usize))
                .product();
            plain += BigRational::new(numer.clone(), BigInt::from_biguint(Sign::Plus, den_value));
            terms.push(FactoredTerm { numer, den });
        }
        assert_eq!(sum_factored(terms), plain);
    }

    #[test]
    fn factorizes() {
        assert_eq!(factorize_u64(1), vec![]);
        assert_eq!(factorize_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize_u64(97), vec![(97, 1)]);
    }
}
