//! Random arcs of fixed length on a unit circle.
//!
//! Arcs of length `a` are dropped with uniform starting points until the circle
//! is covered. The expectation has an exact alternating series that is
//! evaluated here as a rational, plus a double-double float route used as an
//! independent check.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cyclic::{expected_cyclic, CyclicParams};
use crate::error::{Error, Result};
use crate::exact::{
    factorize_u64, integer, ratio, smallest_prime_factors, sum_factored, to_f64, ExactRational,
    FactoredTerm,
};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arc length as a fraction of the circumference, `0 < a < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcParams {
    a: ExactRational,
}

impl ArcParams {
    pub fn new(a: ExactRational) -> Result<Self> {
        if !a.is_positive() || a >= integer(1) {
            return Err(Error::input(format!("arc length must lie in (0, 1), got {a}")));
        }
        Ok(ArcParams { a })
    }

    pub fn from_ratio(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::input("arc length has zero denominator"));
        }
        Self::new(ratio(p, q))
    }

    pub fn a(&self) -> &ExactRational {
        &self.a
    }

    fn parts(&self) -> (BigInt, BigInt) {
        (self.a.numer().clone(), self.a.denom().clone())
    }

    /// Number of series terms, `floor(1/a)`.
    pub fn n_terms(&self) -> u64 {
        let (p, q) = self.parts();
        (q / p).to_u64().expect("1/a fits in u64")
    }
}

/// `1 + sum_{k=1}^{floor(1/a)} (-1)^{k-1} (1 - k a)^{k-1} / (k a)^{k+1}`, exactly.
///
/// With `a = p/q` term `k` is `(-1)^{k-1} (q - k p)^{k-1} q^2 / (k p)^{k+1}`.
pub fn stevens_exact(params: &ArcParams) -> ExactRational {
    let (p, q) = params.parts();
    let k_max = params.n_terms();
    let fast = p.to_u64().filter(|&p| p <= 1 << 32).zip(q.to_u64());
    let sum = match fast {
        Some((p, q)) => stevens_series_factored(p, q, k_max),
        None => {
            let mut sum = ExactRational::zero();
            for k in 1..=k_max {
                sum += stevens_term(&p, &q, k);
            }
            sum
        }
    };
    integer(1) + sum
}

fn stevens_term(p: &BigInt, q: &BigInt, k: u64) -> ExactRational {
    let kp = p * BigInt::from(k);
    let num = num_traits::pow(q - &kp, (k - 1) as usize) * q * q;
    let den = num_traits::pow(kp, (k + 1) as usize);
    let term = ExactRational::new(num, den);
    if k % 2 == 1 {
        term
    } else {
        -term
    }
}

/// The series with each denominator `(k p)^{k+1}` kept in factored form.
fn stevens_series_factored(p: u64, q: u64, k_max: u64) -> ExactRational {
    let spf = smallest_prime_factors(k_max as usize);
    let p_factors = factorize_u64(p);
    let q = BigInt::from(q);
    let terms = (1..=k_max)
        .map(|k| {
            let mut den = BTreeMap::new();
            let mut rest = k as usize;
            while rest > 1 {
                let prime = spf[rest] as usize;
                rest /= prime;
                *den.entry(prime as u64).or_insert(0) += k as u32 + 1;
            }
            for &(prime, e) in &p_factors {
                *den.entry(prime).or_insert(0) += e * (k as u32 + 1);
            }
            let base = &q - BigInt::from(k) * BigInt::from(p);
            let mut numer = num_traits::pow(base, (k - 1) as usize) * &q * &q;
            if k % 2 == 0 {
                numer = -numer;
            }
            FactoredTerm { numer, den }
        })
        .collect();
    sum_factored(terms)
}

/// Independent float evaluation of the series: each term in double-double
/// arithmetic, summed with Neumaier compensation.
pub fn stevens_float(params: &ArcParams) -> f64 {
    let (p, q) = params.parts();
    let a = DoubleDouble::from_big(&p).div(DoubleDouble::from_big(&q));
    let mut sum = Neumaier::default();
    sum.add(1.0);
    for k in 1..=params.n_terms() {
        let ka = a.mul(DoubleDouble::from(k as f64));
        let rest = DoubleDouble::from(1.0).sub(ka);
        let term = rest.powi(k - 1).div(ka.powi(k + 1));
        let term = if k % 2 == 1 { term } else { term.neg() };
        sum.add(term.hi);
        sum.add(term.lo);
    }
    sum.total()
}

/// `(1/a)(ln(1/a) + ln ln(1/a) + gamma)`, the leading asymptotic as `a -> 0`.
pub fn flatto_asymptotic(params: &ArcParams) -> Result<f64> {
    let inv = 1.0 / to_f64(params.a());
    if inv <= std::f64::consts::E {
        return Err(Error::domain(
            "flatto_asymptotic",
            format!("needs a < 1/e, got a = {}", params.a()),
        ));
    }
    Ok(inv * (inv.ln() + inv.ln().ln() + EULER_GAMMA))
}

/// `1 + c^2`, an upper bound on the arc expectation when `a >= 1/c`.
pub fn arc_upper_bound(c: &ExactRational) -> Result<ExactRational> {
    if *c < integer(1) {
        return Err(Error::domain("arc_upper_bound", format!("needs c >= 1, got {c}")));
    }
    Ok(integer(1) + c * c)
}

/// `E[arcs of length ell/n] - E[cyclic windows (n, ell)]`, which is never negative.
pub fn dominance_gap(n: u64, ell: u64) -> Result<ExactRational> {
    if ell == 0 || ell >= n {
        return Err(Error::domain(
            "dominance_gap",
            format!("needs 1 <= ell < n, got n={n}, ell={ell}"),
        ));
    }
    let arcs = stevens_exact(&ArcParams::from_ratio(ell, n)?);
    let cyclic = expected_cyclic(&CyclicParams::new(n, ell)?);
    let gap = arcs - cyclic;
    if gap.is_negative() {
        return Err(Error::Consistency(format!(
            "dominance counterexample at n={n}, ell={ell}: gap {gap}"
        )));
    }
    Ok(gap)
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, about 32 significant digits.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    /// Splits a big integer into a leading double and the rounded remainder.
    fn from_big(x: &BigInt) -> Self {
        let hi = x.to_f64().expect("finite");
        let rest = x - float_to_big(hi);
        DoubleDouble::from(hi).add(DoubleDouble::from(rest.to_f64().expect("finite")))
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(DoubleDouble::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(DoubleDouble::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(DoubleDouble::from(q3))
    }

    fn powi(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = DoubleDouble::from(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }
}

/// Exact integer value of a finite, integral double.
fn float_to_big(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1075;
    let mantissa = BigInt::from((bits & ((1 << 52) - 1)) | (1 << 52));
    let magnitude = if exp >= 0 {
        mantissa << exp as usize
    } else {
        // integral doubles below 2^53 lose only zero bits here
        mantissa >> (-exp) as usize
    };
    if x < 0.0 {
        BigInt::from_biguint(Sign::Minus, magnitude.magnitude().clone())
    } else {
        magnitude
    }
}

/// Smallest `k >= 1` with `k a >= 1`, i.e. `ceil(1/a)`: the fewest arcs that can cover.
pub fn min_arcs(params: &ArcParams) -> u64 {
    let (p, q) = params.parts();
    let (d, r) = q.div_rem(&p);
    let d = d.to_u64().expect("1/a fits in u64");
    if r.is_zero() {
        d
    } else {
        d + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(p: u64, q: u64) -> ArcParams {
        ArcParams::from_ratio(p, q).unwrap()
    }

    #[test]
    fn stevens_examples() {
        assert_eq!(stevens_exact(&arc(1, 2)), integer(5));
        assert_eq!(stevens_exact(&arc(9, 10)), ratio(181, 81));
        // a = 1/3: terms 9, -(1/3)/(2/3)^3, and 0
        assert_eq!(stevens_exact(&arc(1, 3)), integer(1) + integer(9) - ratio(9, 8));
    }

    #[test]
    fn factored_and_plain_routes_agree() {
        for (p, q) in [(1u64, 7u64), (2, 9), (3, 20), (5, 37), (1, 40)] {
            let params = arc(p, q);
            let (pb, qb) = params.parts();
            let plain = integer(1)
                + (1..=params.n_terms())
                    .map(|k| stevens_term(&pb, &qb, k))
                    .fold(ExactRational::zero(), |a, b| a + b);
            assert_eq!(stevens_exact(&params), plain, "a={p}/{q}");
        }
    }

    #[test]
    fn huge_numerators_use_the_plain_route() {
        let a = ArcParams::new(ratio(1u64 << 40, (1u64 << 42) + 1)).unwrap();
        let v = stevens_exact(&a);
        let f = stevens_float(&a);
        assert!((to_f64(&v) - f).abs() <= 1e-12 * f.abs());
    }

    #[test]
    fn float_route_tracks_exact_route() {
        for k in 2..=50u64 {
            let params = arc(1, k);
            let exact = to_f64(&stevens_exact(&params));
            let float = stevens_float(&params);
            assert!(((exact - float) / exact).abs() < 1e-12, "k={k}: {exact} vs {float}");
        }
    }

    #[test]
    fn asymptotic_leading_term() {
        let v = flatto_asymptotic(&arc(1, 100)).unwrap();
        let expected = 100.0 * (100f64.ln() + 100f64.ln().ln() + EULER_GAMMA);
        assert!((v - expected).abs() < 1e-9);
        assert!(matches!(flatto_asymptotic(&arc(1, 2)), Err(Error::Domain { .. })));
    }

    #[test]
    fn arc_bound_examples() {
        assert_eq!(arc_upper_bound(&integer(2)).unwrap(), integer(5));
        assert_eq!(arc_upper_bound(&integer(1)).unwrap(), integer(2));
        assert!(arc_upper_bound(&integer(3)).unwrap() >= stevens_exact(&arc(1, 3)));
        assert!(arc_upper_bound(&ratio(1, 2)).is_err());
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(dominance_gap(4, 2).unwrap(), ratio(4, 3));
        assert!(!dominance_gap(3, 2).unwrap().is_negative());
        assert!(dominance_gap(3, 3).is_err());
    }

    #[test]
    fn params_validate() {
        assert!(ArcParams::new(integer(1)).is_err());
        assert!(ArcParams::new(integer(0)).is_err());
        assert!(ArcParams::from_ratio(1, 0).is_err());
        assert_eq!(min_arcs(&arc(1, 3)), 3);
        assert_eq!(min_arcs(&arc(2, 5)), 3);
    }
}
