//! Windows of length `ell` on a cycle of `n` positions, and the family where
//! window starts are restricted to multiples of `d`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{binomial_int, harmonic, integer, sum_over_binomial_row, ExactRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicParams {
    n: u64,
    ell: u64,
}

impl CyclicParams {
    pub fn new(n: u64, ell: u64) -> Result<Self> {
        if n == 0 || ell == 0 || ell > n {
            return Err(Error::input(format!(
                "cyclic windows need 1 <= ell <= n, got n={n}, ell={ell}"
            )));
        }
        Ok(CyclicParams { n, ell })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }
}

/// Cyclic windows whose starts are `d` apart; requires `d | ell` and `ell | n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaDParams {
    n: u64,
    ell: u64,
    d: u64,
}

impl DeltaDParams {
    pub fn new(n: u64, ell: u64, d: u64) -> Result<Self> {
        CyclicParams::new(n, ell)?;
        if d == 0 || ell % d != 0 || n % ell != 0 {
            return Err(Error::domain(
                "delta-d start sets",
                format!("need d | ell | n, got n={n}, ell={ell}, d={d}"),
            ));
        }
        Ok(DeltaDParams { n, ell, d })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// The equivalent plain cyclic instance `(n/d, ell/d)`.
    pub fn reduced(&self) -> CyclicParams {
        CyclicParams {
            n: self.n / self.d,
            ell: self.ell / self.d,
        }
    }
}

/// Size-`s` recovery sets whose start set contains 0:
/// `sum_{j=0}^{floor((n-s)/ell)} (-1)^j C(s,j) C(n - ell j - 1, s - 1)`.
pub fn beta_cyclic(p: &CyclicParams, s: u64) -> Result<BigUint> {
    if s == 0 || s > p.n {
        return Err(Error::input(format!("size s={s} outside 1..={}", p.n)));
    }
    Ok(beta_unchecked(p.n, p.ell, s))
}

fn beta_unchecked(n: u64, ell: u64, s: u64) -> BigUint {
    let (n, ell, s) = (n as i64, ell as i64, s as i64);
    let mut total = BigInt::zero();
    for j in 0..=(n - s) / ell {
        let term = binomial_int(s, j) * binomial_int(n - ell * j - 1, s - 1);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    assert!(!total.is_negative(), "negative anchored count");
    total.into_parts().1
}

/// All size-`s` recovery sets, `n beta(s) / s`.
pub fn alpha_cyclic(p: &CyclicParams, s: u64) -> Result<BigUint> {
    let beta = beta_cyclic(p, s)?;
    alpha_from_beta(p.n, s, beta)
}

fn alpha_from_beta(n: u64, s: u64, beta: BigUint) -> Result<BigUint> {
    let (q, r) = (beta * BigUint::from(n)).div_rem(&BigUint::from(s));
    if !r.is_zero() {
        return Err(Error::Consistency(format!(
            "n * beta(s) not divisible by s at n={n}, s={s}"
        )));
    }
    Ok(q)
}

/// `n (H_n - H_{ell-1}) - sum_{s=ceil(n/ell)}^{n-ell} alpha(s) / C(n-1, s)`.
pub fn expected_cyclic(p: &CyclicParams) -> ExactRational {
    let (n, ell) = (p.n, p.ell);
    if ell == n {
        return integer(1);
    }
    let terms: Vec<(u64, BigInt)> = (n.div_ceil(ell)..=n - ell)
        .into_par_iter()
        .map(|s| {
            let alpha = alpha_from_beta(n, s, beta_unchecked(n, ell, s))
                .expect("double counting identity");
            (s, BigInt::from_biguint(Sign::Plus, alpha))
        })
        .collect();
    integer(n) * (harmonic(n) - harmonic(ell - 1)) - sum_over_binomial_row(n - 1, &terms)
}

/// The `ell = 2` special form,
/// `n (H_n - 1) - sum_s [C(s-1, n-s-1) + C(s, n-s)] / C(n-1, s)`.
pub fn expected_cyclic_l2(n: u64) -> Result<ExactRational> {
    if n < 2 {
        return Err(Error::input(format!("needs n >= 2, got {n}")));
    }
    if n == 2 {
        return Ok(integer(1));
    }
    let ni = n as i64;
    let terms: Vec<(u64, BigInt)> = (n.div_ceil(2)..=n - 2)
        .map(|s| {
            let si = s as i64;
            (s, binomial_int(si - 1, ni - si - 1) + binomial_int(si, ni - si))
        })
        .collect();
    Ok(integer(n) * (harmonic(n) - integer(1)) - sum_over_binomial_row(n - 1, &terms))
}

/// The Δ-d family is the plain cyclic model on `(n/d, ell/d)`.
pub fn expected_delta_d(p: &DeltaDParams) -> ExactRational {
    expected_cyclic(&p.reduced())
}

/// `(d, E_d)` for every divisor `d` of `ell` in increasing order, checking
/// each against the unrestricted cyclic expectation.
pub fn check_delta_monotonicity(n: u64, ell: u64) -> Result<Vec<(u64, ExactRational)>> {
    let base = CyclicParams::new(n, ell)?;
    if n % ell != 0 {
        return Err(Error::domain(
            "delta-d monotonicity",
            format!("needs ell | n, got n={n}, ell={ell}"),
        ));
    }
    let reference = expected_cyclic(&base);
    let mut out = Vec::new();
    for d in (1..=ell).filter(|d| ell % d == 0) {
        let value = expected_delta_d(&DeltaDParams::new(n, ell, d)?);
        if value > reference {
            return Err(Error::Consistency(format!(
                "delta-d monotonicity counterexample at n={n}, ell={ell}, d={d}: {value} > {reference}"
            )));
        }
        out.push((d, value));
    }
    Ok(out)
}

/// `m H_m` with `m = floor(n/ell)`: disjoint blocks that each need their own window.
pub fn cyclic_lower_bound(p: &CyclicParams) -> ExactRational {
    let m = p.n / p.ell;
    integer(m) * harmonic(m)
}
