//! Batches: every draw is a uniformly random `ell`-subset of `n` items.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use crate::continuous::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::exact::{binomial, harmonic, integer, ratio, ExactRational};
use crate::hypergraph::{Caps, CoverageModel, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchParams {
    n: u64,
    ell: u64,
}

impl BatchParams {
    pub fn new(n: u64, ell: u64) -> Result<Self> {
        if n == 0 || ell == 0 || ell > n {
            return Err(Error::input(format!(
                "batches need 1 <= ell <= n, got n={n}, ell={ell}"
            )));
        }
        Ok(BatchParams { n, ell })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }
}

/// Stop once `k` distinct items of a fixed `m`-subset have been seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartialTarget {
    m: u64,
    k: u64,
}

impl PartialTarget {
    pub fn new(m: u64, k: u64) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::input(format!("target needs 1 <= k <= m, got m={m}, k={k}")));
        }
        Ok(PartialTarget { m, k })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    fn check(&self, p: &BatchParams) -> Result<()> {
        if self.m > p.n {
            return Err(Error::input(format!(
                "target subset of size {} exceeds n={}",
                self.m, p.n
            )));
        }
        Ok(())
    }
}

/// Required multiplicity per item; items with demand 0 never hold up stopping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandVector {
    v: Vec<u32>,
}

impl DemandVector {
    pub fn new(v: Vec<u32>) -> Result<Self> {
        if v.iter().all(|&x| x == 0) {
            return Err(Error::input("demand vector needs at least one positive entry"));
        }
        Ok(DemandVector { v })
    }

    /// Every one of `n` items demanded `m` times.
    pub fn uniform(n: usize, m: u32) -> Result<Self> {
        Self::new(vec![m; n])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

fn big(x: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x)
}

/// `C(n,ell) sum_{i=0}^{n-1} (-1)^{n-i+1} C(n,i) / (C(n,ell) - C(i,ell))`.
pub fn polya_expected(p: &BatchParams) -> ExactRational {
    let (n, ell) = (p.n as i64, p.ell as i64);
    if n == ell {
        return integer(1);
    }
    let total = big(binomial(n, ell));
    let mut sum = ExactRational::zero();
    for i in 0..n {
        let term = ExactRational::new(big(binomial(n, i)), &total - big(binomial(i, ell)));
        if (n - i + 1) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    ExactRational::from_integer(total) * sum
}

/// `C(n,ell) sum_{i=0}^{k-1} (-1)^{k-i+1} C(m,i) C(m-i-1, m-k) / (C(n,ell) - C(i+n-m, ell))`.
pub fn stadje_expected(p: &BatchParams, t: &PartialTarget) -> Result<ExactRational> {
    t.check(p)?;
    let (n, ell, m, k) = (p.n as i64, p.ell as i64, t.m as i64, t.k as i64);
    let total = big(binomial(n, ell));
    let mut sum = ExactRational::zero();
    for i in 0..k {
        let den = &total - big(binomial(i + n - m, ell));
        if den <= BigInt::zero() {
            return Err(Error::Consistency(format!(
                "vanishing denominator at i={i} (n={n}, ell={ell}, m={m}, k={k})"
            )));
        }
        let num = big(binomial(m, i)) * big(binomial(m - i - 1, m - k));
        let term = ExactRational::new(num, den);
        if (k - i + 1) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(ExactRational::from_integer(total) * sum)
}

/// Brackets for the partial-target expectation obtained by cutting a
/// single-item run into blocks of `ell` distinct labels:
/// `(H_m - H_{m-k}) / (H_n - H_{n-ell})` and
/// `(H_m - H_{m-k} - 1/n) / (H_n - H_{n-ell}) + 1`.
pub fn sandwich_bounds(p: &BatchParams, t: &PartialTarget) -> Result<(ExactRational, ExactRational)> {
    t.check(p)?;
    if p.ell == p.n {
        return Err(Error::domain(
            "sandwich_bounds",
            format!("needs ell < n, got n = ell = {}", p.n),
        ));
    }
    let norm = harmonic(p.n) - harmonic(p.n - p.ell);
    let target = harmonic(t.m) - harmonic(t.m - t.k);
    let lower = &target / &norm;
    let upper = (target - ratio(1, p.n)) / norm + integer(1);
    Ok((lower, upper))
}

/// Transfers a single-item expectation `e_single` of any coverage task to
/// `ell`-batches: `e / (n (H_n - H_{n-ell}))` and
/// `(e - 1/n) / (n (H_n - H_{n-ell})) + 1`.
pub fn normalization_bounds(
    e_single: &ExactRational,
    n: u64,
    ell: u64,
) -> Result<(ExactRational, ExactRational)> {
    if *e_single < integer(1) {
        return Err(Error::input(format!("single-draw expectation must be >= 1, got {e_single}")));
    }
    BatchParams::new(n, ell)?;
    if ell == n {
        return Err(Error::domain(
            "normalization_bounds",
            format!("needs ell < n, got n = ell = {n}"),
        ));
    }
    let scale = integer(n) * (harmonic(n) - harmonic(n - ell));
    let lower = e_single / &scale;
    let upper = (e_single - ratio(1, n)) / scale + integer(1);
    Ok((lower, upper))
}

/// `n (ln n + (m-1) ln ln n + gamma)`, the leading behaviour of the
/// single-item time until every item is seen `m` times.
pub fn dixie_asymptotic(n: u64, m: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain("dixie_asymptotic", format!("needs n >= 3, got {n}")));
    }
    if m == 0 {
        return Err(Error::input("demand m must be positive"));
    }
    let nf = n as f64;
    Ok(nf * (nf.ln() + (m as f64 - 1.0) * nf.ln().ln() + EULER_GAMMA))
}

/// `(n / ell)(ln n + 1)`, valid for every uniform `ell`-regular covering model on `n` vertices.
pub fn universal_upper(n: u64, ell: u64) -> Result<f64> {
    BatchParams::new(n, ell)?;
    Ok(n as f64 / ell as f64 * ((n as f64).ln() + 1.0))
}

/// The hypergraph of all `ell`-subsets, default caps.
pub fn build_batch_model(p: &BatchParams) -> Result<CoverageModel> {
    build_batch_model_with(p, Caps::default())
}

/// Accepted when either exact oracle can handle the result: at most
/// `max_profile_edges` edges, or at most `max_ie_vertices` vertices.
pub fn build_batch_model_with(p: &BatchParams, caps: Caps) -> Result<CoverageModel> {
    let edges = binomial(p.n as i64, p.ell as i64);
    let edge_cap = BigUint::from(caps.max_profile_edges);
    if edges > edge_cap && p.n as usize > caps.max_ie_vertices {
        return Err(Error::Capacity {
            what: "batch model vertices",
            got: p.n,
            cap: caps.max_ie_vertices as u64,
        });
    }
    let n = p.n as usize;
    let ell = p.ell as usize;
    // Enumerate ell-subsets in lexicographic order.
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..ell).collect();
    loop {
        out.push(VertexSet::from_indices(n, idx.iter().copied()));
        let Some(pos) = (0..ell).rev().find(|&j| idx[j] < n - ell + j) else {
            break;
        };
        idx[pos] += 1;
        for j in pos + 1..ell {
            idx[j] = idx[j - 1] + 1;
        }
    }
    debug_assert_eq!(BigUint::from(out.len()), edges);
    CoverageModel::new(n, out)
}
