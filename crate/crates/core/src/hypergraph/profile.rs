use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Caps, CoverageModel, VertexSet};
use crate::error::{Error, Result};
use crate::exact::{binomial, harmonic, integer, ExactRational};

/// Recovery-set counts by size for a hypergraph with `n_edges` edges.
///
/// `alpha[s]` is the number of `s`-edge subsets whose union is every vertex,
/// stored for `s = 0..=max_non_recovery`. Every subset larger than
/// `max_non_recovery` covers, so larger sizes are never needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryProfile {
    pub n_edges: usize,
    pub max_non_recovery: usize,
    pub alpha: Vec<BigUint>,
}

impl RecoveryProfile {
    pub fn new(n_edges: usize, max_non_recovery: usize, alpha: Vec<BigUint>) -> Result<Self> {
        let profile = RecoveryProfile {
            n_edges,
            max_non_recovery,
            alpha,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Checks the structural invariants: sizes, `alpha(s) <= C(N, s)`,
    /// `alpha(0) = 0`, and upward closure `(s+1) alpha(s+1) >= (N-s) alpha(s)`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_edges;
        let m = self.max_non_recovery;
        if n == 0 {
            return Err(Error::input("profile needs at least one edge"));
        }
        if m >= n {
            return Err(Error::input(format!(
                "max non-recovery size {m} must be below the edge count {n}"
            )));
        }
        if self.alpha.len() != m + 1 {
            return Err(Error::input(format!(
                "expected {} recovery counts, got {}",
                m + 1,
                self.alpha.len()
            )));
        }
        if !self.alpha[0].is_zero() {
            return Err(Error::input("the empty edge set cannot cover"));
        }
        for (s, a) in self.alpha.iter().enumerate() {
            if *a > binomial(n as i64, s as i64) {
                return Err(Error::input(format!("alpha({s}) exceeds C({n}, {s})")));
            }
        }
        for s in 0..m {
            let lhs = &self.alpha[s + 1] * BigUint::from(s + 1);
            let rhs = &self.alpha[s] * BigUint::from(n - s);
            if lhs < rhs {
                return Err(Error::input(format!(
                    "recovery counts are not upward closed at size {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Brute-force recovery profile over all `2^N` edge subsets, default caps.
pub fn recovery_profile(model: &CoverageModel) -> Result<RecoveryProfile> {
    recovery_profile_with(model, Caps::default())
}

pub fn recovery_profile_with(model: &CoverageModel, caps: Caps) -> Result<RecoveryProfile> {
    let n = model.n_edges();
    if n > caps.max_profile_edges {
        return Err(Error::Capacity {
            what: "edges for recovery-set enumeration",
            got: n as u64,
            cap: caps.max_profile_edges as u64,
        });
    }
    let counts = match narrow_edges(model) {
        Some((edges, full)) => covering_counts_by_size(&edges, &full, 0u128),
        None => {
            let full = VertexSet::full(model.n_vertices());
            let zero = VertexSet::empty(model.n_vertices());
            covering_counts_by_size(model.edges(), &full, zero)
        }
    };

    // Largest size at which some subset fails to cover.
    let max_non_recovery = (0..=n)
        .rev()
        .find(|&s| BigUint::from(counts[s]) < binomial(n as i64, s as i64))
        .expect("the empty subset never covers");
    for s in max_non_recovery + 1..=n {
        if BigUint::from(counts[s]) != binomial(n as i64, s as i64) {
            return Err(Error::Consistency(format!(
                "a subset of size {s} > M = {max_non_recovery} failed to cover"
            )));
        }
    }
    let alpha = counts[..=max_non_recovery]
        .iter()
        .map(|&c| BigUint::from(c))
        .collect();
    let profile = RecoveryProfile {
        n_edges: n,
        max_non_recovery,
        alpha,
    };
    profile.validate().map_err(|e| Error::Consistency(e.to_string()))?;
    Ok(profile)
}

fn narrow_edges(model: &CoverageModel) -> Option<(Vec<u128>, u128)> {
    let edges = model
        .edges()
        .iter()
        .map(VertexSet::as_u128)
        .collect::<Option<Vec<_>>>()?;
    let full = VertexSet::full(model.n_vertices()).as_u128()?;
    Some((edges, full))
}

trait UnionMask: Clone + Eq + Send + Sync {
    fn or(&self, other: &Self) -> Self;
}

impl UnionMask for u128 {
    fn or(&self, other: &Self) -> Self {
        self | other
    }
}

impl UnionMask for VertexSet {
    fn or(&self, other: &Self) -> Self {
        self.union(other)
    }
}

/// Unions of every subset of `edges`, indexed by the subset's bit mask.
fn subset_unions<T: UnionMask>(edges: &[T], zero: &T) -> Vec<T> {
    let mut table = Vec::with_capacity(1 << edges.len());
    table.push(zero.clone());
    for (i, e) in edges.iter().enumerate() {
        for mask in 0..1usize << i {
            let u = table[mask].or(e);
            table.push(u);
        }
    }
    table
}

/// `counts[s]` = number of covering subsets of size `s`.
///
/// The edge list is split in two halves; each half's subset unions are
/// tabulated once and the high half is scanned in parallel. The reduction is a
/// plain integer sum, so results do not depend on how work is partitioned.
fn covering_counts_by_size<T: UnionMask>(edges: &[T], full: &T, zero: T) -> Vec<u64> {
    let n = edges.len();
    let lo_bits = n - n / 2;
    let (lo, hi) = edges.split_at(lo_bits);
    let lo_table = subset_unions(lo, &zero);
    let hi_table = subset_unions(hi, &zero);
    hi_table
        .par_iter()
        .enumerate()
        .fold(
            || vec![0u64; n + 1],
            |mut counts, (hi_mask, hi_union)| {
                let hi_size = hi_mask.count_ones() as usize;
                for (lo_mask, lo_union) in lo_table.iter().enumerate() {
                    if hi_union.or(lo_union) == *full {
                        counts[hi_size + lo_mask.count_ones() as usize] += 1;
                    }
                }
                counts
            },
        )
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// `E[T] = N (H_N - H_{N-M-1}) - sum_{s=0}^{M} alpha(s) / C(N-1, s)`.
pub fn expected_coverage_exact(profile: &RecoveryProfile) -> ExactRational {
    let n = profile.n_edges;
    let m = profile.max_non_recovery;
    let mut total = integer(n as u64) * (harmonic(n as u64) - harmonic((n - m - 1) as u64));
    for (s, a) in profile.alpha.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let den = binomial(n as i64 - 1, s as i64);
        total -= ExactRational::new(
            BigInt::from_biguint(Sign::Plus, a.clone()),
            BigInt::from_biguint(Sign::Plus, den),
        );
    }
    total
}

impl RecoveryProfile {
    /// `alpha` as machine integers, for display and tests.
    pub fn alpha_u64(&self) -> Vec<u64> {
        self.alpha
            .iter()
            .map(|a| a.to_u64().unwrap_or(u64::MAX))
            .collect()
    }
}
