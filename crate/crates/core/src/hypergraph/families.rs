//! Explicit hypergraphs for the named models, used to feed the brute-force oracles.

use super::{Caps, CoverageModel, VertexSet};
use crate::error::{Error, Result};

/// Singleton edges: the classical coupon collector on `n` items.
pub fn coupon_collector_model(n: usize) -> CoverageModel {
    let edges = (0..n).map(|v| VertexSet::from_indices(n, [v])).collect();
    CoverageModel::new(n, edges).expect("singletons always form a covering model")
}

/// The `n - ell + 1` intervals `[s, s + ell)` inside `0..n`.
pub fn windows_model(n: usize, ell: usize) -> Result<CoverageModel> {
    check_window(n, ell)?;
    let edges = (0..=n - ell)
        .map(|s| VertexSet::from_indices(n, s..s + ell))
        .collect();
    CoverageModel::new(n, edges)
}

/// The `n` cyclic intervals `{s, ..., s + ell - 1} mod n`.
///
/// For `ell == n` all windows coincide, and since edges are a set the model
/// collapses to the single full edge.
pub fn cyclic_windows_model(n: usize, ell: usize) -> Result<CoverageModel> {
    check_window(n, ell)?;
    if ell == n {
        return CoverageModel::new(n, vec![VertexSet::full(n)]);
    }
    let edges = (0..n)
        .map(|s| VertexSet::from_indices(n, (0..ell).map(|j| (s + j) % n)))
        .collect();
    CoverageModel::new(n, edges)
}

fn check_window(n: usize, ell: usize) -> Result<()> {
    if n == 0 || ell == 0 || ell > n {
        return Err(Error::input(format!(
            "window model needs 1 <= ell <= n, got n={n}, ell={ell}"
        )));
    }
    Ok(())
}

/// Radius-`t` Hamming balls around every point of `{0,1}^d`.
///
/// Vertices are the integers `0..2^d`; edge `x` is `{u : popcount(u ^ x) <= t}`.
/// For `t == d` every ball is the whole cube and the model is a single edge.
/// The vertex count is limited by [`Caps::max_ie_vertices`].
pub fn build_hamming_model(d: u32, t: u32) -> Result<CoverageModel> {
    build_hamming_model_with(d, t, Caps::default())
}

pub fn build_hamming_model_with(d: u32, t: u32, caps: Caps) -> Result<CoverageModel> {
    if d == 0 {
        return Err(Error::input("Hamming cube dimension must be positive"));
    }
    if t > d {
        return Err(Error::input(format!("radius t={t} exceeds dimension d={d}")));
    }
    if d >= usize::BITS - 1 || (1usize << d) > caps.max_ie_vertices {
        return Err(Error::Capacity {
            what: "Hamming cube vertices 2^d",
            got: 1u64.checked_shl(d).unwrap_or(u64::MAX),
            cap: caps.max_ie_vertices as u64,
        });
    }
    let n = 1usize << d;
    if t == d {
        return CoverageModel::new(n, vec![VertexSet::full(n)]);
    }
    let edges = (0..n)
        .map(|x| VertexSet::from_indices(n, (0..n).filter(|u| (u ^ x).count_ones() <= t)))
        .collect();
    CoverageModel::new(n, edges)
}
