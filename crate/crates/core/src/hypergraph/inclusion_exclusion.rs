use rayon::prelude::*;

use super::{Caps, CoverageModel};
use crate::error::{Error, Result};
use crate::exact::{integer, ratio, ExactRational};

/// Hard ceiling on the vertex count, whatever the caps say: the subset table is
/// `2^n` words.
const ABSOLUTE_MAX_VERTICES: usize = 30;

/// `E[T]` by inclusion–exclusion over sets of vertices left uncovered.
///
/// `P(T > t) = sum_{S != {}} (-1)^{|S|+1} (1 - deg(S)/N)^t` where `deg(S)` is the
/// number of edges meeting `S`; summing over `t` gives
/// `E[T] = sum_{S != {}} (-1)^{|S|+1} N / deg(S)`.
pub fn expected_coverage_ie(model: &CoverageModel) -> Result<ExactRational> {
    expected_coverage_ie_with(model, Caps::default())
}

pub fn expected_coverage_ie_with(model: &CoverageModel, caps: Caps) -> Result<ExactRational> {
    let n = model.n_vertices();
    let cap = caps.max_ie_vertices.min(ABSOLUTE_MAX_VERTICES);
    if n > cap {
        return Err(Error::Capacity {
            what: "vertices for inclusion-exclusion",
            got: n as u64,
            cap: cap as u64,
        });
    }
    let n_edges = model.n_edges();
    let full = (1usize << n) - 1;

    // inside[U] = number of edges contained in U (subset-sum transform).
    let mut inside = vec![0u32; 1 << n];
    for e in model.edges() {
        inside[e.as_u128().expect("narrow universe") as usize] += 1;
    }
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..=full {
            if mask & b != 0 {
                inside[mask] += inside[mask ^ b];
            }
        }
    }

    // Group the alternating sum by degree so only N rationals are ever built.
    let coeff = (1..=full)
        .into_par_iter()
        .fold(
            || vec![0i64; n_edges + 1],
            |mut acc, s| {
                let deg = n_edges - inside[full ^ s] as usize;
                acc[deg] += if s.count_ones() % 2 == 1 { 1 } else { -1 };
                acc
            },
        )
        .reduce(
            || vec![0i64; n_edges + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    if coeff[0] != 0 {
        return Err(Error::Consistency(
            "a non-empty vertex set meets no edge".into(),
        ));
    }
    let mut total = integer(0);
    for (deg, &c) in coeff.iter().enumerate().skip(1) {
        if c != 0 {
            total += ExactRational::from_integer(c.into()) * ratio(n_edges as u64, deg as u64);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{coupon_collector_model, cyclic_windows_model};

    #[test]
    fn examples() {
        assert_eq!(expected_coverage_ie(&coupon_collector_model(2)).unwrap(), integer(3));
        let c3 = cyclic_windows_model(3, 2).unwrap();
        assert_eq!(expected_coverage_ie(&c3).unwrap(), ratio(5, 2));
        let c4 = cyclic_windows_model(4, 2).unwrap();
        assert_eq!(expected_coverage_ie(&c4).unwrap(), ratio(11, 3));
    }

    #[test]
    fn capacity() {
        let caps = Caps {
            max_ie_vertices: 4,
            ..Caps::default()
        };
        assert!(expected_coverage_ie_with(&coupon_collector_model(4), caps).is_ok());
        assert!(matches!(
            expected_coverage_ie_with(&coupon_collector_model(5), caps),
            Err(Error::Capacity { got: 5, cap: 4, .. })
        ));
    }
}
