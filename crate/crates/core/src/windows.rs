//! Windows of length `ell` inside a line of `n` positions.
//!
//! There are `W = n - ell + 1` windows. A set of windows covers exactly when it
//! contains both extreme windows and consecutive starts are at most `ell`
//! apart, which turns the recovery counts into compositions with bounded parts.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::continuous::{stevens_float, ArcParams};
use crate::error::{Error, Result};
use crate::exact::{
    binomial_int, harmonic, integer, ratio, sum_over_binomial_row, to_f64, ExactRational,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowsParams {
    n: u64,
    ell: u64,
}

impl WindowsParams {
    pub fn new(n: u64, ell: u64) -> Result<Self> {
        if n == 0 || ell == 0 || ell > n {
            return Err(Error::input(format!(
                "windows need 1 <= ell <= n, got n={n}, ell={ell}"
            )));
        }
        Ok(WindowsParams { n, ell })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Number of windows, `n - ell + 1`.
    pub fn n_windows(&self) -> u64 {
        self.n - self.ell + 1
    }

    /// Fewest windows that can cover, `ceil(n / ell)`.
    pub fn min_cover(&self) -> u64 {
        self.n.div_ceil(self.ell)
    }

    fn is_large(&self) -> bool {
        2 * self.ell >= self.n && self.ell < self.n
    }

    fn is_third(&self) -> bool {
        3 * self.ell >= self.n && 2 * self.ell < self.n
    }
}

/// Size-`s` recovery sets:
/// `sum_i (-1)^i C(s-1, i) C(n - ell - i ell - 1, s - 2)` for `i` up to
/// `min(s-1, floor((n - ell - s + 1) / ell))`.
pub fn alpha_windows(p: &WindowsParams, s: u64) -> Result<BigUint> {
    let m = p.n - p.ell;
    if s > m {
        return Err(Error::input(format!("size s={s} outside 0..={m}")));
    }
    Ok(alpha_unchecked(p.n, p.ell, s))
}

fn alpha_unchecked(n: u64, ell: u64, s: u64) -> BigUint {
    if s < 2 {
        return BigUint::zero();
    }
    let (n, ell, s) = (n as i64, ell as i64, s as i64);
    let top = (s - 1).min((n - ell - s + 1) / ell);
    let mut total = BigInt::zero();
    for i in 0..=top {
        let term = binomial_int(s - 1, i) * binomial_int(n - ell - i * ell - 1, s - 2);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    assert!(!total.is_negative(), "negative recovery count");
    total.into_parts().1
}

/// `W H_W - sum_{s=ceil(n/ell)}^{n-ell} alpha(s) / C(n-ell, s)`.
pub fn expected_windows(p: &WindowsParams) -> ExactRational {
    if p.ell == p.n {
        return integer(1);
    }
    let w = p.n_windows();
    let m = p.n - p.ell;
    let terms: Vec<(u64, BigInt)> = (p.min_cover()..=m)
        .into_par_iter()
        .map(|s| (s, BigInt::from(alpha_unchecked(p.n, p.ell, s))))
        .collect();
    integer(w) * harmonic(w) - sum_over_binomial_row(m, &terms)
}

/// `3W/2 + sum_{i=1}^{c-2} sum_{s=i+1}^{n-ell-i ell+1}
/// (-1)^{i+1} C(s-1, i) C(n-ell-i ell-1, s-2) / C(n-ell, s)`.
pub fn expected_windows_altform(p: &WindowsParams) -> Result<ExactRational> {
    if p.ell == p.n {
        return Err(Error::domain(
            "expected_windows_altform",
            format!("needs n > ell, got n = ell = {}", p.n),
        ));
    }
    let (n, ell) = (p.n as i64, p.ell as i64);
    let m = p.n - p.ell;
    let c = p.min_cover() as i64;
    let mut terms = Vec::new();
    for i in 1..=c - 2 {
        for s in i + 1..=n - ell - i * ell + 1 {
            let mut coeff = binomial_int(s - 1, i) * binomial_int(n - ell - i * ell - 1, s - 2);
            if i % 2 == 0 {
                coeff = -coeff;
            }
            terms.push((s as u64, coeff));
        }
    }
    Ok(ratio(3 * p.n_windows(), 2) + sum_over_binomial_row(m, &terms))
}

/// `3W/2` for `n/2 <= ell < n`: the two extreme windows already cover.
pub fn expected_windows_large(p: &WindowsParams) -> Result<ExactRational> {
    if !p.is_large() {
        return Err(Error::domain(
            "expected_windows_large",
            format!("needs n/2 <= ell < n, got n={}, ell={}", p.n, p.ell),
        ));
    }
    Ok(ratio(3 * p.n_windows(), 2))
}

/// `3W/2 + W (6n - 10 ell) / (ell (ell+1) (ell+2) (ell+3))` for `n/3 <= ell < n/2`.
pub fn expected_windows_third(p: &WindowsParams) -> Result<ExactRational> {
    if !p.is_third() {
        return Err(Error::domain(
            "expected_windows_third",
            format!("needs n/3 <= ell < n/2, got n={}, ell={}", p.n, p.ell),
        ));
    }
    let (n, l) = (p.n, p.ell);
    let w = p.n_windows();
    Ok(ratio(3 * w, 2) + ratio(w * (6 * n - 10 * l), l * (l + 1) * (l + 2) * (l + 3)))
}

/// Expected remaining draws from the middle-chain state with `i` unseen middle
/// positions and `k` extreme windows seen, for `n/3 <= ell < n/2`.
pub fn markov_middle_expectation(p: &WindowsParams, i: u64, k: u64) -> Result<ExactRational> {
    if !p.is_third() {
        return Err(Error::domain(
            "markov_middle_expectation",
            format!("needs n/3 <= ell < n/2, got n={}, ell={}", p.n, p.ell),
        ));
    }
    let middle = p.n - 2 * p.ell;
    if i > middle || k > 2 {
        return Err(Error::input(format!(
            "state (i={i}, k={k}) outside 0..={middle} x 0..=2"
        )));
    }
    let w = integer(p.n_windows());
    let l = p.ell;
    if i == 0 {
        return Ok(match k {
            2 => integer(0),
            1 => w,
            _ => w * ratio(3, 2),
        });
    }
    let j = integer(i - 1);
    let l2 = l * (l + 1);
    let l3 = l2 * (l + 2);
    let l4 = l3 * (l + 3);
    Ok(match k {
        2 => &w * ratio(1, l) + &w * j * ratio(1, l2),
        1 => &w + &w * ratio(1, l2) + &w * j * ratio(2, l3),
        _ => &w * ratio(3, 2) + &w * ratio(2, l3) + &w * j * ratio(6, l4),
    })
}

/// `lower = max{3W/2, m H_m}` with `m = floor(W / ell)`, and
/// `upper = 3W/2 + E[arcs of length ell / W]`.
///
/// The arc term is 1 once `ell >= W`, since a single arc then covers.
pub fn windows_bounds(p: &WindowsParams) -> Result<(ExactRational, f64)> {
    if p.ell == p.n {
        return Err(Error::domain(
            "windows_bounds",
            format!("needs ell < n, got n = ell = {}", p.n),
        ));
    }
    let w = p.n_windows();
    let linear = ratio(3 * w, 2);
    let m = w / p.ell;
    let blocks = integer(m) * harmonic(m);
    let lower = if blocks > linear { blocks } else { linear.clone() };
    let arcs = if p.ell >= w {
        1.0
    } else {
        stevens_float(&ArcParams::from_ratio(p.ell, w)?)
    };
    Ok((lower, to_f64(&linear) + arcs))
}

/// `E - 3W/2`, for `ell >= n / c` with `c > 1`.
pub fn large_ell_residual(p: &WindowsParams, c: &ExactRational) -> Result<ExactRational> {
    if *c <= integer(1) {
        return Err(Error::domain("large_ell_residual", format!("needs c > 1, got {c}")));
    }
    if integer(p.ell) * c < integer(p.n) {
        return Err(Error::domain(
            "large_ell_residual",
            format!("needs ell >= n/c, got n={}, ell={}, c={c}", p.n, p.ell),
        ));
    }
    Ok(expected_windows(p) - ratio(3 * p.n_windows(), 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{
        expected_coverage_exact, expected_coverage_ie, recovery_profile, windows_model,
    };

    fn wp(n: u64, ell: u64) -> WindowsParams {
        WindowsParams::new(n, ell).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_windows(&wp(4, 2), 2).unwrap(), BigUint::from(1u32));
        assert_eq!(alpha_windows(&wp(4, 2), 1).unwrap(), BigUint::zero());
        assert_eq!(alpha_windows(&wp(6, 2), 3).unwrap(), BigUint::from(1u32));
        assert!(alpha_windows(&wp(4, 2), 3).is_err());
    }

    #[test]
    fn alpha_matches_brute_force_profile() {
        for n in 2..=14u64 {
            for ell in 1..n {
                let profile = recovery_profile(&windows_model(n as usize, ell as usize).unwrap()).unwrap();
                assert_eq!(profile.max_non_recovery as u64, n - ell);
                for s in 0..=n - ell {
                    assert_eq!(
                        alpha_windows(&wp(n, ell), s).unwrap(),
                        profile.alpha[s as usize],
                        "n={n} ell={ell} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn expected_examples() {
        assert_eq!(expected_windows(&wp(4, 2)), ratio(9, 2));
        assert_eq!(expected_windows(&wp(3, 2)), integer(3));
        assert_eq!(expected_windows(&wp(3, 1)), ratio(11, 2));
        assert_eq!(expected_windows(&wp(6, 6)), integer(1));
    }

    #[test]
    fn four_routes_agree() {
        for n in 2..=12u64 {
            for ell in 1..n {
                let model = windows_model(n as usize, ell as usize).unwrap();
                let a = expected_windows(&wp(n, ell));
                assert_eq!(a, expected_windows_altform(&wp(n, ell)).unwrap(), "alt n={n} ell={ell}");
                assert_eq!(a, expected_coverage_exact(&recovery_profile(&model).unwrap()));
                assert_eq!(a, expected_coverage_ie(&model).unwrap());
            }
        }
    }

    #[test]
    fn altform_examples() {
        assert_eq!(expected_windows_altform(&wp(4, 2)).unwrap(), ratio(9, 2));
        assert_eq!(expected_windows_altform(&wp(10, 5)).unwrap(), integer(9));
        assert_eq!(expected_windows_altform(&wp(12, 3)).unwrap(), expected_windows(&wp(12, 3)));
        assert!(expected_windows_altform(&wp(5, 5)).is_err());
    }

    #[test]
    fn regime_closed_forms() {
        assert_eq!(expected_windows_large(&wp(8, 4)).unwrap(), ratio(15, 2));
        assert_eq!(expected_windows_large(&wp(3, 2)).unwrap(), integer(3));
        assert!(expected_windows_large(&wp(9, 4)).is_err());
        assert_eq!(expected_windows_third(&wp(7, 3)).unwrap(), ratio(23, 3));
        assert_eq!(expected_windows_third(&wp(9, 3)).unwrap(), ratio(21, 2) + ratio(7, 15));
        assert_eq!(expected_windows_third(&wp(6, 2)).unwrap(), ratio(15, 2) + ratio(2, 3));
        assert!(expected_windows_third(&wp(10, 3)).is_err());
        for n in 2..=60u64 {
            for ell in 1..n {
                let p = wp(n, ell);
                if p.is_large() {
                    assert_eq!(expected_windows_large(&p).unwrap(), expected_windows(&p));
                }
                if p.is_third() {
                    assert_eq!(expected_windows_third(&p).unwrap(), expected_windows(&p), "n={n} ell={ell}");
                }
            }
        }
    }

    /// Expected absorption times of the layered middle chain by Gauss–Jordan
    /// elimination over exact rationals.
    fn chain_solve(p: &WindowsParams) -> Vec<Vec<ExactRational>> {
        let (n, l) = (p.n as i64, p.ell as i64);
        let w = p.n_windows() as i64;
        let mid = (n - 2 * l) as usize;
        let idx = |i: usize, k: usize| i * 3 + k;
        let size = (mid + 1) * 3;
        // rows: E[x] - sum P(x->y) E[y] = 1 for non-absorbing x; E[(0,2)] = 0
        let mut a = vec![vec![ExactRational::zero(); size + 1]; size];
        for i in 0..=mid {
            for k in 0..3usize {
                let row = idx(i, k);
                a[row][row] = integer(1);
                if i == 0 && k == 2 {
                    continue;
                }
                a[row][size] = integer(1);
                let mut go = |target: usize, count: i64| {
                    a[row][target] -= ratio(count as u64, w as u64);
                };
                if i > 0 {
                    go(idx(0, k), l - i as i64 + 1);
                    for j in 1..i {
                        go(idx(j, k), 2);
                    }
                }
                if k < 2 {
                    go(idx(i, k + 1), 2 - k as i64);
                }
                let stay = if i > 0 {
                    n - 2 * l - i as i64 + k as i64
                } else {
                    w - (2 - k as i64)
                };
                go(row, stay);
            }
        }
        for col in 0..size {
            let pivot = (col..size).find(|&r| !a[r][col].is_zero()).unwrap();
            a.swap(col, pivot);
            let inv = integer(1) / a[col][col].clone();
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..size {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in col..=size {
                        let sub = &f * &a[col][c];
                        a[r][c] -= sub;
                    }
                }
            }
        }
        (0..=mid)
            .map(|i| (0..3).map(|k| a[idx(i, k)][size].clone()).collect())
            .collect()
    }

    #[test]
    fn markov_closed_forms_match_chain() {
        assert_eq!(markov_middle_expectation(&wp(7, 3), 1, 2).unwrap(), ratio(5, 3));
        assert_eq!(markov_middle_expectation(&wp(7, 3), 0, 2).unwrap(), integer(0));
        for n in 5..=30u64 {
            for ell in 1..n {
                let p = wp(n, ell);
                if !p.is_third() {
                    continue;
                }
                let solved = chain_solve(&p);
                for (i, row) in solved.iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        assert_eq!(
                            markov_middle_expectation(&p, i as u64, k as u64).unwrap(),
                            *v,
                            "n={n} ell={ell} i={i} k={k}"
                        );
                    }
                }
                let top = n - 2 * ell;
                assert_eq!(
                    markov_middle_expectation(&p, top, 0).unwrap(),
                    expected_windows_third(&p).unwrap()
                );
            }
        }
        assert!(markov_middle_expectation(&wp(7, 3), 2, 0).is_err());
        assert!(markov_middle_expectation(&wp(7, 3), 0, 3).is_err());
        assert!(markov_middle_expectation(&wp(10, 3), 0, 0).is_err());
    }

    #[test]
    fn bounds_examples() {
        let (lo, hi) = windows_bounds(&wp(10, 5)).unwrap();
        assert_eq!(lo, integer(9));
        assert!(hi >= 9.0);
        let (lo, _) = windows_bounds(&wp(20, 2)).unwrap();
        assert!(lo >= integer(9) * harmonic(9));
        assert_eq!(lo, ratio(57, 2));
        assert!(windows_bounds(&wp(4, 4)).is_err());
    }

    #[test]
    fn bounds_bracket_exact_values() {
        for n in 2..=40u64 {
            for ell in 1..n {
                let p = wp(n, ell);
                let e = expected_windows(&p);
                let (lo, hi) = windows_bounds(&p).unwrap();
                assert!(lo <= e, "lower n={n} ell={ell}");
                assert!(to_f64(&e) <= hi * (1.0 + 1e-12), "upper n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn residual_examples() {
        let c3 = integer(3);
        assert_eq!(large_ell_residual(&wp(10, 5), &integer(2)).unwrap(), integer(0));
        assert_eq!(large_ell_residual(&wp(7, 3), &c3).unwrap(), ratio(1, 6));
        assert_eq!(large_ell_residual(&wp(30, 10), &c3).unwrap(), ratio(14, 143));
        assert!(large_ell_residual(&wp(30, 9), &c3).is_err());
        assert!(large_ell_residual(&wp(30, 10), &integer(1)).is_err());
    }
}
