//! Paired simulations on shared randomness.
//!
//! Each coupling maps one stream of draws to two processes where one can
//! never finish later than the other. Every trial is checked; a single
//! violation aborts with [`Error::Coupling`].

use rand::Rng;
use rayon::prelude::*;

use super::trial::{arc_start, arc_threshold, mark_patch, ArcCover, Cover, ARC_GRID_BITS};
use super::{trial_rng, SimResult};
use crate::cyclic::DeltaDParams;
use crate::error::{Error, Result};
use crate::exact::ratio;

/// Per-trial `(time_a, time_b)` with `time_a <= time_b`, plus summaries of each side.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledResult {
    pub pairs: Vec<(u64, u64)>,
    pub first: SimResult,
    pub second: SimResult,
}

fn finish(pairs: Vec<Result<(u64, u64)>>, seed: u64) -> Result<CoupledResult> {
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let a: Vec<u64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<u64> = pairs.iter().map(|p| p.1).collect();
    Ok(CoupledResult {
        first: SimResult::from_times(&a, seed)?,
        second: SimResult::from_times(&b, seed)?,
        pairs,
    })
}

fn check(trial: u64, a: u64, b: u64, what: &str) -> Result<(u64, u64)> {
    if a > b {
        return Err(Error::Coupling {
            trial,
            detail: format!("{what}: dominated process took {a} draws, dominating one {b}"),
        });
    }
    Ok((a, b))
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    Ok(())
}

/// Arcs of length `ell/n` against cyclic windows of length `ell` on `n` cells.
///
/// An arc start `k / 2^53` is mapped to the window start `floor(n k / 2^53)`.
/// Pairs are `(t_discrete, t_continuous)`.
pub fn simulate_coupled_arc_window(n: u64, ell: u64, trials: u64, seed: u64) -> Result<CoupledResult> {
    require_trials(trials)?;
    if ell == 0 || ell >= n {
        return Err(Error::domain(
            "arc/window coupling",
            format!("needs 1 <= ell < n so that a = ell/n < 1, got n={n}, ell={ell}"),
        ));
    }
    super::cells(n)?;
    let threshold = arc_threshold(&ratio(ell, n));
    let (nu, lu) = (n as usize, ell as usize);
    let pairs = (0..trials)
        .into_par_iter()
        .map_init(
            || (Cover::new(nu), ArcCover::new(threshold)),
            |(cover, arcs), trial| {
                let mut rng = trial_rng(seed, trial);
                cover.reset();
                arcs.reset();
                let (mut t_disc, mut t_cont) = (None, None);
                let mut draws = 0u64;
                while t_disc.is_none() || t_cont.is_none() {
                    draws += 1;
                    let x = arc_start(&mut rng);
                    if t_disc.is_none() {
                        let start = ((n as u128 * x as u128) >> ARC_GRID_BITS) as usize;
                        cover.mark_cyclic(start, lu);
                        if cover.done() {
                            t_disc = Some(draws);
                        }
                    }
                    if arcs.insert(x) && t_cont.is_none() {
                        t_cont = Some(draws);
                    }
                }
                check(trial, t_disc.unwrap(), t_cont.unwrap(), "arc/window")
            },
        )
        .collect();
    finish(pairs, seed)
}

/// Cyclic windows with raw starts against the same starts rounded down to
/// multiples of `d`. Pairs are `(t_delta, t_full)`.
pub fn simulate_coupled_delta(n: u64, ell: u64, d: u64, trials: u64, seed: u64) -> Result<CoupledResult> {
    require_trials(trials)?;
    DeltaDParams::new(n, ell, d)?;
    super::cells(n)?;
    let (nu, lu, du) = (n as usize, ell as usize, d as usize);
    let pairs = (0..trials)
        .into_par_iter()
        .map_init(
            || (Cover::new(nu), Cover::new(nu)),
            |(full, delta), trial| {
                let mut rng = trial_rng(seed, trial);
                full.reset();
                delta.reset();
                let (mut t_full, mut t_delta) = (None, None);
                let mut draws = 0u64;
                while t_full.is_none() || t_delta.is_none() {
                    draws += 1;
                    let s = rng.gen_range(0..n) as usize;
                    if t_full.is_none() {
                        full.mark_cyclic(s, lu);
                        if full.done() {
                            t_full = Some(draws);
                        }
                    }
                    if t_delta.is_none() {
                        delta.mark_cyclic(du * (s / du), lu);
                        if delta.done() {
                            t_delta = Some(draws);
                        }
                    }
                }
                check(trial, t_delta.unwrap(), t_full.unwrap(), "delta-d")
            },
        )
        .collect();
    finish(pairs, seed)
}

/// The torus version of [`simulate_coupled_delta`]: each coordinate of a
/// patch origin is rounded down to a multiple of `d[i]`, with
/// `d[i] | window[i] | dims[i]`.
pub fn simulate_coupled_torus_delta(
    dims: &[u64],
    window: &[u64],
    d: &[u64],
    trials: u64,
    seed: u64,
) -> Result<CoupledResult> {
    require_trials(trials)?;
    super::ModelSpec::Torus {
        dims: dims.to_vec(),
        window: window.to_vec(),
    }
    .validate()?;
    if d.len() != dims.len() {
        return Err(Error::input(format!(
            "need one spacing per dimension, got {} for {}",
            d.len(),
            dims.len()
        )));
    }
    for i in 0..dims.len() {
        DeltaDParams::new(dims[i], window[i], d[i])?;
    }
    let dims: Vec<usize> = dims.iter().map(|&x| x as usize).collect();
    let window: Vec<usize> = window.iter().map(|&x| x as usize).collect();
    let d: Vec<usize> = d.iter().map(|&x| x as usize).collect();
    let mut strides = vec![1; dims.len()];
    for i in 1..dims.len() {
        strides[i] = strides[i - 1] * dims[i - 1];
    }
    let cells: usize = dims.iter().product();
    let k = dims.len();
    let pairs = (0..trials)
        .into_par_iter()
        .map_init(
            || (Cover::new(cells), Cover::new(cells), vec![0; k], vec![0; k], vec![0; k]),
            |(full, delta, origin, snapped, offset), trial| {
                let mut rng = trial_rng(seed, trial);
                full.reset();
                delta.reset();
                let (mut t_full, mut t_delta) = (None, None);
                let mut draws = 0u64;
                while t_full.is_none() || t_delta.is_none() {
                    draws += 1;
                    for i in 0..k {
                        origin[i] = rng.gen_range(0..dims[i] as u64) as usize;
                        snapped[i] = d[i] * (origin[i] / d[i]);
                    }
                    if t_full.is_none() {
                        mark_patch(full, &dims, &window, &strides, origin, offset);
                        if full.done() {
                            t_full = Some(draws);
                        }
                    }
                    if t_delta.is_none() {
                        mark_patch(delta, &dims, &window, &strides, snapped, offset);
                        if delta.done() {
                            t_delta = Some(draws);
                        }
                    }
                }
                check(trial, t_delta.unwrap(), t_full.unwrap(), "torus delta")
            },
        )
        .collect();
    finish(pairs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_window_has_no_violations() {
        let r = simulate_coupled_arc_window(4, 2, 20_000, 11).unwrap();
        assert!(r.pairs.iter().all(|(d, c)| d <= c));
        assert_eq!(r.pairs.len(), 20_000);
        assert!(simulate_coupled_arc_window(10, 10, 10, 1).is_err());
    }

    #[test]
    fn delta_identity_gives_equal_times() {
        let r = simulate_coupled_delta(9, 3, 1, 2000, 4).unwrap();
        assert!(r.pairs.iter().all(|(a, b)| a == b));
        assert!(simulate_coupled_delta(8, 4, 3, 10, 1).is_err());
    }

    #[test]
    fn torus_delta_runs() {
        let r = simulate_coupled_torus_delta(&[4, 4], &[2, 2], &[2, 2], 5000, 8).unwrap();
        assert!(r.pairs.iter().all(|(a, b)| a <= b));
        assert!(simulate_coupled_torus_delta(&[4, 4], &[2, 2], &[2], 10, 1).is_err());
    }

    #[test]
    fn violations_are_reported_with_the_trial() {
        let err = check(17, 5, 4, "test").unwrap_err();
        assert!(matches!(err, Error::Coupling { trial: 17, .. }));
        assert_eq!(err.exit_code(), 4);
    }
}
