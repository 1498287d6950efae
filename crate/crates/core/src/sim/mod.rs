//! Seeded Monte Carlo estimates of coverage times.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream
//! `i`, so a trial's randomness depends only on `(seed, i)`. Trials run in
//! parallel and are collected in index order; aggregates are integer sums, so
//! results are bit-identical for any worker count.

mod coupled;
mod trial;

pub use coupled::{
    simulate_coupled_arc_window, simulate_coupled_delta, simulate_coupled_torus_delta,
    CoupledResult,
};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::batch::DemandVector;
use crate::error::{Error, Result};
use crate::exact::{integer, ratio, to_f64, ExactRational};
use crate::hypergraph::CoverageModel;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// Largest universe the simulator will allocate per trial.
pub const MAX_SIM_CELLS: u64 = 1 << 26;

/// What gets drawn each round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Windows { n: u64, ell: u64 },
    CyclicWindows { n: u64, ell: u64 },
    Batch { n: u64, ell: u64 },
    Arcs { a: ExactRational },
    DeltaD { n: u64, ell: u64, d: u64 },
    Torus { dims: Vec<u64>, window: Vec<u64> },
    HammingBalls { d: u32, t: u32 },
    Demand { n: u64, ell: u64, v: DemandVector },
    Explicit(CoverageModel),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let window = |n: u64, ell: u64| {
            if n == 0 || ell == 0 || ell > n {
                return Err(Error::input(format!("needs 1 <= ell <= n, got n={n}, ell={ell}")));
            }
            cells(n)
        };
        match self {
            ModelSpec::Windows { n, ell }
            | ModelSpec::CyclicWindows { n, ell }
            | ModelSpec::Batch { n, ell } => window(*n, *ell),
            ModelSpec::Arcs { a } => {
                if *a <= integer(0) || *a >= integer(1) {
                    return Err(Error::input(format!("arc length must lie in (0, 1), got {a}")));
                }
                Ok(())
            }
            ModelSpec::DeltaD { n, ell, d } => {
                crate::cyclic::DeltaDParams::new(*n, *ell, *d)?;
                cells(*n)
            }
            ModelSpec::Torus { dims, window } => {
                if dims.is_empty() || dims.len() != window.len() {
                    return Err(Error::input(format!(
                        "torus needs matching non-empty dims and window, got {} and {}",
                        dims.len(),
                        window.len()
                    )));
                }
                let mut total = 1u64;
                for (&size, &w) in dims.iter().zip(window) {
                    if size == 0 || w == 0 || w > size {
                        return Err(Error::input(format!(
                            "torus window {w} does not fit dimension {size}"
                        )));
                    }
                    total = total.saturating_mul(size);
                }
                cells(total)
            }
            ModelSpec::HammingBalls { d, t } => {
                if *d == 0 || t > d {
                    return Err(Error::input(format!("needs 1 <= d and t <= d, got d={d}, t={t}")));
                }
                cells(1u64.checked_shl(*d).unwrap_or(u64::MAX))
            }
            ModelSpec::Demand { n, ell, v } => {
                window(*n, *ell)?;
                if v.len() as u64 != *n {
                    return Err(Error::input(format!(
                        "demand vector has {} entries for {n} items",
                        v.len()
                    )));
                }
                Ok(())
            }
            ModelSpec::Explicit(_) => Ok(()),
        }
    }

    /// Short label without commas, e.g. `cyclic n=4 l=2`, safe inside CSV.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Windows { n, ell } => format!("windows n={n} l={ell}"),
            ModelSpec::CyclicWindows { n, ell } => format!("cyclic n={n} l={ell}"),
            ModelSpec::Batch { n, ell } => format!("batch n={n} l={ell}"),
            ModelSpec::Arcs { a } => format!("arcs a={a}"),
            ModelSpec::DeltaD { n, ell, d } => format!("delta n={n} l={ell} d={d}"),
            ModelSpec::Torus { dims, window } => {
                format!("torus dims={} window={}", join(dims, "x"), join(window, "x"))
            }
            ModelSpec::HammingBalls { d, t } => format!("hamming d={d} t={t}"),
            ModelSpec::Demand { n, ell, v } => {
                format!("demand n={n} l={ell} v={}", join(v.as_slice(), ":"))
            }
            ModelSpec::Explicit(m) => {
                format!("explicit vertices={} edges={}", m.n_vertices(), m.n_edges())
            }
        }
    }
}

fn cells(count: u64) -> Result<()> {
    if count > MAX_SIM_CELLS {
        return Err(Error::Capacity {
            what: "simulated universe size",
            got: count,
            cap: MAX_SIM_CELLS,
        });
    }
    Ok(())
}

fn join<T: std::fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Summary of a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance (0 for a single trial).
    pub variance: f64,
    pub ci99_halfwidth: f64,
    pub seed: u64,
}

impl SimResult {
    /// Aggregates exactly in integers, rounding to `f64` once at the end.
    pub fn from_times(times: &[u64], seed: u64) -> Result<Self> {
        Self::from_times_with_z(times, seed, Z99)
    }

    pub fn from_times_with_z(times: &[u64], seed: u64, z: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::input("at least one trial is required"));
        }
        let n = times.len() as u128;
        let sum: u128 = times.iter().map(|&t| t as u128).sum();
        let sum_sq: u128 = times.iter().map(|&t| (t as u128) * (t as u128)).sum();
        let mean = to_f64(&ratio(sum, n));
        let variance = if n > 1 {
            let spread = n * sum_sq - sum * sum;
            to_f64(&ratio(spread, n * (n - 1)))
        } else {
            0.0
        };
        Ok(SimResult {
            trials: n as u64,
            mean,
            variance,
            ci99_halfwidth: z * (variance / n as f64).sqrt(),
            seed,
        })
    }

    /// Whether `value` lies within the 99% half-width of the mean.
    pub fn contains(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.ci99_halfwidth
    }
}

pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Coverage time of every trial, in trial order.
pub fn simulate_times(spec: &ModelSpec, trials: u64, seed: u64) -> Result<Vec<u64>> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    spec.validate()?;
    let sampler = trial::Sampler::new(spec)?;
    Ok((0..trials)
        .into_par_iter()
        .map_init(
            || sampler.workspace(),
            |ws, i| sampler.run(ws, &mut trial_rng(seed, i)),
        )
        .collect())
}

pub fn simulate(spec: &ModelSpec, trials: u64, seed: u64) -> Result<SimResult> {
    SimResult::from_times(&simulate_times(spec, trials, seed)?, seed)
}

/// `ell`-batches until item `i` has been seen `v[i]` times.
pub fn simulate_demand(n: u64, ell: u64, v: &DemandVector, trials: u64, seed: u64) -> Result<SimResult> {
    simulate(
        &ModelSpec::Demand {
            n,
            ell,
            v: v.clone(),
        },
        trials,
        seed,
    )
}

/// Random `window[0] x window[1] x ...` patches on a torus with side lengths `dims`.
pub fn simulate_torus(dims: &[u64], window: &[u64], trials: u64, seed: u64) -> Result<SimResult> {
    simulate(
        &ModelSpec::Torus {
            dims: dims.to_vec(),
            window: window.to_vec(),
        },
        trials,
        seed,
    )
}

/// Per-trial CSV with header `trial,seed_stream,time`; the stream is the trial index.
pub fn write_per_trial_csv(out: &mut impl Write, times: &[u64]) -> Result<()> {
    writeln!(out, "trial,seed_stream,time")?;
    for (i, t) in times.iter().enumerate() {
        writeln!(out, "{i},{i},{t}")?;
    }
    Ok(())
}

/// Per-trial CSV for coupled runs, `trial,seed_stream,time,time_b`.
pub fn write_per_trial_pairs_csv(out: &mut impl Write, pairs: &[(u64, u64)]) -> Result<()> {
    writeln!(out, "trial,seed_stream,time,time_b")?;
    for (i, (a, b)) in pairs.iter().enumerate() {
        writeln!(out, "{i},{i},{a},{b}")?;
    }
    Ok(())
}
