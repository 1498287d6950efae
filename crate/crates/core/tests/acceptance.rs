//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use coverkit::batch::{
    polya_expected, sandwich_bounds, stadje_expected, BatchParams, PartialTarget,
};
use coverkit::continuous::{dominance_gap, stevens_exact, stevens_float, ArcParams};
use coverkit::cyclic::{beta_cyclic, alpha_cyclic, expected_cyclic, expected_cyclic_l2, CyclicParams};
use coverkit::exact::{harmonic, integer, ratio, to_f64};
use coverkit::hypergraph::{
    cyclic_windows_model, expected_coverage_exact, expected_coverage_ie_with, recovery_profile,
    windows_model, Caps,
};
use coverkit::lab::run_lab;
use coverkit::sim::{
    simulate, simulate_coupled_arc_window, simulate_coupled_delta, simulate_coupled_torus_delta,
    ModelSpec,
};
use coverkit::windows::{
    expected_windows, expected_windows_altform, expected_windows_large, expected_windows_third,
    WindowsParams,
};
use coverkit::Error;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T>(r: coverkit::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, budget: Duration) -> Check {
    let spent = start.elapsed();
    ensure!(spent < budget, "took {spent:?}, budget {budget:?}");
    Ok(())
}

const IE_CAPS: Caps = Caps {
    max_profile_edges: 22,
    max_ie_vertices: 20,
};

fn oracle_triangle() -> Check {
    let start = Instant::now();
    for n in 2..=14u64 {
        for ell in 1..=n {
            let p = ok(WindowsParams::new(n, ell))?;
            let formula = expected_windows(&p);
            let model = ok(windows_model(n as usize, ell as usize))?;
            let profile = expected_coverage_exact(&ok(recovery_profile(&model))?);
            let ie = ok(expected_coverage_ie_with(&model, IE_CAPS))?;
            ensure!(formula == profile && formula == ie, "routes disagree at n={n} l={ell}");
            match expected_windows_altform(&p) {
                Ok(alt) => ensure!(alt == formula, "alternative form differs at n={n} l={ell}"),
                // the alternative form is stated for n > l only
                Err(Error::Domain { .. }) if ell == n => {}
                Err(e) => return Err(format!("alternative form at n={n} l={ell}: {e}")),
            }
        }
    }
    within(start, Duration::from_secs(120))
}

fn cyclic_consistency() -> Check {
    let start = Instant::now();
    for n in 2..=14u64 {
        for ell in 1..=n {
            let formula = expected_cyclic(&ok(CyclicParams::new(n, ell))?);
            let model = ok(cyclic_windows_model(n as usize, ell as usize))?;
            let profile = expected_coverage_exact(&ok(recovery_profile(&model))?);
            let ie = ok(expected_coverage_ie_with(&model, IE_CAPS))?;
            ensure!(formula == profile && formula == ie, "routes disagree at n={n} l={ell}");
        }
    }
    for n in 2..=60u64 {
        let general = expected_cyclic(&ok(CyclicParams::new(n, 2))?);
        ensure!(ok(expected_cyclic_l2(n))? == general, "l=2 form differs at n={n}");
        for ell in 1..=n {
            let p = ok(CyclicParams::new(n, ell))?;
            for s in 1..=n {
                let alpha = ok(alpha_cyclic(&p, s))?;
                let beta = ok(beta_cyclic(&p, s))?;
                ensure!(alpha * s == beta * n, "s alpha != n beta at n={n} l={ell} s={s}");
            }
        }
    }
    within(start, Duration::from_secs(120))
}

fn closed_form_regimes() -> Check {
    for n in 2..=60u64 {
        for ell in 1..n {
            let p = ok(WindowsParams::new(n, ell))?;
            let e = expected_windows(&p);
            if 2 * ell >= n {
                ensure!(ok(expected_windows_large(&p))? == e, "large form differs at n={n} l={ell}");
            } else if 3 * ell >= n {
                ensure!(ok(expected_windows_third(&p))? == e, "third form differs at n={n} l={ell}");
            }
        }
    }
    let p = ok(WindowsParams::new(7, 3))?;
    ensure!(expected_windows(&p) == ratio(23, 3), "E(7,3) = {}", expected_windows(&p));
    ensure!(ok(expected_windows_third(&p))? == ratio(23, 3), "closed form at (7,3)");
    Ok(())
}

fn stevens_anchors() -> Check {
    let start = Instant::now();
    ensure!(stevens_exact(&ok(ArcParams::from_ratio(1, 2))?) == integer(5), "a=1/2");
    ensure!(stevens_exact(&ok(ArcParams::from_ratio(9, 10))?) == ratio(181, 81), "a=9/10");
    for q in [2u64, 3, 10] {
        let a = ratio(1, q);
        let exact = stevens_float(&ok(ArcParams::new(a.clone()))?);
        let r = ok(simulate(&ModelSpec::Arcs { a }, 1_000_000, 20_251_016))?;
        ensure!(
            r.contains(exact),
            "a=1/{q}: mean {} +- {} misses {exact}",
            r.mean,
            r.ci99_halfwidth
        );
    }
    within(start, Duration::from_secs(60))
}

fn dominance_and_couplings() -> Check {
    for n in 2..=60u64 {
        for ell in 1..n {
            let gap = ok(dominance_gap(n, ell))?;
            ensure!(gap >= integer(0), "negative gap at n={n} l={ell}");
        }
    }
    let trials = 100_000;
    let runs = [
        ("arc->cyclic", simulate_coupled_arc_window(12, 4, trials, 1)),
        ("delta-d", simulate_coupled_delta(24, 6, 3, trials, 2)),
        (
            "torus delta",
            simulate_coupled_torus_delta(&[8, 8], &[4, 4], &[2, 2], trials, 3),
        ),
    ];
    for (name, r) in runs {
        let r = r.map_err(|e| format!("{name}: {e}"))?;
        ensure!(r.pairs.len() as u64 == trials, "{name}: short run");
        let bad = r.pairs.iter().filter(|(a, b)| a > b).count();
        ensure!(bad == 0, "{name}: {bad} violations");
    }
    Ok(())
}

fn batch_formulas() -> Check {
    for n in 1..=40u64 {
        let p = ok(BatchParams::new(n, 1))?;
        ensure!(polya_expected(&p) == integer(n) * harmonic(n), "n H_n at n={n}");
    }
    for n in 1..=10u64 {
        for ell in 1..=n {
            let p = ok(BatchParams::new(n, ell))?;
            let full = ok(PartialTarget::new(n, n))?;
            ensure!(ok(stadje_expected(&p, &full))? == polya_expected(&p), "n={n} l={ell}");
        }
    }
    for n in 2..=12u64 {
        for ell in 1..n {
            let p = ok(BatchParams::new(n, ell))?;
            let width_cap = integer(1) + ratio(ell, n);
            for m in 1..=n {
                for k in 1..=m {
                    let t = ok(PartialTarget::new(m, k))?;
                    let (lo, hi) = ok(sandwich_bounds(&p, &t))?;
                    let e = ok(stadje_expected(&p, &t))?;
                    ensure!(lo <= e && e <= hi, "bracket misses at n={n} l={ell} m={m} k={k}");
                    ensure!(&hi - &lo < width_cap, "width at n={n} l={ell} m={m} k={k}");
                }
            }
        }
    }
    Ok(())
}

fn universal_bounds() -> Check {
    for (n, ell) in [(3u64, 2u64), (4, 2), (5, 2), (6, 2), (6, 3)] {
        // run_lab fails hard if any model exceeds (n/l)(ln n + 1)
        let lab = ok(run_lab(n, ell))?;
        for e in &lab.expectations {
            ensure!(to_f64(e) <= lab.universal_upper, "upper bound at ({n},{ell})");
        }
        if n % ell == 0 {
            ensure!(lab.lower.below.is_empty(), "lower bound report at ({n},{ell}): {:?}", lab.lower.below);
        }
    }
    let lab = ok(run_lab(4, 2))?;
    ensure!(lab.models.len() == 7, "{} models for (4,2)", lab.models.len());
    let min = lab.expectations.iter().min().unwrap();
    let max = lab.expectations.iter().max().unwrap();
    ensure!(*min == integer(3), "min {min}");
    ensure!(*max == polya_expected(&ok(BatchParams::new(4, 2))?), "max {max}");
    for (m, e) in lab.models.iter().zip(&lab.expectations) {
        ensure!((m.degree == 1) == (*e == integer(3)), "value 3 must be exactly the matchings");
    }
    Ok(())
}

fn asymptotic_trends() -> Check {
    // Pinned tolerances: ratio in [1, 1.5] and strictly decreasing; the
    // scaled residual n^2 |E - 3W/2| at most 200 with max/min at most 2.
    let mut last = f64::INFINITY;
    for n in [200u64, 400, 800] {
        let e = to_f64(&expected_cyclic(&ok(CyclicParams::new(n, 2))?));
        let half = n as f64 / 2.0;
        let r = e / (half * half.ln());
        ensure!((1.0..=1.5).contains(&r), "ratio {r} at n={n}");
        ensure!(r < last, "ratio not decreasing at n={n}");
        last = r;
    }
    let mut scaled = Vec::new();
    for n in [30u64, 60, 120] {
        for ell in n.div_ceil(3)..n {
            let p = ok(WindowsParams::new(n, ell))?;
            let res = expected_windows(&p) - ratio(3 * p.n_windows(), 2);
            let s = to_f64(&res).abs() * (n * n) as f64;
            ensure!(s <= 200.0, "n^2 residual {s} at n={n} l={ell}");
            if ell == n / 3 {
                scaled.push(s);
            }
        }
    }
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    ensure!(hi <= 2.0 * lo, "scaled residuals {scaled:?} drift");
    Ok(())
}

fn run_cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_coverkit"))
        .args(args)
        .env("COVERKIT_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in ["1", "4"] {
        let trials = dir.path().join(format!("trials_{threads}.csv"));
        let pairs = dir.path().join(format!("pairs_{threads}.csv"));
        let trials_s = trials.to_str().unwrap();
        let pairs_s = pairs.to_str().unwrap();
        let mut got = vec![
            run_cli(
                &["simulate", "--model", "cyclic", "-n", "30", "-l", "4", "--trials", "20000",
                  "--seed", "99", "--format", "csv", "--per-trial", trials_s],
                threads,
            )?,
            run_cli(
                &["simulate", "--model", "arcs", "-a", "1/7", "--trials", "20000", "--seed", "5",
                  "--format", "csv"],
                threads,
            )?,
            run_cli(
                &["couple", "--kind", "delta", "-n", "24", "-l", "6", "-d", "3", "--trials",
                  "20000", "--seed", "3", "--format", "csv", "--per-trial", pairs_s],
                threads,
            )?,
            run_cli(&["sweep", "--model", "windows", "--n-range", "2..12", "--format", "csv"], threads)?,
        ];
        got.push(std::fs::read(&trials).map_err(|e| e.to_string())?);
        got.push(std::fs::read(&pairs).map_err(|e| e.to_string())?);
        outputs.push(got);
    }
    for (i, (a, b)) in outputs[0].iter().zip(&outputs[1]).enumerate() {
        ensure!(a == b, "output {i} differs between 1 and 4 workers");
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("oracle triangle", oracle_triangle),
        ("cyclic consistency", cyclic_consistency),
        ("closed-form regimes", closed_form_regimes),
        ("arc anchors and Monte Carlo", stevens_anchors),
        ("dominance and couplings", dominance_and_couplings),
        ("batch formulas", batch_formulas),
        ("universal bounds and lab", universal_bounds),
        ("finite-size trends", asymptotic_trends),
        ("determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {} {name} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
