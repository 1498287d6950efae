//! Exhaustive experiments over small uniform regular hypergraphs.
//!
//! For given `(n, ell)` every subset of the `C(n, ell)` possible edges is
//! screened; those where all vertices have the same positive degree are kept
//! (labeled, no isomorphism reduction). Each gets its exact expectation, and
//! the collection is checked against the open conjectures (reported, never
//! fatal) and the proven universal upper bound (fatal on failure).

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::batch::{polya_expected, universal_upper, BatchParams};
use crate::error::{Error, Result};
use crate::exact::{binomial, harmonic, integer, to_f64, ExactRational};
use crate::hypergraph::{expected_coverage_ie_with, Caps, CoverageModel, VertexSet};

/// Candidate-edge cap: the search scans `2^C(n, ell)` subsets.
pub const MAX_CANDIDATE_EDGES: u64 = 24;

/// A covering hypergraph whose edges all have size `ell` and whose vertices
/// all have degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformRegularModel {
    /// Bit `j` set when the `j`-th `ell`-subset in lexicographic order is an edge.
    pub edges_bitmask: u32,
    pub model: CoverageModel,
    pub degree: usize,
    pub ell: usize,
}

/// All `ell`-subsets of `0..n` in lexicographic order, as vertex bit masks.
fn candidate_edges(n: usize, ell: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..ell).collect();
    loop {
        out.push(idx.iter().fold(0u32, |m, &v| m | 1 << v));
        let Some(pos) = (0..ell).rev().find(|&j| idx[j] < n - ell + j) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..ell {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn enumerate_uniform_regular(n: u64, ell: u64) -> Result<Vec<UniformRegularModel>> {
    BatchParams::new(n, ell)?;
    let count = binomial(n as i64, ell as i64);
    if count > MAX_CANDIDATE_EDGES.into() {
        return Err(Error::Capacity {
            what: "candidate edges C(n, ell)",
            got: u64::try_from(count).unwrap_or(u64::MAX),
            cap: MAX_CANDIDATE_EDGES,
        });
    }
    let (n, ell) = (n as usize, ell as usize);
    let candidates = candidate_edges(n, ell);
    // incidence[v]: candidate edges containing v
    let incidence: Vec<u32> = (0..n)
        .map(|v| {
            candidates
                .iter()
                .enumerate()
                .filter(|(_, &e)| e >> v & 1 == 1)
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let regular: Vec<(u32, usize)> = (1u32..1 << candidates.len())
        .into_par_iter()
        .filter_map(|mask| {
            let degree = (mask & incidence[0]).count_ones();
            (degree > 0 && incidence.iter().all(|&inc| (mask & inc).count_ones() == degree))
                .then_some((mask, degree as usize))
        })
        .collect();
    regular
        .into_iter()
        .map(|(mask, degree)| {
            let edges = (0..candidates.len())
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| VertexSet::from_indices(n, (0..n).filter(|v| candidates[j] >> v & 1 == 1)))
                .collect();
            Ok(UniformRegularModel {
                edges_bitmask: mask,
                model: CoverageModel::new(n, edges)?,
                degree,
                ell,
            })
        })
        .collect()
}

/// A nested or cardinality-ordered pair `(smaller, larger)` whose expectations
/// go the wrong way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub smaller: u32,
    pub larger: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub nested_pairs: u64,
    pub nested_violations: Vec<PairViolation>,
    /// Pairs with strictly fewer edges in the first model, nested or not.
    pub cardinality_pairs: u64,
    pub cardinality_violations: Vec<PairViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchMaxReport {
    pub max_bitmask: u32,
    pub max_expectation: String,
    pub batch_expectation: String,
    /// Models whose expectation exceeds the full batch model's.
    pub exceedances: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerReport {
    pub bound: String,
    pub min_bitmask: u32,
    pub min_expectation: String,
    /// Models strictly below the bound.
    pub below: Vec<u32>,
    /// With `ell | n`: whether some model of `n/ell` disjoint edges attains the minimum.
    pub partition_attains_min: Option<bool>,
}

/// Enumerated models with exact expectations and all three conjecture reports.
#[derive(Clone, Debug)]
pub struct LabOutcome {
    pub n: u64,
    pub ell: u64,
    pub models: Vec<UniformRegularModel>,
    pub expectations: Vec<ExactRational>,
    pub universal_upper: f64,
    pub monotonicity: MonotonicityReport,
    pub batch_max: BatchMaxReport,
    pub lower: LowerReport,
}

fn exact_all(models: &[UniformRegularModel], n: u64, ell: u64) -> Result<(Vec<ExactRational>, f64)> {
    let caps = Caps {
        max_ie_vertices: n as usize,
        ..Caps::default()
    };
    let expectations = models
        .par_iter()
        .map(|m| expected_coverage_ie_with(&m.model, caps))
        .collect::<Result<Vec<_>>>()?;
    let bound = universal_upper(n, ell)?;
    for (m, e) in models.iter().zip(&expectations) {
        if to_f64(e) > bound {
            return Err(Error::Consistency(format!(
                "model {:#x} has expectation {e} above the universal bound {bound}",
                m.edges_bitmask
            )));
        }
    }
    Ok((expectations, bound))
}

pub fn run_lab(n: u64, ell: u64) -> Result<LabOutcome> {
    let models = enumerate_uniform_regular(n, ell)?;
    let (expectations, bound) = exact_all(&models, n, ell)?;
    let monotonicity = monotonicity_report(&models, &expectations);
    let batch_max = batch_max_report(&models, &expectations, n, ell)?;
    let lower = lower_report(&models, &expectations, n, ell);
    Ok(LabOutcome {
        n,
        ell,
        models,
        expectations,
        universal_upper: bound,
        monotonicity,
        batch_max,
        lower,
    })
}

/// Nested edge sets should have nested expectations.
pub fn test_conjecture_monotonicity(n: u64, ell: u64) -> Result<MonotonicityReport> {
    let models = enumerate_uniform_regular(n, ell)?;
    let (e, _) = exact_all(&models, n, ell)?;
    Ok(monotonicity_report(&models, &e))
}

/// No uniform regular model should beat the full batch model.
pub fn test_conjecture_batch_max(n: u64, ell: u64) -> Result<BatchMaxReport> {
    let models = enumerate_uniform_regular(n, ell)?;
    let (e, _) = exact_all(&models, n, ell)?;
    batch_max_report(&models, &e, n, ell)
}

/// No uniform regular model should fall below `m H_m`, `m = floor(n/ell)`.
pub fn test_conjecture_lower(n: u64, ell: u64) -> Result<LowerReport> {
    let models = enumerate_uniform_regular(n, ell)?;
    let (e, _) = exact_all(&models, n, ell)?;
    Ok(lower_report(&models, &e, n, ell))
}

fn monotonicity_report(models: &[UniformRegularModel], e: &[ExactRational]) -> MonotonicityReport {
    let mut report = MonotonicityReport {
        nested_pairs: 0,
        nested_violations: Vec::new(),
        cardinality_pairs: 0,
        cardinality_violations: Vec::new(),
    };
    for (i, a) in models.iter().enumerate() {
        for (j, b) in models.iter().enumerate() {
            if i == j {
                continue;
            }
            let (ma, mb) = (a.edges_bitmask, b.edges_bitmask);
            let violation = || PairViolation { smaller: ma, larger: mb };
            if ma & mb == ma {
                report.nested_pairs += 1;
                if e[i] > e[j] {
                    report.nested_violations.push(violation());
                }
            }
            if ma.count_ones() < mb.count_ones() {
                report.cardinality_pairs += 1;
                if e[i] > e[j] {
                    report.cardinality_violations.push(violation());
                }
            }
        }
    }
    report
}

fn argmax(e: &[ExactRational], max: bool) -> usize {
    let mut best = 0;
    for i in 1..e.len() {
        if (max && e[i] > e[best]) || (!max && e[i] < e[best]) {
            best = i;
        }
    }
    best
}

fn batch_max_report(
    models: &[UniformRegularModel],
    e: &[ExactRational],
    n: u64,
    ell: u64,
) -> Result<BatchMaxReport> {
    let p = BatchParams::new(n, ell)?;
    let batch = polya_expected(&p);
    let best = argmax(e, true);
    Ok(BatchMaxReport {
        max_bitmask: models[best].edges_bitmask,
        max_expectation: e[best].to_string(),
        batch_expectation: batch.to_string(),
        exceedances: models
            .iter()
            .zip(e)
            .filter(|(_, x)| **x > batch)
            .map(|(m, _)| m.edges_bitmask)
            .collect(),
    })
}

fn lower_report(models: &[UniformRegularModel], e: &[ExactRational], n: u64, ell: u64) -> LowerReport {
    let m = n / ell;
    let bound = integer(m) * harmonic(m);
    let best = argmax(e, false);
    let partition_attains_min = (n % ell == 0).then(|| {
        models
            .iter()
            .zip(e)
            .any(|(model, x)| model.model.n_edges() as u64 == m && *x == e[best])
    });
    LowerReport {
        bound: bound.to_string(),
        min_bitmask: models[best].edges_bitmask,
        min_expectation: e[best].to_string(),
        below: models
            .iter()
            .zip(e)
            .filter(|(_, x)| **x < bound)
            .map(|(model, _)| model.edges_bitmask)
            .collect(),
        partition_attains_min,
    }
}

/// One line per model: `edges_bitmask,degree,num/den,verdicts`, where the
/// verdicts are `;`-separated `check=ok|fail` entries.
pub fn write_verdicts(outcome: &LabOutcome, out: &mut impl Write) -> Result<()> {
    writeln!(out, "edges_bitmask,degree,expectation,verdicts")?;
    let batch = &outcome.batch_max;
    let lower = &outcome.lower;
    let mono = &outcome.monotonicity;
    for (m, e) in outcome.models.iter().zip(&outcome.expectations) {
        let mask = m.edges_bitmask;
        let flag = |bad: bool| if bad { "fail" } else { "ok" };
        let in_pair = |v: &[PairViolation]| v.iter().any(|p| p.smaller == mask || p.larger == mask);
        writeln!(
            out,
            "{mask},{},{}/{},universal_upper=ok;batch_max={};lower={};monotone_nested={};monotone_cardinality={}",
            m.degree,
            e.numer(),
            e.denom(),
            flag(batch.exceedances.contains(&mask)),
            flag(lower.below.contains(&mask)),
            flag(in_pair(&mono.nested_violations)),
            flag(in_pair(&mono.cardinality_violations)),
        )?;
    }
    Ok(())
}
