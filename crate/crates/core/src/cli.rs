//! Command-line front end: argument parsing, engine dispatch and rendering.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::batch::{
    polya_expected, sandwich_bounds, stadje_expected, universal_upper, BatchParams, DemandVector,
    PartialTarget,
};
use crate::continuous::{
    arc_upper_bound, dominance_gap, flatto_asymptotic, stevens_exact, stevens_float, ArcParams,
};
use crate::cyclic::{cyclic_lower_bound, expected_cyclic, expected_delta_d, CyclicParams, DeltaDParams};
use crate::error::{Error, Result};
use crate::exact::{format_decimal, integer, parse_rational, ratio, ExactRational};
use crate::hypergraph::{
    build_hamming_model_with, expected_coverage_exact, expected_coverage_ie_with, parse_model,
    recovery_profile_with, Caps, CoverageModel,
};
use crate::lab::{run_lab, write_verdicts};
use crate::sim::{
    simulate_coupled_arc_window, simulate_coupled_delta, simulate_coupled_torus_delta,
    simulate_times, write_per_trial_csv, write_per_trial_pairs_csv, CoupledResult, ModelSpec,
    SimResult,
};
use crate::windows::{
    expected_windows, expected_windows_large, expected_windows_third, windows_bounds, WindowsParams,
};

/// Sweep cells with `n` above this are reported as skipped.
pub const SWEEP_MAX_N: u64 = 1024;

#[derive(Parser, Debug)]
#[command(name = "coverkit", version, about = "Expected coverage times of random block draws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Largest edge count for the recovery-profile engine.
    #[arg(long, global = true, value_name = "N")]
    pub cap_edges: Option<usize>,

    /// Largest vertex count for the inclusion-exclusion engine.
    #[arg(long, global = true, value_name = "N")]
    pub cap_vertices: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    JsonLines,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact expectation as a rational and a decimal.
    Exact(ModelArgs),
    /// Exact value next to the available lower and upper bounds.
    Bounds(ModelArgs),
    /// Monte Carlo estimate with a 99% confidence interval.
    Simulate(SimulateArgs),
    /// Paired simulation on shared randomness, checked trial by trial.
    Couple(CoupleArgs),
    /// CSV grid over ranges of n and l.
    Sweep(SweepArgs),
    /// Enumerate uniform regular models and report on the conjectures.
    Conjectures(ConjectureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Windows,
    Cyclic,
    Batch,
    Arcs,
    Delta,
    Torus,
    Hamming,
    Demand,
    Explicit,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,

    /// Number of items.
    #[arg(short = 'n')]
    pub n: Option<u64>,

    /// Window or batch length.
    #[arg(short = 'l', long = "ell")]
    pub ell: Option<u64>,

    /// Arc length as `p/q` or a decimal.
    #[arg(short = 'a')]
    pub a: Option<String>,

    /// Start spacing for `delta`, cube dimension for `hamming`.
    #[arg(short = 'd')]
    pub d: Option<u64>,

    /// Ball radius for `hamming`.
    #[arg(short = 't')]
    pub t: Option<u32>,

    /// Target subset size for a partial batch target.
    #[arg(short = 'm')]
    pub m: Option<u64>,

    /// Number of target items that must be seen.
    #[arg(short = 'k')]
    pub k: Option<u64>,

    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<u64>,

    #[arg(long, value_delimiter = ',')]
    pub window: Vec<u64>,

    /// Demand per item; a single value applies to every item.
    #[arg(long, value_delimiter = ',')]
    pub demand: Vec<u32>,

    #[arg(long, value_name = "PATH")]
    pub model_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also write `trial,seed_stream,time` for every trial.
    #[arg(long, value_name = "PATH")]
    pub per_trial: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CouplingKind {
    /// Arcs of length l/n against cyclic windows.
    ArcWindow,
    /// Cyclic windows against starts rounded down to multiples of d.
    Delta,
    /// The same rounding per coordinate on a torus.
    TorusDelta,
}

#[derive(Args, Debug)]
pub struct CoupleArgs {
    #[arg(long, value_enum)]
    pub kind: CouplingKind,

    #[arg(short = 'n')]
    pub n: Option<u64>,

    #[arg(short = 'l', long = "ell")]
    pub ell: Option<u64>,

    #[arg(short = 'd')]
    pub d: Option<u64>,

    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<u64>,

    #[arg(long, value_delimiter = ',')]
    pub window: Vec<u64>,

    /// Per-coordinate spacing for `torus-delta`.
    #[arg(long, value_delimiter = ',')]
    pub spacing: Vec<u64>,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_name = "PATH")]
    pub per_trial: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepModel {
    Windows,
    Cyclic,
    Batch,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub model: SweepModel,

    /// Inclusive range `A..B`, or a single value.
    #[arg(long)]
    pub n_range: String,

    /// Inclusive range of l; defaults to `1..n` for each n.
    #[arg(long)]
    pub l_range: Option<String>,
}

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    #[arg(short = 'n')]
    pub n: u64,

    #[arg(short = 'l', long = "ell")]
    pub ell: u64,

    /// Write one verdict line per enumerated model here.
    #[arg(long, value_name = "PATH")]
    pub verdicts: Option<PathBuf>,
}

/// Rows of string cells, rendered the same way in every format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.header.join(","))?;
                for row in &self.rows {
                    writeln!(out, "{}", row.join(","))?;
                }
            }
            Format::Table => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, &w)| format!("{c:<w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string()
                };
                writeln!(out, "{}", line(&self.header))?;
                for row in &self.rows {
                    writeln!(out, "{}", line(row))?;
                }
            }
            Format::JsonLines => {
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| Ok(format!("{}:{}", serde_json::to_string(k)?, serde_json::to_string(v)?)))
                        .collect::<std::result::Result<_, serde_json::Error>>()
                        .map_err(|e| Error::Consistency(e.to_string()))?;
                    writeln!(out, "{{{}}}", fields.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// Reads `COVERKIT_THREADS` and sizes the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("COVERKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Error::input(format!("COVERKIT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Consistency(format!("could not size the worker pool: {e}")))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let caps = caps_from(cli);
    match &cli.command {
        Command::Exact(args) => run_exact(args, caps)?.render(cli.format, out),
        Command::Bounds(args) => run_bounds(args, caps)?.render(cli.format, out),
        Command::Simulate(args) => run_simulate(args)?.render(cli.format, out),
        Command::Couple(args) => run_couple(args)?.render(cli.format, out),
        Command::Sweep(args) => run_sweep(args)?.render(cli.format, out),
        Command::Conjectures(args) => run_conjectures(args)?.render(cli.format, out),
    }
}

fn caps_from(cli: &Cli) -> Caps {
    let d = Caps::default();
    Caps {
        max_profile_edges: cli.cap_edges.unwrap_or(d.max_profile_edges),
        max_ie_vertices: cli.cap_vertices.unwrap_or(d.max_ie_vertices),
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str, model: ModelKind) -> Result<T> {
    value.ok_or_else(|| Error::input(format!("--model {} needs {flag}", model_name(model))))
}

fn model_name(kind: ModelKind) -> String {
    kind.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn load_model_file(path: &Path) -> Result<CoverageModel> {
    parse_model(&fs::read_to_string(path)?)
}

pub fn model_spec(args: &ModelArgs) -> Result<ModelSpec> {
    let kind = args.model;
    let spec = match kind {
        ModelKind::Windows => ModelSpec::Windows {
            n: need(args.n, "-n", kind)?,
            ell: need(args.ell, "-l", kind)?,
        },
        ModelKind::Cyclic => ModelSpec::CyclicWindows {
            n: need(args.n, "-n", kind)?,
            ell: need(args.ell, "-l", kind)?,
        },
        ModelKind::Batch => ModelSpec::Batch {
            n: need(args.n, "-n", kind)?,
            ell: need(args.ell, "-l", kind)?,
        },
        ModelKind::Arcs => {
            let text = args.a.as_deref().ok_or_else(|| Error::input("--model arcs needs -a"))?;
            ModelSpec::Arcs { a: parse_rational(text)? }
        }
        ModelKind::Delta => ModelSpec::DeltaD {
            n: need(args.n, "-n", kind)?,
            ell: need(args.ell, "-l", kind)?,
            d: need(args.d, "-d", kind)?,
        },
        ModelKind::Torus => ModelSpec::Torus {
            dims: args.dims.clone(),
            window: args.window.clone(),
        },
        ModelKind::Hamming => {
            let d = need(args.d, "-d", kind)?;
            let d = u32::try_from(d).map_err(|_| Error::input(format!("cube dimension {d} is too large")))?;
            ModelSpec::HammingBalls {
                d,
                t: need(args.t, "-t", kind)?,
            }
        }
        ModelKind::Demand => {
            let n = need(args.n, "-n", kind)?;
            let v = match args.demand.as_slice() {
                [] => return Err(Error::input("--model demand needs --demand")),
                [m] => vec![*m; n as usize],
                v => v.to_vec(),
            };
            ModelSpec::Demand {
                n,
                ell: need(args.ell, "-l", kind)?,
                v: DemandVector::new(v)?,
            }
        }
        ModelKind::Explicit => {
            let path = args
                .model_file
                .as_deref()
                .ok_or_else(|| Error::input("--model explicit needs --model-file"))?;
            ModelSpec::Explicit(load_model_file(path)?)
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn partial_target(args: &ModelArgs) -> Result<Option<PartialTarget>> {
    match (args.m, args.k) {
        (None, None) => Ok(None),
        (Some(m), Some(k)) => Ok(Some(PartialTarget::new(m, k)?)),
        _ => Err(Error::input("-m and -k must be given together")),
    }
}

fn exact_hypergraph(model: &CoverageModel, caps: Caps) -> Result<(ExactRational, &'static str)> {
    if model.n_edges() <= caps.max_profile_edges {
        let profile = recovery_profile_with(model, caps)?;
        Ok((expected_coverage_exact(&profile), "recovery-profile"))
    } else {
        Ok((expected_coverage_ie_with(model, caps)?, "inclusion-exclusion"))
    }
}

/// Exact expectation of `spec` and the engine that produced it.
pub fn exact_value(spec: &ModelSpec, target: Option<PartialTarget>, caps: Caps) -> Result<(ExactRational, &'static str)> {
    if target.is_some() && !matches!(spec, ModelSpec::Batch { .. }) {
        return Err(Error::input("-m/-k apply to --model batch only"));
    }
    match spec {
        ModelSpec::Windows { n, ell } => Ok((expected_windows(&WindowsParams::new(*n, *ell)?), "windows-formula")),
        ModelSpec::CyclicWindows { n, ell } => Ok((expected_cyclic(&CyclicParams::new(*n, *ell)?), "cyclic-formula")),
        ModelSpec::Batch { n, ell } => {
            let p = BatchParams::new(*n, *ell)?;
            match target {
                Some(t) => Ok((stadje_expected(&p, &t)?, "partial-target-formula")),
                None => Ok((polya_expected(&p), "polya-formula")),
            }
        }
        ModelSpec::Arcs { a } => Ok((stevens_exact(&ArcParams::new(a.clone())?), "stevens-series")),
        ModelSpec::DeltaD { n, ell, d } => Ok((expected_delta_d(&DeltaDParams::new(*n, *ell, *d)?), "delta-reduction")),
        ModelSpec::HammingBalls { d, t } => exact_hypergraph(&build_hamming_model_with(*d, *t, caps)?, caps),
        ModelSpec::Explicit(model) => exact_hypergraph(model, caps),
        ModelSpec::Torus { .. } => Err(Error::input(
            "no exact engine for torus patches; estimate it with `coverkit simulate --model torus`",
        )),
        ModelSpec::Demand { .. } => Err(Error::input(
            "no exact engine for demand vectors; estimate it with `coverkit simulate --model demand`",
        )),
    }
}

fn run_exact(args: &ModelArgs, caps: Caps) -> Result<Table> {
    let spec = model_spec(args)?;
    let (e, engine) = exact_value(&spec, partial_target(args)?, caps)?;
    let mut table = Table::new(&["model", "e_exact", "e_decimal", "engine"]);
    table.push(vec![spec.label(), e.to_string(), format_decimal(&e), engine.to_string()]);
    Ok(table)
}

/// Shortest round-trip text for a float, with a trailing `.0` on integers.
pub fn format_float(x: f64) -> String {
    let s = format!("{x}");
    if x.is_finite() && !s.contains(['.', 'e']) {
        format!("{s}.0")
    } else {
        s
    }
}

fn cc_term(n: u64, ell: u64) -> f64 {
    let r = n as f64 / ell as f64;
    r * r.ln()
}

enum Value {
    Exact(ExactRational),
    Float(f64),
}

fn run_bounds(args: &ModelArgs, caps: Caps) -> Result<Table> {
    use Value::{Exact, Float};
    let spec = model_spec(args)?;
    let target = partial_target(args)?;
    let (e, _) = exact_value(&spec, target, caps)?;
    let mut rows: Vec<(&str, Value)> = vec![("e_exact", Exact(e))];
    match &spec {
        ModelSpec::Windows { n, ell } => {
            let p = WindowsParams::new(*n, *ell)?;
            let w = p.n_windows();
            rows.push(("linear_term", Exact(ratio(3 * w, 2))));
            if ell < n {
                let (lower, upper) = windows_bounds(&p)?;
                rows.push(("lower", Exact(lower)));
                rows.push(("upper", Float(upper)));
            } else {
                rows.push(("lower", Exact(integer(1))));
                rows.push(("upper", Exact(integer(1))));
            }
            if let Ok(v) = expected_windows_large(&p) {
                rows.push(("large_window_form", Exact(v)));
            }
            if let Ok(v) = expected_windows_third(&p) {
                rows.push(("third_window_form", Exact(v)));
            }
        }
        ModelSpec::CyclicWindows { n, ell } => {
            let p = CyclicParams::new(*n, *ell)?;
            rows.push(("cc_term", Float(cc_term(*n, *ell))));
            rows.push(("lower", Exact(cyclic_lower_bound(&p))));
            if ell < n {
                rows.push(("upper", Float(stevens_float(&ArcParams::from_ratio(*ell, *n)?))));
                rows.push(("dominance_gap", Exact(dominance_gap(*n, *ell)?)));
            } else {
                rows.push(("upper", Exact(integer(1))));
            }
        }
        ModelSpec::Batch { n, ell } => {
            let p = BatchParams::new(*n, *ell)?;
            let t = match target {
                Some(t) => t,
                None => PartialTarget::new(*n, *n)?,
            };
            if ell < n {
                let (lower, upper) = sandwich_bounds(&p, &t)?;
                rows.push(("lower", Exact(lower)));
                rows.push(("upper", Exact(upper)));
            }
            rows.push(("universal_upper", Float(universal_upper(*n, *ell)?)));
        }
        ModelSpec::Arcs { a } => {
            let params = ArcParams::new(a.clone())?;
            rows.push(("float_route", Float(stevens_float(&params))));
            let c = ExactRational::from_integer(1.into()) / a;
            rows.push(("upper", Exact(arc_upper_bound(&c)?)));
            if let Ok(v) = flatto_asymptotic(&params) {
                rows.push(("asymptotic", Float(v)));
            }
        }
        ModelSpec::DeltaD { n, ell, .. } => {
            rows.push(("lower", Exact(expected_cyclic(&CyclicParams::new(*n, *ell)?))));
        }
        _ => {
            return Err(Error::input(format!(
                "no bounds for --model {}; use `exact` or `simulate`",
                model_name(args.model)
            )))
        }
    }
    let mut table = Table::new(&["model", "quantity", "exact", "decimal"]);
    let label = spec.label();
    for (name, value) in rows {
        let (exact, decimal) = match value {
            Exact(r) => (r.to_string(), format_decimal(&r)),
            Float(x) => (String::new(), format_float(x)),
        };
        table.push(vec![label.clone(), name.to_string(), exact, decimal]);
    }
    Ok(table)
}

fn sim_row(label: String, r: &SimResult) -> Vec<String> {
    vec![
        label,
        r.trials.to_string(),
        r.seed.to_string(),
        format_float(r.mean),
        format_float(r.variance),
        format_float(r.ci99_halfwidth),
    ]
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    Ok(std::io::BufWriter::new(fs::File::create(path)?))
}

fn run_simulate(args: &SimulateArgs) -> Result<Table> {
    let spec = model_spec(&args.model)?;
    if partial_target(&args.model)?.is_some() {
        return Err(Error::input("-m/-k are not supported by the simulator"));
    }
    let times = simulate_times(&spec, args.trials, args.seed)?;
    if let Some(path) = &args.per_trial {
        let mut f = create(path)?;
        write_per_trial_csv(&mut f, &times)?;
        f.flush()?;
    }
    let result = SimResult::from_times(&times, args.seed)?;
    let mut table = Table::new(&["model", "trials", "seed", "mean", "variance", "ci99_halfwidth"]);
    table.push(sim_row(spec.label(), &result));
    Ok(table)
}

fn run_couple(args: &CoupleArgs) -> Result<Table> {
    let need = |v: Option<u64>, flag: &str| {
        v.ok_or_else(|| Error::input(format!("this coupling needs {flag}")))
    };
    let (label, result): (String, CoupledResult) = match args.kind {
        CouplingKind::ArcWindow => {
            let (n, ell) = (need(args.n, "-n")?, need(args.ell, "-l")?);
            (
                format!("arc-window n={n} l={ell}"),
                simulate_coupled_arc_window(n, ell, args.trials, args.seed)?,
            )
        }
        CouplingKind::Delta => {
            let (n, ell, d) = (need(args.n, "-n")?, need(args.ell, "-l")?, need(args.d, "-d")?);
            (
                format!("delta n={n} l={ell} d={d}"),
                simulate_coupled_delta(n, ell, d, args.trials, args.seed)?,
            )
        }
        CouplingKind::TorusDelta => {
            let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join("x");
            (
                format!(
                    "torus-delta dims={} window={} spacing={}",
                    join(&args.dims),
                    join(&args.window),
                    join(&args.spacing)
                ),
                simulate_coupled_torus_delta(&args.dims, &args.window, &args.spacing, args.trials, args.seed)?,
            )
        }
    };
    if let Some(path) = &args.per_trial {
        let mut f = create(path)?;
        write_per_trial_pairs_csv(&mut f, &result.pairs)?;
        f.flush()?;
    }
    let gap: u128 = result.pairs.iter().map(|&(a, b)| (b - a) as u128).sum();
    let mean_gap = crate::exact::to_f64(&ratio(gap, result.pairs.len() as u128));
    let mut table = Table::new(&[
        "coupling",
        "trials",
        "seed",
        "mean_dominated",
        "mean_dominating",
        "mean_gap",
        "violations",
    ]);
    table.push(vec![
        label,
        args.trials.to_string(),
        args.seed.to_string(),
        format_float(result.first.mean),
        format_float(result.second.mean),
        format_float(mean_gap),
        "0".to_string(),
    ]);
    Ok(table)
}

/// `A..B` (inclusive) or `A`. A reversed range is empty.
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let bad = || Error::input(format!("expected a range like 4..18 or a single value, got {text:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    match text.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => {
            let v = num(text)?;
            Ok(v..=v)
        }
    }
}

fn sweep_row(model: SweepModel, n: u64, ell: u64) -> Result<Vec<String>> {
    let dec = |x: f64| format_float(x);
    let linear = ratio(3 * (n - ell + 1), 2);
    let mut row = vec![n.to_string(), ell.to_string()];
    let (e, lower, upper) = match model {
        SweepModel::Windows => {
            let p = WindowsParams::new(n, ell)?;
            let (lower, upper) = if ell < n {
                let (lo, hi) = windows_bounds(&p)?;
                (lo.to_string(), dec(hi))
            } else {
                ("1".into(), "1".into())
            };
            (expected_windows(&p), lower, upper)
        }
        SweepModel::Cyclic => {
            let p = CyclicParams::new(n, ell)?;
            let upper = if ell < n {
                dec(stevens_float(&ArcParams::from_ratio(ell, n)?))
            } else {
                "1".into()
            };
            (expected_cyclic(&p), cyclic_lower_bound(&p).to_string(), upper)
        }
        SweepModel::Batch => {
            let p = BatchParams::new(n, ell)?;
            let (lower, upper) = if ell < n {
                let (lo, hi) = sandwich_bounds(&p, &PartialTarget::new(n, n)?)?;
                (lo.to_string(), hi.to_string())
            } else {
                ("1".into(), "1".into())
            };
            (polya_expected(&p), lower, upper)
        }
    };
    row.extend([e.to_string(), linear.to_string(), dec(cc_term(n, ell)), lower, upper]);
    if model == SweepModel::Cyclic {
        row.push(if ell < n { dominance_gap(n, ell)?.to_string() } else { String::new() });
    }
    Ok(row)
}

fn run_sweep(args: &SweepArgs) -> Result<Table> {
    let mut header = vec!["n", "l", "e_exact", "linear_term", "cc_term", "lower", "upper"];
    if args.model == SweepModel::Cyclic {
        header.push("dominance_gap");
    }
    let mut table = Table::new(&header);
    let l_range = args.l_range.as_deref().map(parse_range).transpose()?;
    let mut cells = Vec::new();
    for n in parse_range(&args.n_range)? {
        if n == 0 {
            continue;
        }
        let ells = match &l_range {
            Some(r) => (*r.start()).max(1)..=(*r.end()).min(n),
            None => 1..=n,
        };
        cells.extend(ells.map(|ell| (n, ell)));
    }
    for (n, ell) in cells {
        let row = if n > SWEEP_MAX_N {
            let mut row = vec![n.to_string(), ell.to_string(), "engine=skipped".to_string()];
            row.resize(header.len(), String::new());
            row
        } else {
            sweep_row(args.model, n, ell)?
        };
        table.push(row);
    }
    Ok(table)
}

fn run_conjectures(args: &ConjectureArgs) -> Result<Table> {
    let outcome = run_lab(args.n, args.ell)?;
    if let Some(path) = &args.verdicts {
        let mut f = create(path)?;
        write_verdicts(&outcome, &mut f)?;
        f.flush()?;
    }
    let mono = &outcome.monotonicity;
    let batch = &outcome.batch_max;
    let lower = &outcome.lower;
    let mut table = Table::new(&[
        "n",
        "l",
        "models",
        "universal_upper",
        "nested_pairs",
        "nested_violations",
        "cardinality_pairs",
        "cardinality_violations",
        "batch_expectation",
        "max_expectation",
        "batch_exceedances",
        "lower_bound",
        "min_expectation",
        "below_lower",
        "partition_attains_min",
    ]);
    table.push(vec![
        args.n.to_string(),
        args.ell.to_string(),
        outcome.models.len().to_string(),
        format_float(outcome.universal_upper),
        mono.nested_pairs.to_string(),
        mono.nested_violations.len().to_string(),
        mono.cardinality_pairs.to_string(),
        mono.cardinality_violations.len().to_string(),
        batch.batch_expectation.clone(),
        batch.max_expectation.clone(),
        batch.exceedances.len().to_string(),
        lower.bound.clone(),
        lower.min_expectation.clone(),
        lower.below.len().to_string(),
        match lower.partition_attains_min {
            Some(b) => b.to_string(),
            None => "n/a".to_string(),
        },
    ]);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("coverkit").chain(args.iter().copied()))
            .map_err(|e| Error::input(e.to_string()))?;
        let mut buf = Vec::new();
        run(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn exact_examples() {
        let out = run_args(&["exact", "--model", "cyclic", "-n", "4", "-l", "2", "--format", "csv"]).unwrap();
        assert_eq!(out, "model,e_exact,e_decimal,engine\ncyclic n=4 l=2,11/3,3.666666666666667,cyclic-formula\n");
        let out = run_args(&["exact", "--model", "arcs", "-a", "1/2", "--format", "csv"]).unwrap();
        assert!(out.contains(",5,5.0,"), "{out}");
        let out = run_args(&["exact", "--model", "windows", "-n", "3", "-l", "2", "--format", "csv"]).unwrap();
        assert!(out.contains(",3,3.0,"), "{out}");
        let err = run_args(&["exact", "--model", "torus", "--dims", "4,4", "--window", "2,2"]).unwrap_err();
        assert!(err.to_string().contains("simulate"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..18").unwrap(), 4..=18);
        assert_eq!(parse_range("4..=6").unwrap(), 4..=6);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("5..3").unwrap().is_empty());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn floats_keep_a_fraction() {
        assert_eq!(format_float(3.0), "3.0");
        assert_eq!(format_float(0.25), "0.25");
    }

    #[test]
    fn table_and_csv_carry_the_same_cells() {
        let mut t = Table::new(&["a", "bb"]);
        t.push(vec!["1/3".into(), "x".into()]);
        let mut csv = Vec::new();
        let mut txt = Vec::new();
        t.render(Format::Csv, &mut csv).unwrap();
        t.render(Format::Table, &mut txt).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,bb\n1/3,x\n");
        assert_eq!(String::from_utf8(txt).unwrap(), "a    bb\n1/3  x\n");
        let mut js = Vec::new();
        t.render(Format::JsonLines, &mut js).unwrap();
        assert_eq!(String::from_utf8(js).unwrap(), "{\"a\":\"1/3\",\"bb\":\"x\"}\n");
    }
}
