use rand::{Rng, RngCore};

use super::ModelSpec;
use crate::error::Result;

/// Arc starts live on the grid `k / 2^53`.
pub(crate) const ARC_GRID_BITS: u32 = 53;
pub(crate) const ARC_FULL: u64 = 1 << ARC_GRID_BITS;

/// Uniform grid point in `[0, 2^53)`.
pub(crate) fn arc_start(rng: &mut impl RngCore) -> u64 {
    rng.next_u64() >> (64 - ARC_GRID_BITS)
}

/// Largest admissible gap between consecutive starts, `floor(a 2^53)`.
pub(crate) fn arc_threshold(a: &crate::ExactRational) -> u64 {
    let scaled = a * crate::exact::integer(ARC_FULL);
    let floor = scaled.floor().to_integer();
    u64::try_from(floor).expect("a < 1")
}

/// Tracks which cells have been seen.
pub(crate) struct Cover {
    seen: Vec<bool>,
    remaining: usize,
}

impl Cover {
    pub(crate) fn new(n: usize) -> Self {
        Cover {
            seen: vec![false; n],
            remaining: n,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.seen.fill(false);
        self.remaining = self.seen.len();
    }

    pub(crate) fn mark(&mut self, cell: usize) {
        if !self.seen[cell] {
            self.seen[cell] = true;
            self.remaining -= 1;
        }
    }

    pub(crate) fn done(&self) -> bool {
        self.remaining == 0
    }

    /// Cyclic interval `[start, start + len)` modulo the universe size.
    pub(crate) fn mark_cyclic(&mut self, start: usize, len: usize) {
        let n = self.seen.len();
        for j in 0..len {
            let c = start + j;
            self.mark(if c >= n { c - n } else { c });
        }
    }
}

/// Circle coverage by arcs of a fixed length, tracked through the gaps between
/// sorted starts: covered exactly when no cyclic gap exceeds the threshold.
pub(crate) struct ArcCover {
    starts: Vec<u64>,
    threshold: u64,
    bad_gaps: usize,
}

impl ArcCover {
    pub(crate) fn new(threshold: u64) -> Self {
        ArcCover {
            starts: Vec::new(),
            threshold,
            bad_gaps: 0,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.starts.clear();
        self.bad_gaps = 0;
    }

    fn tally(&mut self, gap: u64, sign: isize) {
        if gap > self.threshold {
            self.bad_gaps = self.bad_gaps.checked_add_signed(sign).expect("gap bookkeeping");
        }
    }

    /// Adds an arc starting at grid point `x` and reports whether the circle is covered.
    pub(crate) fn insert(&mut self, x: u64) -> bool {
        let len = self.starts.len();
        if len == 0 {
            self.starts.push(x);
            self.tally(ARC_FULL, 1);
            return self.bad_gaps == 0;
        }
        let pos = self.starts.partition_point(|&s| s <= x);
        let (prev, prev_wraps) = if pos > 0 {
            (self.starts[pos - 1], false)
        } else {
            (self.starts[len - 1], true)
        };
        let (next, next_wraps) = if pos < len {
            (self.starts[pos], false)
        } else {
            (self.starts[0], true)
        };
        let wrap = |w: bool| if w { ARC_FULL } else { 0 };
        let old = if len == 1 {
            ARC_FULL
        } else {
            next + wrap(prev_wraps || next_wraps) - prev
        };
        self.tally(old, -1);
        self.tally(x + wrap(prev_wraps) - prev, 1);
        self.tally(next + wrap(next_wraps) - x, 1);
        self.starts.insert(pos, x);
        self.bad_gaps == 0
    }
}

/// Precomputed per-spec draw logic.
pub(crate) enum Sampler {
    Windows { n: usize, ell: usize },
    /// Starts restricted to multiples of `step` (1 for plain cyclic windows).
    Cyclic { n: usize, ell: usize, step: usize },
    Batch { n: usize, ell: usize },
    Arcs { threshold: u64 },
    Torus { dims: Vec<usize>, window: Vec<usize>, strides: Vec<usize> },
    Hamming { n: usize, masks: Vec<usize> },
    Demand { ell: usize, v: Vec<u32> },
    Explicit { n: usize, edges: Vec<Vec<usize>> },
}

pub(crate) struct Workspace {
    cover: Cover,
    arcs: ArcCover,
    perm: Vec<usize>,
    counts: Vec<u32>,
}

impl Sampler {
    pub(crate) fn new(spec: &ModelSpec) -> Result<Self> {
        Ok(match spec {
            ModelSpec::Windows { n, ell } => Sampler::Windows { n: *n as usize, ell: *ell as usize },
            ModelSpec::CyclicWindows { n, ell } => Sampler::Cyclic {
                n: *n as usize,
                ell: *ell as usize,
                step: 1,
            },
            ModelSpec::DeltaD { n, ell, d } => Sampler::Cyclic {
                n: *n as usize,
                ell: *ell as usize,
                step: *d as usize,
            },
            ModelSpec::Batch { n, ell } => Sampler::Batch { n: *n as usize, ell: *ell as usize },
            ModelSpec::Arcs { a } => Sampler::Arcs { threshold: arc_threshold(a) },
            ModelSpec::Torus { dims, window } => {
                let dims: Vec<usize> = dims.iter().map(|&x| x as usize).collect();
                let mut strides = vec![1; dims.len()];
                for i in 1..dims.len() {
                    strides[i] = strides[i - 1] * dims[i - 1];
                }
                Sampler::Torus {
                    window: window.iter().map(|&x| x as usize).collect(),
                    dims,
                    strides,
                }
            }
            ModelSpec::HammingBalls { d, t } => {
                let n = 1usize << d;
                Sampler::Hamming {
                    n,
                    masks: (0..n).filter(|m| m.count_ones() <= *t).collect(),
                }
            }
            ModelSpec::Demand { ell, v, .. } => Sampler::Demand {
                ell: *ell as usize,
                v: v.as_slice().to_vec(),
            },
            ModelSpec::Explicit(model) => Sampler::Explicit {
                n: model.n_vertices(),
                edges: model.edges().iter().map(|e| e.iter().collect()).collect(),
            },
        })
    }

    fn universe(&self) -> usize {
        match self {
            Sampler::Windows { n, .. }
            | Sampler::Cyclic { n, .. }
            | Sampler::Batch { n, .. }
            | Sampler::Hamming { n, .. }
            | Sampler::Explicit { n, .. } => *n,
            Sampler::Demand { v, .. } => v.len(),
            Sampler::Torus { dims, .. } => dims.iter().product(),
            Sampler::Arcs { .. } => 0,
        }
    }

    pub(crate) fn workspace(&self) -> Workspace {
        let n = self.universe();
        Workspace {
            cover: Cover::new(n),
            arcs: ArcCover::new(match self {
                Sampler::Arcs { threshold } => *threshold,
                _ => 0,
            }),
            perm: (0..n).collect(),
            counts: vec![0; n],
        }
    }

    /// Draws until covered and returns the number of draws.
    pub(crate) fn run(&self, ws: &mut Workspace, rng: &mut impl Rng) -> u64 {
        ws.cover.reset();
        let mut draws = 0u64;
        match self {
            Sampler::Windows { n, ell } => {
                let starts = (n - ell + 1) as u64;
                while !ws.cover.done() {
                    let s = rng.gen_range(0..starts) as usize;
                    for c in s..s + ell {
                        ws.cover.mark(c);
                    }
                    draws += 1;
                }
            }
            Sampler::Cyclic { n, ell, step } => {
                let starts = (n / step) as u64;
                while !ws.cover.done() {
                    let s = rng.gen_range(0..starts) as usize * step;
                    ws.cover.mark_cyclic(s, *ell);
                    draws += 1;
                }
            }
            Sampler::Batch { n, ell } => {
                while !ws.cover.done() {
                    for j in 0..*ell {
                        let r = rng.gen_range(j as u64..*n as u64) as usize;
                        ws.perm.swap(j, r);
                        ws.cover.mark(ws.perm[j]);
                    }
                    draws += 1;
                }
            }
            Sampler::Arcs { .. } => {
                ws.arcs.reset();
                loop {
                    draws += 1;
                    if ws.arcs.insert(arc_start(rng)) {
                        break;
                    }
                }
            }
            Sampler::Torus { dims, window, strides } => {
                let mut origin = vec![0usize; dims.len()];
                let mut offset = vec![0usize; dims.len()];
                while !ws.cover.done() {
                    for (o, &size) in origin.iter_mut().zip(dims) {
                        *o = rng.gen_range(0..size as u64) as usize;
                    }
                    mark_patch(&mut ws.cover, dims, window, strides, &origin, &mut offset);
                    draws += 1;
                }
            }
            Sampler::Hamming { n, masks } => {
                while !ws.cover.done() {
                    let x = rng.gen_range(0..*n as u64) as usize;
                    for m in masks {
                        ws.cover.mark(x ^ m);
                    }
                    draws += 1;
                }
            }
            Sampler::Demand { ell, v } => {
                let n = v.len();
                ws.counts.fill(0);
                let mut unmet = v.iter().filter(|&&x| x > 0).count();
                while unmet > 0 {
                    for j in 0..*ell {
                        let r = rng.gen_range(j as u64..n as u64) as usize;
                        ws.perm.swap(j, r);
                        let item = ws.perm[j];
                        ws.counts[item] += 1;
                        if ws.counts[item] == v[item] {
                            unmet -= 1;
                        }
                    }
                    draws += 1;
                }
            }
            Sampler::Explicit { edges, .. } => {
                while !ws.cover.done() {
                    let e = rng.gen_range(0..edges.len() as u64) as usize;
                    for &c in &edges[e] {
                        ws.cover.mark(c);
                    }
                    draws += 1;
                }
            }
        }
        draws
    }
}

/// Marks the box `origin + [0, window)` with wraparound in every coordinate.
pub(crate) fn mark_patch(
    cover: &mut Cover,
    dims: &[usize],
    window: &[usize],
    strides: &[usize],
    origin: &[usize],
    offset: &mut [usize],
) {
    offset.fill(0);
    loop {
        let mut cell = 0;
        for i in 0..dims.len() {
            let c = origin[i] + offset[i];
            cell += if c >= dims[i] { c - dims[i] } else { c } * strides[i];
        }
        cover.mark(cell);
        // odometer increment
        let mut i = 0;
        loop {
            if i == dims.len() {
                return;
            }
            offset[i] += 1;
            if offset[i] < window[i] {
                break;
            }
            offset[i] = 0;
            i += 1;
        }
    }
}
