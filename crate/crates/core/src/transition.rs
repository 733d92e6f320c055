//! Orbits of neighbourhoods on a discretized torus.
//!
//! The torus is cut into an `F×F` fine grid (`F = R·refine`); every fine
//! node points to the node containing the image of its center, and, when
//! the map is invertible, to the node containing the preimage. The orbit of
//! a bitmap seed is traced through these two functional graphs and recorded
//! on the coarse `R×R` grid with a one-cell collar.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{label_components, labeling_from, region_class, summarize, ComponentSummary, CoveringUnionFind, RegionClass, RegionTag};
use crate::maps::LiftedMap;
use crate::region::GridRegion;
use crate::torus::{project, TorusPoint, Vec2};

pub const DEFAULT_REFINE: usize = 4;
/// Consecutive steps without new cells after which a rank-0 orbit region
/// counts as stabilized.
pub const STABLE_STEPS: usize = 10;

#[derive(Debug, Clone)]
pub struct TransitionGraph {
    resolution: usize,
    refine: usize,
    forward: Vec<u32>,
    backward: Option<Vec<u32>>,
}

impl TransitionGraph {
    pub fn build(map: &LiftedMap, resolution: usize, refine: usize) -> Result<Self> {
        map.require_identity_class()?;
        if resolution < 2 || refine == 0 {
            return Err(Error::InvalidParameter(format!(
                "need resolution >= 2 and refine >= 1, got {resolution} and {refine}"
            )));
        }
        let f = resolution * refine;
        if f * f > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("fine grid {f}x{f} is too large")));
        }
        let node = |z: Vec2| fine_node(f, z);
        let h = 1.0 / f as f64;
        let center = move |k: usize| Vec2::new(((k % f) as f64 + 0.5) * h, ((k / f) as f64 + 0.5) * h);
        let forward: Vec<u32> = (0..f * f).into_par_iter().map(|k| node(map.eval(center(k)))).collect();
        let backward = map.has_inverse().then(|| {
            (0..f * f)
                .into_par_iter()
                .map(|k| node(map.inverse_eval(center(k)).expect("inverse present")))
                .collect()
        });
        Ok(Self { resolution, refine, forward, backward })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn has_backward(&self) -> bool {
        self.backward.is_some()
    }

    fn fine(&self) -> usize {
        self.resolution * self.refine
    }

    #[inline]
    fn coarse_of(&self, node: u32) -> usize {
        let f = self.fine();
        let (x, y) = (node as usize % f, node as usize / f);
        (y / self.refine) * self.resolution + x / self.refine
    }

    fn seed_nodes(&self, seed: &GridRegion) -> Vec<u32> {
        let (f, q) = (self.fine(), self.refine);
        let mut out = Vec::with_capacity(seed.count() * q * q);
        for (i, j) in seed.active_cells() {
            for dy in 0..q {
                for dx in 0..q {
                    out.push(((j * q + dy) * f + i * q + dx) as u32);
                }
            }
        }
        out
    }

    /// Cells reached from `seed` within `n` forward and `n` backward steps,
    /// plus a one-cell collar.
    pub fn orbit_region(&self, seed: &GridRegion, n: usize) -> Result<GridRegion> {
        let mut scratch = Scratch::new(self);
        let run = scratch.run(self, seed, n, false)?;
        Ok(scratch.region(self.resolution, run))
    }

    /// Essentiality verdict for a seed set, stopping as soon as it is decided.
    pub fn test_seed(&self, seed: &GridRegion, n: usize) -> Result<(PointTest, GridRegion)> {
        let mut scratch = Scratch::new(self);
        let run = scratch.run(self, seed, n, true)?;
        let region = scratch.region(self.resolution, run);
        Ok((run, region))
    }
}

#[inline]
fn fine_node(f: usize, z: Vec2) -> u32 {
    let p = project(z);
    let x = ((p.x * f as f64) as usize).min(f - 1);
    let y = ((p.y * f as f64) as usize).min(f - 1);
    (y * f + x) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Essential,
    Inessential,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointTest {
    pub verdict: Verdict,
    /// Graph steps taken before the verdict.
    pub steps: usize,
    /// Cells of the orbit region (collar included).
    pub cells: usize,
    pub max_rank: u8,
    /// Whether backward iterates were traced.
    pub backward: bool,
}

/// Per-run buffers; fine-node marks use generation stamps so that resetting
/// between runs is free.
struct Scratch {
    seen_fwd: Vec<u32>,
    seen_bwd: Vec<u32>,
    marked: Vec<u32>,
    stamp: u32,
    uf: CoveringUnionFind,
    front: Vec<u32>,
    back: Vec<u32>,
    next: Vec<u32>,
}

impl Scratch {
    fn new(g: &TransitionGraph) -> Self {
        let nf = g.fine() * g.fine();
        let nc = g.resolution * g.resolution;
        Self {
            seen_fwd: vec![0; nf],
            seen_bwd: if g.has_backward() { vec![0; nf] } else { Vec::new() },
            marked: vec![0; nc],
            stamp: 0,
            uf: CoveringUnionFind::new(g.resolution),
            front: Vec::new(),
            back: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Mark a coarse cell; the union-find tracks the cell and its collar.
    fn mark(&mut self, r: usize, cell: usize) -> bool {
        if self.marked[cell] == self.stamp {
            return false;
        }
        self.marked[cell] = self.stamp;
        let (i, j) = (cell % r, cell / r);
        for dj in [r - 1, 0, 1] {
            for di in [r - 1, 0, 1] {
                self.uf.insert(((j + dj) % r) * r + (i + di) % r);
            }
        }
        true
    }

    fn run(&mut self, g: &TransitionGraph, seed: &GridRegion, n: usize, stop_early: bool) -> Result<PointTest> {
        if seed.resolution() != g.resolution {
            return Err(Error::InvalidParameter(format!(
                "seed resolution {} does not match graph resolution {}",
                seed.resolution(),
                g.resolution
            )));
        }
        if seed.is_empty() {
            return Err(Error::Empty("seed region"));
        }
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen_fwd.fill(0);
            self.seen_bwd.fill(0);
            self.marked.fill(0);
            self.stamp = 1;
        }
        self.uf.clear();
        let r = g.resolution;
        let stamp = self.stamp;
        self.front.clear();
        self.back.clear();
        for node in g.seed_nodes(seed) {
            self.seen_fwd[node as usize] = stamp;
            self.front.push(node);
            if g.has_backward() {
                self.seen_bwd[node as usize] = stamp;
                self.back.push(node);
            }
        }
        for (i, j) in seed.active_cells() {
            self.mark(r, j * r + i);
        }
        let backward = g.backward.as_deref();
        let mut quiet = 0usize;
        let mut steps = 0usize;
        let decided = |uf: &CoveringUnionFind, quiet: usize| uf.max_rank() >= 1 || quiet >= STABLE_STEPS;
        if !(stop_early && self.uf.max_rank() >= 1) {
            for t in 1..=n {
                steps = t;
                let mut grew = false;
                self.next.clear();
                for k in 0..self.front.len() {
                    let s = g.forward[self.front[k] as usize];
                    if self.seen_fwd[s as usize] != stamp {
                        self.seen_fwd[s as usize] = stamp;
                        self.next.push(s);
                        grew |= self.mark(r, g.coarse_of(s));
                    }
                }
                std::mem::swap(&mut self.front, &mut self.next);
                if let Some(bw) = backward {
                    self.next.clear();
                    for k in 0..self.back.len() {
                        let s = bw[self.back[k] as usize];
                        if self.seen_bwd[s as usize] != stamp {
                            self.seen_bwd[s as usize] = stamp;
                            self.next.push(s);
                            grew |= self.mark(r, g.coarse_of(s));
                        }
                    }
                    std::mem::swap(&mut self.back, &mut self.next);
                }
                quiet = if grew { 0 } else { quiet + 1 };
                if stop_early && decided(&self.uf, quiet) {
                    break;
                }
                if self.front.is_empty() && self.back.is_empty() && quiet >= STABLE_STEPS {
                    break;
                }
            }
        }
        let max_rank = self.uf.max_rank();
        let verdict = if max_rank >= 1 {
            Verdict::Essential
        } else if quiet >= STABLE_STEPS {
            Verdict::Inessential
        } else {
            Verdict::Undecided
        };
        Ok(PointTest { verdict, steps, cells: self.uf.active_count(), max_rank, backward: backward.is_some() })
    }

    fn region(&self, r: usize, _run: PointTest) -> GridRegion {
        let mut bits = vec![false; r * r];
        for &k in self.uf.active_indices() {
            bits[k as usize] = true;
        }
        GridRegion::from_bits(r, bits)
    }
}

/// Build the transition graph at the default refinement and trace `seed`.
pub fn orbit_region(map: &LiftedMap, seed: &GridRegion, n: usize) -> Result<GridRegion> {
    TransitionGraph::build(map, seed.resolution(), DEFAULT_REFINE)?.orbit_region(seed, n)
}

/// Seed ball around `x`; never empty, since the cell containing `x` is
/// always included.
pub fn seed_ball(resolution: usize, x: TorusPoint, eps: f64) -> Result<GridRegion> {
    let mut seed = GridRegion::ball(resolution, x, eps)?;
    let (i, j) = seed.cell_of(x);
    seed.set(i, j, true);
    Ok(seed)
}

fn check_scale(eps: f64, resolution: usize) -> Result<()> {
    if !(eps.is_finite() && eps * resolution as f64 >= 2.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("epsilon must be at least 2/R, got {eps} at R = {resolution}")));
    }
    Ok(())
}

/// Is `x` essential at scale `eps`? Returns the verdict and the class of the
/// orbit region when the test stopped.
pub fn essential_point_test(
    map: &LiftedMap,
    x: TorusPoint,
    eps: f64,
    n: usize,
    resolution: usize,
) -> Result<(PointTest, RegionClass)> {
    check_scale(eps, resolution)?;
    let graph = TransitionGraph::build(map, resolution, DEFAULT_REFINE)?;
    let (test, region) = graph.test_seed(&seed_ball(resolution, x, eps)?, n)?;
    Ok((test, region_class(&region)))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictCounts {
    pub essential: usize,
    pub inessential: usize,
    pub undecided: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EssentialSummary {
    pub cells: usize,
    pub components: usize,
    #[serde(flatten)]
    pub class: RegionTag,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub resolution: usize,
    pub epsilon: f64,
    pub horizon: usize,
    pub refine: usize,
    pub backward: bool,
    pub counts: VerdictCounts,
    pub essential_set: EssentialSummary,
    /// Components of the inessential set; bounded ones are the islands.
    pub census: Vec<ComponentSummary>,
    #[serde(skip)]
    pub verdicts: Vec<Verdict>,
}

impl Classification {
    pub fn bitmap(&self, v: Verdict) -> GridRegion {
        let r = self.resolution;
        GridRegion::from_bits(r, self.verdicts.iter().map(|&x| x == v).collect())
    }

    pub fn islands(&self) -> impl Iterator<Item = &ComponentSummary> {
        self.census.iter().filter(|c| c.rank == 0)
    }
}

/// Test every cell center of the `R×R` grid against one shared graph.
pub fn classify_torus(map: &LiftedMap, eps: f64, n: usize, resolution: usize, refine: usize) -> Result<Classification> {
    check_scale(eps, resolution)?;
    let graph = TransitionGraph::build(map, resolution, refine)?;
    let r = resolution;
    let probe = GridRegion::empty(r)?;
    let verdicts: Vec<Verdict> = (0..r * r)
        .into_par_iter()
        .map_init(
            || Scratch::new(&graph),
            |scratch, k| {
                let c = probe.cell_center(k % r, k / r);
                let seed = seed_ball(r, project(c), eps).expect("resolution checked");
                scratch.run(&graph, &seed, n, true).map(|t| t.verdict).expect("seed is valid")
            },
        )
        .collect();
    let count = |v: Verdict| verdicts.iter().filter(|&&x| x == v).count();
    let counts = VerdictCounts {
        essential: count(Verdict::Essential),
        inessential: count(Verdict::Inessential),
        undecided: count(Verdict::Undecided),
    };
    let ess = GridRegion::from_bits(r, verdicts.iter().map(|&v| v == Verdict::Essential).collect());
    let ine = GridRegion::from_bits(r, verdicts.iter().map(|&v| v == Verdict::Inessential).collect());
    let ess_labels = label_components(&ess);
    let essential_set = EssentialSummary {
        cells: ess.count(),
        components: ess_labels.components().len(),
        class: region_class(&ess).tag,
    };
    let mut uf = CoveringUnionFind::new(r);
    for (k, &b) in ine.bits().iter().enumerate() {
        if b {
            uf.insert(k);
        }
    }
    let census = summarize(&labeling_from(&mut uf));
    Ok(Classification {
        resolution: r,
        epsilon: eps,
        horizon: n,
        refine,
        backward: graph.has_backward(),
        counts,
        essential_set,
        census,
        verdicts,
    })
}
