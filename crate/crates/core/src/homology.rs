//! Covering-space bookkeeping for bitmap regions.
//!
//! Each active cell carries the deck translation of a chosen lift relative to
//! its component root. Closing a cycle through wrapping edges yields a nonzero
//! translation that keeps the lifted component invariant; these span the
//! component's homology subgroup `H ⊆ ℤ²`.

use std::collections::VecDeque;

use serde::{Serialize, Serializer};

use crate::hull::convex_hull;
use crate::region::GridRegion;
use crate::torus::{IntVec, Vec2};

/// A subgroup of ℤ² in Hermite normal form.
///
/// Rank 1 keeps one generator `g`; rank 2 keeps `(a, b), (0, d)` with
/// `a, d > 0` and `0 ≤ b < d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Lattice {
    rank: u8,
    gens: [IntVec; 2],
}

impl Lattice {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn generators(&self) -> &[IntVec] {
        &self.gens[..self.rank as usize]
    }

    /// Primitive direction of a rank-1 lattice.
    pub fn direction(&self) -> Option<IntVec> {
        (self.rank == 1).then(|| self.gens[0].primitive_canonical())
    }

    pub fn contains(&self, v: IntVec) -> bool {
        let mut probe = *self;
        probe.add(v);
        probe == *self
    }

    pub fn add(&mut self, v: IntVec) {
        if v.is_zero() || self.rank == 2 && self.gens[0].a == 1 && self.gens[1].b == 1 {
            return;
        }
        let mut rows: Vec<IntVec> = self.generators().to_vec();
        rows.push(v);
        *self = hermite(rows);
    }

    pub fn join(&mut self, other: &Lattice) {
        for &g in other.generators() {
            self.add(g);
        }
    }
}

fn hermite(mut rows: Vec<IntVec>) -> Lattice {
    rows.retain(|r| !r.is_zero());
    // Euclid on the first column until at most one row has a ≠ 0
    let mut pivot: Option<IntVec> = None;
    loop {
        let k = rows.iter().enumerate().filter(|(_, r)| r.a != 0).min_by_key(|(_, r)| r.a.abs()).map(|(k, _)| k);
        let Some(k) = k else { break };
        let p = rows.swap_remove(k);
        let mut done = true;
        for r in rows.iter_mut() {
            if r.a != 0 {
                let q = r.a / p.a;
                *r = *r - p * q;
                done &= r.a == 0;
            }
        }
        if done {
            pivot = Some(if p.a < 0 { -p } else { p });
            break;
        }
        rows.push(p);
    }
    let d = rows.iter().fold(0, |g, r| crate::torus::gcd(g, r.b));
    match (pivot, d) {
        (None, 0) => Lattice::default(),
        (None, d) => Lattice { rank: 1, gens: [IntVec::new(0, d), IntVec::ZERO] },
        (Some(p), 0) => Lattice { rank: 1, gens: [p, IntVec::ZERO] },
        (Some(p), d) => Lattice { rank: 2, gens: [IntVec::new(p.a, p.b.rem_euclid(d)), IntVec::new(0, d)] },
    }
}

const NONE: u32 = u32::MAX;

/// The four torus neighbours of a cell with the deck shift of the adjacent
/// lift: the neighbour's lift touching `(i, j)` is its fundamental copy plus
/// the returned vector.
#[inline]
pub fn neighbours(r: usize, idx: usize) -> [(usize, IntVec); 4] {
    let (i, j) = (idx % r, idx / r);
    let right = if i + 1 == r { (j * r, IntVec::E1) } else { (idx + 1, IntVec::ZERO) };
    let left = if i == 0 { (j * r + r - 1, -IntVec::E1) } else { (idx - 1, IntVec::ZERO) };
    let up = if j + 1 == r { (i, IntVec::E2) } else { (idx + r, IntVec::ZERO) };
    let down = if j == 0 { ((r - 1) * r + i, -IntVec::E2) } else { (idx - r, IntVec::ZERO) };
    [right, up, left, down]
}

/// Union-find over torus cells with ℤ² offsets; cells may be inserted one at
/// a time, and the structure can be cleared in time proportional to the
/// cells touched.
#[derive(Debug, Clone)]
pub struct CoveringUnionFind {
    resolution: usize,
    parent: Vec<u32>,
    offset: Vec<IntVec>,
    size: Vec<u32>,
    lattice: Vec<Lattice>,
    touched: Vec<u32>,
    max_rank: u8,
}

impl CoveringUnionFind {
    pub fn new(resolution: usize) -> Self {
        let n = resolution * resolution;
        Self {
            resolution,
            parent: vec![NONE; n],
            offset: vec![IntVec::ZERO; n],
            size: vec![0; n],
            lattice: vec![Lattice::default(); n],
            touched: Vec::new(),
            max_rank: 0,
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.parent[idx] != NONE
    }

    /// Largest homology rank among current components.
    pub fn max_rank(&self) -> u8 {
        self.max_rank
    }

    pub fn active_count(&self) -> usize {
        self.touched.len()
    }

    pub fn active_indices(&self) -> &[u32] {
        &self.touched
    }

    pub fn clear(&mut self) {
        for &k in &self.touched {
            let k = k as usize;
            self.parent[k] = NONE;
            self.offset[k] = IntVec::ZERO;
            self.size[k] = 0;
            self.lattice[k] = Lattice::default();
        }
        self.touched.clear();
        self.max_rank = 0;
    }

    /// Root of `idx` and the offset of its lift relative to the root's.
    pub fn find(&mut self, idx: usize) -> (usize, IntVec) {
        let mut path = Vec::new();
        let mut k = idx;
        while self.parent[k] as usize != k {
            path.push(k);
            k = self.parent[k] as usize;
        }
        let root = k;
        // walk back from the node nearest the root, accumulating offsets
        let mut acc = IntVec::ZERO;
        for &n in path.iter().rev() {
            acc = acc + self.offset[n];
            self.offset[n] = acc;
            self.parent[n] = root as u32;
        }
        (root, if path.is_empty() { IntVec::ZERO } else { self.offset[idx] })
    }

    /// Insert a cell (no-op if present) and link it to its active neighbours.
    pub fn insert(&mut self, idx: usize) {
        if self.is_active(idx) {
            return;
        }
        self.parent[idx] = idx as u32;
        self.offset[idx] = IntVec::ZERO;
        self.size[idx] = 1;
        self.lattice[idx] = Lattice::default();
        self.touched.push(idx as u32);
        for (nb, w) in neighbours(self.resolution, idx) {
            if self.is_active(nb) {
                self.link(idx, nb, w);
            }
        }
    }

    /// Record that the lift of `b` adjacent to the lift of `a` sits at `o(a) + w`.
    fn link(&mut self, a: usize, b: usize, w: IntVec) {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            let cycle = oa + w - ob;
            if !cycle.is_zero() {
                self.lattice[ra].add(cycle);
                self.max_rank = self.max_rank.max(self.lattice[ra].rank());
            }
            return;
        }
        let (keep, drop, shift) = if self.size[ra] >= self.size[rb] {
            (ra, rb, oa + w - ob)
        } else {
            (rb, ra, ob - w - oa)
        };
        self.parent[drop] = keep as u32;
        self.offset[drop] = shift;
        self.size[keep] += self.size[drop];
        let l = self.lattice[drop];
        self.lattice[keep].join(&l);
        self.max_rank = self.max_rank.max(self.lattice[keep].rank());
    }

    pub fn lattice_of(&mut self, idx: usize) -> Lattice {
        let (r, _) = self.find(idx);
        self.lattice[r]
    }
}

/// Diameter of a lifted component; unbounded when the lift is invariant
/// under some nonzero deck translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diameter {
    Bounded(f64),
    Unbounded,
}

impl Diameter {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Diameter::Bounded(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Diameter::Bounded(d) => Some(d),
            Diameter::Unbounded => None,
        }
    }
}

impl Serialize for Diameter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Diameter::Bounded(d) => s.serialize_f64(d),
            Diameter::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub cells: Vec<usize>,
    pub lattice: Lattice,
}

impl Component {
    pub fn rank(&self) -> u8 {
        self.lattice.rank()
    }

    pub fn direction(&self) -> Option<IntVec> {
        self.lattice.direction()
    }

    pub fn is_essential(&self) -> bool {
        self.rank() > 0
    }
}

/// Components of a region, each cell tagged with its lift offset.
#[derive(Debug, Clone)]
pub struct LiftedLabeling {
    resolution: usize,
    component: Vec<u32>,
    offset: Vec<IntVec>,
    components: Vec<Component>,
}

impl LiftedLabeling {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of(&self, i: usize, j: usize) -> Option<usize> {
        self.component_of_index(j * self.resolution + i)
    }

    pub fn component_of_index(&self, idx: usize) -> Option<usize> {
        let c = self.component[idx];
        (c != NONE).then_some(c as usize)
    }

    pub fn offset_of_index(&self, idx: usize) -> IntVec {
        self.offset[idx]
    }

    /// Lower-left corner of the chosen lift of a cell.
    pub fn lifted_corner(&self, idx: usize) -> Vec2 {
        let r = self.resolution;
        let o = self.offset[idx];
        let h = 1.0 / r as f64;
        Vec2::new((idx % r) as f64 * h + o.a as f64, (idx / r) as f64 * h + o.b as f64)
    }

    pub fn lifted_center(&self, idx: usize) -> Vec2 {
        let h = 0.5 / self.resolution as f64;
        self.lifted_corner(idx) + Vec2::new(h, h)
    }

    fn lifted_corners(&self, comp: usize) -> Vec<Vec2> {
        let h = 1.0 / self.resolution as f64;
        let mut pts = Vec::with_capacity(self.components[comp].cells.len() * 4);
        for &k in &self.components[comp].cells {
            let c = self.lifted_corner(k);
            pts.extend([c, c + Vec2::new(h, 0.0), c + Vec2::new(0.0, h), c + Vec2::new(h, h)]);
        }
        pts
    }
}

pub fn label_components(region: &GridRegion) -> LiftedLabeling {
    let r = region.resolution();
    let mut uf = CoveringUnionFind::new(r);
    for (k, &b) in region.bits().iter().enumerate() {
        if b {
            uf.insert(k);
        }
    }
    labeling_from(&mut uf)
}

/// Snapshot the current state of an incremental union-find.
pub fn labeling_from(uf: &mut CoveringUnionFind) -> LiftedLabeling {
    let r = uf.resolution();
    let n = r * r;
    let mut component = vec![NONE; n];
    let mut offset = vec![IntVec::ZERO; n];
    let mut root_id = vec![NONE; n];
    let mut components: Vec<Component> = Vec::new();
    for k in 0..n {
        if !uf.is_active(k) {
            continue;
        }
        let (root, o) = uf.find(k);
        if root_id[root] == NONE {
            root_id[root] = components.len() as u32;
            components.push(Component { cells: Vec::new(), lattice: uf.lattice[root] });
        }
        let c = root_id[root];
        component[k] = c;
        offset[k] = o;
        components[c as usize].cells.push(k);
    }
    LiftedLabeling { resolution: r, component, offset, components }
}

/// Exact diameter of the union of the closed lifted cells.
pub fn component_diameter(labeling: &LiftedLabeling, comp: usize) -> Diameter {
    if labeling.components[comp].is_essential() {
        return Diameter::Unbounded;
    }
    let corners = labeling.lifted_corners(comp);
    let hull = convex_hull(&corners).expect("component has cells");
    let v = hull.vertices();
    let mut best = 0.0f64;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            best = best.max(v[a].dist(v[b]));
        }
    }
    Diameter::Bounded(best)
}

/// Diameter of the projection of the lifted component onto the line `ℝv`.
pub fn directional_diameter(labeling: &LiftedLabeling, comp: usize, v: IntVec) -> Diameter {
    let c = &labeling.components[comp];
    // a deck translation with nonzero component along v makes the projection unbounded
    if c.lattice.generators().iter().any(|g| g.a * v.a + g.b * v.b != 0) {
        return Diameter::Unbounded;
    }
    let u = v.to_vec2() * (1.0 / v.to_vec2().norm());
    let (lo, hi) = labeling
        .lifted_corners(comp)
        .iter()
        .map(|p| p.dot(u))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    Diameter::Bounded(hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RegionTag {
    Inessential,
    EssentialAnnular { direction: IntVec },
    EssentialNotFully,
    FullyEssential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub component: usize,
    pub cells: usize,
    pub rank: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<IntVec>,
    pub diameter: Diameter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionClass {
    #[serde(flatten)]
    pub tag: RegionTag,
    pub components: Vec<ComponentSummary>,
}

impl RegionClass {
    pub fn is_essential(&self) -> bool {
        self.tag != RegionTag::Inessential
    }

    /// Ordering used for monotonicity checks.
    pub fn level(&self) -> u8 {
        match self.tag {
            RegionTag::Inessential => 0,
            RegionTag::EssentialAnnular { .. } | RegionTag::EssentialNotFully => 1,
            RegionTag::FullyEssential => 2,
        }
    }
}

pub fn summarize(labeling: &LiftedLabeling) -> Vec<ComponentSummary> {
    (0..labeling.components.len())
        .map(|c| {
            let comp = &labeling.components[c];
            ComponentSummary {
                component: c,
                cells: comp.cells.len(),
                rank: comp.rank(),
                direction: comp.direction(),
                diameter: component_diameter(labeling, c),
            }
        })
        .collect()
}

pub fn region_class(region: &GridRegion) -> RegionClass {
    let labeling = label_components(region);
    let components = summarize(&labeling);
    let complement = label_components(&region.complement());
    let tag = if components.iter().all(|c| c.rank == 0) {
        RegionTag::Inessential
    } else if complement.components.iter().all(|c| c.rank() == 0) {
        RegionTag::FullyEssential
    } else {
        let mut dirs = components.iter().filter(|c| c.rank > 0).map(|c| (c.rank, c.direction));
        let first = dirs.next().expect("some component is essential");
        match first {
            (1, Some(v)) if dirs.all(|d| d == first) => RegionTag::EssentialAnnular { direction: v },
            _ => RegionTag::EssentialNotFully,
        }
    };
    RegionClass { tag, components }
}

/// The region together with every inessential component of its complement.
pub fn fill(region: &GridRegion) -> GridRegion {
    let complement = label_components(&region.complement());
    let mut out = region.clone();
    for comp in complement.components.iter().filter(|c| c.rank() == 0) {
        for &k in &comp.cells {
            let (i, j) = region.coords(k);
            out.set(i, j, true);
        }
    }
    out
}

/// Essentiality of each cell's component decided by plain BFS on a 3×3
/// unfolded copy of the torus: a component is essential iff some connected
/// piece of the unfolding contains two copies of the same torus cell.
pub fn unfold_oracle(region: &GridRegion) -> Vec<bool> {
    let r = region.resolution();
    let w = 3 * r;
    let active = |x: usize, y: usize| region.get(x % r, y % r);
    let mut seen = vec![false; w * w];
    let mut essential_cell = vec![false; r * r];
    let mut queue = VecDeque::new();
    let mut piece = Vec::new();
    let mut copies = vec![0u32; r * r];
    let mut stamp = vec![0u32; r * r];
    let mut piece_id = 0u32;
    for start in 0..w * w {
        let (sx, sy) = (start % w, start / w);
        if seen[start] || !active(sx, sy) {
            continue;
        }
        piece_id += 1;
        piece.clear();
        seen[start] = true;
        queue.push_back((sx, sy));
        let mut repeat = false;
        while let Some((x, y)) = queue.pop_front() {
            let base = (y % r) * r + x % r;
            if stamp[base] != piece_id {
                stamp[base] = piece_id;
                copies[base] = 0;
            }
            copies[base] += 1;
            repeat |= copies[base] > 1;
            piece.push(base);
            let mut push = |nx: usize, ny: usize| {
                let k = ny * w + nx;
                if !seen[k] && active(nx, ny) {
                    seen[k] = true;
                    queue.push_back((nx, ny));
                }
            };
            if x + 1 < w {
                push(x + 1, y);
            }
            if x > 0 {
                push(x - 1, y);
            }
            if y + 1 < w {
                push(x, y + 1);
            }
            if y > 0 {
                push(x, y - 1);
            }
        }
        if repeat {
            for &b in &piece {
                essential_cell[b] = true;
            }
        }
    }
    // spread the verdict over whole torus components
    let mut out = vec![false; r * r];
    let mut visited = vec![false; r * r];
    for s in 0..r * r {
        if visited[s] || !region.get_index(s) {
            continue;
        }
        let mut comp = vec![s];
        visited[s] = true;
        let mut head = 0;
        let mut ess = false;
        while head < comp.len() {
            let k = comp[head];
            head += 1;
            ess |= essential_cell[k];
            for (nb, _) in neighbours(r, k) {
                if !visited[nb] && region.get_index(nb) {
                    visited[nb] = true;
                    comp.push(nb);
                }
            }
        }
        for k in comp {
            out[k] = ess;
        }
    }
    out
}
