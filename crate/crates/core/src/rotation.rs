//! Finite-horizon estimates of rotation sets.
//!
//! The rotation set is a limit object; here it is approximated by the convex
//! hull of average displacements `(f̂ⁿ(z) − z)/n` over a fixed set of start
//! points at one horizon `n`. Hulls produced this way are inner
//! approximations: limits reached only along varying horizons or rare start
//! points can be missed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{convex_hull, diffusion_rate, hausdorff_distance, ConvexPolygon};
use crate::maps::{iterate_endpoint, LiftedMap};
use crate::region::GridRegion;
use crate::sampling::{disk_points, unit_square_points};
use crate::torus::{TorusPoint, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSample {
    pub start: Vec2,
    pub horizon: usize,
    /// `(f̂ⁿ(start) − start)/n`
    pub value: Vec2,
}

impl DisplacementSample {
    /// The undivided displacement `f̂ⁿ(start) − start`.
    pub fn displacement(&self) -> Vec2 {
        self.value * self.horizon as f64
    }
}

/// How the start points of an estimate were chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartPoints {
    /// `G×G` lattice offset by half a spacing.
    Grid { g: usize },
    /// Seeded low-discrepancy points over a local region.
    Local { samples: usize, seed: u64, region: String },
    Explicit { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSetEstimate {
    pub map_label: String,
    pub horizon: usize,
    pub starts: StartPoints,
    pub samples: Vec<DisplacementSample>,
    pub hull: ConvexPolygon,
}

impl RotationSetEstimate {
    pub fn diffusion_rate(&self) -> f64 {
        diffusion_rate(&self.hull)
    }

    pub fn values(&self) -> Vec<Vec2> {
        self.samples.iter().map(|s| s.value).collect()
    }
}

/// Open set over which local start points are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalRegion {
    Ball { center: TorusPoint, radius: f64 },
    Cells(GridRegion),
}

impl LocalRegion {
    pub fn describe(&self) -> String {
        match self {
            LocalRegion::Ball { center, radius } => format!("ball(({}, {}), {})", center.x, center.y, radius),
            LocalRegion::Cells(r) => format!("cells(R={}, active={})", r.resolution(), r.count()),
        }
    }
}

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    Ok(())
}

/// Displacement samples at a common horizon, computed in parallel.
pub fn sample_displacements(map: &LiftedMap, starts: &[Vec2], n: usize) -> Result<Vec<DisplacementSample>> {
    map.require_identity_class()?;
    check_horizon(n)?;
    let inv_n = 1.0 / n as f64;
    Ok(starts
        .par_iter()
        .map(|&z| {
            let end = iterate_endpoint(map, z, n);
            DisplacementSample { start: z, horizon: n, value: (end - z) * inv_n }
        })
        .collect())
}

/// The `G×G` lattice `((i + ½)/G, (j + ½)/G)`, row-major in `j`.
pub fn grid_starts(g: usize) -> Vec<Vec2> {
    let step = 1.0 / g as f64;
    (0..g)
        .flat_map(|j| (0..g).map(move |i| Vec2::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step)))
        .collect()
}

/// Seeded start points whose projections lie in the region.
pub fn local_starts(region: &LocalRegion, count: usize, seed: u64) -> Result<Vec<Vec2>> {
    if count == 0 {
        return Err(Error::InvalidParameter("at least one local sample is required".into()));
    }
    match region {
        LocalRegion::Ball { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::Empty("local region ball has no interior"));
            }
            Ok(disk_points(seed, count, center.lift(), *radius))
        }
        LocalRegion::Cells(cells) => {
            let active = cells.active_cells();
            if active.is_empty() {
                return Err(Error::Empty("local region has no active cells"));
            }
            let h = 1.0 / cells.resolution() as f64;
            Ok(unit_square_points(seed, count)
                .into_iter()
                .enumerate()
                .map(|(k, p)| {
                    let (i, j) = active[k % active.len()];
                    Vec2::new((i as f64 + p.x) * h, (j as f64 + p.y) * h)
                })
                .collect())
        }
    }
}

fn estimate_from(map: &LiftedMap, starts: &[Vec2], n: usize, kind: StartPoints) -> Result<RotationSetEstimate> {
    let samples = sample_displacements(map, starts, n)?;
    let values: Vec<Vec2> = samples.iter().map(|s| s.value).collect();
    let hull = convex_hull(&values)?;
    Ok(RotationSetEstimate { map_label: map.label().to_string(), horizon: n, starts: kind, samples, hull })
}

/// Global estimate from the `G×G` start lattice at horizon `n`.
pub fn estimate_rotation_set(map: &LiftedMap, g: usize, n: usize) -> Result<RotationSetEstimate> {
    if g == 0 {
        return Err(Error::InvalidParameter("grid size G must be at least 1".into()));
    }
    estimate_from(map, &grid_starts(g), n, StartPoints::Grid { g })
}

/// Estimate over an explicit list of start points.
pub fn estimate_from_starts(map: &LiftedMap, starts: &[Vec2], n: usize) -> Result<RotationSetEstimate> {
    if starts.is_empty() {
        return Err(Error::Empty("no start points"));
    }
    estimate_from(map, starts, n, StartPoints::Explicit { count: starts.len() })
}

/// Local rotation set: only the start points are constrained to the region;
/// orbits may leave it.
pub fn estimate_local_rotation_set(
    map: &LiftedMap,
    region: &LocalRegion,
    samples: usize,
    n: usize,
    seed: u64,
) -> Result<RotationSetEstimate> {
    let starts = local_starts(region, samples, seed)?;
    estimate_from(map, &starts, n, StartPoints::Local { samples, seed, region: region.describe() })
}

/// `(f̂ᴺ(z) − z)/N`, the finite-time surrogate of a Birkhoff rotation vector.
pub fn birkhoff_rotation_vector(map: &LiftedMap, z: Vec2, n: usize) -> Result<Vec2> {
    map.require_identity_class()?;
    check_horizon(n)?;
    Ok((iterate_endpoint(map, z, n) - z) * (1.0 / n as f64))
}

/// Largest single-step displacement `‖f̂(z) − z‖` over the given points.
pub fn max_step(map: &LiftedMap, starts: &[Vec2]) -> f64 {
    starts.iter().map(|&z| map.eval(z).dist(z)).fold(0.0, f64::max)
}

/// Hausdorff distance between the grid hulls at horizons `n/2` and `n`.
pub fn convergence_gap(map: &LiftedMap, g: usize, n: usize) -> Result<f64> {
    let half = estimate_rotation_set(map, g, (n / 2).max(1))?;
    let full = estimate_rotation_set(map, g, n)?;
    Ok(hausdorff_distance(&half.hull, &full.hull))
}
