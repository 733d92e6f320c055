//! Periodic orbits realizing rational rotation vectors, and deviation
//! probes for annularity and irrotationality.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::ConvexPolygon;
use crate::maps::{iterate_endpoint, LiftedMap};
use crate::rotation::{estimate_rotation_set, grid_starts, max_step};
use crate::sampling::unit_square_points;
use crate::torus::{gcd, project, IntVec, TorusPoint, Vec2};

pub const FD_STEP: f64 = 1e-6;
pub const MAX_HALVINGS: usize = 20;
pub const GROWTH_RATIO: f64 = 1.2;
pub const STAGNATION_RATIO: f64 = 1.02;

/// `f̂^q(z) − z = (p₁, p₂)` in reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealizationTarget {
    pub p1: i64,
    pub p2: i64,
    pub q: u32,
}

impl RealizationTarget {
    pub fn new(p1: i64, p2: i64, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("period q must be at least 1".into()));
        }
        if gcd(gcd(p1, p2), q as i64) != 1 {
            return Err(Error::InvalidParameter(format!("target ({p1},{p2},{q}) is not in reduced form")));
        }
        Ok(Self { p1, p2, q })
    }

    /// Parse `p1,p2,q`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("target must read p1,p2,q, got `{text}`"));
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let p1 = parts[0].parse().map_err(|_| bad())?;
        let p2 = parts[1].parse().map_err(|_| bad())?;
        let q = parts[2].parse().map_err(|_| bad())?;
        Self::new(p1, p2, q)
    }

    pub fn shift(&self) -> Vec2 {
        Vec2::new(self.p1 as f64, self.p2 as f64)
    }

    pub fn rotation_vector(&self) -> Vec2 {
        self.shift() * (1.0 / self.q as f64)
    }
}

fn residual_vec(map: &LiftedMap, z: Vec2, t: &RealizationTarget) -> Vec2 {
    iterate_endpoint(map, z, t.q as usize) - z - t.shift()
}

/// `‖f̂^q(z) − z − (p₁, p₂)‖`.
pub fn verify_realization(map: &LiftedMap, z: Vec2, t: &RealizationTarget) -> f64 {
    residual_vec(map, z, t).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub point: TorusPoint,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSearch {
    pub target: RealizationTarget,
    pub seeds: usize,
    pub tolerance: f64,
    pub roots: Vec<Root>,
    /// Set when no seed converged.
    pub empty: bool,
}

fn newton(map: &LiftedMap, t: &RealizationTarget, mut z: Vec2, iters: usize, tol: f64) -> Option<Root> {
    let g = |z: Vec2| residual_vec(map, z, t);
    let mut gz = g(z);
    let mut norm = gz.norm();
    for _ in 0..iters {
        if norm < tol {
            break;
        }
        let dx = (g(z + Vec2::new(FD_STEP, 0.0)) - g(z - Vec2::new(FD_STEP, 0.0))) * (0.5 / FD_STEP);
        let dy = (g(z + Vec2::new(0.0, FD_STEP)) - g(z - Vec2::new(0.0, FD_STEP))) * (0.5 / FD_STEP);
        // J = [dx dy] column-wise
        let det = dx.x * dy.y - dy.x * dx.y;
        let scale = dx.norm_sq() + dy.norm_sq();
        let step = if det.abs() > 1e-12 * scale.max(1e-300) {
            Vec2::new(dy.y * gz.x - dy.x * gz.y, -dx.y * gz.x + dx.x * gz.y) * (-1.0 / det)
        } else {
            // near-singular: damped least squares (JᵀJ + λI)δ = −Jᵀg
            let lambda = 1e-6 * scale.max(1e-12);
            let (a, b, d) = (dx.norm_sq() + lambda, dx.dot(dy), dy.norm_sq() + lambda);
            let rhs = Vec2::new(-dx.dot(gz), -dy.dot(gz));
            let det = a * d - b * b;
            Vec2::new(d * rhs.x - b * rhs.y, -b * rhs.x + a * rhs.y) * (1.0 / det)
        };
        if !step.is_finite() {
            return None;
        }
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let cand = z + step * lam;
            let gc = g(cand);
            let nc = gc.norm();
            if nc.is_finite() && nc < norm {
                z = cand;
                gz = gc;
                norm = nc;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm < tol).then(|| Root { point: project(z), residual: norm })
}

/// Newton search for points with `f̂^q(z) − z = (p₁, p₂)`, seeded on a
/// `grid × grid` lattice; roots closer than `10·tol` on the torus are merged.
pub fn find_periodic_realizing(
    map: &LiftedMap,
    t: &RealizationTarget,
    grid: usize,
    newton_iters: usize,
    tol: f64,
) -> Result<RootSearch> {
    map.require_identity_class()?;
    if grid == 0 || !(tol > 0.0) {
        return Err(Error::InvalidParameter("need grid >= 1 and tol > 0".into()));
    }
    let seeds = grid_starts(grid);
    let found: Vec<Option<Root>> = seeds.par_iter().map(|&z| newton(map, t, z, newton_iters, tol)).collect();
    let mut roots: Vec<Root> = Vec::new();
    for r in found.into_iter().flatten() {
        if roots.iter().all(|s| s.point.dist(r.point) > 10.0 * tol) {
            roots.push(r);
        }
    }
    Ok(RootSearch { target: *t, seeds: seeds.len(), tolerance: tol, empty: roots.is_empty(), roots })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationVerdict {
    BoundedLooking,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationCurve {
    pub direction: IntVec,
    pub horizons: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnularityProbe {
    pub curve: DeviationCurve,
    pub verdict: DeviationVerdict,
    pub samples: usize,
    pub seed: u64,
    pub growth_ratio: f64,
    pub stagnation_ratio: f64,
}

/// Largest deviation of `f̂ⁿ(x) − x` across `v⊥` at `n ∈ {N/8, N/4, N/2, N}`.
pub fn annularity_probe(map: &LiftedMap, v: IntVec, samples: usize, n: usize, seed: u64) -> Result<AnnularityProbe> {
    map.require_identity_class()?;
    if !v.is_primitive() {
        return Err(Error::InvalidParameter(format!("direction {v} is not primitive")));
    }
    if n < 8 || samples == 0 {
        return Err(Error::InvalidParameter("need N >= 8 and at least one sample".into()));
    }
    let horizons = vec![n / 8, n / 4, n / 2, n];
    let u = v.perp().to_vec2() * (1.0 / v.to_vec2().norm());
    let starts = unit_square_points(seed, samples);
    let per_start: Vec<[f64; 4]> = starts
        .par_iter()
        .map(|&x| {
            let mut out = [0.0; 4];
            let mut z = x;
            let mut done = 0;
            for (k, &h) in horizons.iter().enumerate() {
                z = iterate_endpoint(map, z, h - done);
                done = h;
                out[k] = (z - x).dot(u).abs();
            }
            out
        })
        .collect();
    let values: Vec<f64> = (0..4).map(|k| per_start.iter().map(|d| d[k]).fold(0.0, f64::max)).collect();
    let (half, full) = (values[2], values[3]);
    let verdict = if full > 1.0 && full >= GROWTH_RATIO * half {
        DeviationVerdict::Growing
    } else if full <= half * STAGNATION_RATIO + 1e-6 {
        DeviationVerdict::BoundedLooking
    } else {
        DeviationVerdict::Inconclusive
    };
    Ok(AnnularityProbe {
        curve: DeviationCurve { direction: v, horizons, values },
        verdict,
        samples,
        seed,
        growth_ratio: GROWTH_RATIO,
        stagnation_ratio: STAGNATION_RATIO,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrotationalProbe {
    pub irrotational: bool,
    pub contains_origin: bool,
    pub hull_diameter: f64,
    pub threshold: f64,
    pub max_step: f64,
}

/// Does the grid rotation set look like `{0}`? The hull must contain the
/// origin and have diameter at most `2·max(1, max step)/N`; orbits that stay
/// in a lifted disk of diameter below 1 always meet the bound.
pub fn irrotational_probe(map: &LiftedMap, g: usize, n: usize) -> Result<IrrotationalProbe> {
    let est = estimate_rotation_set(map, g, n)?;
    Ok(irrotational_verdict(&est.hull, n, max_step(map, &grid_starts(g))))
}

/// The verdict of [`irrotational_probe`] for an existing hull at horizon `n`.
pub fn irrotational_verdict(hull: &ConvexPolygon, n: usize, step: f64) -> IrrotationalProbe {
    let threshold = 2.0 * step.max(1.0) / n as f64;
    let diameter = hull.diameter();
    let contains_origin = hull.contains(Vec2::ZERO, 1e-12);
    IrrotationalProbe {
        irrotational: contains_origin && diameter <= threshold,
        contains_origin,
        hull_diameter: diameter,
        threshold,
        max_step: step,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToralityFlags {
    pub growing_e1: bool,
    pub growing_e2: bool,
    pub diffusion_rate: f64,
    /// Both coordinate probes grow and the rotation set has interior.
    pub strictly_toral_looking: bool,
}

pub fn torality_flags(horizontal: &AnnularityProbe, vertical: &AnnularityProbe, diffusion_rate: f64) -> ToralityFlags {
    let growing_e1 = horizontal.verdict == DeviationVerdict::Growing;
    let growing_e2 = vertical.verdict == DeviationVerdict::Growing;
    ToralityFlags { growing_e1, growing_e2, diffusion_rate, strictly_toral_looking: growing_e1 && growing_e2 && diffusion_rate > 0.0 }
}
