//! Winding numbers of planar polylines and linking numbers of periodic
//! orbits and invariant disks around fixed points.
//!
//! The isotopy from the identity to a lift is taken to be the straight-line
//! homotopy, so the trajectory of a point is the polyline through its orbit.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::homology::{fill, label_components, neighbours};
use crate::maps::{iterate_endpoint, iterate_lift, LiftedMap};
use crate::region::GridRegion;
use crate::torus::{IntVec, Vec2};

pub const ON_PATH_TOL: f64 = 1e-9;
pub const CLOSE_TOL: f64 = 1e-9;
pub const MIN_SEGMENT: f64 = 1e-12;
pub const INTEGER_TOL: f64 = 1e-6;
pub const PERIODIC_TOL: f64 = 1e-7;
pub const FIXED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec2>,
    closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPolyline(format!("need at least 2 points, got {}", points.len())));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolyline(format!("non-finite vertex {p}")));
        }
        if let Some(k) = points.windows(2).position(|w| w[0].dist(w[1]) <= MIN_SEGMENT) {
            return Err(Error::InvalidPolyline(format!("vertices {k} and {} coincide", k + 1)));
        }
        if closed && points[0].dist(points[points.len() - 1]) > CLOSE_TOL {
            return Err(Error::InvalidPolyline("closed polyline must end where it starts".into()));
        }
        Ok(Self { points, closed })
    }

    /// Close a vertex loop by appending its first point.
    pub fn closed_loop(mut points: Vec<Vec2>) -> Result<Self> {
        if let Some(&first) = points.first() {
            points.push(first);
        }
        Self::new(points, true)
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Vec2 {
        self.points[0]
    }

    pub fn end(&self) -> Vec2 {
        self.points[self.points.len() - 1]
    }

    /// `γ * γ′`: requires `γ` to end where `γ′` starts.
    pub fn concat(&self, other: &Polyline) -> Result<Polyline> {
        if self.end().dist(other.start()) > CLOSE_TOL {
            return Err(Error::InvalidPolyline("arcs are not concatenable".into()));
        }
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points[1..]);
        let closed = pts[0].dist(pts[pts.len() - 1]) <= CLOSE_TOL;
        Polyline::new(pts, closed)
    }

    pub fn distance_to(&self, z: Vec2) -> f64 {
        self.points.windows(2).map(|w| segment_distance(w[0], w[1], z)).fold(f64::INFINITY, f64::min)
    }

    /// Point-in-polygon by crossing parity, for closed polylines.
    pub fn encloses(&self, z: Vec2) -> bool {
        let mut inside = false;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.y > z.y) != (b.y > z.y) {
                let x = a.x + (z.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if z.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

pub fn segment_distance(a: Vec2, b: Vec2, z: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return a.dist(z);
    }
    let t = ((z - a).dot(d) / len2).clamp(0.0, 1.0);
    (a + d * t).dist(z)
}

/// Total signed angle swept around `z`, in turns. Zero-length segments are
/// skipped, so a constant path contributes 0.
fn turns(points: &[Vec2], z: Vec2) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        let d = segment_distance(w[0], w[1], z);
        if d <= ON_PATH_TOL {
            return Err(Error::PointOnPath { distance: d });
        }
        let (u, v) = (w[0] - z, w[1] - z);
        total += u.cross(v).atan2(u.dot(v));
    }
    Ok(total / TAU)
}

/// `I(γ, z)`. For closed polylines the result is rounded to an integer after
/// checking that it is within `1e−6` of one.
pub fn winding_index(poly: &Polyline, z: Vec2) -> Result<f64> {
    let w = turns(&poly.points, z)?;
    if poly.closed {
        let n = w.round();
        if (w - n).abs() > INTEGER_TOL {
            return Err(Error::NonIntegerWinding(w - n));
        }
        return Ok(n);
    }
    Ok(w)
}

pub fn winding_number(poly: &Polyline, z: Vec2) -> Result<i64> {
    if !poly.closed {
        return Err(Error::InvalidPolyline("winding number needs a closed polyline".into()));
    }
    Ok(winding_index(poly, z)? as i64)
}

/// Brute-force angle accumulation on a dense resampling of the polyline;
/// an independent check of [`winding_index`].
pub fn dense_winding(poly: &Polyline, z: Vec2, subdivisions: usize) -> f64 {
    let mut total = 0.0;
    let mut prev = (poly.points[0] - z).y.atan2((poly.points[0] - z).x);
    for w in poly.points.windows(2) {
        for s in 1..=subdivisions {
            let p = w[0] + (w[1] - w[0]) * (s as f64 / subdivisions as f64);
            let a = (p - z).y.atan2((p - z).x);
            let mut d = a - prev;
            if d > std::f64::consts::PI {
                d -= TAU;
            } else if d < -std::f64::consts::PI {
                d += TAU;
            }
            total += d;
            prev = a;
        }
    }
    total / TAU
}

/// Trajectory of `base` under the straight-line isotopy: the polyline
/// through `base, f̂(base), …, f̂ᵏ(base)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopyPath {
    pub base: Vec2,
    pub steps: usize,
    pub vertices: Vec<Vec2>,
}

impl IsotopyPath {
    pub fn end(&self) -> Vec2 {
        self.vertices[self.vertices.len() - 1]
    }

    /// Polyline with repeated vertices removed; `None` for a constant path.
    pub fn polyline(&self) -> Option<Polyline> {
        let pts = dedup(&self.vertices);
        (pts.len() >= 2).then(|| Polyline::new(pts, false).expect("deduplicated"))
    }

    pub fn winding_index(&self, z: Vec2) -> Result<f64> {
        turns(&self.vertices, z)
    }
}

fn dedup(points: &[Vec2]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last().is_none_or(|q| q.dist(p) > MIN_SEGMENT) {
            out.push(p);
        }
    }
    out
}

pub fn isotopy_path(map: &LiftedMap, z: Vec2, k: usize) -> Result<IsotopyPath> {
    map.require_identity_class()?;
    if k == 0 {
        return Err(Error::InvalidParameter("isotopy path needs k >= 1".into()));
    }
    Ok(IsotopyPath { base: z, steps: k, vertices: iterate_lift(map, z, k as i64)? })
}

fn check_fixed(map: &LiftedMap, p: Vec2) -> Result<()> {
    let residual = map.eval(p).dist(p);
    if residual > FIXED_TOL {
        return Err(Error::NotFixed(residual));
    }
    Ok(())
}

/// Winding of a closed vertex loop; a loop of coincident points has index 0.
fn loop_index(vertices: &[Vec2], p: Vec2) -> Result<i64> {
    let mut pts = dedup(vertices);
    if pts.len() > 1 && pts[0].dist(pts[pts.len() - 1]) <= MIN_SEGMENT {
        pts.pop();
    }
    if pts.len() < 2 {
        let d = pts[0].dist(p);
        if d <= ON_PATH_TOL {
            return Err(Error::PointOnPath { distance: d });
        }
        return Ok(0);
    }
    winding_number(&Polyline::closed_loop(pts)?, p)
}

/// `I(q, p)` for a contractible `k`-periodic point `q` and a fixed point `p`.
pub fn linking_number_periodic(map: &LiftedMap, q: Vec2, k: usize, p: Vec2) -> Result<i64> {
    let path = isotopy_path(map, q, k)?;
    let residual = path.end().dist(q);
    if residual > PERIODIC_TOL {
        return Err(Error::NotPeriodic { k, residual });
    }
    check_fixed(map, p)?;
    loop_index(&path.vertices, p)
}

/// Does `f̂ᵏ` map every cell center of `region` back into `region`?
pub fn is_invariant_at_resolution(map: &LiftedMap, region: &GridRegion, k: usize) -> bool {
    region.active_cells().into_iter().all(|(i, j)| {
        let z = iterate_endpoint(map, region.cell_center(i, j), k);
        region.contains_point(crate::torus::project(z))
    })
}

/// Linking number of an invariant disk `U` with a fixed point `p`, using
/// the lift of `U` nearest `p`. `base` picks the cell whose center serves as
/// base point (any active cell index; default: the first).
pub fn linking_number_region(
    map: &LiftedMap,
    region: &GridRegion,
    k: usize,
    p: Vec2,
    base: Option<usize>,
) -> Result<i64> {
    map.require_identity_class()?;
    check_fixed(map, p)?;
    let labeling = label_components(region);
    match labeling.components().len() {
        0 => return Err(Error::Empty("region")),
        1 => {}
        n => return Err(Error::DisconnectedRegion(n)),
    }
    let comp = &labeling.components()[0];
    if comp.is_essential() {
        return Err(Error::EssentialRegion);
    }
    let r = region.resolution();
    let h = 1.0 / r as f64;
    // shift the labeled lift so that its centroid is nearest p
    let centroid = comp.cells.iter().fold(Vec2::ZERO, |acc, &c| acc + labeling.lifted_center(c)) * (1.0 / comp.cells.len() as f64);
    let shift = IntVec::new((p.x - centroid.x).round() as i64, (p.y - centroid.y).round() as i64);
    let center_of = |c: usize| labeling.lifted_center(c) + shift;
    let lifted_cell = |c: usize| {
        let v = center_of(c);
        ((v.x * r as f64).floor() as i64, (v.y * r as f64).floor() as i64)
    };
    let cell_at = |z: Vec2| ((z.x * r as f64).floor() as i64, (z.y * r as f64).floor() as i64);

    // p must lie outside the lift, holes included
    let filled = fill(region);
    let fl = label_components(&filled);
    let anchor = comp.cells[0];
    let fc = fl.component_of_index(anchor).expect("fill contains the region");
    let fshift = labeling.offset_of_index(anchor) + shift - fl.offset_of_index(anchor);
    let pcell = cell_at(p);
    let hit = fl.components()[fc].cells.iter().any(|&c| {
        let o = fl.offset_of_index(c) + fshift;
        ((c % r) as i64 + o.a * r as i64, (c / r) as i64 + o.b * r as i64) == pcell
    });
    if hit {
        return Err(Error::PointInsideRegion);
    }

    let base = match base {
        Some(b) if labeling.component_of_index(b) == Some(0) => b,
        Some(_) => return Err(Error::InvalidParameter("base cell is not in the region".into())),
        None => anchor,
    };
    let z = center_of(base);
    let path = isotopy_path(map, z, k)?;
    let end = path.end();
    let target = cell_at(end);
    let end_cell = comp.cells.iter().copied().find(|&c| lifted_cell(c) == target).ok_or(Error::NoPathInRegion)?;

    // σ: breadth-first path through cells of U from the end cell back to base
    let mut prev = vec![usize::MAX; r * r];
    prev[end_cell] = end_cell;
    let mut queue = VecDeque::from([end_cell]);
    while let Some(c) = queue.pop_front() {
        if c == base {
            break;
        }
        let mut nbs = neighbours(r, c);
        nbs.sort_by_key(|&(n, _)| n);
        for (n, _) in nbs {
            if region.get_index(n) && prev[n] == usize::MAX {
                prev[n] = c;
                queue.push_back(n);
            }
        }
    }
    if prev[base] == usize::MAX {
        return Err(Error::NoPathInRegion);
    }
    let mut sigma = vec![base];
    let mut c = base;
    while c != end_cell {
        c = prev[c];
        sigma.push(c);
    }
    sigma.reverse();
    let mut vertices = path.vertices.clone();
    vertices.extend(sigma.into_iter().map(center_of));
    debug_assert!(vertices.windows(2).skip(k).all(|w| w[0].dist(w[1]) <= 1.5 * h));
    loop_index(&vertices, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::make_map;
    use std::f64::consts::FRAC_PI_2;

    fn square() -> Polyline {
        Polyline::closed_loop(vec![
            Vec2::new(-0.5, -0.5),
            Vec2::new(0.5, -0.5),
            Vec2::new(0.5, 0.5),
            Vec2::new(-0.5, 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn square_examples() {
        assert_eq!(winding_index(&square(), Vec2::ZERO).unwrap(), 1.0);
        assert_eq!(winding_index(&square(), Vec2::new(5.0, 5.0)).unwrap(), 0.0);
        assert!(matches!(winding_index(&square(), Vec2::new(0.5, 0.0)), Err(Error::PointOnPath { .. })));
        assert!(square().encloses(Vec2::ZERO));
    }

    #[test]
    fn polyline_validation() {
        assert!(Polyline::new(vec![Vec2::ZERO], false).is_err());
        assert!(Polyline::new(vec![Vec2::ZERO, Vec2::ZERO], false).is_err());
        assert!(Polyline::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)], true).is_err());
    }

    #[test]
    fn open_arc_half_turn() {
        let arc = Polyline::new(vec![Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(-1.0, 1.0), Vec2::new(-1.0, 0.0)], false).unwrap();
        assert!((winding_index(&arc, Vec2::ZERO).unwrap() - 0.5).abs() < 1e-12);
        assert!((dense_winding(&arc, Vec2::ZERO, 1000) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn isotopy_path_examples() {
        let t = make_map("translation", &[0.25, 0.125]).unwrap();
        let p = isotopy_path(&t, Vec2::ZERO, 3).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.end(), Vec2::new(0.75, 0.375));
        let tw = make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap();
        let c = isotopy_path(&tw, Vec2::new(0.5, 0.5), 4).unwrap();
        assert!(c.polyline().is_none());
        assert_eq!(c.winding_index(Vec2::new(0.9, 0.9)).unwrap(), 0.0);
        let q = isotopy_path(&tw, Vec2::new(0.6, 0.5), 4).unwrap();
        assert!(q.end().dist(Vec2::new(0.6, 0.5)) < 1e-12);
        let quad = Polyline::new(q.vertices.clone(), true).unwrap();
        assert!(quad.encloses(Vec2::new(0.5, 0.5)));
    }

    #[test]
    fn periodic_linking() {
        let tw = make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap();
        let center = Vec2::new(0.5, 0.5);
        assert_eq!(linking_number_periodic(&tw, Vec2::new(0.6, 0.5), 4, center).unwrap(), 1);
        // reversed twist links negatively
        let rev = make_map("disk_twist", &[0.5, 0.5, 0.2, -FRAC_PI_2]).unwrap();
        assert_eq!(linking_number_periodic(&rev, Vec2::new(0.5, 0.6), 4, center).unwrap(), -1);
        // a point outside the support is fixed
        assert_eq!(linking_number_periodic(&tw, Vec2::new(0.05, 0.05), 1, center).unwrap(), 0);
        assert!(matches!(linking_number_periodic(&tw, Vec2::new(0.6, 0.5), 3, center), Err(Error::NotPeriodic { .. })));
        assert!(matches!(linking_number_periodic(&tw, Vec2::new(0.05, 0.05), 1, Vec2::new(0.55, 0.5)), Err(Error::NotFixed(_))));
    }

    #[test]
    fn region_linking_matches_periodic() {
        let tw = make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap();
        let r = 128;
        let q = Vec2::new(0.6, 0.5);
        let u = GridRegion::ball(r, crate::torus::project(q), 0.025).unwrap();
        assert!(is_invariant_at_resolution(&tw, &u, 4));
        let p = Vec2::new(0.5, 0.5);
        let expected = linking_number_periodic(&tw, q, 4, p).unwrap();
        let cells = u.active_cells();
        for (n, (i, j)) in cells.iter().enumerate().step_by(cells.len() / 10 + 1) {
            let got = linking_number_region(&tw, &u, 4, p, Some(u.index(*i, *j))).unwrap();
            assert_eq!(got, expected, "base choice {n}");
        }
    }

    #[test]
    fn region_linking_errors() {
        let tw = make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap();
        let r = 64;
        let p = Vec2::new(0.5, 0.5);
        let around = GridRegion::ball(r, crate::torus::TorusPoint::new(0.5, 0.5), 0.15).unwrap();
        assert_eq!(linking_number_region(&tw, &around, 4, p, None), Err(Error::PointInsideRegion));
        let support = GridRegion::ball(r, crate::torus::TorusPoint::new(0.5, 0.5), 0.2).unwrap();
        let outside = Vec2::new(0.05, 0.05);
        assert_eq!(linking_number_region(&tw, &support, 1, outside, None), Ok(0));
        let band = GridRegion::from_fn(r, |_, j| j == 3).unwrap();
        assert_eq!(linking_number_region(&tw, &band, 1, p, None), Err(Error::EssentialRegion));
        let mut ring = GridRegion::ball(r, crate::torus::TorusPoint::new(0.5, 0.5), 0.1).unwrap();
        for (i, j) in GridRegion::ball(r, crate::torus::TorusPoint::new(0.5, 0.5), 0.05).unwrap().active_cells() {
            ring.set(i, j, false);
        }
        assert_eq!(linking_number_region(&tw, &ring, 4, p, None), Err(Error::PointInsideRegion));
    }
}
