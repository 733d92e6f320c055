//! Planar convex polygons: hulls of displacement samples, their inner
//! (Chebyshev) radius and Hausdorff distances between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::Vec2;

/// Points closer than this are treated as one vertex.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// Counterclockwise, strictly convex vertex list. One vertex is a point,
/// two a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Wrap a vertex list after checking the polygon invariants.
    pub fn from_vertices(vertices: Vec<Vec2>) -> Result<Self> {
        let poly = ConvexPolygon { vertices };
        poly.check().map_err(Error::InvalidParameter)?;
        Ok(poly)
    }

    pub fn point(p: Vec2) -> Self {
        ConvexPolygon { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Point or segment.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Verify counterclockwise strict convexity and absence of duplicates.
    pub fn check(&self) -> std::result::Result<(), String> {
        let v = &self.vertices;
        if v.is_empty() {
            return Err("polygon has no vertices".into());
        }
        if let Some(p) = v.iter().find(|p| !p.is_finite()) {
            return Err(format!("non-finite vertex {p}"));
        }
        let n = v.len();
        for i in 0..n {
            for j in i + 1..n {
                if v[i].dist(v[j]) <= DUPLICATE_TOL {
                    return Err(format!("duplicate vertices {} and {}", v[i], v[j]));
                }
            }
        }
        if n >= 3 {
            for i in 0..n {
                let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
                if (b - a).cross(c - b) <= 0.0 {
                    return Err(format!("vertices {a}, {b}, {c} are not a strict left turn"));
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
    }

    /// Largest distance between two points of the polygon.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    /// `max ⟨v, u⟩` over the polygon.
    pub fn support(&self, u: Vec2) -> f64 {
        self.vertices.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => v[0].dist(p),
            2 => segment_distance(p, v[0], v[1]),
            n => {
                let inside = (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(p - v[i]) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n).map(|i| segment_distance(p, v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Containment with an absolute slack.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.distance_to(p) <= tol
    }

    pub fn translated(&self, d: Vec2) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|&p| p + d).collect() }
    }

    /// Scale about the origin; `factor` must be positive.
    pub fn scaled(&self, factor: f64) -> ConvexPolygon {
        assert!(factor > 0.0, "scale factor must be positive");
        ConvexPolygon { vertices: self.vertices.iter().map(|&p| p * factor).collect() }
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Smallest convex polygon containing `points` (Andrew's monotone chain).
///
/// Collinear points collapse to a segment, coincident points to a single
/// vertex; interior and collinear boundary points are dropped.
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::Empty("convex hull of no points"));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite point {p}")));
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist(*b) <= DUPLICATE_TOL);
    if pts.len() == 1 {
        return Ok(ConvexPolygon::point(pts[0]));
    }

    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    // Sweep the cyclic sequence once more so the wrap-around triples also
    // satisfy the strict-turn invariant under floating point.
    let mut changed = true;
    while changed && hull.len() >= 3 {
        changed = false;
        let n = hull.len();
        for i in 0..n {
            let (a, b, c) = (hull[(i + n - 1) % n], hull[i], hull[(i + 1) % n]);
            if (b - a).cross(c - b) <= 0.0 {
                hull.remove(i);
                changed = true;
                break;
            }
        }
    }
    if hull.len() < 3 {
        // (nearly) collinear input
        return Ok(extreme_segment(&pts));
    }
    Ok(ConvexPolygon { vertices: hull })
}

fn extreme_segment(pts: &[Vec2]) -> ConvexPolygon {
    let mut best = (pts[0], pts[0], 0.0);
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            let d = a.dist(b);
            if d > best.2 {
                best = (a, b, d);
            }
        }
    }
    if best.2 <= DUPLICATE_TOL {
        ConvexPolygon::point(best.0)
    } else {
        ConvexPolygon { vertices: vec![best.0, best.1] }
    }
}

/// Inner radius of the polygon: the radius of the largest inscribed disk
/// (Chebyshev radius). Points and segments give 0.
pub fn diffusion_rate(hull: &ConvexPolygon) -> f64 {
    chebyshev_center(hull).map_or(0.0, |(_, r)| r)
}

/// Center and radius of the largest inscribed disk, `None` for degenerate
/// polygons.
///
/// The slack `g(x) = min_i dist(x, edge line i)` is concave and piecewise
/// linear, so its maximum is found by nested ternary search: the outer
/// search runs over `x`, the inner one over `y` within the polygon's
/// vertical slice at `x`.
pub fn chebyshev_center(hull: &ConvexPolygon) -> Option<(Vec2, f64)> {
    let v = hull.vertices();
    let n = v.len();
    if n < 3 {
        return None;
    }
    // Inward unit normals: for a CCW polygon the interior is on the left.
    let edges: Vec<(Vec2, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let normal = (b - a).perp() * (1.0 / (b - a).norm());
            (normal, normal.dot(a))
        })
        .collect();
    let slack = |p: Vec2| edges.iter().map(|&(nrm, c)| nrm.dot(p) - c).fold(f64::INFINITY, f64::min);

    let (xmin, xmax) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let slice = |x: f64| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (l, r) = if a.x <= b.x { (a, b) } else { (b, a) };
            if x < l.x || x > r.x {
                continue;
            }
            let y = if r.x == l.x {
                lo = lo.min(l.y.min(r.y));
                hi = hi.max(l.y.max(r.y));
                continue;
            } else {
                l.y + (r.y - l.y) * (x - l.x) / (r.x - l.x)
            };
            lo = lo.min(y);
            hi = hi.max(y);
        }
        (lo, hi)
    };
    let best_in_slice = |x: f64| -> (f64, f64) {
        let (mut lo, mut hi) = slice(x);
        if lo > hi {
            return (f64::NEG_INFINITY, 0.0);
        }
        let eval = |y: f64| slack(Vec2::new(x, y));
        ternary_max(&mut lo, &mut hi, eval);
        let y = 0.5 * (lo + hi);
        (eval(y), y)
    };
    let (mut lo, mut hi) = (xmin, xmax);
    ternary_max(&mut lo, &mut hi, |x| best_in_slice(x).0);
    let x = 0.5 * (lo + hi);
    let (r, y) = best_in_slice(x);
    Some((Vec2::new(x, y), r.max(0.0)))
}

/// Shrink `[lo, hi]` around the maximizer of a concave function.
fn ternary_max(lo: &mut f64, hi: &mut f64, f: impl Fn(f64) -> f64) {
    for _ in 0..200 {
        if *hi - *lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let m1 = *lo + (*hi - *lo) / 3.0;
        let m2 = *hi - (*hi - *lo) / 3.0;
        if f(m1) < f(m2) {
            *lo = m1;
        } else {
            *hi = m2;
        }
    }
}

/// Number of support directions sampled in [`hausdorff_distance`].
pub const SUPPORT_ANGLES: usize = 360;

/// Symmetric Hausdorff distance between two convex polygons.
///
/// Takes the larger of the support-function discrepancy sampled at
/// [`SUPPORT_ANGLES`] directions and the vertex-to-polygon distances. For
/// convex sets the farthest point of one set from the other is a vertex,
/// so the vertex term is exact and the support term is a lower bound.
pub fn hausdorff_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let vertex_term = a
        .vertices()
        .iter()
        .map(|&p| b.distance_to(p))
        .chain(b.vertices().iter().map(|&p| a.distance_to(p)))
        .fold(0.0, f64::max);
    let support_term = (0..SUPPORT_ANGLES)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / SUPPORT_ANGLES as f64;
            let u = Vec2::new(t.cos(), t.sin());
            (a.support(u) - b.support(u)).abs()
        })
        .fold(0.0, f64::max);
    vertex_term.max(support_term)
}
