//! Torus maps presented by their lifts to the plane.
//!
//! A [`LiftedMap`] carries the lift `f̂: ℝ² → ℝ²` together with its linear
//! part `L`, so that `f̂(z + v) = f̂(z) + L·v` for every `v ∈ ℤ²`. Everything
//! rotational in this crate needs `L = I`; the Zaslavsky generator is the
//! one built-in with a nontrivial linear part (a quarter turn, so its fourth
//! power is back in the identity class).

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::torus::{IntVec, LinearPart, Vec2};

pub type PlaneFn = Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>;

/// Tolerance for `f̂(z + v) − f̂(z) − L·v`.
pub const EQUIVARIANCE_TOL: f64 = 1e-9;
/// Tolerance for `f̂(f̂⁻¹(z)) − z`.
pub const INVERSE_TOL: f64 = 1e-7;

#[derive(Clone)]
pub struct LiftedMap {
    label: String,
    linear: LinearPart,
    forward: PlaneFn,
    inverse: Option<PlaneFn>,
}

impl fmt::Debug for LiftedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedMap")
            .field("label", &self.label)
            .field("linear", &self.linear)
            .field("invertible", &self.inverse.is_some())
            .finish()
    }
}

impl LiftedMap {
    pub fn new<F>(label: impl Into<String>, linear: LinearPart, forward: F) -> Self
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    {
        Self { label: label.into(), linear, forward: Arc::new(forward), inverse: None }
    }

    pub fn with_inverse<F>(mut self, inverse: F) -> Self
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    #[inline]
    pub fn eval(&self, z: Vec2) -> Vec2 {
        (self.forward)(z)
    }

    #[inline]
    pub fn inverse_eval(&self, z: Vec2) -> Option<Vec2> {
        self.inverse.as_ref().map(|g| g(z))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn linear_part(&self) -> LinearPart {
        self.linear
    }

    pub fn is_homotopic_to_identity(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn require_identity_class(&self) -> Result<()> {
        if self.linear.is_identity() {
            Ok(())
        } else {
            Err(Error::NotHomotopicToIdentity(self.linear))
        }
    }

    /// The inverse as a map, when available.
    pub fn inverted(&self) -> Option<LiftedMap> {
        let inv = self.inverse.clone()?;
        // inverse of an integer matrix with det ±1 acting on ℤ²
        let m = self.linear.0;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let linear = LinearPart([[det * m[1][1], -det * m[0][1]], [-det * m[1][0], det * m[0][0]]]);
        Some(LiftedMap {
            label: format!("{}^-1", self.label),
            linear,
            forward: inv,
            inverse: Some(self.forward.clone()),
        })
    }

    /// `f̂ᵏ`, evaluated by applying `f̂` k times (same floating-point path as
    /// iterating the original map).
    pub fn power(&self, k: u32) -> LiftedMap {
        assert!(k >= 1, "power must be positive");
        let fwd = self.forward.clone();
        let forward = move |mut z: Vec2| {
            for _ in 0..k {
                z = fwd(z);
            }
            z
        };
        let inverse = self.inverse.clone().map(|inv| {
            Arc::new(move |mut z: Vec2| {
                for _ in 0..k {
                    z = inv(z);
                }
                z
            }) as PlaneFn
        });
        LiftedMap {
            label: format!("{}^{}", self.label, k),
            linear: self.linear.pow(k),
            forward: Arc::new(forward),
            inverse,
        }
    }

    /// The lift `f̂ + v` of the same torus map.
    pub fn translated(&self, v: IntVec) -> LiftedMap {
        let fwd = self.forward.clone();
        let shift = v.to_vec2();
        let inverse = self.inverse.clone().map(|inv| Arc::new(move |z: Vec2| inv(z - shift)) as PlaneFn);
        LiftedMap {
            label: format!("{}+{}", self.label, v),
            linear: self.linear,
            forward: Arc::new(move |z| fwd(z) + shift),
            inverse,
        }
    }

    /// `‖f̂(z + v) − f̂(z) − L·v‖`.
    pub fn equivariance_defect(&self, z: Vec2, v: IntVec) -> f64 {
        let lhs = self.eval(z + v);
        let rhs = self.eval(z) + self.linear.apply(v);
        lhs.dist(rhs)
    }

    /// `‖f̂(f̂⁻¹(z)) − z‖`, if an inverse is present.
    pub fn inverse_defect(&self, z: Vec2) -> Option<f64> {
        self.inverse_eval(z).map(|w| self.eval(w).dist(z))
    }
}

/// Map names accepted by [`make_map`].
pub const MAP_NAMES: [&str; 6] =
    ["identity", "translation", "standard", "zaslavsky", "zaslavsky_generator", "disk_twist"];

/// One step of the Zaslavsky generator `M(x, y) = (y, −x − K sin(2πy − c))`.
#[inline]
pub fn zaslavsky_step(k: f64, c: f64, z: Vec2) -> Vec2 {
    Vec2::new(z.y, -z.x - k * (TAU * z.y - c).sin())
}

#[inline]
fn zaslavsky_step_inv(k: f64, c: f64, z: Vec2) -> Vec2 {
    Vec2::new(-z.y - k * (TAU * z.x - c).sin(), z.x)
}

fn expect_params(name: &str, params: &[f64], expected: usize) -> Result<()> {
    if params.len() != expected {
        return Err(Error::ParamCount { name: name.to_string(), expected, got: params.len() });
    }
    if let Some(p) = params.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name}: non-finite parameter {p}")));
    }
    Ok(())
}

fn spec_label(name: &str, params: &[f64]) -> String {
    let body: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    format!("{}({})", name, body.join(","))
}

/// Build one of the built-in maps.
///
/// | name | params | lift |
/// |---|---|---|
/// | `identity` | – | `z` |
/// | `translation` | `a, b` | `z + (a, b)` |
/// | `standard` | `K` | `y' = y + K/2π sin 2πx`, `x' = x + K/2π sin 2πy'` |
/// | `zaslavsky` | `K, c` | `M⁴` |
/// | `zaslavsky_generator` | `K, c` | `M(x, y) = (y, −x − K sin(2πy − c))` |
/// | `disk_twist` | `cx, cy, r₀, angle` | twist about `(cx, cy) + ℤ²` supported in radius `r₀ < 1/2` |
///
/// `standard` is the two-kick form of the Chirikov map: the usual
/// kick-then-drift form has linear part `[[1,1],[0,1]]` and so is not
/// homotopic to the identity.
pub fn make_map(name: &str, params: &[f64]) -> Result<LiftedMap> {
    let label = spec_label(name, params);
    match name {
        "identity" => {
            expect_params(name, params, 0)?;
            Ok(LiftedMap::new(label, LinearPart::IDENTITY, |z| z).with_inverse(|z| z))
        }
        "translation" => {
            expect_params(name, params, 2)?;
            let shift = Vec2::new(params[0], params[1]);
            Ok(LiftedMap::new(label, LinearPart::IDENTITY, move |z| z + shift)
                .with_inverse(move |z| z - shift))
        }
        "standard" => {
            expect_params(name, params, 1)?;
            let a = params[0] / TAU;
            let fwd = move |z: Vec2| {
                let y = z.y + a * (TAU * z.x).sin();
                Vec2::new(z.x + a * (TAU * y).sin(), y)
            };
            let inv = move |z: Vec2| {
                let x = z.x - a * (TAU * z.y).sin();
                Vec2::new(x, z.y - a * (TAU * x).sin())
            };
            Ok(LiftedMap::new(label, LinearPart::IDENTITY, fwd).with_inverse(inv))
        }
        "zaslavsky" => {
            expect_params(name, params, 2)?;
            let (k, c) = (params[0], params[1]);
            let fwd = move |mut z: Vec2| {
                for _ in 0..4 {
                    z = zaslavsky_step(k, c, z);
                }
                z
            };
            let inv = move |mut z: Vec2| {
                for _ in 0..4 {
                    z = zaslavsky_step_inv(k, c, z);
                }
                z
            };
            Ok(LiftedMap::new(label, LinearPart::IDENTITY, fwd).with_inverse(inv))
        }
        "zaslavsky_generator" => {
            expect_params(name, params, 2)?;
            let (k, c) = (params[0], params[1]);
            Ok(LiftedMap::new(label, LinearPart::QUARTER_TURN, move |z| zaslavsky_step(k, c, z))
                .with_inverse(move |z| zaslavsky_step_inv(k, c, z)))
        }
        "disk_twist" => {
            expect_params(name, params, 4)?;
            let center = Vec2::new(params[0], params[1]);
            let r0 = params[2];
            let angle = params[3];
            if !(r0 > 0.0 && r0 < 0.5) {
                return Err(Error::InvalidParameter(format!(
                    "disk_twist radius must lie in (0, 1/2), got {r0}"
                )));
            }
            let twist = DiskTwist { center, r0, angle };
            Ok(LiftedMap::new(label, LinearPart::IDENTITY, move |z| twist.apply(z, 1.0))
                .with_inverse(move |z| twist.apply(z, -1.0)))
        }
        _ => Err(Error::UnknownMap(name.to_string())),
    }
}

/// Rotation about the lattice copies of a center, rigid by `angle` for
/// `r ≤ 3r₀/4` and fading linearly to the identity at `r = r₀`.
#[derive(Debug, Clone, Copy)]
struct DiskTwist {
    center: Vec2,
    r0: f64,
    angle: f64,
}

impl DiskTwist {
    fn apply(&self, z: Vec2, sign: f64) -> Vec2 {
        let rel = z - self.center;
        let copy = self.center + Vec2::new(rel.x.round(), rel.y.round());
        let d = z - copy;
        let r = d.norm();
        if r >= self.r0 {
            return z;
        }
        let theta = sign * self.angle * (4.0 * (1.0 - r / self.r0)).min(1.0);
        let (s, c) = theta.sin_cos();
        copy + Vec2::new(c * d.x - s * d.y, s * d.x + c * d.y)
    }
}

/// A parsed `name(p1,p2,...)` map specification.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub params: Vec<f64>,
}

impl MapSpec {
    /// Parse `identifier(decimal, decimal, ...)`. The parentheses may be
    /// omitted for parameterless maps.
    pub fn parse(text: &str) -> Result<MapSpec> {
        let bad = |reason: &str| Error::MapSpec { spec: text.to_string(), reason: reason.to_string() };
        let s = text.trim();
        let (name, rest) = match s.find('(') {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (s, None),
        };
        let name = name.trim();
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(bad("expected an identifier")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad("expected an identifier"));
        }
        let params = match rest {
            None => Vec::new(),
            Some(rest) => {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| bad("unbalanced parentheses"))?;
                if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|tok| parse_decimal(tok.trim()).ok_or_else(|| bad("expected decimal literals")))
                        .collect::<Result<Vec<f64>>>()?
                }
            }
        };
        Ok(MapSpec { name: name.to_string(), params })
    }

    pub fn build(&self) -> Result<LiftedMap> {
        make_map(&self.name, &self.params)
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&spec_label(&self.name, &self.params))
    }
}

/// Decimal literal: optional sign, digits with optional fraction, optional
/// exponent. Rejects `inf`, `nan` and hex forms that `f64::from_str` accepts.
fn parse_decimal(tok: &str) -> Option<f64> {
    let body = tok.strip_prefix(['+', '-']).unwrap_or(tok);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let fraction = parts.next().unwrap_or("");
    let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (int.is_empty() && fraction.is_empty()) || !digits(int) || !digits(fraction) {
        return None;
    }
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !digits(e) {
            return None;
        }
    }
    tok.parse().ok()
}

/// Parse a spec string and build the map.
pub fn parse_map(text: &str) -> Result<LiftedMap> {
    MapSpec::parse(text)?.build()
}

/// The orbit `z, f̂(z), …, f̂ⁿ(z)` (backward iterates for negative `n`).
pub fn iterate_lift(map: &LiftedMap, z: Vec2, n: i64) -> Result<Vec<Vec2>> {
    let steps = n.unsigned_abs() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(z);
    let mut w = z;
    if n >= 0 {
        for _ in 0..steps {
            w = map.eval(w);
            out.push(w);
        }
    } else {
        let inv = map.inverse.as_ref().ok_or_else(|| Error::MissingInverse(map.label.clone()))?;
        for _ in 0..steps {
            w = inv(w);
            out.push(w);
        }
    }
    Ok(out)
}

/// `f̂ⁿ(z)` without storing the orbit.
#[inline]
pub fn iterate_endpoint(map: &LiftedMap, mut z: Vec2, n: usize) -> Vec2 {
    for _ in 0..n {
        z = map.eval(z);
    }
    z
}

/// `f̂ⁿ(z) − z`, the undivided displacement.
pub fn displacement(map: &LiftedMap, z: Vec2, n: usize) -> Result<Vec2> {
    map.require_identity_class()?;
    if n == 0 {
        return Err(Error::InvalidParameter("displacement horizon must be at least 1".into()));
    }
    Ok(iterate_endpoint(map, z, n) - z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn builtins() -> Vec<LiftedMap> {
        vec![
            make_map("identity", &[]).unwrap(),
            make_map("translation", &[0.25, 0.125]).unwrap(),
            make_map("standard", &[6.0]).unwrap(),
            make_map("zaslavsky", &[0.19, 1.69]).unwrap(),
            make_map("zaslavsky_generator", &[0.19, 1.69]).unwrap(),
            make_map("disk_twist", &[0.3, 0.6, 0.2, 1.3]).unwrap(),
        ]
    }

    #[test]
    fn generator_with_zero_kick_is_linear() {
        let m = make_map("zaslavsky_generator", &[0.0, 0.0]).unwrap();
        assert_eq!(m.eval(Vec2::new(0.25, 0.5)), Vec2::new(0.5, -0.25));
        assert_eq!(m.linear_part(), LinearPart::QUARTER_TURN);
    }

    #[test]
    fn zaslavsky_with_zero_kick_is_identity() {
        let m = make_map("zaslavsky", &[0.0, 0.0]).unwrap();
        for z in [Vec2::new(0.1, 0.7), Vec2::new(-3.2, 11.5)] {
            assert_eq!(m.eval(z), z);
        }
    }

    #[test]
    fn web_map_parameters_construct() {
        let m = make_map("zaslavsky", &[0.19, 1.69]).unwrap();
        assert!(m.is_homotopic_to_identity());
        assert_eq!(m.label(), "zaslavsky(0.19,1.69)");
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(make_map("henon", &[]), Err(Error::UnknownMap(_))));
        assert!(matches!(make_map("standard", &[]), Err(Error::ParamCount { .. })));
        assert!(matches!(make_map("disk_twist", &[0.0, 0.0, 0.5, 1.0]), Err(Error::InvalidParameter(_))));
        assert!(make_map("disk_twist", &[0.0, 0.0, 0.49, 1.0]).is_ok());
    }

    #[test]
    fn equivariance_of_builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in builtins() {
            for _ in 0..100 {
                let z = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let v = IntVec::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
                let d = m.equivariance_defect(z, v);
                assert!(d <= EQUIVARIANCE_TOL, "{}: defect {d:e} at {z} + {v}", m.label());
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in builtins() {
            for _ in 0..100 {
                let z = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let d = m.inverse_defect(z).unwrap();
                assert!(d <= INVERSE_TOL, "{}: inverse defect {d:e}", m.label());
            }
        }
    }

    #[test]
    fn zaslavsky_is_fourth_power_of_generator() {
        let f = make_map("zaslavsky", &[0.19, 1.69]).unwrap();
        let m4 = make_map("zaslavsky_generator", &[0.19, 1.69]).unwrap().power(4);
        assert!(m4.is_homotopic_to_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let z = Vec2::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
            assert!(f.eval(z).dist(m4.eval(z)) <= 1e-12);
        }
    }

    #[test]
    fn disk_twist_is_identity_off_support() {
        let m = make_map("disk_twist", &[0.5, 0.5, 0.25, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 200 {
            let z = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let rel = z - Vec2::new(0.5, 0.5);
            let near = Vec2::new(rel.x - rel.x.round(), rel.y - rel.y.round());
            if near.norm() >= 0.25 {
                assert_eq!(m.eval(z), z);
                checked += 1;
            }
        }
    }

    #[test]
    fn disk_twist_period_four_at_half_radius() {
        let m = make_map("disk_twist", &[0.5, 0.5, 0.2, std::f64::consts::FRAC_PI_2]).unwrap();
        let q = Vec2::new(0.6, 0.5);
        let orbit = iterate_lift(&m, q, 4).unwrap();
        assert!(orbit[4].dist(q) < 1e-12);
        assert!(orbit[1].dist(Vec2::new(0.5, 0.6)) < 1e-12);
    }

    #[test]
    fn iterate_examples() {
        let id = make_map("identity", &[]).unwrap();
        let orbit = iterate_lift(&id, Vec2::new(0.3, 0.7), 5).unwrap();
        assert_eq!(orbit.len(), 6);
        assert!(orbit.iter().all(|&z| z == Vec2::new(0.3, 0.7)));

        let t = make_map("translation", &[0.25, 0.125]).unwrap();
        let orbit = iterate_lift(&t, Vec2::ZERO, 4).unwrap();
        assert_eq!(*orbit.last().unwrap(), Vec2::new(1.0, 0.5));

        let back = iterate_lift(&t, Vec2::ZERO, -4).unwrap();
        assert_eq!(*back.last().unwrap(), Vec2::new(-1.0, -0.5));
    }

    #[test]
    fn negative_iterates_need_inverse() {
        let m = LiftedMap::new("shear", LinearPart::IDENTITY, |z: Vec2| z + Vec2::new(0.1, 0.0));
        assert!(matches!(iterate_lift(&m, Vec2::ZERO, -1), Err(Error::MissingInverse(_))));
    }

    #[test]
    fn zaslavsky_orbit_matches_direct_recurrence() {
        // straightforward re-implementation of M⁴ written independently of make_map
        let (k, c) = (0.19f64, 1.69f64);
        let (mut x, mut y) = (0.1f64, 0.1f64);
        for _ in 0..4000 {
            let nx = y;
            let ny = -x - k * (2.0 * std::f64::consts::PI * y - c).sin();
            x = nx;
            y = ny;
        }
        let m = make_map("zaslavsky", &[k, c]).unwrap();
        let end = *iterate_lift(&m, Vec2::new(0.1, 0.1), 1000).unwrap().last().unwrap();
        assert!((end.x - x).abs() < 1e-9 && (end.y - y).abs() < 1e-9, "{end} vs ({x}, {y})");
    }

    #[test]
    fn displacement_examples() {
        let t = make_map("translation", &[0.25, 0.125]).unwrap();
        let d = displacement(&t, Vec2::new(0.3, 0.9), 8).unwrap();
        assert!(d.dist(Vec2::new(2.0, 1.0)) < 1e-12);
        let id = make_map("identity", &[]).unwrap();
        assert_eq!(displacement(&id, Vec2::new(0.3, 0.9), 17).unwrap(), Vec2::ZERO);
        let s = make_map("standard", &[6.0]).unwrap();
        for n in [1, 10, 1000] {
            assert_eq!(displacement(&s, Vec2::ZERO, n).unwrap(), Vec2::ZERO);
        }
        let g = make_map("zaslavsky_generator", &[0.19, 1.69]).unwrap();
        assert!(matches!(displacement(&g, Vec2::ZERO, 1), Err(Error::NotHomotopicToIdentity(_))));
    }

    #[test]
    fn displacement_is_lattice_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in builtins().into_iter().filter(|m| m.is_homotopic_to_identity()) {
            for _ in 0..50 {
                let z = Vec2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let v = IntVec::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
                let d0 = displacement(&m, z, 5).unwrap();
                let d1 = displacement(&m, z + v, 5).unwrap();
                assert!(d0.dist(d1) <= 1e-7, "{}", m.label());
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let s = MapSpec::parse("zaslavsky(0.19,1.69)").unwrap();
        assert_eq!(s.name, "zaslavsky");
        assert_eq!(s.params, vec![0.19, 1.69]);
        assert_eq!(s.to_string(), "zaslavsky(0.19,1.69)");
        assert_eq!(MapSpec::parse("identity").unwrap().params, Vec::<f64>::new());
        assert_eq!(MapSpec::parse("identity()").unwrap().params, Vec::<f64>::new());
        assert_eq!(MapSpec::parse(" translation( -0.5 , 1e-3 ) ").unwrap().params, vec![-0.5, 1e-3]);
        for bad in ["", "9lives(1)", "standard(1", "standard(abc)", "standard(inf)", "standard(1,)", "a b(1)"] {
            assert!(MapSpec::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn translated_and_power_lifts() {
        let s = make_map("standard", &[1.5]).unwrap();
        let z = Vec2::new(0.31, 0.77);
        let t = s.translated(IntVec::new(2, -1));
        assert_eq!(t.eval(z), s.eval(z) + Vec2::new(2.0, -1.0));
        assert!(t.inverse_defect(z).unwrap() < 1e-12);
        let p = s.power(3);
        assert_eq!(p.eval(z), s.eval(s.eval(s.eval(z))));
        assert!(p.inverse_defect(z).unwrap() < 1e-9);
        let inv = s.inverted().unwrap();
        assert!(inv.eval(s.eval(z)).dist(z) < 1e-12);
    }
}
