//! Text and image artifacts: CSV tables, SVG hull plots, binary PPM rasters.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hull::ConvexPolygon;
use crate::maps::LiftedMap;
use crate::periodic::{DeviationCurve, Root};
use crate::rotation::DisplacementSample;
use crate::sampling::unit_square_points;
use crate::torus::{project, TorusPoint, Vec2};
use crate::transition::{Classification, Verdict};
use crate::winding::Polyline;

/// Shortest round-trip decimal form of a float.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn samples_csv(samples: &[DisplacementSample]) -> String {
    let mut s = String::from("x0,y0,n,dx,dy\n");
    for d in samples {
        let disp = d.displacement();
        let _ = writeln!(s, "{},{},{},{},{}", num(d.start.x), num(d.start.y), d.horizon, num(disp.x), num(disp.y));
    }
    s
}

pub fn points_csv(points: &[Vec2]) -> String {
    let mut s = String::from("x,y\n");
    for p in points {
        let _ = writeln!(s, "{},{}", num(p.x), num(p.y));
    }
    s
}

pub fn hull_csv(hull: &ConvexPolygon) -> String {
    points_csv(hull.vertices())
}

pub fn polyline_csv(poly: &Polyline) -> String {
    points_csv(poly.points())
}

pub fn parse_points_csv(text: &str) -> Result<Vec<Vec2>> {
    let bad = |line: usize| Error::InvalidPolyline(format!("line {line}: expected `x,y`"));
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (k == 0 && line.eq_ignore_ascii_case("x,y")) {
            continue;
        }
        let (x, y) = line.split_once(',').ok_or_else(|| bad(k + 1))?;
        let x: f64 = x.trim().parse().map_err(|_| bad(k + 1))?;
        let y: f64 = y.trim().parse().map_err(|_| bad(k + 1))?;
        out.push(Vec2::new(x, y));
    }
    Ok(out)
}

pub fn roots_csv(roots: &[Root]) -> String {
    let mut s = String::from("x,y,residual\n");
    for r in roots {
        let _ = writeln!(s, "{},{},{}", num(r.point.x), num(r.point.y), num(r.residual));
    }
    s
}

pub fn deviation_csv(curve: &DeviationCurve) -> String {
    let mut s = String::from("n,d\n");
    for (n, d) in curve.horizons.iter().zip(&curve.values) {
        let _ = writeln!(s, "{n},{}", num(*d));
    }
    s
}

/// Hull polygon over its sample cloud, y axis pointing up.
pub fn hull_svg(hull: &ConvexPolygon, samples: &[Vec2], size: u32) -> String {
    let pts: Vec<Vec2> = samples.iter().chain(hull.vertices()).copied().collect();
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let pad = 0.05 * span;
    let scale = size as f64 / (span + 2.0 * pad);
    let tx = |p: Vec2| ((p.x - lo.x + pad) * scale, size as f64 - (p.y - lo.y + pad) * scale);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    for p in samples {
        let (x, y) = tx(*p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5" fill="steelblue"/>"#);
    }
    let poly: Vec<String> = hull.vertices().iter().map(|&p| tx(p)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ = writeln!(s, r#"<polygon points="{}" fill="none" stroke="crimson" stroke-width="1.5"/>"#, poly.join(" "));
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl Raster {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        Self { width, height, data: vec![fill; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        self.data[y * self.width + x] = c;
    }

    pub fn count(&self, c: [u8; 3]) -> usize {
        self.data.iter().filter(|&&p| p == c).count()
    }

    /// Binary `P6` encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6 {} {} 255\n", self.width, self.height).into_bytes();
        out.reserve(self.data.len() * 3);
        for p in &self.data {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Raster> {
        let bad = |m: &str| Error::Bitmap(m.to_string());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated PPM header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("bad PPM header"))?.to_string());
        }
        pos += 1;
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("expected P6 with maxval 255"));
        }
        let w: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
        let h: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
        let body = bytes.get(pos..).unwrap_or_default();
        if body.len() != w * h * 3 {
            return Err(bad("pixel data size does not match header"));
        }
        let data = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(Raster { width: w, height: h, data })
    }

    /// Fraction of pixels whose color differs; rasters of different sizes
    /// differ everywhere.
    pub fn disagreement(&self, other: &Raster) -> f64 {
        if self.width != other.width || self.height != other.height {
            return 1.0;
        }
        let diff = self.data.chunks_exact(3).zip(other.data.chunks_exact(3)).filter(|(a, b)| a != b).count();
        diff as f64 / (self.width * self.height).max(1) as f64
    }
}

pub const WHITE: [u8; 3] = [255, 255, 255];
pub const BLACK: [u8; 3] = [0, 0, 0];
pub const GRAY: [u8; 3] = [160, 160, 160];

/// Well-separated colors from golden-angle hue steps.
pub fn palette(k: usize) -> [u8; 3] {
    let h = (k as f64 * 0.618_033_988_749_895).fract() * 6.0;
    let (s, v) = (0.75, if k.is_multiple_of(2) { 0.85 } else { 0.65 });
    let c = v * s;
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to = |t: f64| ((t + m) * 255.0).round() as u8;
    [to(r), to(g), to(b)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub raster: Raster,
    /// Distinct pixels painted.
    pub plotted: usize,
}

#[inline]
fn pixel(size: usize, p: TorusPoint) -> (usize, usize) {
    let x = ((p.x * size as f64) as usize).min(size - 1);
    let y = ((p.y * size as f64) as usize).min(size - 1);
    (x, size - 1 - y)
}

/// Torus projections of `orbits` seeded orbits, `steps` iterates each,
/// colored per orbit on a white background.
pub fn portrait(map: &LiftedMap, orbits: usize, steps: usize, size: usize, seed: u64) -> Result<Portrait> {
    if size == 0 {
        return Err(Error::InvalidParameter("image size must be positive".into()));
    }
    let mut raster = Raster::new(size, size, WHITE);
    let mut painted = vec![false; size * size];
    let mut plotted = 0;
    for (k, start) in unit_square_points(seed, orbits).into_iter().enumerate() {
        let color = palette(k);
        let mut z = start;
        for _ in 0..=steps {
            let p = project(z);
            let (x, y) = pixel(size, p);
            if !painted[y * size + x] {
                painted[y * size + x] = true;
                plotted += 1;
            }
            raster.set(x, y, color);
            z = map.eval(p.lift());
        }
    }
    Ok(Portrait { raster, plotted })
}

/// One pixel per cell: essential black, undecided gray, each inessential
/// component its own color.
pub fn classification_raster(c: &Classification) -> Raster {
    let r = c.resolution;
    let ine = c.bitmap(Verdict::Inessential);
    let labels = crate::homology::label_components(&ine);
    let mut raster = Raster::new(r, r, WHITE);
    for j in 0..r {
        for i in 0..r {
            let k = j * r + i;
            let color = match c.verdicts[k] {
                Verdict::Essential => BLACK,
                Verdict::Undecided => GRAY,
                Verdict::Inessential => palette(labels.component_of_index(k).unwrap_or(0)),
            };
            raster.set(i, r - 1 - j, color);
        }
    }
    raster
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::make_map;

    #[test]
    fn ppm_round_trip() {
        let mut r = Raster::new(3, 2, WHITE);
        r.set(2, 1, [1, 2, 3]);
        let bytes = r.to_ppm();
        assert!(bytes.starts_with(b"P6 3 2 255\n"));
        assert_eq!(bytes.len(), 11 + 18);
        assert_eq!(Raster::from_ppm(&bytes).unwrap(), r);
        assert_eq!(r.disagreement(&Raster::new(3, 2, WHITE)), 1.0 / 6.0);
        assert!(Raster::from_ppm(b"P6 3 2 255\nabc").is_err());
    }

    #[test]
    fn identity_portrait_one_point_per_orbit() {
        let m = make_map("identity", &[]).unwrap();
        let p = portrait(&m, 50, 20, 400, 0).unwrap();
        assert_eq!(p.plotted, 50);
        assert_eq!(p.raster.count(WHITE), 400 * 400 - 50);
    }

    #[test]
    fn quarter_translation_four_points_per_orbit() {
        let m = make_map("translation", &[0.25, 0.0]).unwrap();
        let p = portrait(&m, 10, 40, 512, 2).unwrap();
        assert_eq!(p.plotted, 40);
    }

    #[test]
    fn csv_layouts() {
        let s = samples_csv(&[DisplacementSample { start: Vec2::new(0.5, 0.25), horizon: 4, value: Vec2::new(0.25, 0.0) }]);
        assert_eq!(s, "x0,y0,n,dx,dy\n0.5,0.25,4,1.0,0.0\n");
        let pts = parse_points_csv("x,y\n0,1\n0.5, -2\n").unwrap();
        assert_eq!(pts, vec![Vec2::new(0.0, 1.0), Vec2::new(0.5, -2.0)]);
        assert!(parse_points_csv("1;2").is_err());
    }

    #[test]
    fn palette_is_deterministic_and_not_white_or_black() {
        for k in 0..64 {
            let c = palette(k);
            assert_eq!(c, palette(k));
            assert!(c != WHITE && c != BLACK && c != GRAY);
        }
    }
}
