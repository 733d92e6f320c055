//! Subsets of the torus as `R×R` bitmaps.
//!
//! Cell `(i, j)` is the square `[i/R, (i+1)/R] × [j/R, (j+1)/R]`; cells are
//! stored row-major with index `j·R + i`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::torus::{TorusPoint, Vec2};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridRegion {
    resolution: usize,
    cells: Vec<bool>,
}

impl GridRegion {
    pub fn empty(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!("grid resolution must be at least 2, got {resolution}")));
        }
        Ok(Self { resolution, cells: vec![false; resolution * resolution] })
    }

    pub fn full(resolution: usize) -> Result<Self> {
        let mut r = Self::empty(resolution)?;
        r.cells.fill(true);
        Ok(r)
    }

    pub fn from_fn(resolution: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut r = Self::empty(resolution)?;
        for j in 0..resolution {
            for i in 0..resolution {
                r.cells[j * resolution + i] = f(i, j);
            }
        }
        Ok(r)
    }

    pub(crate) fn from_bits(resolution: usize, cells: Vec<bool>) -> Self {
        debug_assert_eq!(cells.len(), resolution * resolution);
        Self { resolution, cells }
    }

    /// Cells whose centers lie within torus distance `radius` of `center`.
    pub fn ball(resolution: usize, center: TorusPoint, radius: f64) -> Result<Self> {
        let h = 1.0 / resolution as f64;
        Self::from_fn(resolution, |i, j| {
            let c = TorusPoint::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            c.dist(center) <= radius
        })
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.resolution, idx / self.resolution)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.resolution + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let r = self.resolution;
        self.cells[j * r + i] = value;
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> bool {
        self.cells[idx]
    }

    pub fn bits(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&b| b)
    }

    /// Active cells in index order.
    pub fn active_cells(&self) -> Vec<(usize, usize)> {
        self.cells.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| self.coords(k)).collect()
    }

    /// The cell containing a torus point.
    pub fn cell_of(&self, p: TorusPoint) -> (usize, usize) {
        let r = self.resolution;
        let i = ((p.x * r as f64) as usize).min(r - 1);
        let j = ((p.y * r as f64) as usize).min(r - 1);
        (i, j)
    }

    pub fn contains_point(&self, p: TorusPoint) -> bool {
        let (i, j) = self.cell_of(p);
        self.get(i, j)
    }

    /// Center of cell `(i, j)` in the fundamental domain.
    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        let h = 1.0 / self.resolution as f64;
        Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
    }

    pub fn complement(&self) -> GridRegion {
        GridRegion { resolution: self.resolution, cells: self.cells.iter().map(|&b| !b).collect() }
    }

    pub fn union(&self, other: &GridRegion) -> GridRegion {
        assert_eq!(self.resolution, other.resolution, "resolution mismatch");
        GridRegion {
            resolution: self.resolution,
            cells: self.cells.iter().zip(&other.cells).map(|(&a, &b)| a || b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &GridRegion) -> bool {
        self.resolution == other.resolution && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Cyclic shift by `(di, dj)` cells.
    pub fn shifted(&self, di: usize, dj: usize) -> GridRegion {
        let r = self.resolution;
        let mut out = vec![false; r * r];
        for j in 0..r {
            for i in 0..r {
                out[((j + dj) % r) * r + (i + di) % r] = self.cells[j * r + i];
            }
        }
        GridRegion { resolution: r, cells: out }
    }

    /// Add every cell within one step (8-neighbourhood) of an active cell.
    pub fn dilated(&self) -> GridRegion {
        let r = self.resolution;
        let mut out = self.cells.clone();
        for (k, _) in self.cells.iter().enumerate().filter(|(_, &b)| b) {
            let (i, j) = self.coords(k);
            for dj in [r - 1, 0, 1] {
                for di in [r - 1, 0, 1] {
                    out[((j + dj) % r) * r + (i + di) % r] = true;
                }
            }
        }
        GridRegion { resolution: r, cells: out }
    }

    /// Portable bitmap (`P1`): `1` marks an active cell; the first text row
    /// is `j = R−1`, so the picture has `y` pointing up.
    pub fn to_pbm(&self) -> String {
        let r = self.resolution;
        let mut s = format!("P1\n{r} {r}\n");
        for row in 0..r {
            let j = r - 1 - row;
            let line: Vec<&str> = (0..r).map(|i| if self.get(i, j) { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_pbm(text: &str) -> Result<GridRegion> {
        let bad = |m: &str| Error::Bitmap(m.to_string());
        // strip comments, then tokenise the header
        let cleaned: String = text
            .lines()
            .map(|l| match l.find('#') {
                Some(k) => &l[..k],
                None => l,
            })
            .collect::<Vec<_>>()
            .join("\n");
        let mut rest = cleaned.trim_start();
        let mut header = Vec::new();
        while header.len() < 3 {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            if end == 0 {
                return Err(bad("truncated header"));
            }
            header.push(&rest[..end]);
            rest = rest[end..].trim_start();
        }
        if header[0] != "P1" {
            return Err(bad("expected magic number P1"));
        }
        let w: usize = header[1].parse().map_err(|_| bad("bad width"))?;
        let h: usize = header[2].parse().map_err(|_| bad("bad height"))?;
        if w != h {
            return Err(bad("bitmap must be square"));
        }
        let mut bits = Vec::with_capacity(w * h);
        for c in rest.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                _ => return Err(bad("unexpected character in raster")),
            }
        }
        if bits.len() != w * h {
            return Err(bad("raster size does not match header"));
        }
        let mut region = GridRegion::empty(w)?;
        for row in 0..w {
            for i in 0..w {
                region.set(i, w - 1 - row, bits[row * w + i]);
            }
        }
        Ok(region)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_must_be_at_least_two() {
        assert!(GridRegion::empty(1).is_err());
        assert!(GridRegion::empty(2).is_ok());
    }

    #[test]
    fn ball_marks_cells_with_centers_inside() {
        let c = TorusPoint::new(0.02, 0.5);
        let r = GridRegion::ball(16, c, 0.1).unwrap();
        for j in 0..16 {
            for i in 0..16 {
                let center = TorusPoint::new((i as f64 + 0.5) / 16.0, (j as f64 + 0.5) / 16.0);
                assert_eq!(r.get(i, j), center.dist(c) <= 0.1);
            }
        }
        // wraps across x = 0
        assert!(r.get(15, 8) && r.get(0, 8));
    }

    #[test]
    fn pbm_round_trip_and_orientation() {
        let mut r = GridRegion::empty(3).unwrap();
        r.set(0, 0, true);
        r.set(2, 1, true);
        let text = r.to_pbm();
        assert_eq!(text, "P1\n3 3\n0 0 0\n0 0 1\n1 0 0\n");
        assert_eq!(GridRegion::from_pbm(&text).unwrap(), r);
        let compact = "P1 # comment\n3 3\n000\n001 100";
        assert_eq!(GridRegion::from_pbm(compact).unwrap(), r);
    }

    #[test]
    fn pbm_errors() {
        assert!(GridRegion::from_pbm("P4\n2 2\n0000").is_err());
        assert!(GridRegion::from_pbm("P1\n2 3\n000000").is_err());
        assert!(GridRegion::from_pbm("P1\n2 2\n000").is_err());
        assert!(GridRegion::from_pbm("P1\n2 2\n0020").is_err());
    }

    #[test]
    fn dilation_adds_one_cell_collar() {
        let mut r = GridRegion::empty(8).unwrap();
        r.set(0, 0, true);
        let d = r.dilated();
        assert_eq!(d.count(), 9);
        assert!(d.get(7, 7) && d.get(1, 1) && d.get(0, 7));
    }

    #[test]
    fn shift_wraps() {
        let mut r = GridRegion::empty(4).unwrap();
        r.set(3, 3, true);
        let s = r.shifted(1, 2);
        assert!(s.get(0, 1));
        assert_eq!(s.count(), 1);
    }
}
