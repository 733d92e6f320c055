//! Deterministic low-discrepancy start points.
//!
//! A base-(2, 3) Halton sequence with a Cranley–Patterson shift drawn from a
//! seeded ChaCha stream: the same seed always yields the same points, and
//! different seeds give independent-looking rotations of the same pattern.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::torus::Vec2;

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while n > 0 {
        acc += (n % base) as f64 * scale;
        n /= base;
        scale *= inv;
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Halton2 {
    shift: Vec2,
    index: u64,
}

impl Halton2 {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { shift: Vec2::new(rng.gen(), rng.gen()), index: 1 }
    }
}

impl Iterator for Halton2 {
    type Item = Vec2;

    fn next(&mut self) -> Option<Vec2> {
        let i = self.index;
        self.index += 1;
        let u = (radical_inverse(i, 2) + self.shift.x).fract();
        let v = (radical_inverse(i, 3) + self.shift.y).fract();
        Some(Vec2::new(u, v))
    }
}

/// `count` points of the unit square.
pub fn unit_square_points(seed: u64, count: usize) -> Vec<Vec2> {
    Halton2::new(seed).take(count).collect()
}

/// Area-uniform points of the closed disk of given center and radius.
pub fn disk_points(seed: u64, count: usize, center: Vec2, radius: f64) -> Vec<Vec2> {
    Halton2::new(seed)
        .take(count)
        .map(|p| {
            let r = radius * p.x.sqrt();
            let t = std::f64::consts::TAU * p.y;
            center + Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect()
}
