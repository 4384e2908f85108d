//! State transformation operators.
//!
//! Each operator builds `se` candidate points around the incumbent. Random
//! matrices are drawn fresh for every candidate and never stored: rotation
//! streams its `n x n` uniform entries row by row, expansion draws one
//! Gaussian per coordinate and axesion a single Gaussian on a random axis.
//! Candidates are returned unclamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{Point, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Rotation,
    Translation,
    Expansion,
    Axesion,
}

/// Current scale factors of the four operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorFactors {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for OperatorFactors {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }
}

/// Unscaled search direction of a scalable operator, so that a candidate is
/// `best + factor * direction`.
pub(crate) fn direction(kind: OperatorKind, best: &Point, rng: &mut RngStream) -> Vec<f64> {
    match kind {
        OperatorKind::Rotation => rotation_direction(best, rng),
        OperatorKind::Expansion => best.iter().map(|&x| x * rng.gaussian()).collect(),
        OperatorKind::Axesion => {
            let mut d = vec![0.0; best.dim()];
            let j = rng.index(best.dim());
            d[j] = best[j] * rng.gaussian();
            d
        }
        OperatorKind::Translation => unreachable!("translation has no scalable direction"),
    }
}

/// `R s / (n ||s||)` with `R` uniform on `[-1, 1]^{n x n}`; zero when `s = 0`.
fn rotation_direction(best: &Point, rng: &mut RngStream) -> Vec<f64> {
    let n = best.dim();
    let norm = best.norm();
    let scale = 1.0 / (n as f64 * norm);
    let mut d = Vec::with_capacity(n);
    for _ in 0..n {
        let row: f64 = best.iter().map(|&s| rng.symmetric() * s).sum();
        d.push(row * scale);
    }
    if norm == 0.0 {
        d.iter_mut().for_each(|v| *v = 0.0);
    }
    d
}

pub(crate) fn step(best: &Point, factor: f64, dir: &[f64]) -> Point {
    Point::from_raw(best.iter().zip(dir).map(|(b, d)| b + factor * d).collect())
}

fn scaled_candidates(
    kind: OperatorKind,
    best: &Solution,
    factor: f64,
    se: usize,
    rng: &mut RngStream,
) -> Vec<Point> {
    (0..se)
        .map(|_| {
            let dir = direction(kind, &best.point, rng);
            step(&best.point, factor, &dir)
        })
        .collect()
}

/// Rotation: candidates inside the ball of radius `alpha` around `best`.
pub fn rotation_candidates(best: &Solution, alpha: f64, se: usize, rng: &mut RngStream) -> Vec<Point> {
    scaled_candidates(OperatorKind::Rotation, best, alpha, se, rng)
}

/// Expansion: coordinate `i` becomes `best[i] * (1 + gamma * g_i)`.
pub fn expansion_candidates(best: &Solution, gamma: f64, se: usize, rng: &mut RngStream) -> Vec<Point> {
    scaled_candidates(OperatorKind::Expansion, best, gamma, se, rng)
}

/// Axesion: one random coordinate `j` becomes `best[j] * (1 + delta * g)`.
pub fn axesion_candidates(best: &Solution, delta: f64, se: usize, rng: &mut RngStream) -> Vec<Point> {
    scaled_candidates(OperatorKind::Axesion, best, delta, se, rng)
}

/// Translation: line search from `prev` through `best`, up to `beta` beyond
/// `best`.
pub fn translation_candidates(
    best: &Solution,
    prev: &Solution,
    beta: f64,
    se: usize,
    rng: &mut RngStream,
) -> Result<Vec<Point>> {
    let dist = best.point.distance(&prev.point);
    if dist == 0.0 || !dist.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    let unit: Vec<f64> = best
        .point
        .iter()
        .zip(prev.point.iter())
        .map(|(b, p)| (b - p) / dist)
        .collect();
    Ok((0..se)
        .map(|_| step(&best.point, beta * rng.unit(), &unit))
        .collect())
}
