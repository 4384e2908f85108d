//! The fourteen-function benchmark suite (`F1`..`F14`).
//!
//! Every function has minimum value 0. Ranges are replicated over all
//! coordinates.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectiveFunction;
use crate::space::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modality {
    Unimodal,
    Multimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BenchmarkId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
}

/// Static description of a benchmark function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec {
    pub id: BenchmarkId,
    pub name: &'static str,
    pub range: (f64, f64),
    pub f_min: f64,
    pub modality: Modality,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 14] = [
        BenchmarkId::F1,
        BenchmarkId::F2,
        BenchmarkId::F3,
        BenchmarkId::F4,
        BenchmarkId::F5,
        BenchmarkId::F6,
        BenchmarkId::F7,
        BenchmarkId::F8,
        BenchmarkId::F9,
        BenchmarkId::F10,
        BenchmarkId::F11,
        BenchmarkId::F12,
        BenchmarkId::F13,
        BenchmarkId::F14,
    ];

    pub fn spec(self) -> BenchmarkSpec {
        use BenchmarkId::*;
        use Modality::*;
        let (name, range, modality) = match self {
            F1 => ("Elliptic", (-100.0, 100.0), Unimodal),
            F2 => ("Penalized 1", (-50.0, 50.0), Multimodal),
            F3 => ("Rosenbrock", (-30.0, 30.0), Unimodal),
            F4 => ("Schwefel 1.2", (-100.0, 100.0), Unimodal),
            F5 => ("Schwefel 2.4", (0.0, 10.0), Multimodal),
            F6 => ("Sphere", (-100.0, 100.0), Unimodal),
            F7 => ("Rastrigin", (-5.12, 5.12), Multimodal),
            F8 => ("Griewank", (-60.0, 60.0), Multimodal),
            F9 => ("Sum squares", (-10.0, 10.0), Unimodal),
            F10 => ("Levy and Montalvo 1", (-10.0, 10.0), Multimodal),
            F11 => ("Zakharov", (-5.0, 10.0), Unimodal),
            F12 => ("Schwefel 2.22", (-10.0, 10.0), Unimodal),
            F13 => ("Cigar", (-100.0, 100.0), Unimodal),
            F14 => ("Csendes", (-1.0, 1.0), Multimodal),
        };
        BenchmarkSpec {
            id: self,
            name,
            range,
            f_min: 0.0,
            modality,
        }
    }

    /// Evaluates the function at `x` (any length ≥ 2).
    pub fn eval(self, x: &[f64]) -> f64 {
        use BenchmarkId::*;
        match self {
            F1 => elliptic(x),
            F2 => penalized1(x),
            F3 => rosenbrock(x),
            F4 => schwefel_1_2(x),
            F5 => schwefel_2_4(x),
            F6 => x.iter().map(|v| v * v).sum(),
            F7 => x
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            F8 => griewank(x),
            F9 => x
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum(),
            F10 => levy_montalvo1(x),
            F11 => zakharov(x),
            F12 => {
                let sum: f64 = x.iter().map(|v| v.abs()).sum();
                let prod: f64 = x.iter().map(|v| v.abs()).product();
                sum + prod
            }
            F13 => x[0] * x[0] + 1e6 * x[1..].iter().map(|v| v.powi(6)).sum::<f64>(),
            F14 => x
                .iter()
                .map(|&v| if v == 0.0 { 0.0 } else { v.powi(6) * (2.0 + (1.0 / v).sin()) })
                .sum(),
        }
    }

    /// The canonical global minimizer for dimension `dim`.
    pub fn minimizer(self, dim: usize) -> Vec<f64> {
        match self {
            BenchmarkId::F2 | BenchmarkId::F10 => vec![-1.0; dim],
            BenchmarkId::F3 | BenchmarkId::F5 => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Builds benchmark `id` in `dim` dimensions with target value 0.
pub fn make(id: BenchmarkId, dim: usize) -> Result<ObjectiveFunction> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: dim });
    }
    let spec = id.spec();
    let bounds = Bounds::uniform(dim, spec.range.0, spec.range.1)?;
    Ok(ObjectiveFunction::new(id.to_string(), bounds, move |x| id.eval(x)).with_target(spec.f_min))
}

/// Registry lookup by string id (`"F1"`..`"F14"`).
pub fn make_by_name(name: &str, dim: usize) -> Result<ObjectiveFunction> {
    make(name.parse()?, dim)
}

/// Dead-zone penalty `u(x, a, k, m)`.
pub fn penalty_u(x: f64, a: f64, k: f64, m: f64) -> f64 {
    if x > a {
        k * (x - a).powf(m)
    } else if x < -a {
        k * (-x - a).powf(m)
    } else {
        0.0
    }
}

fn elliptic(x: &[f64]) -> f64 {
    let d = x.len();
    let denom = (d - 1) as f64;
    // Summation starts at the second coordinate.
    x.iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| 1e6f64.powf(i as f64 / denom) * v * v)
        .sum()
}

fn penalized1(x: &[f64]) -> f64 {
    let d = x.len();
    let y = |i: usize| 1.0 + (x[i] + 1.0) / 4.0;
    let mut s = 10.0 * (PI * y(0)).sin().powi(2);
    for i in 0..d - 1 {
        let yi = y(i);
        s += (yi - 1.0).powi(2) * (1.0 + 10.0 * (PI * y(i + 1)).sin().powi(2));
    }
    s += (y(d - 1) - 1.0).powi(2);
    PI / d as f64 * s + x.iter().map(|&v| penalty_u(v, 10.0, 100.0, 4.0)).sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn schwefel_1_2(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut s = 0.0;
    for v in x {
        prefix += v;
        s += prefix * prefix;
    }
    s
}

fn schwefel_2_4(x: &[f64]) -> f64 {
    let x1 = x[0];
    x.iter()
        .map(|v| (v - 1.0).powi(2) + (x1 - v * v).powi(2))
        .sum()
}

fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v / 4000.0).sum();
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

fn levy_montalvo1(x: &[f64]) -> f64 {
    let d = x.len();
    let y = |i: usize| 1.0 + (x[i] + 1.0) / 4.0;
    let mut s = 10.0 * (PI * y(0)).sin().powi(2);
    for i in 0..d - 1 {
        s += (y(i) - 1.0).powi(2) * (1.0 + 10.0 * (PI * y(i + 1)).sin().powi(2));
    }
    s += (y(d - 1) - 1.0).powi(2);
    PI / d as f64 * s
}

fn zakharov(x: &[f64]) -> f64 {
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let lin: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    sq + lin.powi(2) + lin.powi(4)
}
