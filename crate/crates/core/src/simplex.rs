//! Nelder-Mead simplex search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Halt, Result};
use crate::objective::Evaluator;
use crate::space::{Point, Solution};

/// Reflection, expansion, contraction and shrink coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmCoefficients {
    pub eta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl NmCoefficients {
    pub fn new(eta: f64, lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        let c = Self { eta, lambda, mu, nu };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.eta > 0.0
            && self.lambda > 1.0
            && self.mu > 0.0
            && self.mu < 1.0
            && self.nu > 0.0
            && self.nu < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "NM coefficients need eta > 0, lambda > 1, 0 < mu < 1, 0 < nu < 1; got {self:?}"
            )))
        }
    }
}

impl Default for NmCoefficients {
    fn default() -> Self {
        Self {
            eta: 1.0,
            lambda: 2.0,
            mu: 0.5,
            nu: 0.5,
        }
    }
}

/// Absolute perturbation used to build the initial simplex along axis `i`.
pub fn init_offset(coord: f64) -> f64 {
    if coord != 0.0 {
        0.05
    } else {
        0.00025
    }
}

/// `D + 1` evaluated vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Solution>,
}

/// Which branch an iteration took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmMove {
    Reflection,
    Expansion,
    OutsideContraction,
    InsideContraction,
    Shrink,
}

impl Simplex {
    /// Wraps already-evaluated vertices; needs at least two of equal dimension.
    pub fn from_vertices(vertices: Vec<Solution>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::EmptyInput);
        };
        let dim = first.point.dim();
        if vertices.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: vertices.len(),
            });
        }
        if let Some(bad) = vertices.iter().find(|v| v.point.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.point.dim(),
            });
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Solution] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Solution> {
        self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Stable ascending sort by fitness.
    pub fn sort(&mut self) {
        self.vertices.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    }

    /// The lowest-fitness vertex, first one on ties.
    pub fn best(&self) -> &Solution {
        self.vertices
            .iter()
            .reduce(|a, b| if b.fitness < a.fitness { b } else { a })
            .expect("simplex is never empty")
    }

    /// Largest pairwise L-infinity distance between vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                for (x, y) in a.point.iter().zip(b.point.iter()) {
                    d = d.max((x - y).abs());
                }
            }
        }
        d
    }

    /// Centroid of all vertices but the last (worst after sorting).
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        for v in &self.vertices[..n] {
            for (ci, x) in c.iter_mut().zip(v.point.iter()) {
                *ci += x;
            }
        }
        c.iter_mut().for_each(|ci| *ci /= n as f64);
        c
    }
}

/// Builds the initial simplex around an evaluated starting solution.
///
/// Vertex `i` moves `x0` by [`init_offset`] along axis `i`; if the upper bound
/// would swallow the move, the offset is applied downwards instead.
pub fn init_simplex(x0: Solution, ev: &mut Evaluator<'_>) -> Result<Simplex, Halt> {
    let dim = x0.point.dim();
    let bounds = ev.bounds();
    let mut vertices = Vec::with_capacity(dim + 1);
    vertices.push(x0);
    for i in 0..dim {
        let base = &vertices[0].point;
        let tau = init_offset(base[i]);
        let mut coords = base.to_vec();
        coords[i] = base[i] + tau;
        if coords[i] > bounds.upper()[i] {
            coords[i] = base[i] - tau;
        }
        let mut p = Point::from_raw(coords);
        p.clamp_to(bounds);
        let s = ev.evaluate_solution(p)?;
        vertices.push(s);
    }
    Ok(Simplex { vertices })
}

fn affine(origin: &[f64], scale: f64, towards: &[f64]) -> Vec<f64> {
    // origin + scale * (towards - origin)
    origin
        .iter()
        .zip(towards)
        .map(|(o, t)| o + scale * (t - o))
        .collect()
}

/// One Nelder-Mead pass: sort, reflect, then expand, contract or shrink.
///
/// The simplex stays consistent when the budget runs out mid-pass; vertices
/// are only replaced by evaluated points.
pub fn nm_iterate(
    s: &mut Simplex,
    ev: &mut Evaluator<'_>,
    coeffs: &NmCoefficients,
) -> Result<NmMove, Halt> {
    s.sort();
    let n = s.dim();
    let bounds = ev.bounds();
    let xc = s.centroid();
    let f1 = s.vertices[0].fitness;
    let fd = s.vertices[n - 1].fitness;
    let fw = s.vertices[n].fitness;

    let eval = |coords: Vec<f64>, ev: &mut Evaluator<'_>| -> Result<Solution, Halt> {
        let mut p = Point::from_raw(coords);
        p.clamp_to(bounds);
        ev.evaluate_solution(p)
    };

    // x_r = x_c + eta (x_c - x_w)
    let xr = eval(affine(&xc, -coeffs.eta, &s.vertices[n].point), ev)?;

    if f1 <= xr.fitness && xr.fitness < fd {
        s.vertices[n] = xr;
        return Ok(NmMove::Reflection);
    }
    if xr.fitness < f1 {
        let xe = eval(affine(&xc, coeffs.lambda, &xr.point), ev)?;
        s.vertices[n] = if xe.fitness < xr.fitness { xe } else { xr };
        return Ok(NmMove::Expansion);
    }
    if xr.fitness < fw {
        let xoc = eval(affine(&xc, coeffs.mu, &xr.point), ev)?;
        if xoc.fitness <= xr.fitness {
            s.vertices[n] = xoc;
            return Ok(NmMove::OutsideContraction);
        }
    } else {
        let xic = eval(affine(&xc, -coeffs.mu, &xr.point), ev)?;
        if xic.fitness < fw {
            s.vertices[n] = xic;
            return Ok(NmMove::InsideContraction);
        }
    }
    shrink(s, ev, coeffs.nu)?;
    Ok(NmMove::Shrink)
}

fn shrink(s: &mut Simplex, ev: &mut Evaluator<'_>, nu: f64) -> Result<(), Halt> {
    let bounds = ev.bounds();
    let x1 = s.vertices[0].point.clone();
    for v in s.vertices.iter_mut().skip(1) {
        let mut p = Point::from_raw(affine(&x1, nu, &v.point));
        p.clamp_to(bounds);
        *v = ev.evaluate_solution(p)?;
    }
    Ok(())
}

/// Diameter below which [`nm_search`] stops.
pub const MIN_DIAMETER: f64 = 1e-12;

/// Plain Nelder-Mead from `x0` for at most `max_iters` passes.
///
/// Stops early when the budget runs out or the simplex collapses below
/// [`MIN_DIAMETER`]; always returns the best vertex seen.
pub fn nm_search(
    x0: Point,
    ev: &mut Evaluator<'_>,
    coeffs: &NmCoefficients,
    max_iters: usize,
) -> Option<Solution> {
    let start = ev.evaluate_solution(x0).ok()?;
    let mut simplex = match init_simplex(start.clone(), ev) {
        Ok(s) => s,
        Err(_) => return Some(start),
    };
    for _ in 0..max_iters {
        if simplex.diameter() < MIN_DIAMETER {
            break;
        }
        if nm_iterate(&mut simplex, ev, coeffs).is_err() {
            break;
        }
    }
    Some(simplex.best().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make, BenchmarkId};
    use crate::objective::ObjectiveFunction;
    use crate::space::Bounds;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn eval_vertices(ev: &mut Evaluator<'_>, pts: &[&[f64]]) -> Simplex {
        let v = pts
            .iter()
            .map(|c| ev.evaluate_solution(pt(c)).unwrap())
            .collect();
        Simplex::from_vertices(v).unwrap()
    }

    #[test]
    fn init_offsets_follow_zero_and_nonzero_branches() {
        let f = make(BenchmarkId::F6, 2).unwrap();
        let mut ev = Evaluator::new(&f, 100);
        let x0 = ev.evaluate_solution(pt(&[0.0, 0.0])).unwrap();
        let s = init_simplex(x0, &mut ev).unwrap();
        let pts: Vec<&[f64]> = s.vertices().iter().map(|v| v.point.coords()).collect();
        assert_eq!(pts, vec![&[0.0, 0.0][..], &[0.00025, 0.0], &[0.0, 0.00025]]);

        let x0 = ev.evaluate_solution(pt(&[1.0, 1.0])).unwrap();
        let s = init_simplex(x0, &mut ev).unwrap();
        let pts: Vec<&[f64]> = s.vertices().iter().map(|v| v.point.coords()).collect();
        assert_eq!(pts, vec![&[1.0, 1.0][..], &[1.05, 1.0], &[1.0, 1.05]]);
        assert_eq!(ev.count(), 6);
    }

    #[test]
    fn init_at_upper_bound_steps_inward() {
        let f = make(BenchmarkId::F14, 2).unwrap();
        let mut ev = Evaluator::new(&f, 100);
        let x0 = ev.evaluate_solution(pt(&[1.0, 0.5])).unwrap();
        let s = init_simplex(x0, &mut ev).unwrap();
        assert_eq!(s.vertices()[1].point.coords(), &[0.95, 0.5]);
        assert_eq!(s.vertices()[2].point.coords(), &[1.0, 0.55]);
    }

    #[test]
    fn sphere_inside_contraction_hand_trace() {
        let f = make(BenchmarkId::F6, 2).unwrap();
        let mut ev = Evaluator::new(&f, 100);
        let mut s = eval_vertices(&mut ev, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        s.sort();
        assert_eq!(s.vertices()[2].point.coords(), &[0.0, 1.0]);
        assert_eq!(s.centroid(), vec![0.5, 0.0]);
        let mv = nm_iterate(&mut s, &mut ev, &NmCoefficients::default()).unwrap();
        assert_eq!(mv, NmMove::InsideContraction);
        assert_eq!(s.vertices()[2].point.coords(), &[0.25, 0.5]);
        assert_eq!(s.vertices()[2].fitness, 0.3125);
        assert_eq!(ev.count(), 3 + 2);
    }

    #[test]
    fn constant_function_shrinks_towards_first_vertex() {
        let f = ObjectiveFunction::new("const", Bounds::uniform(2, -10.0, 10.0).unwrap(), |_| 1.0);
        let mut ev = Evaluator::new(&f, 100);
        let mut s = eval_vertices(&mut ev, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let mv = nm_iterate(&mut s, &mut ev, &NmCoefficients::default()).unwrap();
        assert_eq!(mv, NmMove::Shrink);
        let pts: Vec<&[f64]> = s.vertices().iter().map(|v| v.point.coords()).collect();
        assert_eq!(pts, vec![&[0.0, 0.0][..], &[0.5, 0.0], &[0.0, 0.5]]);
        // reflection + inside contraction + D shrink evaluations
        assert_eq!(ev.count(), 3 + 2 + 2);
    }

    #[test]
    fn one_dimensional_quadratic_converges() {
        let f = ObjectiveFunction::new("x^2", Bounds::uniform(1, -100.0, 100.0).unwrap(), |x| x[0] * x[0]);
        let mut ev = Evaluator::new(&f, 10_000);
        let best = nm_search(pt(&[10.0]), &mut ev, &NmCoefficients::default(), 200).unwrap();
        assert!(best.point[0].abs() < 1e-6, "{best:?}");
    }

    #[test]
    fn start_at_optimum_never_worsens() {
        let f = make(BenchmarkId::F3, 3).unwrap();
        let mut ev = Evaluator::new(&f, 10_000);
        let best = nm_search(pt(&[1.0, 1.0, 1.0]), &mut ev, &NmCoefficients::default(), 50).unwrap();
        assert_eq!(best.fitness, 0.0);
    }

    #[test]
    fn best_vertex_is_monotone_and_evals_bounded() {
        let f = make(BenchmarkId::F3, 4).unwrap();
        let mut ev = Evaluator::new(&f, 100_000);
        let x0 = ev.evaluate_solution(pt(&[-1.2, 1.0, 0.5, 2.0])).unwrap();
        let mut s = init_simplex(x0, &mut ev).unwrap();
        let mut last = s.best().fitness;
        for _ in 0..300 {
            let before = ev.count();
            let mv = nm_iterate(&mut s, &mut ev, &NmCoefficients::default()).unwrap();
            let used = ev.count() - before;
            match mv {
                NmMove::Shrink => assert!(used <= 2 + s.dim() as u64),
                _ => assert!(used <= 2),
            }
            assert!(s.best().fitness <= last);
            last = s.best().fitness;
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(NmCoefficients::new(1.0, 0.5, 0.5, 0.5).is_err());
        assert!(NmCoefficients::new(1.0, 2.0, 1.0, 0.5).is_err());
        assert!(NmCoefficients::new(1.0, 2.0, 0.5, 0.5).is_ok());
    }
}
