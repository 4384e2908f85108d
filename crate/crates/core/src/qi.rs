//! Quadratic-interpolation exploitation step.
//!
//! Three agents define, per coordinate, a parabola through
//! `(x_a, f_a)`, `(x_b, f_b)`, `(x_best, f_best)`; the new point takes each
//! parabola's vertex.

use crate::error::{Error, Halt, Result};
use crate::history::HistorySet;
use crate::objective::Evaluator;
use crate::rng::RngStream;
use crate::space::{Bounds, Point, Solution};

/// Relative size below which a coordinate's denominator counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct QiAgents<'a> {
    pub a: &'a Solution,
    pub b: &'a Solution,
    pub best: &'a Solution,
}

/// Per-coordinate parabola vertex through the three agents, clamped to
/// `bounds`.
///
/// A coordinate whose denominator vanishes relative to the magnitude of its
/// terms (collinear or coincident agents) keeps the best agent's value.
pub fn qi_point(agents: QiAgents<'_>, bounds: &Bounds) -> Point {
    let (fa, fb, fc) = (agents.a.fitness, agents.b.fitness, agents.best.fitness);
    let coords = agents
        .a
        .point
        .iter()
        .zip(agents.b.point.iter())
        .zip(agents.best.point.iter())
        .map(|((&xa, &xb), &xc)| {
            let ta = (xc - xb) * fa;
            let tb = (xa - xc) * fb;
            let tc = (xb - xa) * fc;
            let den = ta + tb + tc;
            let scale = ta.abs() + tb.abs() + tc.abs();
            if den == 0.0 || den.abs() <= SINGULAR_RATIO * scale {
                return xc;
            }
            let num = (xc * xc - xb * xb) * fa + (xa * xa - xc * xc) * fb + (xb * xb - xa * xa) * fc;
            let x = 0.5 * num / den;
            if x.is_finite() {
                x
            } else {
                xc
            }
        })
        .collect();
    let mut p = Point::from_raw(coords);
    p.clamp_to(bounds);
    p
}

/// `|mean(H fitness) - target|`.
pub fn average_accuracy(h: &HistorySet, target: Option<f64>) -> Result<f64> {
    let target = target.ok_or(Error::MissingTarget)?;
    let mean = h.fitnesses().sum::<f64>() / h.len() as f64;
    Ok((mean - target).abs())
}

/// Draws two entries of `h` whose points differ from each other and from
/// `best`. Returns `None` when `h` does not hold two such points.
fn draw_agents<'h>(h: &'h HistorySet, best: &Solution, rng: &mut RngStream) -> Option<(&'h Solution, &'h Solution)> {
    let eligible: Vec<&Solution> = h
        .entries()
        .iter()
        .map(|e| &e.solution)
        .filter(|s| s.point != best.point)
        .collect();
    let has_pair = eligible
        .iter()
        .any(|s| s.point != eligible[0].point);
    if !has_pair {
        return None;
    }
    let a = eligible[rng.index(eligible.len())];
    loop {
        let b = eligible[rng.index(eligible.len())];
        if b.point != a.point {
            return Some((a, b));
        }
    }
}

/// Outcome of a [`qi_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QiOutcome {
    /// No two usable agents, or the interpolated point equals `best`.
    Skipped,
    Rejected,
    Improved,
}

/// One quadratic-interpolation move with greedy acceptance.
pub fn qi_step(
    h: &HistorySet,
    best: &mut Solution,
    ev: &mut Evaluator<'_>,
    rng: &mut RngStream,
) -> Result<QiOutcome, Halt> {
    let Some((a, b)) = draw_agents(h, best, rng) else {
        return Ok(QiOutcome::Skipped);
    };
    let p = qi_point(QiAgents { a, b, best }, ev.bounds());
    if p == best.point {
        return Ok(QiOutcome::Skipped);
    }
    let cand = ev.evaluate_solution(p)?;
    if cand.fitness < best.fitness {
        *best = cand;
        Ok(QiOutcome::Improved)
    } else {
        Ok(QiOutcome::Rejected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{HistoryEntry, HistoryTag};
    use crate::objective::ObjectiveFunction;

    fn sol1(x: f64, f: impl Fn(f64) -> f64) -> Solution {
        Solution::new(Point::new(vec![x]).unwrap(), f(x))
    }

    fn wide(dim: usize) -> Bounds {
        Bounds::uniform(dim, -1e6, 1e6).unwrap()
    }

    #[test]
    fn parabola_vertex_hand_example() {
        let f = |x: f64| x * x;
        let (a, b, best) = (sol1(-1.0, f), sol1(2.0, f), sol1(0.5, f));
        let p = qi_point(QiAgents { a: &a, b: &b, best: &best }, &wide(1));
        assert_eq!(p[0], 0.0);
    }

    #[test]
    fn symmetric_agents_hit_vertex() {
        let f = |x: f64| (x - 3.0) * (x - 3.0);
        let (a, b, best) = (sol1(2.0, f), sol1(4.0, f), sol1(3.0, f));
        let p = qi_point(QiAgents { a: &a, b: &b, best: &best }, &wide(1));
        assert_eq!(p[0], 3.0);
    }

    #[test]
    fn shared_coordinate_falls_back_to_best() {
        let mk = |c: [f64; 2], f: f64| Solution::new(Point::new(c.to_vec()).unwrap(), f);
        let a = mk([1.0, 5.0], 3.0);
        let b = mk([2.0, 5.0], 2.0);
        let best = mk([0.5, 5.0], 1.0);
        let p = qi_point(QiAgents { a: &a, b: &b, best: &best }, &wide(2));
        assert_eq!(p[1], 5.0);
    }

    #[test]
    fn output_is_clamped() {
        // Concave data puts the vertex far outside the box.
        let f = |x: f64| -(x * x);
        let (a, b, best) = (sol1(0.9, f), sol1(1.0, f), sol1(0.8, f));
        let p = qi_point(QiAgents { a: &a, b: &b, best: &best }, &Bounds::uniform(1, -1.0, 1.0).unwrap());
        assert!((-1.0..=1.0).contains(&p[0]));
    }

    fn history(points: &[(f64, f64)]) -> HistorySet {
        HistorySet::from_entries(
            points
                .iter()
                .map(|&(x, f)| HistoryEntry {
                    solution: Solution::new(Point::new(vec![x]).unwrap(), f),
                    tag: HistoryTag::Old,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn average_accuracy_values() {
        let h = HistorySet::from_entries(vec![
            HistoryEntry { solution: sol1(0.0, |_| 1e-7), tag: HistoryTag::Old },
            HistoryEntry { solution: sol1(1.0, |_| 3e-7), tag: HistoryTag::Old },
        ])
        .unwrap();
        assert!((average_accuracy(&h, Some(0.0)).unwrap() - 2e-7).abs() < 1e-22);
        assert_eq!(average_accuracy(&h, None), Err(Error::MissingTarget));
        let z = history(&[(0.0, 4.0), (1.0, 4.0)]);
        assert_eq!(average_accuracy(&z, Some(4.0)).unwrap(), 0.0);
    }

    #[test]
    fn qi_step_exact_on_quadratic() {
        let q = |x: f64| 3.0 * (x - 1.5).powi(2) + 0.25;
        let f = ObjectiveFunction::new("q", Bounds::uniform(1, -10.0, 10.0).unwrap(), move |x| q(x[0]));
        let mut ev = Evaluator::new(&f, 100);
        let h = history(&[(0.0, q(0.0)), (4.0, q(4.0))]);
        let mut best = Solution::new(Point::new(vec![1.0]).unwrap(), q(1.0));
        let mut rng = RngStream::new(9);
        let out = qi_step(&h, &mut best, &mut ev, &mut rng).unwrap();
        assert_eq!(out, QiOutcome::Improved);
        assert!((best.point[0] - 1.5).abs() < 1e-10);
        assert_eq!(ev.count(), 1);
    }

    #[test]
    fn qi_step_never_uses_duplicate_agents() {
        let f = ObjectiveFunction::new("q", Bounds::uniform(1, -10.0, 10.0).unwrap(), |x| x[0] * x[0]);
        let mut ev = Evaluator::new(&f, 100);
        let mut rng = RngStream::new(1);
        // Only one point differs from best: no valid pair.
        let h = history(&[(1.0, 1.0), (0.5, 0.25)]);
        let mut best = Solution::new(Point::new(vec![0.5]).unwrap(), 0.25);
        assert_eq!(qi_step(&h, &mut best, &mut ev, &mut rng).unwrap(), QiOutcome::Skipped);
        assert_eq!(ev.count(), 0);
    }
}
