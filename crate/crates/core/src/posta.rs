//! Parameter-optimal state transition search.
//!
//! Before each operator phase the operator's scale factor is chosen from a
//! fixed logarithmic grid by evaluating every `(factor, direction)` pair, then
//! held for `tp` plain operator steps. A successful step is followed by a
//! translation line search from the previous incumbent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Halt, Result};
use crate::objective::Evaluator;
use crate::operators::{self, OperatorFactors, OperatorKind};
use crate::rng::RngStream;
use crate::space::{Point, Solution};

/// Candidate scale factors, strictly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OmegaSet(Vec<f64>);

impl OmegaSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConfig("omega values must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("omega values must be strictly decreasing".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for OmegaSet {
    fn default() -> Self {
        Self((0..9).map(|k| 10f64.powi(-k)).collect())
    }
}

impl TryFrom<Vec<f64>> for OmegaSet {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<OmegaSet> for Vec<f64> {
    fn from(o: OmegaSet) -> Self {
        o.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterState {
    pub omega: OmegaSet,
    /// Steps a selected factor is held for.
    pub tp: usize,
    /// Candidates per operator invocation.
    pub se: usize,
    pub factors: OperatorFactors,
}

impl ParameterState {
    pub fn new(omega: OmegaSet, tp: usize, se: usize, beta: f64) -> Result<Self> {
        if tp == 0 || se == 0 {
            return Err(Error::InvalidConfig("tp and se must be at least 1".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidConfig("beta must be positive".into()));
        }
        let first = omega.values()[0];
        Ok(Self {
            omega,
            tp,
            se,
            factors: OperatorFactors {
                alpha: first,
                beta,
                gamma: first,
                delta: first,
            },
        })
    }

    pub fn factor(&self, kind: OperatorKind) -> f64 {
        match kind {
            OperatorKind::Rotation => self.factors.alpha,
            OperatorKind::Translation => self.factors.beta,
            OperatorKind::Expansion => self.factors.gamma,
            OperatorKind::Axesion => self.factors.delta,
        }
    }

    fn set_factor(&mut self, kind: OperatorKind, value: f64) {
        match kind {
            OperatorKind::Rotation => self.factors.alpha = value,
            OperatorKind::Translation => self.factors.beta = value,
            OperatorKind::Expansion => self.factors.gamma = value,
            OperatorKind::Axesion => self.factors.delta = value,
        }
    }
}

impl Default for ParameterState {
    fn default() -> Self {
        Self::new(OmegaSet::default(), 10, 50, 1.0).expect("default parameters are valid")
    }
}

/// Fine-grained progress notifications from the operator phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseEvent {
    Selected { kind: OperatorKind, factor: f64 },
    Step { kind: OperatorKind, improved: bool },
    Translation { improved: bool },
}

/// Callbacks fired by the operator phases.
pub trait SearchHook {
    /// Called after every strict improvement of `best`. Implementations may
    /// replace `best` with a strictly better solution.
    fn improved(&mut self, _best: &mut Solution, _ev: &mut Evaluator<'_>) -> Result<(), Halt> {
        Ok(())
    }

    fn event(&mut self, _event: PhaseEvent) {}
}

impl SearchHook for () {}

/// Outcome of one parameter selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// The held factor after selection.
    pub factor: f64,
    /// Minimum objective value over the evaluated grid, if anything was
    /// evaluated.
    pub grid_min: Option<f64>,
}

/// Chooses the factor of `kind` by scanning `omega x se` grid points.
///
/// `se` directions are drawn once and scaled by every factor. The first
/// grid point attaining the minimum decides the factor, so ties go to the
/// larger factor. `best` is replaced if the grid minimum improves on it; on
/// budget exhaustion the partial scan is applied before the halt is returned.
pub fn select_parameter(
    ev: &mut Evaluator<'_>,
    best: &mut Solution,
    kind: OperatorKind,
    ps: &mut ParameterState,
    rng: &mut RngStream,
) -> Result<Selection, Halt> {
    assert!(
        kind != OperatorKind::Translation,
        "translation factor is not selected"
    );
    let dirs: Vec<Vec<f64>> = (0..ps.se)
        .map(|_| operators::direction(kind, &best.point, rng))
        .collect();
    let mut grid_best: Option<(f64, Solution)> = None;
    let mut halt = Ok(());
    'scan: for &factor in ps.omega.values() {
        for dir in &dirs {
            let mut cand = operators::step(&best.point, factor, dir);
            cand.clamp_to(ev.bounds());
            if cand == best.point {
                continue;
            }
            match ev.evaluate(&cand) {
                Ok(v) => {
                    if grid_best.as_ref().is_none_or(|(_, s)| v < s.fitness) {
                        grid_best = Some((factor, Solution::new(cand, v)));
                    }
                }
                Err(h) => {
                    halt = Err(h);
                    break 'scan;
                }
            }
        }
    }
    let factor = grid_best
        .as_ref()
        .map_or(ps.omega.values()[0], |(f, _)| *f);
    ps.set_factor(kind, factor);
    let grid_min = grid_best.as_ref().map(|(_, s)| s.fitness);
    if let Some((_, s)) = grid_best {
        if s.fitness < best.fitness {
            *best = s;
        }
    }
    halt.map(|()| Selection { factor, grid_min })
}

fn clamp_all(points: Vec<Point>, ev: &Evaluator<'_>) -> Vec<Point> {
    points
        .into_iter()
        .map(|mut p| {
            p.clamp_to(ev.bounds());
            p
        })
        .collect()
}

/// One `select_parameter` followed by `tp` operator steps at the held factor.
///
/// Returns with `best` holding the incumbent, including when halted.
pub fn operator_phase<H: SearchHook + ?Sized>(
    ev: &mut Evaluator<'_>,
    best: &mut Solution,
    kind: OperatorKind,
    ps: &mut ParameterState,
    rng: &mut RngStream,
    hook: &mut H,
) -> Result<(), Halt> {
    let before = best.fitness;
    let selected = select_parameter(ev, best, kind, ps, rng);
    if let Ok(sel) = &selected {
        hook.event(PhaseEvent::Selected {
            kind,
            factor: sel.factor,
        });
    }
    if best.fitness < before {
        hook.improved(best, ev)?;
    }
    selected?;
    ev.check(best)?;

    let factor = ps.factor(kind);
    for _ in 0..ps.tp {
        let cands = match kind {
            OperatorKind::Rotation => operators::rotation_candidates(best, factor, ps.se, rng),
            OperatorKind::Expansion => operators::expansion_candidates(best, factor, ps.se, rng),
            OperatorKind::Axesion => operators::axesion_candidates(best, factor, ps.se, rng),
            OperatorKind::Translation => unreachable!("translation is not a phase"),
        };
        let (found, res) = ev.best_of(clamp_all(cands, ev), &best.point);
        let improved = found.as_ref().is_some_and(|c| c.fitness < best.fitness);
        hook.event(PhaseEvent::Step { kind, improved });
        if !improved {
            res?;
            continue;
        }
        let prev = std::mem::replace(best, found.expect("improvement implies a candidate"));
        hook.improved(best, ev)?;
        res?;
        ev.check(best)?;
        translate(ev, best, &prev, ps, rng, hook)?;
        ev.check(best)?;
    }
    Ok(())
}

fn translate<H: SearchHook + ?Sized>(
    ev: &mut Evaluator<'_>,
    best: &mut Solution,
    prev: &Solution,
    ps: &ParameterState,
    rng: &mut RngStream,
    hook: &mut H,
) -> Result<(), Halt> {
    let cands = match operators::translation_candidates(best, prev, ps.factors.beta, ps.se, rng) {
        Ok(c) => c,
        // Only reachable if the hook moved `best` back onto `prev`.
        Err(_) => return Ok(()),
    };
    let (found, res) = ev.best_of(clamp_all(cands, ev), &best.point);
    let improved = found.as_ref().is_some_and(|c| c.fitness < best.fitness);
    hook.event(PhaseEvent::Translation { improved });
    if improved {
        *best = found.expect("improvement implies a candidate");
        hook.improved(best, ev)?;
    }
    res
}

/// Expansion, rotation and axesion phases, in that order.
pub fn posta_iteration<H: SearchHook + ?Sized>(
    ev: &mut Evaluator<'_>,
    best: &mut Solution,
    ps: &mut ParameterState,
    rng: &mut RngStream,
    hook: &mut H,
) -> Result<(), Halt> {
    for kind in [
        OperatorKind::Expansion,
        OperatorKind::Rotation,
        OperatorKind::Axesion,
    ] {
        operator_phase(ev, best, kind, ps, rng, hook)?;
    }
    Ok(())
}
