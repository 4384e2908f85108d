//! Objective functions and function-evaluation accounting.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Halt, Result};
use crate::space::{Bounds, Point, Solution};

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A bounded, deterministic scalar function of `D` variables.
#[derive(Clone)]
pub struct ObjectiveFunction {
    name: String,
    bounds: Bounds,
    target: Option<f64>,
    evaluator: Arc<EvalFn>,
}

impl ObjectiveFunction {
    pub fn new<F>(name: impl Into<String>, bounds: Bounds, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            bounds,
            target: None,
            evaluator: Arc::new(evaluator),
        }
    }

    /// Declares the known global minimum value.
    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn target(&self) -> Option<f64> {
        self.target
    }

    /// Raw, uncounted evaluation. Prefer [`evaluate`] inside searches.
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

impl fmt::Debug for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

/// Counts function evaluations against a fixed budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
    budget: u64,
}

impl EvalCounter {
    pub fn new(budget: u64) -> Self {
        Self { count: 0, budget }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.count
    }

    pub fn is_exhausted(&self) -> bool {
        self.count >= self.budget
    }
}

/// Evaluates `f` at `p`, charging one evaluation to `counter`.
pub fn evaluate(f: &ObjectiveFunction, p: &Point, counter: &mut EvalCounter) -> Result<f64> {
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: p.dim(),
        });
    }
    if counter.is_exhausted() {
        return Err(Error::BudgetExhausted);
    }
    counter.count += 1;
    Ok(f.value(p))
}

/// The evaluation context threaded through every search routine: the
/// objective, its evaluation counter, and the optimum-found tolerance.
#[derive(Debug, Clone)]
pub struct Evaluator<'f> {
    objective: &'f ObjectiveFunction,
    counter: EvalCounter,
    optimum_tolerance: Option<f64>,
}

impl<'f> Evaluator<'f> {
    pub fn new(objective: &'f ObjectiveFunction, budget: u64) -> Self {
        Self {
            objective,
            counter: EvalCounter::new(budget),
            optimum_tolerance: None,
        }
    }

    /// Stops searches with [`Halt::OptimumFound`] once the incumbent is within
    /// `tolerance` of the objective's target. Ignored without a target.
    pub fn with_optimum_tolerance(mut self, tolerance: f64) -> Self {
        self.optimum_tolerance = Some(tolerance);
        self
    }

    pub fn objective(&self) -> &'f ObjectiveFunction {
        self.objective
    }

    pub fn bounds(&self) -> &'f Bounds {
        self.objective.bounds()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    pub fn count(&self) -> u64 {
        self.counter.count
    }

    /// Counted evaluation of a point produced by the search.
    ///
    /// # Panics
    ///
    /// If `p` does not have the objective's dimension; search routines only
    /// produce points of the right length.
    pub fn evaluate(&mut self, p: &Point) -> Result<f64, Halt> {
        match evaluate(self.objective, p, &mut self.counter) {
            Ok(v) => Ok(v),
            Err(Error::BudgetExhausted) => Err(Halt::BudgetExhausted),
            Err(e) => panic!("search produced an invalid point: {e}"),
        }
    }

    pub fn evaluate_solution(&mut self, p: Point) -> Result<Solution, Halt> {
        let fitness = self.evaluate(&p)?;
        Ok(Solution::new(p, fitness))
    }

    /// `true` when `best` satisfies the configured optimum-found test.
    pub fn reached_optimum(&self, best: &Solution) -> bool {
        match (self.objective.target(), self.optimum_tolerance) {
            (Some(target), Some(tol)) => (best.fitness - target).abs() <= tol,
            _ => false,
        }
    }

    /// Returns `Err(OptimumFound)` if `best` meets the optimum test.
    pub fn check(&self, best: &Solution) -> Result<(), Halt> {
        if self.reached_optimum(best) {
            Err(Halt::OptimumFound)
        } else {
            Ok(())
        }
    }

    /// Evaluates candidates in order and returns the first one attaining the
    /// minimum, skipping candidates identical to `skip`.
    ///
    /// On budget exhaustion the minimum over the evaluated prefix is returned
    /// alongside the halt.
    pub fn best_of(
        &mut self,
        candidates: impl IntoIterator<Item = Point>,
        skip: &Point,
    ) -> (Option<Solution>, Result<(), Halt>) {
        let mut best: Option<Solution> = None;
        for c in candidates {
            if c == *skip {
                continue;
            }
            match self.evaluate(&c) {
                Ok(v) => {
                    if best.as_ref().is_none_or(|b| v < b.fitness) {
                        best = Some(Solution::new(c, v));
                    }
                }
                Err(h) => return (best, Err(h)),
            }
        }
        (best, Ok(()))
    }
}
