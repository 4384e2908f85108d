//! Experiment protocol: budgets, stopping and success rules, statistics and
//! the parallel experiment runner.

mod experiment;
mod ranksum;
mod stats;

pub use experiment::{
    run_experiment, BudgetRule, CellResult, ExperimentConfig, ExperimentReport, FunctionCell,
};
pub use ranksum::{rank_sum, rank_sum_test, RankSum, Significance};
pub use stats::{summarize, SummaryStats};

use crate::algorithms::TerminationCause;
use crate::error::{Error, Result};
use crate::objective::{EvalCounter, ObjectiveFunction};
use crate::space::Solution;

/// `floor(5000 * D * ln D)` function evaluations.
pub fn fe_budget(dim: usize) -> Result<u64> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: dim });
    }
    let d = dim as f64;
    Ok((5000.0 * d * d.ln()).floor() as u64)
}

/// Why a run should stop now, if it should.
///
/// The optimum test needs a known target; an objective without one only
/// stops on the budget.
pub fn is_terminated(
    best: &Solution,
    f: &ObjectiveFunction,
    counter: &EvalCounter,
    term_eps: f64,
) -> Option<TerminationCause> {
    if f
        .target()
        .is_some_and(|t| (best.fitness - t).abs() <= term_eps)
    {
        Some(TerminationCause::OptimumFound)
    } else if counter.is_exhausted() {
        Some(TerminationCause::BudgetExhausted)
    } else {
        None
    }
}

/// `|fitness - target| <= epsilon`; never true without a target.
pub fn is_success(fitness: f64, target: Option<f64>, epsilon: f64) -> bool {
    target.is_some_and(|t| (fitness - t).abs() <= epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make, BenchmarkId};
    use crate::space::Point;

    #[test]
    fn budget_formula() {
        assert_eq!(fe_budget(20).unwrap(), 299_573);
        assert_eq!(fe_budget(30).unwrap(), 510_179);
        assert_eq!(fe_budget(50).unwrap(), 978_005);
        assert_eq!(fe_budget(2).unwrap(), 6_931);
        assert!(fe_budget(1).is_err());
    }

    #[test]
    fn termination_rules() {
        let f = make(BenchmarkId::F2, 3).unwrap();
        let sol = |v: f64| Solution::new(Point::zeros(3), v);
        let mut counter = EvalCounter::new(5);
        assert_eq!(
            is_terminated(&sol(0.0), &f, &counter, 0.0),
            Some(TerminationCause::OptimumFound)
        );
        assert_eq!(is_terminated(&sol(1.57e-32), &f, &counter, 0.0), None);
        for _ in 0..5 {
            crate::objective::evaluate(&f, &Point::zeros(3), &mut counter).unwrap();
        }
        assert_eq!(
            is_terminated(&sol(1.57e-32), &f, &counter, 0.0),
            Some(TerminationCause::BudgetExhausted)
        );
    }

    #[test]
    fn success_rule() {
        assert!(is_success(5e-9, Some(0.0), 1e-8));
        assert!(!is_success(2e-8, Some(0.0), 1e-8));
        assert!(is_success(1e-8, Some(0.0), 1e-8));
        assert!(!is_success(0.0, None, 1e-8));
    }
}
