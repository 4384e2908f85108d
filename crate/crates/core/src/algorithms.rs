//! The four POSTA-family optimizers and the single-run driver.
//!
//! Every variant runs the plain expansion/rotation/axesion iteration. On top
//! of that:
//!
//! * `NM_POSTA` collects each improved incumbent into the history store and,
//!   whenever the update rate reaches its threshold, runs the Nelder-Mead
//!   utilization over it;
//! * `QI_POSTA` keeps the history store (collection only) and, once the
//!   store's average accuracy falls below its threshold, tries one
//!   quadratic-interpolation step per iteration;
//! * `NMQI_POSTA` does both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Halt, Result};
use crate::harness::is_success;
use crate::history::HistorySet;
use crate::objective::{Evaluator, ObjectiveFunction};
use crate::posta::{posta_iteration, OmegaSet, ParameterState, SearchHook};
use crate::qi::{average_accuracy, qi_step, QiOutcome};
use crate::rng::RngStream;
use crate::simplex::{init_simplex, NmCoefficients};
use crate::space::{Point, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum Variant {
    POSTA,
    NM_POSTA,
    QI_POSTA,
    NMQI_POSTA,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::POSTA,
        Variant::NM_POSTA,
        Variant::QI_POSTA,
        Variant::NMQI_POSTA,
    ];

    pub fn uses_nm(self) -> bool {
        matches!(self, Variant::NM_POSTA | Variant::NMQI_POSTA)
    }

    pub fn uses_qi(self) -> bool {
        matches!(self, Variant::QI_POSTA | Variant::NMQI_POSTA)
    }

    pub fn uses_history(self) -> bool {
        self.uses_nm() || self.uses_qi()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string() == norm)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

/// Algorithm settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantConfig {
    pub variant: Variant,
    pub se: usize,
    pub tp: usize,
    pub ur_threshold: f64,
    pub aas_threshold: f64,
    pub nm_coeffs: NmCoefficients,
    pub beta: f64,
    pub omega: OmegaSet,
    pub seed: u64,
    /// Fixed starting point instead of a uniform draw.
    pub start: Option<Vec<f64>>,
}

impl Default for VariantConfig {
    fn default() -> Self {
        Self {
            variant: Variant::NMQI_POSTA,
            se: 50,
            tp: 10,
            ur_threshold: 0.5,
            aas_threshold: 1e-6,
            nm_coeffs: NmCoefficients::default(),
            beta: 1.0,
            omega: OmegaSet::default(),
            seed: 0,
            start: None,
        }
    }
}

impl VariantConfig {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ur_threshold > 0.0 && self.ur_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ur_threshold must lie in (0, 1], got {}",
                self.ur_threshold
            )));
        }
        if !(self.aas_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "aas_threshold must be positive, got {}",
                self.aas_threshold
            )));
        }
        self.nm_coeffs.validate()?;
        ParameterState::new(self.omega.clone(), self.tp, self.se, self.beta)?;
        Ok(())
    }
}

/// Budget and stopping tolerances for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    pub budget: u64,
    /// The run stops once `|best - target| <= termination_epsilon`.
    pub termination_epsilon: f64,
    pub success_epsilon: f64,
    /// Keep every incumbent point, not only its fitness.
    pub record_path: bool,
}

impl RunLimits {
    pub fn new(budget: u64) -> Self {
        Self {
            budget,
            termination_epsilon: 0.0,
            success_epsilon: 1e-8,
            record_path: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationCause {
    OptimumFound,
    BudgetExhausted,
    /// A whole iteration produced no evaluable candidate, so no further
    /// progress is possible (every operator maps the incumbent to itself).
    Stalled,
}

impl From<Halt> for TerminationCause {
    fn from(h: Halt) -> Self {
        match h {
            Halt::BudgetExhausted => TerminationCause::BudgetExhausted,
            Halt::OptimumFound => TerminationCause::OptimumFound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub fe: u64,
    pub fitness: f64,
}

/// Everything recorded about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub variant: Variant,
    pub seed: u64,
    /// Incumbent fitness after every strict improvement, starting with the
    /// initial point.
    pub trace: Vec<TracePoint>,
    pub final_best: Solution,
    pub total_fes: u64,
    pub terminated_by: TerminationCause,
    pub success: bool,
    /// Incumbent points in order; empty unless requested.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub path: Vec<Point>,
}

/// Starting solution: the configured point, or a uniform draw in the box.
pub fn initial_point(
    ev: &mut Evaluator<'_>,
    rng: &mut RngStream,
    start: Option<&[f64]>,
) -> Result<Solution> {
    let bounds = ev.bounds();
    let point = match start {
        Some(coords) => {
            let p = Point::new(coords.to_vec())?;
            if p.dim() != bounds.dim() {
                return Err(Error::DimensionMismatch {
                    expected: bounds.dim(),
                    found: p.dim(),
                });
            }
            p
        }
        None => Point::from_raw(
            bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(&lo, &hi)| rng.uniform(lo, hi))
                .collect(),
        ),
    };
    ev.evaluate_solution(point).map_err(|_| Error::BudgetExhausted)
}

struct Driver<'c> {
    cfg: &'c VariantConfig,
    history: Option<HistorySet>,
    trace: Vec<TracePoint>,
    path: Option<Vec<Point>>,
}

impl Driver<'_> {
    fn record(&mut self, best: &Solution, fe: u64) {
        self.trace.push(TracePoint {
            fe,
            fitness: best.fitness,
        });
        if let Some(path) = &mut self.path {
            path.push(best.point.clone());
        }
    }
}

impl SearchHook for Driver<'_> {
    fn improved(&mut self, best: &mut Solution, ev: &mut Evaluator<'_>) -> Result<(), Halt> {
        self.record(best, ev.count());
        let Some(h) = &mut self.history else {
            return Ok(());
        };
        h.collect(best.clone());
        if self.cfg.variant.uses_nm() && h.update_rate() >= self.cfg.ur_threshold {
            let (nm_best, res) = h.utilize(ev, &self.cfg.nm_coeffs);
            if nm_best.fitness < best.fitness {
                *best = nm_best;
                self.record(best, ev.count());
            }
            res?;
        }
        Ok(())
    }
}

/// Runs one optimization of `f` under `cfg` until the budget is spent or the
/// optimum test fires.
pub fn run(f: &ObjectiveFunction, cfg: &VariantConfig, limits: &RunLimits) -> Result<RunRecord> {
    cfg.validate()?;
    if limits.budget == 0 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    let mut ev = Evaluator::new(f, limits.budget).with_optimum_tolerance(limits.termination_epsilon);
    let mut rng = RngStream::new(cfg.seed);
    let mut ps = ParameterState::new(cfg.omega.clone(), cfg.tp, cfg.se, cfg.beta)?;
    let mut best = initial_point(&mut ev, &mut rng, cfg.start.as_deref())?;
    let mut driver = Driver {
        cfg,
        history: None,
        trace: Vec::new(),
        path: limits.record_path.then(Vec::new),
    };
    driver.record(&best, ev.count());

    let cause = drive(&mut ev, &mut best, &mut ps, &mut rng, &mut driver);

    let total_fes = ev.count();
    let success = is_success(best.fitness, f.target(), limits.success_epsilon);
    Ok(RunRecord {
        variant: cfg.variant,
        seed: cfg.seed,
        trace: driver.trace,
        final_best: best,
        total_fes,
        terminated_by: cause,
        success,
        path: driver.path.unwrap_or_default(),
    })
}

fn drive(
    ev: &mut Evaluator<'_>,
    best: &mut Solution,
    ps: &mut ParameterState,
    rng: &mut RngStream,
    driver: &mut Driver<'_>,
) -> TerminationCause {
    let result = (|| -> Result<TerminationCause, Halt> {
        ev.check(best)?;
        let variant = driver.cfg.variant;
        if variant.uses_history() {
            driver.history = Some(HistorySet::from_simplex(init_simplex(best.clone(), ev)?));
        }
        let target = ev.objective().target();
        loop {
            let before = ev.count();
            posta_iteration(ev, best, ps, rng, driver)?;
            if variant.uses_qi() && target.is_some() {
                let h = driver.history.as_ref().expect("QI variants keep history");
                let aas = average_accuracy(h, target).expect("target checked above");
                if aas <= driver.cfg.aas_threshold && qi_step(h, best, ev, rng)? == QiOutcome::Improved {
                    driver.improved(best, ev)?;
                }
            }
            ev.check(best)?;
            if ev.count() == before {
                return Ok(TerminationCause::Stalled);
            }
        }
    })();
    match result {
        Ok(cause) => cause,
        Err(h) => h.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make, BenchmarkId};

    #[test]
    fn variant_parsing() {
        assert_eq!("nm-posta".parse::<Variant>().unwrap(), Variant::NM_POSTA);
        assert_eq!("NMQI_POSTA".parse::<Variant>().unwrap(), Variant::NMQI_POSTA);
        assert!("FOO".parse::<Variant>().is_err());
    }

    #[test]
    fn initial_point_in_bounds_and_fixed_start() {
        let f = make(BenchmarkId::F6, 5).unwrap();
        let mut ev = Evaluator::new(&f, 10);
        let mut rng = RngStream::new(1);
        let s = initial_point(&mut ev, &mut rng, None).unwrap();
        assert!(f.bounds().contains(&s.point));
        let g = make(BenchmarkId::F3, 2).unwrap();
        let mut ev = Evaluator::new(&g, 10);
        let s = initial_point(&mut ev, &mut rng, Some(&[0.0, 0.75])).unwrap();
        assert_eq!(s.point.coords(), &[0.0, 0.75]);
    }

    #[test]
    fn different_seeds_give_different_starts() {
        let f = make(BenchmarkId::F6, 3).unwrap();
        let mut ev = Evaluator::new(&f, 10);
        let a = initial_point(&mut ev, &mut RngStream::new(1), None).unwrap();
        let b = initial_point(&mut ev, &mut RngStream::new(2), None).unwrap();
        assert_ne!(a.point, b.point);
    }

    #[test]
    fn config_validation() {
        let mut c = VariantConfig::default();
        assert!(c.validate().is_ok());
        c.ur_threshold = 1.5;
        assert!(c.validate().is_err());
        c.ur_threshold = 0.5;
        c.aas_threshold = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn run_is_deterministic_and_accounted() {
        let f = make(BenchmarkId::F7, 5).unwrap();
        for variant in Variant::ALL {
            let cfg = VariantConfig::new(variant, 17);
            let limits = RunLimits::new(20_000);
            let a = run(&f, &cfg, &limits).unwrap();
            let b = run(&f, &cfg, &limits).unwrap();
            assert_eq!(a, b);
            assert!(a.total_fes <= 20_000);
            assert!(a.trace.windows(2).all(|w| w[1].fitness < w[0].fitness && w[1].fe > w[0].fe));
            assert_eq!(a.trace.last().unwrap().fitness, a.final_best.fitness);
            assert_eq!(f.value(&a.final_best.point), a.final_best.fitness);
        }
    }

    #[test]
    fn stalls_at_origin_without_target() {
        let f = ObjectiveFunction::new("sphere", crate::space::Bounds::uniform(2, -1.0, 1.0).unwrap(), |x| {
            x.iter().map(|v| v * v).sum()
        });
        let cfg = VariantConfig {
            start: Some(vec![0.0, 0.0]),
            ..VariantConfig::new(Variant::POSTA, 1)
        };
        let r = run(&f, &cfg, &RunLimits::new(1_000_000)).unwrap();
        assert_eq!(r.terminated_by, TerminationCause::Stalled);
        assert_eq!(r.total_fes, 1);
    }
}
