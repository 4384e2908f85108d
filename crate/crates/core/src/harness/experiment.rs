//! Repeated-run experiments over a (function, dimension, variant) matrix.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ranksum::{rank_sum_test, Significance};
use super::stats::{summarize, SummaryStats};
use super::fe_budget;
use crate::algorithms::{run, RunLimits, RunRecord, Variant, VariantConfig};
use crate::benchmarks::{make, BenchmarkId};
use crate::error::{Error, Result};

/// Significance level of the rank-sum column.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCell {
    pub function: BenchmarkId,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetFormula {
    /// `floor(5000 * D * ln D)`.
    Formula,
}

/// Per-run evaluation budget: the dimension-dependent formula or a fixed
/// count. Written as `budget = "formula"` or `budget = 20000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetRule {
    Fixed(u64),
    Named(BudgetFormula),
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::Named(BudgetFormula::Formula)
    }
}

impl BudgetRule {
    pub fn budget(self, dim: usize) -> Result<u64> {
        match self {
            BudgetRule::Fixed(n) => Ok(n),
            BudgetRule::Named(BudgetFormula::Formula) => fe_budget(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub functions: Vec<FunctionCell>,
    /// Algorithm settings per variant; their `seed` fields are replaced by
    /// `base_seed + repetition`.
    pub variants: Vec<VariantConfig>,
    pub repetitions: usize,
    pub budget: BudgetRule,
    pub success_epsilon: f64,
    pub termination_epsilon: f64,
    pub base_seed: u64,
    /// Variant the significance column compares against.
    pub reference: Option<Variant>,
    /// Worker threads; all available cores when unset.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            functions: Vec::new(),
            variants: Variant::ALL
                .iter()
                .map(|&v| VariantConfig::new(v, 0))
                .collect(),
            repetitions: 30,
            budget: BudgetRule::default(),
            success_epsilon: 1e-8,
            termination_epsilon: 0.0,
            base_seed: 0,
            reference: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    /// All fourteen functions at `D = 2` and `D = 20`, ten runs per cell.
    pub fn quick() -> Self {
        Self {
            functions: [2, 20]
                .into_iter()
                .flat_map(|dim| {
                    BenchmarkId::ALL
                        .into_iter()
                        .map(move |function| FunctionCell { function, dim })
                })
                .collect(),
            repetitions: 10,
            reference: Some(Variant::NMQI_POSTA),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidConfig(m));
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1".into());
        }
        if self.functions.is_empty() || self.variants.is_empty() {
            return invalid("at least one function and one variant are required".into());
        }
        if let Some(c) = self.functions.iter().find(|c| c.dim < 2) {
            return invalid(format!("{} needs dim >= 2, got {}", c.function, c.dim));
        }
        if self.workers == Some(0) {
            return invalid("workers must be at least 1".into());
        }
        if !(self.success_epsilon >= 0.0 && self.termination_epsilon >= 0.0) {
            return invalid("epsilons must be non-negative".into());
        }
        let mut seen = BTreeSet::new();
        for v in &self.variants {
            v.validate()?;
            if !seen.insert(v.variant) {
                return invalid(format!("variant {} listed twice", v.variant));
            }
        }
        if let Some(r) = self.reference {
            if !seen.contains(&r) {
                return invalid(format!("reference variant {r} is not in the variant list"));
            }
        }
        if let BudgetRule::Fixed(0) = self.budget {
            return invalid("budget must be at least 1".into());
        }
        Ok(())
    }

    fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repetitions as u64).map(|i| self.base_seed.wrapping_add(i))
    }
}

/// Outcome of one (function, dimension, variant) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub function: BenchmarkId,
    pub dim: usize,
    pub variant: Variant,
    pub budget: u64,
    /// One record per repetition, in seed order. Empty when `error` is set.
    pub records: Vec<RunRecord>,
    pub stats: Option<SummaryStats>,
    pub significance: Option<Significance>,
    pub error: Option<String>,
}

impl CellResult {
    pub fn id(&self) -> String {
        format!("{}_D{}_{}", self.function, self.dim, self.variant)
    }

    pub fn finals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.final_best.fitness).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub cells: Vec<CellResult>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn cell(&self, function: BenchmarkId, dim: usize, variant: Variant) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.function == function && c.dim == dim && c.variant == variant)
    }
}

struct Job {
    cell: usize,
    function: FunctionCell,
    cfg: VariantConfig,
    limits: RunLimits,
}

/// Runs every cell of `cfg` and, when `out_dir` is given, writes
/// `summary.csv`, `curves/<cell>.csv` and `metadata.json` into it.
///
/// Output is identical for identical configurations regardless of worker
/// count or scheduling. A failing run marks its cell as failed without
/// stopping the others.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let started = Instant::now();

    let mut cells = Vec::new();
    let mut jobs = Vec::new();
    for fc in &cfg.functions {
        let budget = cfg.budget.budget(fc.dim)?;
        for vc in &cfg.variants {
            let idx = cells.len();
            cells.push(CellResult {
                function: fc.function,
                dim: fc.dim,
                variant: vc.variant,
                budget,
                records: Vec::new(),
                stats: None,
                significance: None,
                error: None,
            });
            for seed in cfg.seeds() {
                jobs.push(Job {
                    cell: idx,
                    function: *fc,
                    cfg: VariantConfig { seed, ..vc.clone() },
                    limits: RunLimits {
                        budget,
                        termination_epsilon: cfg.termination_epsilon,
                        success_epsilon: cfg.success_epsilon,
                        record_path: false,
                    },
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let outcomes: Vec<Result<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let f = make(job.function.function, job.function.dim)?;
                run(&f, &job.cfg, &job.limits)
            })
            .collect()
    });

    for (job, outcome) in jobs.iter().zip(outcomes) {
        let cell = &mut cells[job.cell];
        match outcome {
            Ok(r) if cell.error.is_none() => cell.records.push(r),
            Ok(_) => {}
            Err(e) => {
                cell.error.get_or_insert_with(|| format!("seed {}: {e}", job.cfg.seed));
                cell.records.clear();
            }
        }
    }
    for cell in &mut cells {
        if cell.error.is_none() {
            cell.stats = Some(summarize(&cell.records)?);
        }
    }
    if let Some(reference) = cfg.reference {
        for i in 0..cells.len() {
            let c = &cells[i];
            if c.variant == reference || c.error.is_some() || c.records.len() < 2 {
                continue;
            }
            let Some(r) = cells.iter().find(|r| {
                r.function == c.function && r.dim == c.dim && r.variant == reference && r.error.is_none()
            }) else {
                continue;
            };
            let sig = rank_sum_test(&c.finals(), &r.finals(), ALPHA)?;
            cells[i].significance = Some(sig);
        }
    }

    let report = ExperimentReport {
        cells,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    if let Some(dir) = out_dir {
        write_outputs(cfg, &report, dir)?;
    }
    Ok(report)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_outputs(cfg: &ExperimentConfig, report: &ExperimentReport, dir: &Path) -> Result<()> {
    let curves = dir.join("curves");
    fs::create_dir_all(&curves).map_err(io_err)?;

    let mut summary = csv::Writer::from_path(dir.join("summary.csv")).map_err(io_err)?;
    summary
        .write_record([
            "function", "D", "variant", "mean", "std", "ave_fes", "success", "runs", "significance",
        ])
        .map_err(io_err)?;
    for c in &report.cells {
        let sig = c.significance.map(|s| s.to_string()).unwrap_or_default();
        let row = match &c.stats {
            Some(s) => [
                c.function.to_string(),
                c.dim.to_string(),
                c.variant.to_string(),
                format!("{:e}", s.mean),
                format!("{:e}", s.std),
                format!("{:e}", s.ave_fes),
                s.success_count.to_string(),
                s.runs.to_string(),
                sig,
            ],
            None => [
                c.function.to_string(),
                c.dim.to_string(),
                c.variant.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "0".into(),
                sig,
            ],
        };
        summary.write_record(&row).map_err(io_err)?;

        let mut w = csv::Writer::from_path(curves.join(format!("{}.csv", c.id()))).map_err(io_err)?;
        w.write_record(["run", "fe", "best_fitness"]).map_err(io_err)?;
        for (run, r) in c.records.iter().enumerate() {
            for t in &r.trace {
                w.write_record([run.to_string(), t.fe.to_string(), format!("{:e}", t.fitness)])
                    .map_err(io_err)?;
            }
            if r.trace.last().is_none_or(|t| t.fe < r.total_fes) {
                w.write_record([
                    run.to_string(),
                    r.total_fes.to_string(),
                    format!("{:e}", r.final_best.fitness),
                ])
                .map_err(io_err)?;
            }
        }
        w.flush().map_err(io_err)?;
    }
    summary.flush().map_err(io_err)?;

    let errors: Vec<_> = report
        .cells
        .iter()
        .filter_map(|c| c.error.as_ref().map(|e| serde_json::json!({ "cell": c.id(), "error": e })))
        .collect();
    let meta = serde_json::json!({
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "seeds": cfg.seeds().collect::<Vec<_>>(),
        "budgets": report
            .cells
            .iter()
            .map(|c| serde_json::json!({ "cell": c.id(), "budget": c.budget }))
            .collect::<Vec<_>>(),
        "std_convention": "sample standard deviation (n - 1 denominator)",
        "significance_alpha": ALPHA,
        "errors": errors,
        "wall_clock_seconds": report.wall_clock_seconds,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(io_err)?;
    fs::write(dir.join("metadata.json"), text + "\n").map_err(io_err)?;
    Ok(())
}
