use serde::{Deserialize, Serialize};

use crate::algorithms::RunRecord;
use crate::error::{Error, Result};

/// Aggregate over repeated runs of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single run.
    pub std: f64,
    pub ave_fes: f64,
    pub success_count: usize,
    pub runs: usize,
}

pub fn summarize(records: &[RunRecord]) -> Result<SummaryStats> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = records.len() as f64;
    let finals = records.iter().map(|r| r.final_best.fitness);
    let mean = finals.clone().sum::<f64>() / n;
    let std = if records.len() > 1 {
        (finals.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(SummaryStats {
        mean,
        std,
        ave_fes: records.iter().map(|r| r.total_fes as f64).sum::<f64>() / n,
        success_count: records.iter().filter(|r| r.success).count(),
        runs: records.len(),
    })
}
