//! Historical-information store.
//!
//! The store holds `D + 1` tagged solutions and doubles as a Nelder-Mead
//! simplex. Improving solutions are collected into it by replacing the worst
//! entry; once the share of fresh ("current") entries reaches a threshold the
//! store is run through `D + 1` simplex passes and every entry becomes "old".

use crate::error::{Error, Halt, Result};
use crate::objective::Evaluator;
use crate::simplex::{nm_iterate, NmCoefficients, Simplex};
use crate::space::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryTag {
    /// Produced by the previous utilization (or the initial simplex).
    Old,
    /// Collected since the previous utilization.
    Current,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub solution: Solution,
    pub tag: HistoryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistorySet {
    entries: Vec<HistoryEntry>,
}

impl HistorySet {
    /// Wraps a simplex with every vertex tagged old.
    pub fn from_simplex(s: Simplex) -> Self {
        Self {
            entries: s
                .into_vertices()
                .into_iter()
                .map(|solution| HistoryEntry {
                    solution,
                    tag: HistoryTag::Old,
                })
                .collect(),
        }
    }

    pub fn from_entries(entries: Vec<HistoryEntry>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::EmptyInput);
        };
        let dim = first.solution.point.dim();
        if entries.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: entries.len(),
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, tag: HistoryTag) -> usize {
        self.entries.iter().filter(|e| e.tag == tag).count()
    }

    /// Fitness values in storage order.
    pub fn fitnesses(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.solution.fitness)
    }

    /// Replaces the worst entry with `current`, tagged current.
    ///
    /// The replacement is unconditional. Ties for worst go to the highest
    /// index.
    pub fn collect(&mut self, current: Solution) {
        let worst = self
            .entries
            .iter()
            .enumerate()
            .fold(0, |w, (i, e)| {
                if e.solution.fitness >= self.entries[w].solution.fitness {
                    i
                } else {
                    w
                }
            });
        self.entries[worst] = HistoryEntry {
            solution: current,
            tag: HistoryTag::Current,
        };
    }

    /// Share of entries collected since the last utilization.
    pub fn update_rate(&self) -> f64 {
        self.count(HistoryTag::Current) as f64 / self.entries.len() as f64
    }

    /// Runs `D + 1` Nelder-Mead passes over the store and returns its best
    /// entry. All entries are tagged old afterwards, including when the
    /// budget runs out part way.
    pub fn utilize(
        &mut self,
        ev: &mut Evaluator<'_>,
        coeffs: &NmCoefficients,
    ) -> (Solution, Result<(), Halt>) {
        let vertices = self.entries.drain(..).map(|e| e.solution).collect();
        let mut simplex = Simplex::from_vertices(vertices).expect("history keeps D + 1 entries");
        let passes = simplex.dim() + 1;
        let mut res = Ok(());
        for _ in 0..passes {
            if let Err(h) = nm_iterate(&mut simplex, ev, coeffs) {
                res = Err(h);
                break;
            }
        }
        let best = simplex.best().clone();
        *self = Self::from_simplex(simplex);
        (best, res)
    }
}
