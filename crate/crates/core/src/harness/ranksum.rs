//! Two-sided Wilcoxon rank-sum test with midranks for ties.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest `n + m` handled by the exact null distribution.
pub const EXACT_LIMIT: usize = 20;

/// Result of comparing sample `a` against reference `b` (lower is better).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    /// `a` is significantly better than the reference.
    Better,
    /// `a` is significantly worse than the reference.
    Worse,
    NotSignificant,
}

impl Significance {
    pub fn symbol(self) -> &'static str {
        match self {
            Significance::Better => "+",
            Significance::Worse => "-",
            Significance::NotSignificant => "≈",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Significance::Better => Significance::Worse,
            Significance::Worse => Significance::Better,
            Significance::NotSignificant => Significance::NotSignificant,
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Sum of the midranks of `a` in the pooled sample.
    pub w: f64,
    /// Expected value of `w` under the null hypothesis.
    pub expected: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Pooled midranks, doubled so that they are integers.
fn doubled_ranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .chain(b)
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // Positions i..=j (0-based) share rank ((i + 1) + (j + 1)) / 2.
        let doubled = (i + j + 2) as u64;
        for p in &pooled[i..=j] {
            ranks[p.1] = doubled;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided rank-sum p-value of `a` against `b`.
///
/// Uses the exact permutation distribution of the midrank sum when
/// `a.len() + b.len() <= 20`, otherwise the normal approximation with tie
/// and continuity corrections.
pub fn rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { min: 1 });
    }
    if let Some(i) = a.iter().chain(b).position(|v| v.is_nan()) {
        return Err(Error::NonFinite { index: i });
    }
    let first = a[0];
    if a.iter().chain(b).all(|&v| v == first) {
        return Err(Error::DegenerateSamples);
    }
    let (n, m) = (a.len(), b.len());
    let total = n + m;
    let (ranks, ties) = doubled_ranks(a, b);
    let w2: u64 = ranks[..n].iter().sum();
    let e2 = (n * (total + 1)) as u64;
    let w = w2 as f64 / 2.0;
    let expected = e2 as f64 / 2.0;

    if total <= EXACT_LIMIT {
        let dev = w2.abs_diff(e2);
        let max_sum: u64 = ranks.iter().sum();
        // counts[k][s]: subsets of size k with doubled rank sum s.
        let mut counts = vec![vec![0u64; max_sum as usize + 1]; n + 1];
        counts[0][0] = 1;
        for &r in &ranks {
            for k in (1..=n).rev() {
                for s in (r as usize..=max_sum as usize).rev() {
                    counts[k][s] += counts[k - 1][s - r as usize];
                }
            }
        }
        let all: u64 = counts[n].iter().sum();
        let extreme: u64 = counts[n]
            .iter()
            .enumerate()
            .filter(|&(s, _)| (s as u64).abs_diff(e2) >= dev)
            .map(|(_, &c)| c)
            .sum();
        return Ok(RankSum {
            w,
            expected,
            p_value: extreme as f64 / all as f64,
            exact: true,
        });
    }

    let (nf, mf, tf) = (n as f64, m as f64, total as f64);
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = nf * mf / 12.0 * ((tf + 1.0) - tie_term / (tf * (tf - 1.0)));
    let z = ((w - expected).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    let p_value = (2.0 * normal.sf(z)).min(1.0);
    Ok(RankSum {
        w,
        expected,
        p_value,
        exact: false,
    })
}

/// Significance mark of `a` relative to the reference sample `b` at level
/// `alpha`. Lower values are better.
///
/// Samples whose pooled values are all identical compare as not
/// significant.
pub fn rank_sum_test(a: &[f64], b: &[f64], alpha: f64) -> Result<Significance> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::TooFewSamples { min: 2 });
    }
    let r = match rank_sum(a, b) {
        Ok(r) => r,
        Err(Error::DegenerateSamples) => return Ok(Significance::NotSignificant),
        Err(e) => return Err(e),
    };
    Ok(if r.p_value >= alpha {
        Significance::NotSignificant
    } else if r.w < r.expected {
        Significance::Better
    } else {
        Significance::Worse
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_four_by_four() {
        let r = rank_sum(&[1.0, 2.0, 3.0, 4.0], &[10.0, 11.0, 12.0, 13.0]).unwrap();
        assert!(r.exact);
        assert!((r.p_value - 2.0 / 70.0).abs() < 1e-15);
        assert_eq!(
            rank_sum_test(&[1.0, 2.0, 3.0, 4.0], &[10.0, 11.0, 12.0, 13.0], 0.05).unwrap(),
            Significance::Better
        );
    }

    #[test]
    fn three_by_three_never_significant() {
        let r = rank_sum(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]).unwrap();
        assert!((r.p_value - 0.1).abs() < 1e-15);
        assert_eq!(
            rank_sum_test(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0], 0.05).unwrap(),
            Significance::NotSignificant
        );
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(rank_sum_test(&a, &a, 0.05).unwrap(), Significance::NotSignificant);
        assert_eq!(rank_sum(&a, &a).unwrap().p_value, 1.0);
        let z = [0.0; 5];
        assert_eq!(rank_sum(&z, &z), Err(Error::DegenerateSamples));
        assert_eq!(rank_sum_test(&z, &z, 0.05).unwrap(), Significance::NotSignificant);
    }

    #[test]
    fn too_few() {
        assert_eq!(
            rank_sum_test(&[1.0], &[2.0, 3.0], 0.05),
            Err(Error::TooFewSamples { min: 2 })
        );
    }

    #[test]
    fn midranks_for_ties() {
        let (r, ties) = doubled_ranks(&[1.0, 2.0], &[2.0, 3.0]);
        assert_eq!(r, vec![2, 5, 5, 8]);
        assert_eq!(ties, vec![1, 2, 1]);
    }

    #[test]
    fn normal_branch_for_large_samples() {
        let a: Vec<f64> = (0..15).map(f64::from).collect();
        let b: Vec<f64> = (10..25).map(f64::from).collect();
        let r = rank_sum(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 0.01);
        assert_eq!(rank_sum_test(&b, &a, 0.05).unwrap(), Significance::Worse);
    }
}
