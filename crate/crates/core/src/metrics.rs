//! Drift-detection error measures and rank statistics.
//!
//! * `D1`: mean distance from each detection to its nearest drift.
//! * `D2`: mean distance from each drift to its nearest detection.
//! * `R`: `|1 − n_drifts / n_detections|`, zero at parity, below one with
//!   too many detections, above one with too few.
//!
//! All three are undefined (`None`) when a detector reported nothing.

use crate::error::{Error, Result};
use crate::stats::midranks;

fn require_drifts(drifts: &[usize]) -> Result<()> {
    if drifts.is_empty() {
        Err(Error::param(
            "drift measures need at least one ground-truth drift",
        ))
    } else {
        Ok(())
    }
}

fn sorted(values: &[usize]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v
}

/// Distance from `point` to the closest element of the sorted, non-empty `targets`.
fn nearest_distance(point: usize, targets: &[usize]) -> usize {
    let idx = targets.partition_point(|&t| t < point);
    let after = targets.get(idx).map(|&t| t - point);
    let before = idx.checked_sub(1).map(|i| point - targets[i]);
    match (before, after) {
        (Some(b), Some(a)) => b.min(a),
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => unreachable!("targets is non-empty"),
    }
}

fn mean_nearest(from: &[usize], to: &[usize]) -> f64 {
    let to = sorted(to);
    let total: usize = from.iter().map(|&p| nearest_distance(p, &to)).sum();
    total as f64 / from.len() as f64
}

pub fn d1(detections: &[usize], drifts: &[usize]) -> Result<Option<f64>> {
    require_drifts(drifts)?;
    if detections.is_empty() {
        return Ok(None);
    }
    Ok(Some(mean_nearest(detections, drifts)))
}

pub fn d2(detections: &[usize], drifts: &[usize]) -> Result<Option<f64>> {
    require_drifts(drifts)?;
    if detections.is_empty() {
        return Ok(None);
    }
    Ok(Some(mean_nearest(drifts, detections)))
}

pub fn ratio_error(detections: &[usize], drifts: &[usize]) -> Result<Option<f64>> {
    require_drifts(drifts)?;
    if detections.is_empty() {
        return Ok(None);
    }
    Ok(Some(
        (1.0 - drifts.len() as f64 / detections.len() as f64).abs(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationResult {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub r_err: Option<f64>,
    pub n_drifts: usize,
    pub n_detections: usize,
}

pub fn evaluate(detections: &[usize], drifts: &[usize]) -> Result<EvaluationResult> {
    Ok(EvaluationResult {
        d1: d1(detections, drifts)?,
        d2: d2(detections, drifts)?,
        r_err: ratio_error(detections, drifts)?,
        n_drifts: drifts.len(),
        n_detections: detections.len(),
    })
}

/// Error values of several methods over the same stream configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub methods: Vec<String>,
    /// `values[m][c]`: error of method `m` on configuration `c`.
    pub values: Vec<Vec<Option<f64>>>,
}

impl ErrorTable {
    pub fn new(methods: Vec<String>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if methods.len() != values.len() {
            return Err(Error::param("one row of values per method required"));
        }
        if let Some(first) = values.first() {
            if values.iter().any(|row| row.len() != first.len()) {
                return Err(Error::param(
                    "every method needs the same number of configurations",
                ));
            }
        }
        Ok(Self { methods, values })
    }

    pub fn n_configs(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Split off methods with any undefined cell; returns the remaining table
    /// and the names of the excluded methods.
    pub fn exclude_undefined(&self) -> (ErrorTable, Vec<String>) {
        let mut kept = ErrorTable {
            methods: Vec::new(),
            values: Vec::new(),
        };
        let mut excluded = Vec::new();
        for (name, row) in self.methods.iter().zip(&self.values) {
            if row.iter().all(Option::is_some) {
                kept.methods.push(name.clone());
                kept.values.push(row.clone());
            } else {
                excluded.push(name.clone());
            }
        }
        (kept, excluded)
    }
}

/// Mean rank per method; within each configuration rank 1 is the lowest
/// error and ties share their midrank.
pub fn mean_ranks(table: &ErrorTable) -> Result<Vec<f64>> {
    for (name, row) in table.methods.iter().zip(&table.values) {
        if row.iter().any(Option::is_none) {
            return Err(Error::UndefinedCells(name.clone()));
        }
    }
    let k = table.methods.len();
    let n = table.n_configs();
    let mut sums = vec![0.0; k];
    for c in 0..n {
        let column: Vec<f64> = table
            .values
            .iter()
            .map(|row| row[c].unwrap_or(f64::NAN))
            .collect();
        for (sum, rank) in sums.iter_mut().zip(midranks(&column)) {
            *sum += rank;
        }
    }
    Ok(sums.into_iter().map(|s| s / n as f64).collect())
}

/// Critical values `q_α` for the Nemenyi test, `k = 2..=10`
/// (studentized range statistic divided by √2).
const Q_005: [f64; 9] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
];
const Q_010: [f64; 9] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
];

pub fn nemenyi_q(k_methods: usize, alpha: f64) -> Result<f64> {
    if !(2..=10).contains(&k_methods) {
        return Err(Error::param(format!(
            "Nemenyi table covers 2..=10 methods, got {k_methods}"
        )));
    }
    let table = if alpha == 0.05 {
        &Q_005
    } else if alpha == 0.10 {
        &Q_010
    } else {
        return Err(Error::param(format!("no Nemenyi table for alpha={alpha}")));
    };
    Ok(table[k_methods - 2])
}

/// Critical difference `q_α(k) · sqrt(k(k+1) / 6N)`.
pub fn nemenyi_cd(k_methods: usize, n_datasets: usize, alpha: f64) -> Result<f64> {
    let q = nemenyi_q(k_methods, alpha)?;
    if n_datasets == 0 {
        return Err(Error::param(
            "critical difference needs at least one dataset",
        ));
    }
    let k = k_methods as f64;
    Ok(q * (k * (k + 1.0) / (6.0 * n_datasets as f64)).sqrt())
}
