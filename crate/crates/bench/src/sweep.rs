//! α/θ sensitivity sweep of PADD on the fixed-drift-count stream family.

use std::path::Path;

use log::info;
use ndarray::{Array1, Array2};
use padd_core::metrics::evaluate;
use padd_core::{PaddParams, PaddState};
use rayon::prelude::*;
use serde::Serialize;

use crate::benchmark::{with_pool, MEASURES};
use crate::config::{DetectorKind, ExperimentConfig, PaddOptions, StreamConfig};
use crate::error::{BenchError, Result};
use crate::output;
use crate::runner::{detector_seed, materialise};

pub const CELLS_FILE: &str = "sweep_cells.csv";
pub const NORMALIZED_FILE: &str = "sweep_normalized.csv";

/// Evenly spaced inclusive grid, rounded to 12 decimals so that the axis
/// labels print cleanly.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    Array1::linspace(start, end, n)
        .iter()
        .map(|v| (v * 1e12).round() / 1e12)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub n_drifts: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            alphas: linspace(0.03, 0.2, 15),
            thetas: linspace(0.1, 0.3, 10),
            n_drifts: 10,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("alphas", &self.alphas), ("thetas", &self.thetas)] {
            if grid.is_empty() {
                return Err(BenchError::config(format!("sweep.{name}"), "grid is empty"));
            }
            if !grid.windows(2).all(|w| w[0] < w[1]) {
                return Err(BenchError::config(
                    format!("sweep.{name}"),
                    "grid must be strictly increasing",
                ));
            }
        }
        if self.n_drifts == 0 {
            return Err(BenchError::config("sweep.n_drifts", "must be >= 1"));
        }
        Ok(())
    }
}

/// Replication-averaged measures of one (α, θ) cell; `None` when any
/// replication is undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CellMetrics {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub r: Option<f64>,
}

impl CellMetrics {
    pub fn measure(&self, name: &str) -> Option<f64> {
        match name {
            "d1" => self.d1,
            "d2" => self.d2,
            "r" => self.r,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFamily {
    pub config: StreamConfig,
    /// `cells[i][j]` for `alphas[i]`, `thetas[j]`.
    pub cells: Vec<Vec<CellMetrics>>,
}

impl SweepFamily {
    /// e.g. `sudden-f30`
    pub fn id(&self) -> String {
        format!("{}-f{}", self.config.dynamics, self.config.n_features)
    }

    /// Min-max normalised matrix of one measure. Undefined cells stay
    /// undefined; a constant matrix maps to zeros.
    pub fn normalized(&self, measure: &str) -> Vec<Vec<Option<f64>>> {
        let values = self
            .cells
            .iter()
            .flatten()
            .filter_map(|c| c.measure(measure));
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        self.cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        c.measure(measure)
                            .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub spec: SweepSpec,
    pub families: Vec<SweepFamily>,
}

/// (d1, d2, r) of one replication.
type RunMeasures = (Option<f64>, Option<f64>, Option<f64>);

fn padd_options(config: &ExperimentConfig) -> PaddOptions {
    config
        .detectors
        .iter()
        .find_map(|e| match &e.kind {
            DetectorKind::Padd(o) => Some(o.clone()),
            _ => None,
        })
        .unwrap_or_default()
}

fn sweep_replication(
    config: &ExperimentConfig,
    spec: &SweepSpec,
    options: &PaddOptions,
    family: &StreamConfig,
    replication: usize,
) -> Result<Vec<RunMeasures>> {
    let run = materialise(&config.streams, config.base_seed, family, replication)?;
    let seed = detector_seed(config.base_seed, "padd", family, replication);
    let base = options.params(family.dynamics);
    // the network does not depend on α or θ, so activations are shared
    let net = PaddState::new(base, family.n_features, seed)?
        .network()
        .clone();
    let activations: Vec<Array2<f64>> = run
        .chunks
        .iter()
        .map(|c| net.forward(c.features.view()))
        .collect::<padd_core::Result<_>>()?;
    let cells: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.thetas.iter().map(move |&t| (a, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(alpha, theta)| {
            let params = PaddParams {
                alpha,
                theta,
                ..base
            };
            let mut state = PaddState::new(params, family.n_features, seed)?;
            for (chunk, act) in run.chunks.iter().zip(&activations) {
                state.process_activations(chunk.index, act.view())?;
            }
            let m = evaluate(state.detections(), &run.schedule.centers)?;
            Ok((m.d1, m.d2, m.r_err))
        })
        .collect()
}

fn strict_mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0;
    for v in values {
        sum += v?;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Run the sweep over every (dynamics, feature count) of the grid at the
/// sweep's drift count.
pub fn run_sweep(spec: &SweepSpec, config: &ExperimentConfig) -> Result<SweepResults> {
    spec.validate()?;
    config.validate()?;
    let options = padd_options(config);
    let mut families = Vec::new();
    for &dynamics in &config.streams.dynamics {
        for &n_features in &config.streams.n_features {
            families.push(StreamConfig {
                dynamics,
                n_drifts: spec.n_drifts,
                n_features,
            });
        }
    }
    let tasks: Vec<(StreamConfig, usize)> = families
        .iter()
        .flat_map(|f| (0..config.streams.replications).map(move |rep| (*f, rep)))
        .collect();
    info!(
        "sweep: {} streams x {} cells",
        tasks.len(),
        spec.alphas.len() * spec.thetas.len()
    );
    let runs: Vec<_> = with_pool(config.jobs, || {
        tasks
            .par_iter()
            .map(|(f, rep)| sweep_replication(config, spec, &options, f, *rep))
            .collect::<Result<Vec<_>>>()
    })??;

    let n_theta = spec.thetas.len();
    let reps = config.streams.replications;
    let families = families
        .iter()
        .enumerate()
        .map(|(fi, family)| {
            let per_rep = &runs[fi * reps..(fi + 1) * reps];
            let by_cell: Vec<Vec<RunMeasures>> = (0..spec.alphas.len() * n_theta)
                .map(|c| per_rep.iter().map(|r| r[c]).collect())
                .collect();
            let cells = by_cell
                .chunks(n_theta)
                .map(|row| {
                    row.iter()
                        .map(|runs| CellMetrics {
                            d1: strict_mean(runs.iter().map(|r| r.0)),
                            d2: strict_mean(runs.iter().map(|r| r.1)),
                            r: strict_mean(runs.iter().map(|r| r.2)),
                        })
                        .collect()
                })
                .collect();
            SweepFamily {
                config: *family,
                cells,
            }
        })
        .collect();
    Ok(SweepResults {
        spec: spec.clone(),
        families,
    })
}

fn cell_text(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_matrix(path: &Path, spec: &SweepSpec, matrix: &[Vec<Option<f64>>]) -> Result<()> {
    let mut text = String::from("alpha\\theta");
    for t in &spec.thetas {
        text.push_str(&format!(",{t}"));
    }
    text.push('\n');
    for (a, row) in spec.alphas.iter().zip(matrix) {
        text.push_str(&a.to_string());
        for v in row {
            text.push(',');
            text.push_str(&cell_text(*v));
        }
        text.push('\n');
    }
    output::write_text(path, &text)
}

#[derive(Serialize)]
struct LongRow<'a> {
    family: &'a str,
    measure: &'a str,
    alpha: f64,
    theta: f64,
    value: Option<f64>,
}

#[derive(Serialize)]
struct CellRow<'a> {
    family: &'a str,
    alpha: f64,
    theta: f64,
    d1: Option<f64>,
    d2: Option<f64>,
    r: Option<f64>,
}

/// Matrix file name of one family and measure, e.g. `sweep_sudden-f30_d1.csv`.
pub fn matrix_file(family: &SweepFamily, measure: &str) -> String {
    format!("sweep_{}_{measure}.csv", family.id())
}

/// Per-measure matrices, the long-form cell table and the normalised table.
pub fn write_sweep(dir: &Path, results: &SweepResults) -> Result<()> {
    output::create_dir(dir)?;
    let spec = &results.spec;
    let mut cells = Vec::new();
    let mut normalized = Vec::new();
    let ids: Vec<String> = results.families.iter().map(SweepFamily::id).collect();
    for (family, id) in results.families.iter().zip(&ids) {
        for measure in MEASURES {
            let raw: Vec<Vec<Option<f64>>> = family
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.measure(measure)).collect())
                .collect();
            write_matrix(&dir.join(matrix_file(family, measure)), spec, &raw)?;
            for (i, row) in family.normalized(measure).into_iter().enumerate() {
                for (j, value) in row.into_iter().enumerate() {
                    normalized.push(LongRow {
                        family: id,
                        measure,
                        alpha: spec.alphas[i],
                        theta: spec.thetas[j],
                        value,
                    });
                }
            }
        }
        for (i, row) in family.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                cells.push(CellRow {
                    family: id,
                    alpha: spec.alphas[i],
                    theta: spec.thetas[j],
                    d1: c.d1,
                    d2: c.d2,
                    r: c.r,
                });
            }
        }
    }
    output::write_csv(
        &dir.join(CELLS_FILE),
        &["family", "alpha", "theta", "d1", "d2", "r"],
        &cells,
    )?;
    output::write_csv(
        &dir.join(NORMALIZED_FILE),
        &["family", "measure", "alpha", "theta", "value"],
        &normalized,
    )
}
