//! The benchmark grid: every (stream family, replication, detector), scored
//! against the ground-truth schedule and ranked per measure.

use std::collections::HashMap;
use std::path::Path;

use log::{info, warn};
use padd_core::metrics::{evaluate, mean_ranks, nemenyi_cd, ErrorTable};
use padd_core::stats::wilcoxon_signed_rank;
use padd_core::Dynamics;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, StreamConfig};
use crate::error::{BenchError, Result};
use crate::output;
use crate::runner::{materialise, run_detector};

pub const DETECTIONS_FILE: &str = "detections.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const RANKS_FILE: &str = "ranks.csv";
pub const PAIRWISE_FILE: &str = "pairwise.csv";

pub const DETECTIONS_HEADER: [&str; 4] = ["detector", "stream_id", "replication", "chunk"];
pub const METRICS_HEADER: [&str; 8] = [
    "dynamics",
    "n_drifts",
    "n_features",
    "detector",
    "replication",
    "d1",
    "d2",
    "r",
];
pub const RANKS_HEADER: [&str; 3] = ["measure", "method", "mean_rank"];
pub const PAIRWISE_HEADER: [&str; 6] = ["measure", "method_a", "method_b", "n", "w_plus", "p"];

/// Method name used for the Nemenyi critical difference in the ranks file.
pub const CD_ROW: &str = "critical_difference";
pub const CD_ALPHA: f64 = 0.05;
pub const MEASURES: [&str; 3] = ["d1", "d2", "r"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub detector: String,
    pub stream_id: String,
    pub replication: usize,
    pub chunk: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub dynamics: Dynamics,
    pub n_drifts: usize,
    pub n_features: usize,
    pub detector: String,
    pub replication: usize,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub r: Option<f64>,
}

impl MetricsRow {
    pub fn config(&self) -> StreamConfig {
        StreamConfig {
            dynamics: self.dynamics,
            n_drifts: self.n_drifts,
            n_features: self.n_features,
        }
    }

    pub fn measure(&self, name: &str) -> Option<f64> {
        match name {
            "d1" => self.d1,
            "d2" => self.d2,
            "r" => self.r,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub measure: String,
    pub method: String,
    /// Empty for methods excluded because of undefined cells.
    pub mean_rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRow {
    pub measure: String,
    pub method_a: String,
    pub method_b: String,
    pub n: usize,
    pub w_plus: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkResults {
    pub detections: Vec<DetectionRow>,
    pub metrics: Vec<MetricsRow>,
    pub ranks: Vec<RankRow>,
    pub pairwise: Vec<PairwiseRow>,
}

/// Run `f` on a pool of `jobs` threads (all cores when `None`).
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::config("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

struct Outcome {
    label: String,
    detections: Vec<usize>,
    metrics: MetricsRow,
}

fn run_task(config: &ExperimentConfig, family: &StreamConfig, replication: usize) -> Vec<Outcome> {
    let run = match materialise(&config.streams, config.base_seed, family, replication) {
        Ok(run) => run,
        Err(e) => {
            warn!(
                "{} rep {replication}: stream generation failed: {e}",
                family.stream_id()
            );
            return Vec::new();
        }
    };
    config
        .detectors
        .par_iter()
        .filter_map(|entry| {
            let scored = run_detector(entry, &run, config.base_seed)
                .and_then(|det| evaluate(&det, &run.schedule.centers).map(|m| (det, m)));
            match scored {
                Ok((detections, m)) => Some(Outcome {
                    label: entry.label.clone(),
                    detections,
                    metrics: MetricsRow {
                        dynamics: family.dynamics,
                        n_drifts: family.n_drifts,
                        n_features: family.n_features,
                        detector: entry.label.clone(),
                        replication,
                        d1: m.d1,
                        d2: m.d2,
                        r: m.r_err,
                    },
                }),
                Err(e) => {
                    warn!(
                        "{} on {} rep {replication} failed: {e}",
                        entry.label,
                        family.stream_id()
                    );
                    None
                }
            }
        })
        .collect()
}

/// Run the whole grid. Row order is fixed (grid order, replication, roster
/// order, chunk) whatever the thread count.
pub fn run_benchmark(config: &ExperimentConfig) -> Result<BenchmarkResults> {
    config.validate()?;
    let families = config.streams.configs();
    let tasks: Vec<(StreamConfig, usize)> = families
        .iter()
        .flat_map(|f| (0..config.streams.replications).map(move |rep| (*f, rep)))
        .collect();
    info!(
        "{} streams x {} detectors",
        tasks.len(),
        config.detectors.len()
    );
    let outcomes: Vec<Vec<Outcome>> = with_pool(config.jobs, || {
        tasks
            .par_iter()
            .map(|(family, rep)| run_task(config, family, *rep))
            .collect()
    })?;

    let mut results = BenchmarkResults::default();
    for ((family, rep), outcome) in tasks.iter().zip(outcomes) {
        let stream_id = family.stream_id();
        for o in outcome {
            results
                .detections
                .extend(o.detections.iter().map(|&chunk| DetectionRow {
                    detector: o.label.clone(),
                    stream_id: stream_id.clone(),
                    replication: *rep,
                    chunk,
                }));
            results.metrics.push(o.metrics);
        }
    }
    let (ranks, pairwise) = rank_metrics(&results.metrics)?;
    results.ranks = ranks;
    results.pairwise = pairwise;
    Ok(results)
}

/// Per-configuration error table for one measure: the mean over
/// replications, or undefined when any replication is undefined or missing.
pub fn error_table(rows: &[MetricsRow], measure: &str) -> Result<ErrorTable> {
    let mut methods: Vec<String> = Vec::new();
    let mut configs: Vec<StreamConfig> = Vec::new();
    let mut cells: HashMap<(String, StreamConfig), (f64, usize, bool)> = HashMap::new();
    for row in rows {
        if !methods.contains(&row.detector) {
            methods.push(row.detector.clone());
        }
        let config = row.config();
        if !configs.contains(&config) {
            configs.push(config);
        }
        let cell = cells
            .entry((row.detector.clone(), config))
            .or_insert((0.0, 0, true));
        match row.measure(measure) {
            Some(v) => {
                cell.0 += v;
                cell.1 += 1;
            }
            None => cell.2 = false,
        }
    }
    let values = methods
        .iter()
        .map(|m| {
            configs
                .iter()
                .map(|c| match cells.get(&(m.clone(), *c)) {
                    Some(&(sum, n, true)) if n > 0 => Some(sum / n as f64),
                    _ => None,
                })
                .collect()
        })
        .collect();
    Ok(ErrorTable::new(methods, values)?)
}

/// Mean ranks and the critical difference per measure, plus pairwise
/// signed-rank tests between the ranked methods when there are at least
/// five configurations.
pub fn rank_metrics(rows: &[MetricsRow]) -> Result<(Vec<RankRow>, Vec<PairwiseRow>)> {
    let mut ranks = Vec::new();
    let mut pairwise = Vec::new();
    if rows.is_empty() {
        return Ok((ranks, pairwise));
    }
    for measure in MEASURES {
        let table = error_table(rows, measure)?;
        let (kept, excluded) = table.exclude_undefined();
        let mean = if kept.methods.is_empty() {
            Vec::new()
        } else {
            mean_ranks(&kept)?
        };
        for method in &table.methods {
            let mean_rank = kept
                .methods
                .iter()
                .position(|m| m == method)
                .map(|i| mean[i]);
            ranks.push(RankRow {
                measure: measure.to_string(),
                method: method.clone(),
                mean_rank,
            });
        }
        if !excluded.is_empty() {
            info!(
                "{measure}: excluded for undefined cells: {}",
                excluded.join(", ")
            );
        }
        let cd = nemenyi_cd(kept.methods.len(), kept.n_configs(), CD_ALPHA).ok();
        ranks.push(RankRow {
            measure: measure.to_string(),
            method: CD_ROW.to_string(),
            mean_rank: cd,
        });
        if kept.n_configs() >= 5 {
            for a in 0..kept.methods.len() {
                for b in a + 1..kept.methods.len() {
                    let x: Vec<f64> = kept.values[a].iter().flatten().copied().collect();
                    let y: Vec<f64> = kept.values[b].iter().flatten().copied().collect();
                    let w = wilcoxon_signed_rank(&x, &y)?;
                    pairwise.push(PairwiseRow {
                        measure: measure.to_string(),
                        method_a: kept.methods[a].clone(),
                        method_b: kept.methods[b].clone(),
                        n: w.n,
                        w_plus: w.w_plus,
                        p: w.p,
                    });
                }
            }
        }
    }
    Ok((ranks, pairwise))
}

pub fn write_ranks(dir: &Path, ranks: &[RankRow], pairwise: &[PairwiseRow]) -> Result<()> {
    output::write_csv(&dir.join(RANKS_FILE), &RANKS_HEADER, ranks)?;
    output::write_csv(&dir.join(PAIRWISE_FILE), &PAIRWISE_HEADER, pairwise)
}

/// Write the detections, metrics, ranks and pairwise files into `dir`.
pub fn write_results(dir: &Path, results: &BenchmarkResults) -> Result<()> {
    output::create_dir(dir)?;
    output::write_csv(
        &dir.join(DETECTIONS_FILE),
        &DETECTIONS_HEADER,
        &results.detections,
    )?;
    output::write_csv(&dir.join(METRICS_FILE), &METRICS_HEADER, &results.metrics)?;
    write_ranks(dir, &results.ranks, &results.pairwise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_roster, StreamGrid};

    fn row(detector: &str, n_features: usize, replication: usize, d1: Option<f64>) -> MetricsRow {
        MetricsRow {
            dynamics: Dynamics::Sudden,
            n_drifts: 3,
            n_features,
            detector: detector.into(),
            replication,
            d1,
            d2: d1,
            r: d1,
        }
    }

    #[test]
    fn table_averages_replications_and_blanks_undefined() {
        let rows = vec![
            row("a", 30, 0, Some(1.0)),
            row("a", 30, 1, Some(3.0)),
            row("b", 30, 0, Some(5.0)),
            row("b", 30, 1, None),
            row("a", 60, 0, Some(4.0)),
        ];
        let t = error_table(&rows, "d1").unwrap();
        assert_eq!(t.methods, vec!["a", "b"]);
        assert_eq!(t.values[0], vec![Some(2.0), Some(4.0)]);
        assert_eq!(t.values[1], vec![None, None]);
    }

    #[test]
    fn excluded_methods_keep_an_empty_rank() {
        let rows = vec![
            row("a", 30, 0, Some(1.0)),
            row("b", 30, 0, Some(2.0)),
            row("c", 30, 0, None),
            row("a", 60, 0, Some(3.0)),
            row("b", 60, 0, Some(2.0)),
            row("c", 60, 0, Some(0.0)),
        ];
        let (ranks, pairwise) = rank_metrics(&rows).unwrap();
        let d1: Vec<_> = ranks.iter().filter(|r| r.measure == "d1").collect();
        assert_eq!(d1.len(), 4);
        assert_eq!(d1[0].mean_rank, Some(1.5));
        assert_eq!(d1[1].mean_rank, Some(1.5));
        assert_eq!(d1[2].mean_rank, None);
        assert_eq!(d1[3].method, CD_ROW);
        let cd = d1[3].mean_rank.unwrap();
        assert!((cd - 1.960 * (2.0 * 3.0 / 12.0f64).sqrt()).abs() < 1e-12);
        assert!(pairwise.is_empty());
    }

    #[test]
    fn small_grid_is_deterministic_across_pools() {
        let mut config = ExperimentConfig::new(17);
        config.streams = StreamGrid {
            dynamics: vec![Dynamics::Sudden],
            n_drifts: vec![3],
            n_features: vec![30],
            replications: 2,
            n_chunks: 40,
            ..StreamGrid::default()
        };
        config.jobs = Some(1);
        let a = run_benchmark(&config).unwrap();
        config.jobs = Some(4);
        let b = run_benchmark(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.metrics.len(), 2 * default_roster().len());
        let order: Vec<_> = a
            .metrics
            .iter()
            .map(|m| (m.replication, m.detector.as_str()))
            .collect();
        assert_eq!(order[0], (0, "padd"));
        assert_eq!(order[5], (1, "padd"));
    }

    #[test]
    fn zero_replications_give_empty_results() {
        let mut config = ExperimentConfig::new(1);
        config.streams.replications = 0;
        let r = run_benchmark(&config).unwrap();
        assert_eq!(r, BenchmarkResults::default());
    }
}
