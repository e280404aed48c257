//! `drift-bench` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use padd_core::metrics::evaluate;
use padd_core::stream::{write_chunks_csv, ScheduleSidecar};

use crate::benchmark::{self, run_benchmark, write_results, MetricsRow, RankRow};
use crate::config::{parse_config, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::output;
use crate::runner::materialise;
use crate::sweep::{linspace, run_sweep, write_sweep, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "drift-bench",
    version,
    about = "Drift detector benchmark harness"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment config
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base seed (overrides the config)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (overrides the config)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (overrides the config)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every stream of the grid as CSV plus a schedule sidecar
    Generate {
        #[command(flatten)]
        common: Common,
        /// Only this stream family, e.g. sudden-d10-f30
        #[arg(long)]
        stream: Option<String>,
    },
    /// Run the detector roster over the stream grid
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// α/θ sweep of PADD on the 10-drift families
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Number of α values in [0.03, 0.2]
        #[arg(long, default_value_t = 15)]
        alpha_steps: usize,
        /// Number of θ values in [0.1, 0.3]
        #[arg(long, default_value_t = 10)]
        theta_steps: usize,
    },
    /// Score a detections file against a schedule sidecar
    Evaluate {
        /// CSV with a `chunk` column and an optional `detector` column
        #[arg(long)]
        detections: PathBuf,
        /// Schedule JSON: {"centers": [...], "dynamics": "..."}
        #[arg(long)]
        schedule: PathBuf,
        /// Write here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean ranks and Nemenyi critical difference from a metrics CSV
    Ranks {
        #[arg(long)]
        metrics: PathBuf,
        /// Directory for ranks.csv and pairwise.csv; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match (&common.config, common.seed) {
        (Some(path), _) => parse_config(&output::read_text(path)?).map_err(|e| match e {
            BenchError::Config { path: p, message } => {
                BenchError::config(format!("{}: {p}", path.display()), message)
            }
            other => other,
        })?,
        (None, Some(seed)) => ExperimentConfig::new(seed),
        (None, None) => {
            return Err(BenchError::config(
                "--seed",
                "either --config or --seed is required",
            ))
        }
    };
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if common.jobs.is_some() {
        config.jobs = common.jobs;
    }
    config.validate()?;
    Ok(config)
}

fn generate(config: &ExperimentConfig, only: Option<&str>) -> Result<()> {
    let dir = &config.output_dir;
    output::create_dir(dir)?;
    let families: Vec<_> = config
        .streams
        .configs()
        .into_iter()
        .filter(|c| only.is_none_or(|id| c.stream_id() == id))
        .collect();
    if let (Some(id), true) = (only, families.is_empty()) {
        return Err(BenchError::config(
            "--stream",
            format!("`{id}` is not in the grid"),
        ));
    }
    for family in families {
        for rep in 0..config.streams.replications {
            let run = materialise(&config.streams, config.base_seed, &family, rep)?;
            let stem = format!("{}_r{rep}", family.stream_id());
            let path = dir.join(format!("{stem}.csv"));
            let file = File::create(&path).map_err(|e| BenchError::io(&path, e))?;
            let mut w = BufWriter::new(file);
            write_chunks_csv(&mut w, family.n_features, run.chunks)
                .and_then(|_| w.flush())
                .map_err(|e| BenchError::io(&path, e))?;
            let json = serde_json::to_string(&run.schedule.sidecar()).expect("schedule serializes");
            output::write_text(&dir.join(format!("{stem}.schedule.json")), &(json + "\n"))?;
        }
    }
    Ok(())
}

fn read_detections(path: &Path) -> Result<BTreeMap<(usize, String), Vec<usize>>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| BenchError::input(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| BenchError::input(path, e))?
        .clone();
    let chunk_col = headers
        .iter()
        .position(|h| h == "chunk")
        .ok_or_else(|| BenchError::input(path, "missing `chunk` column"))?;
    let detector_col = headers.iter().position(|h| h == "detector");
    // keyed by first appearance so output follows input order
    let mut groups: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::input(path, e))?;
        let name = detector_col
            .map_or("detections", |c| &record[c])
            .to_string();
        let chunk: usize = record[chunk_col]
            .trim()
            .parse()
            .map_err(|e| BenchError::input(path, format!("record {}: chunk: {e}", i + 1)))?;
        let pos = match order.iter().position(|n| *n == name) {
            Some(p) => p,
            None => {
                order.push(name.clone());
                order.len() - 1
            }
        };
        groups.entry((pos, name)).or_default().push(chunk);
    }
    Ok(groups)
}

fn evaluate_files(detections: &Path, schedule: &Path) -> Result<String> {
    let sidecar: ScheduleSidecar = serde_json::from_str(&output::read_text(schedule)?)
        .map_err(|e| BenchError::input(schedule, e))?;
    let mut text = String::from("detector,n_detections,d1,d2,r\n");
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for ((_, name), mut chunks) in read_detections(detections)? {
        chunks.sort_unstable();
        chunks.dedup();
        let m = evaluate(&chunks, &sidecar.centers).map_err(|e| BenchError::input(schedule, e))?;
        text.push_str(&format!(
            "{name},{},{},{},{}\n",
            chunks.len(),
            fmt(m.d1),
            fmt(m.d2),
            fmt(m.r_err)
        ));
    }
    Ok(text)
}

fn ranks_text(ranks: &[RankRow]) -> String {
    let mut text = benchmark::RANKS_HEADER.join(",") + "\n";
    for r in ranks {
        let v = r.mean_rank.map(|x| x.to_string()).unwrap_or_default();
        text.push_str(&format!("{},{},{v}\n", r.measure, r.method));
    }
    text
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, stream } => {
            let config = resolve(&common)?;
            generate(&config, stream.as_deref())
        }
        Command::Run { common } => {
            let config = resolve(&common)?;
            let results = run_benchmark(&config)?;
            write_results(&config.output_dir, &results)?;
            output::write_text(
                &config.output_dir.join("config.json"),
                &(config.to_json() + "\n"),
            )?;
            info!("wrote results to {}", config.output_dir.display());
            Ok(())
        }
        Command::Sweep {
            common,
            alpha_steps,
            theta_steps,
        } => {
            let config = resolve(&common)?;
            let defaults = SweepSpec::default();
            let spec = SweepSpec {
                alphas: linspace(
                    defaults.alphas[0],
                    defaults.alphas[defaults.alphas.len() - 1],
                    alpha_steps,
                ),
                thetas: linspace(
                    defaults.thetas[0],
                    defaults.thetas[defaults.thetas.len() - 1],
                    theta_steps,
                ),
                ..defaults
            };
            let results = run_sweep(&spec, &config)?;
            write_sweep(&config.output_dir, &results)
        }
        Command::Evaluate {
            detections,
            schedule,
            out,
        } => {
            let text = evaluate_files(&detections, &schedule)?;
            match out {
                Some(path) => output::write_text(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Ranks { metrics, out } => {
            let rows: Vec<MetricsRow> = output::read_csv(&metrics)?;
            let (ranks, pairwise) = benchmark::rank_metrics(&rows)?;
            match out {
                Some(dir) => {
                    output::create_dir(&dir)?;
                    benchmark::write_ranks(&dir, &ranks, &pairwise)
                }
                None => {
                    print!("{}", ranks_text(&ranks));
                    Ok(())
                }
            }
        }
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
