//! Seed derivation and single-detector execution.

use padd_core::baselines::{run_unsupervised, supervised_protocol, Adwin, Cddd, Ddm, Eddm};
use padd_core::rng::derive_seed;
use padd_core::{generate_stream, padd_run, Chunk, DriftSchedule, Result as CoreResult};

use crate::config::{DetectorEntry, DetectorKind, StreamConfig, StreamGrid};

/// Seed of replication `replication` of a stream family. Independent of the
/// roster and of the rest of the grid.
pub fn stream_seed(base_seed: u64, config: &StreamConfig, replication: usize) -> u64 {
    derive_seed(
        base_seed,
        &format!("stream/{}", config.stream_id()),
        replication as u64,
    )
}

/// Seed handed to a detector for one (stream, replication).
pub fn detector_seed(
    base_seed: u64,
    label: &str,
    config: &StreamConfig,
    replication: usize,
) -> u64 {
    derive_seed(
        base_seed,
        &format!("detector/{label}/{}", config.stream_id()),
        replication as u64,
    )
}

/// Materialised stream of one (family, replication).
pub struct StreamRun {
    pub config: StreamConfig,
    pub replication: usize,
    pub schedule: DriftSchedule,
    pub chunks: Vec<Chunk>,
}

pub fn materialise(
    grid: &StreamGrid,
    base_seed: u64,
    config: &StreamConfig,
    replication: usize,
) -> CoreResult<StreamRun> {
    let spec = grid.spec(config, stream_seed(base_seed, config, replication));
    let stream = generate_stream(&spec)?;
    let schedule = stream.schedule().clone();
    Ok(StreamRun {
        config: *config,
        replication,
        schedule,
        chunks: stream.collect(),
    })
}

/// Detection chunk indices of one roster entry on one stream.
pub fn run_detector(
    entry: &DetectorEntry,
    run: &StreamRun,
    base_seed: u64,
) -> CoreResult<Vec<usize>> {
    let config = &run.config;
    let chunks = run.chunks.iter();
    match &entry.kind {
        DetectorKind::Padd(o) => {
            let seed = detector_seed(base_seed, &entry.label, config, run.replication);
            padd_run(o.params(config.dynamics), chunks, seed)
        }
        DetectorKind::Ddm(o) => {
            let mut ddm = Ddm::new(o.params());
            supervised_protocol(chunks, &mut ddm, entry.kind.protocol_options())
        }
        DetectorKind::Eddm(o) => {
            let mut eddm = Eddm::new(o.params());
            supervised_protocol(chunks, &mut eddm, entry.kind.protocol_options())
        }
        DetectorKind::Adwin(o) => {
            let mut adwin = Adwin::new(o.delta)?;
            supervised_protocol(chunks, &mut adwin, entry.kind.protocol_options())
        }
        DetectorKind::Cddd(o) => {
            let mut cddd = Cddd::new(o.sensitivity(config.n_drifts))?;
            run_unsupervised(chunks, &mut cddd)
        }
    }
}
