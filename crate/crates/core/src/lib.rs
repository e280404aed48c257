//! Unsupervised concept drift detection on the parallel activations of a
//! frozen random neural network (PADD), plus everything needed to benchmark
//! it: a synthetic drifting-stream generator, supervised and unsupervised
//! reference detectors, drift-detection error measures and the statistical
//! kernels underneath.

pub mod baselines;
pub mod chunk;
pub mod detector;
pub mod error;
pub mod metrics;
pub mod padd;
pub mod projector;
pub mod rng;
pub mod stats;
pub mod stream;

pub use chunk::Chunk;
pub use detector::{ErrorMonitor, UnsupervisedDetector, Verdict};
pub use error::{Error, Result};
pub use padd::{padd_process_chunk, padd_run, PaddParams, PaddState};
pub use projector::{init_network, RandomMlp};
pub use rng::Rng;
pub use stream::{build_schedule, generate_stream, DriftSchedule, Dynamics, StreamSpec};
