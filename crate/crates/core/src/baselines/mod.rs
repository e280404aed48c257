//! Reference detectors: DDM, EDDM and ADWIN monitor the errors of an
//! incremental Gaussian Naive Bayes classifier; CDDD watches chunk centroids.

pub mod adwin;
pub mod cddd;
pub mod ddm;
pub mod eddm;
pub mod gnb;
pub mod protocol;

pub use adwin::Adwin;
pub use cddd::Cddd;
pub use ddm::{Ddm, DdmParams};
pub use eddm::{Eddm, EddmParams};
pub use gnb::GaussianNb;
pub use protocol::{supervised_protocol, ProtocolOptions};

use std::borrow::Borrow;

use crate::chunk::Chunk;
use crate::detector::{UnsupervisedDetector, Verdict};
use crate::error::Result;

/// Run an unsupervised detector over a stream, returning detection chunks.
pub fn run_unsupervised<I, D>(stream: I, detector: &mut D) -> Result<Vec<usize>>
where
    I: IntoIterator,
    I::Item: Borrow<Chunk>,
    D: UnsupervisedDetector + ?Sized,
{
    let mut detections = Vec::new();
    for chunk in stream {
        let chunk = chunk.borrow();
        if detector.process(chunk.index, chunk.features.view())? == Verdict::Drift {
            detections.push(chunk.index);
        }
    }
    Ok(detections)
}
