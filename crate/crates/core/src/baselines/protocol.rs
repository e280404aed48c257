//! Test-then-train chunk protocol for the supervised detectors.

use std::borrow::Borrow;

use crate::baselines::gnb::GaussianNb;
use crate::chunk::Chunk;
use crate::detector::{ErrorMonitor, Verdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolOptions {
    /// Rebuild the classifier from the current chunk after a detection.
    pub reset_classifier_on_drift: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            reset_classifier_on_drift: true,
        }
    }
}

/// Chunk containing global sample `sample_index`.
pub fn sample_to_chunk(sample_index: usize, chunk_size: usize) -> usize {
    sample_index / chunk_size
}

/// Chunk 0 only trains the classifier. Every later chunk is first predicted,
/// its per-sample errors are fed to `monitor` in sample order, and then the
/// classifier learns the chunk. Several firings inside one chunk count as a
/// single detection of that chunk.
pub fn supervised_protocol<I, M>(
    stream: I,
    monitor: &mut M,
    options: ProtocolOptions,
) -> Result<Vec<usize>>
where
    I: IntoIterator,
    I::Item: Borrow<Chunk>,
    M: ErrorMonitor + ?Sized,
{
    let mut classifier = GaussianNb::new();
    let mut detections: Vec<usize> = Vec::new();
    let mut chunk_size = None;
    let mut offset = 0usize;
    for (position, chunk) in stream.into_iter().enumerate() {
        let chunk = chunk.borrow();
        let size = *chunk_size.get_or_insert(chunk.n_samples());
        if chunk.n_samples() != size || size == 0 {
            return Err(Error::param(format!(
                "chunk {} has {} samples, expected {size}",
                chunk.index,
                chunk.n_samples()
            )));
        }
        let mut fired = false;
        if position > 0 {
            let predicted = classifier.predict(chunk.features.view())?;
            for (j, (p, y)) in predicted.iter().zip(&chunk.labels).enumerate() {
                let error = if p == y { 0.0 } else { 1.0 };
                if monitor.update(error)? == Verdict::Drift {
                    fired = true;
                    let at = sample_to_chunk(offset + j, size);
                    if detections.last() != Some(&at) {
                        detections.push(at);
                    }
                }
            }
        }
        if fired && options.reset_classifier_on_drift {
            classifier = GaussianNb::new();
        }
        classifier.partial_fit(chunk.features.view(), &chunk.labels)?;
        offset += size;
    }
    Ok(detections)
}
