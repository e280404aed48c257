use ndarray::ArrayView2;

use crate::error::Result;

/// Per-step detector output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Stable,
    Warning,
    Drift,
}

impl Verdict {
    pub fn is_drift(self) -> bool {
        self == Verdict::Drift
    }
}

/// A chunk-level detector that only ever sees the feature matrix.
pub trait UnsupervisedDetector {
    fn process(&mut self, index: usize, features: ArrayView2<'_, f64>) -> Result<Verdict>;
}

/// A sample-level detector fed with one monitored value at a time
/// (typically a classifier's 0/1 error indicator).
pub trait ErrorMonitor {
    fn update(&mut self, value: f64) -> Result<Verdict>;
    fn reset(&mut self);
}
