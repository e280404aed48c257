//! Centroid distance drift detector.
//!
//! Tracks the Euclidean distance between consecutive chunk centroids. Once
//! at least three distances have been observed since the last reset, a
//! chunk whose distance exceeds `(1 + sensitivity)` times their mean is a
//! drift. The triggering distance is not added to the new statistics.

use ndarray::{ArrayView2, Axis};

use crate::detector::{UnsupervisedDetector, Verdict};
use crate::error::{Error, Result};

pub const WARM_UP_DISTANCES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Cddd {
    sensitivity: f64,
    previous: Option<Vec<f64>>,
    n_distances: usize,
    distance_sum: f64,
}

impl Cddd {
    pub fn new(sensitivity: f64) -> Result<Self> {
        if !(sensitivity >= 0.0) || !sensitivity.is_finite() {
            return Err(Error::param(format!(
                "sensitivity must be >= 0, got {sensitivity}"
            )));
        }
        Ok(Self {
            sensitivity,
            previous: None,
            n_distances: 0,
            distance_sum: 0.0,
        })
    }

    /// Sparse-drift setting (0.2) below ten drifts per stream, dense (0.9) otherwise.
    pub fn sensitivity_for(n_drifts: usize) -> f64 {
        if n_drifts >= 10 {
            0.9
        } else {
            0.2
        }
    }

    pub fn mean_distance(&self) -> Option<f64> {
        (self.n_distances > 0).then(|| self.distance_sum / self.n_distances as f64)
    }
}

pub fn centroid(features: ArrayView2<'_, f64>) -> Vec<f64> {
    features
        .mean_axis(Axis(0))
        .map(|m| m.to_vec())
        .unwrap_or_default()
}

impl UnsupervisedDetector for Cddd {
    fn process(&mut self, _index: usize, features: ArrayView2<'_, f64>) -> Result<Verdict> {
        if features.nrows() == 0 {
            return Err(Error::param("CDDD received an empty chunk"));
        }
        let current = centroid(features);
        let mut verdict = Verdict::Stable;
        if let Some(previous) = &self.previous {
            if previous.len() != current.len() {
                return Err(Error::Shape {
                    expected: previous.len(),
                    got: current.len(),
                });
            }
            let distance = previous
                .iter()
                .zip(&current)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let fired = self.n_distances >= WARM_UP_DISTANCES
                && distance > (1.0 + self.sensitivity) * self.mean_distance().unwrap_or(0.0);
            if fired {
                self.n_distances = 0;
                self.distance_sum = 0.0;
                verdict = Verdict::Drift;
            } else {
                self.n_distances += 1;
                self.distance_sum += distance;
            }
        }
        self.previous = Some(current);
        Ok(verdict)
    }
}
