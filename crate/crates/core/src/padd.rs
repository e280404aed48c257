//! Parallel Activations Drift Detector.
//!
//! Every chunk is pushed through a frozen random network. The activations of
//! each output are compared against all activations stored since the last
//! detection: `r` times per output, `s` values are drawn with replacement
//! from both pools and a pooled t-test is run. When the number of
//! significant tests exceeds `θ·e·r`, drift is signalled and the history is
//! cleared. The current chunk's activations are appended afterwards in every
//! case, so the chunk that triggered a detection seeds the new history.
//!
//! Memory: the history is unbounded between detections. A 250-chunk stream
//! of 200 samples without any detection stores `250 × 200 × e` values.

use std::borrow::Borrow;

use ndarray::ArrayView2;

use crate::chunk::Chunk;
use crate::detector::{UnsupervisedDetector, Verdict};
use crate::error::{Error, Result};
use crate::projector::{init_network, RandomMlp};
use crate::rng::{fill_with_replacement, Rng};
use crate::stats::pooled_t_test;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaddParams {
    /// Significance level of each t-test.
    pub alpha: f64,
    /// Fraction of the `e·r` tests that must be significant.
    pub theta: f64,
    /// Network outputs.
    pub e: usize,
    /// Test replications per output.
    pub r: usize,
    /// Values drawn from each pool per test.
    pub s: usize,
    pub n_hidden: usize,
}

impl Default for PaddParams {
    fn default() -> Self {
        Self::sudden()
    }
}

impl PaddParams {
    pub fn sudden() -> Self {
        Self::with_sensitivity(0.07, 0.19)
    }

    pub fn gradual() -> Self {
        Self::with_sensitivity(0.13, 0.26)
    }

    pub fn with_sensitivity(alpha: f64, theta: f64) -> Self {
        Self {
            alpha,
            theta,
            e: 12,
            r: 12,
            s: 50,
            n_hidden: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::param(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if self.e == 0 || self.r == 0 || self.n_hidden == 0 {
            return Err(Error::param("e, r and n_hidden must be >= 1"));
        }
        if self.s < 2 {
            return Err(Error::param(format!(
                "sample size must be >= 2, got {}",
                self.s
            )));
        }
        Ok(())
    }

    pub fn total_tests(&self) -> usize {
        self.e * self.r
    }

    /// `θ·e·r`; a chunk is a drift when the significant-test count is strictly above it.
    pub fn detection_bound(&self) -> f64 {
        self.theta * self.total_tests() as f64
    }

    pub fn is_drift(&self, significant: usize) -> bool {
        significant as f64 > self.detection_bound()
    }

    /// Smallest significant-test count that signals drift.
    pub fn min_drift_count(&self) -> usize {
        (0..=self.total_tests())
            .find(|&a| self.is_drift(a))
            .unwrap_or(self.total_tests() + 1)
    }
}

#[derive(Debug, Clone)]
pub struct PaddState {
    params: PaddParams,
    net: RandomMlp,
    /// One buffer per network output.
    history: Vec<Vec<f64>>,
    rng: Rng,
    detections: Vec<usize>,
    last_count: Option<usize>,
}

impl PaddState {
    /// The network and the subsampling stream come from independent
    /// sub-streams of `seed` (tags `net` and `padd`).
    pub fn new(params: PaddParams, n_features: usize, seed: u64) -> Result<Self> {
        params.validate()?;
        let net = init_network(
            n_features,
            params.n_hidden,
            params.e,
            &mut Rng::derive(seed, "net", 0),
        )?;
        Ok(Self::with_network(params, net, seed))
    }

    pub(crate) fn with_network(params: PaddParams, net: RandomMlp, seed: u64) -> Self {
        Self {
            history: vec![Vec::new(); params.e],
            params,
            net,
            rng: Rng::derive(seed, "padd", 0),
            detections: Vec::new(),
            last_count: None,
        }
    }

    pub fn params(&self) -> &PaddParams {
        &self.params
    }

    pub fn network(&self) -> &RandomMlp {
        &self.net
    }

    pub fn history(&self) -> &[Vec<f64>] {
        &self.history
    }

    pub fn detections(&self) -> &[usize] {
        &self.detections
    }

    /// Significant-test count of the most recent chunk that was tested.
    pub fn last_count(&self) -> Option<usize> {
        self.last_count
    }

    /// Run the detector on precomputed network activations (`n × e`).
    pub fn process_activations(
        &mut self,
        index: usize,
        activations: ArrayView2<'_, f64>,
    ) -> Result<Verdict> {
        if activations.ncols() != self.params.e {
            return Err(Error::Shape {
                expected: self.params.e,
                got: activations.ncols(),
            });
        }
        if activations.nrows() == 0 {
            return Err(Error::param(format!("chunk {index} is empty")));
        }
        let current: Vec<Vec<f64>> = activations
            .columns()
            .into_iter()
            .map(|c| c.to_vec())
            .collect();

        let mut verdict = Verdict::Stable;
        self.last_count = None;
        if !self.history[0].is_empty() {
            let count = self.count_significant(&current);
            self.last_count = Some(count);
            if self.params.is_drift(count) {
                self.history.iter_mut().for_each(Vec::clear);
                self.detections.push(index);
                verdict = Verdict::Drift;
            }
        }
        for (buffer, column) in self.history.iter_mut().zip(current) {
            buffer.extend(column);
        }
        Ok(verdict)
    }

    fn count_significant(&mut self, current: &[Vec<f64>]) -> usize {
        let s = self.params.s;
        let mut past_sample = vec![0.0; s];
        let mut current_sample = vec![0.0; s];
        let mut count = 0;
        for (past, now) in self.history.iter().zip(current) {
            for _ in 0..self.params.r {
                fill_with_replacement(&mut self.rng, now, &mut current_sample);
                fill_with_replacement(&mut self.rng, past, &mut past_sample);
                if pooled_t_test(&past_sample, &current_sample).p < self.params.alpha {
                    count += 1;
                }
            }
        }
        count
    }
}

impl UnsupervisedDetector for PaddState {
    fn process(&mut self, index: usize, features: ArrayView2<'_, f64>) -> Result<Verdict> {
        let activations = self.net.forward(features)?;
        self.process_activations(index, activations.view())
    }
}

/// Process one chunk. Only the feature matrix is read.
pub fn padd_process_chunk(state: &mut PaddState, chunk: &Chunk) -> Result<Verdict> {
    state.process(chunk.index, chunk.features.view())
}

/// Run a fresh detector over a whole stream and return the detection chunks.
pub fn padd_run<I>(params: PaddParams, stream: I, seed: u64) -> Result<Vec<usize>>
where
    I: IntoIterator,
    I::Item: Borrow<Chunk>,
{
    let mut chunks = stream.into_iter().peekable();
    let n_features = chunks
        .peek()
        .map(|c| c.borrow().n_features())
        .ok_or_else(|| Error::param("cannot run a detector on an empty stream"))?;
    let mut state = PaddState::new(params, n_features, seed)?;
    for chunk in chunks {
        padd_process_chunk(&mut state, chunk.borrow())?;
    }
    Ok(state.detections)
}
