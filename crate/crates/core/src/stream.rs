//! Synthetic binary-classification streams with scheduled concept drifts.
//!
//! A stream is a sequence of concepts. Each concept places one unit-variance
//! Gaussian per class over the informative features; the remaining features
//! are pure `N(0, 1)` noise. Transitions between consecutive concepts follow
//! a logistic mixing curve centred on the scheduled drift chunk: a steep
//! slope gives a sudden switch, a shallow one lets both concepts co-occur
//! for a while (gradual drift).

use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::chunk::Chunk;
use crate::error::{Error, Result};
use crate::rng::Rng;

pub const SUDDEN_SLOPE: f64 = 999.0;
pub const GRADUAL_SLOPE: f64 = 5.0;

/// Default half-width of the interval concept means are drawn from
/// (unit class separation per informative dimension).
pub const DEFAULT_MEAN_RANGE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    Sudden,
    Gradual,
}

impl Dynamics {
    pub fn default_slope(self) -> f64 {
        match self {
            Dynamics::Sudden => SUDDEN_SLOPE,
            Dynamics::Gradual => GRADUAL_SLOPE,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dynamics::Sudden => "sudden",
            Dynamics::Gradual => "gradual",
        }
    }
}

impl std::fmt::Display for Dynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sudden" => Ok(Dynamics::Sudden),
            "gradual" => Ok(Dynamics::Gradual),
            other => Err(Error::param(format!("unknown drift dynamics `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub n_chunks: usize,
    pub chunk_size: usize,
    pub n_features: usize,
    pub informative_fraction: f64,
    pub n_drifts: usize,
    pub dynamics: Dynamics,
    pub slope: f64,
    /// Concept means are drawn uniformly from `[-concept_mean_range, concept_mean_range]`.
    #[serde(default = "default_mean_range")]
    pub concept_mean_range: f64,
    pub seed: u64,
}

fn default_mean_range() -> f64 {
    DEFAULT_MEAN_RANGE
}

impl StreamSpec {
    /// 250 chunks of 200 samples, 30% informative features.
    pub fn new(dynamics: Dynamics, n_drifts: usize, n_features: usize, seed: u64) -> Self {
        Self {
            n_chunks: 250,
            chunk_size: 200,
            n_features,
            informative_fraction: 0.3,
            n_drifts,
            dynamics,
            slope: dynamics.default_slope(),
            concept_mean_range: DEFAULT_MEAN_RANGE,
            seed,
        }
    }

    pub fn n_informative(&self) -> usize {
        (self.informative_fraction * self.n_features as f64 - 1e-9).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_chunks == 0 || self.chunk_size == 0 || self.n_features == 0 {
            return Err(Error::param(
                "n_chunks, chunk_size and n_features must be >= 1",
            ));
        }
        if !(self.informative_fraction > 0.0 && self.informative_fraction <= 1.0) {
            return Err(Error::param(format!(
                "informative_fraction must lie in (0, 1], got {}",
                self.informative_fraction
            )));
        }
        if self.n_informative() == 0 {
            return Err(Error::param("stream has no informative features"));
        }
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(Error::param(format!(
                "slope must be positive, got {}",
                self.slope
            )));
        }
        if !(self.concept_mean_range > 0.0 && self.concept_mean_range.is_finite()) {
            return Err(Error::param(format!(
                "concept_mean_range must be positive, got {}",
                self.concept_mean_range
            )));
        }
        if self.n_drifts > 0 && self.n_drifts > self.n_chunks / 2 {
            return Err(Error::param(format!(
                "{} drifts do not fit into {} chunks",
                self.n_drifts, self.n_chunks
            )));
        }
        Ok(())
    }
}

/// Ground-truth central drift moments of a stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSchedule {
    pub centers: Vec<usize>,
    pub dynamics: Dynamics,
    pub slope: f64,
    pub n_chunks: usize,
}

/// On-disk schedule sidecar: `{"centers":[...],"dynamics":"sudden"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSidecar {
    pub centers: Vec<usize>,
    pub dynamics: Dynamics,
}

impl DriftSchedule {
    /// Half-period `W` between consecutive drift centres, in chunks.
    pub fn half_period(&self) -> f64 {
        if self.centers.is_empty() {
            f64::INFINITY
        } else {
            self.n_chunks as f64 / (2.0 * self.centers.len() as f64)
        }
    }

    pub fn sidecar(&self) -> ScheduleSidecar {
        ScheduleSidecar {
            centers: self.centers.clone(),
            dynamics: self.dynamics,
        }
    }

    /// Index of the drift whose centre is closest to chunk `k` (first on ties).
    pub fn nearest_transition(&self, k: usize) -> Option<usize> {
        self.centers
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| c.abs_diff(k))
            .map(|(i, _)| i)
    }
}

/// Evenly spaced drift centres: `floor((2i + 1) * n_chunks / (2 * n_drifts))`.
pub fn build_schedule(spec: &StreamSpec) -> Result<DriftSchedule> {
    spec.validate()?;
    let d = spec.n_drifts;
    let centers = (0..d)
        .map(|i| (2 * i + 1) * spec.n_chunks / (2 * d))
        .collect();
    Ok(DriftSchedule {
        centers,
        dynamics: spec.dynamics,
        slope: spec.slope,
        n_chunks: spec.n_chunks,
    })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Probability that a sample of chunk `k` comes from concept `i + 1` while
/// transition `i` is the active one.
pub fn concept_mix_probability(k: usize, i: usize, schedule: &DriftSchedule) -> f64 {
    let center = schedule.centers[i] as f64;
    logistic(schedule.slope * (k as f64 - center) / schedule.half_period())
}

/// Class-conditional means of every concept, restricted to informative features.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptSet {
    /// `means[j][y]` is the mean vector of class `y` under concept `j`.
    pub means: Vec<[Vec<f64>; 2]>,
}

impl ConceptSet {
    pub fn draw(spec: &StreamSpec, rng: &mut Rng) -> Self {
        let n_inf = spec.n_informative();
        let range = spec.concept_mean_range;
        let draw_mean = |rng: &mut Rng| -> Vec<f64> {
            (0..n_inf).map(|_| rng.uniform(-range, range)).collect()
        };
        let means = (0..=spec.n_drifts)
            .map(|_| [draw_mean(rng), draw_mean(rng)])
            .collect();
        Self { means }
    }

    pub fn n_concepts(&self) -> usize {
        self.means.len()
    }
}

/// Concept a sample of chunk `k` is drawn from, given a uniform draw `u`.
pub fn active_concept(schedule: &DriftSchedule, k: usize, u: f64) -> usize {
    match schedule.nearest_transition(k) {
        None => 0,
        Some(i) => {
            if u < concept_mix_probability(k, i, schedule) {
                i + 1
            } else {
                i
            }
        }
    }
}

/// Generate chunk `k`. Per sample the generator draws, in order: the label,
/// the concept selector, then every feature column left to right.
pub fn generate_chunk(
    spec: &StreamSpec,
    concepts: &ConceptSet,
    schedule: &DriftSchedule,
    k: usize,
    rng: &mut Rng,
) -> Result<Chunk> {
    if k >= spec.n_chunks {
        return Err(Error::param(format!(
            "chunk index {k} outside stream of {} chunks",
            spec.n_chunks
        )));
    }
    let n_inf = spec.n_informative();
    let mut features = Array2::<f64>::zeros((spec.chunk_size, spec.n_features));
    let mut labels = Vec::with_capacity(spec.chunk_size);
    for mut row in features.rows_mut() {
        let y = usize::from(rng.next_f64() < 0.5);
        let concept = active_concept(schedule, k, rng.next_f64());
        let mean = &concepts.means[concept][y];
        for (j, x) in row.iter_mut().enumerate() {
            *x = if j < n_inf {
                rng.normal(mean[j], 1.0)
            } else {
                rng.standard_normal()
            };
        }
        labels.push(y as u8);
    }
    Chunk::new(k, features, labels)
}

/// A lazily generated stream; yields chunks `0..n_chunks` in order.
#[derive(Debug, Clone)]
pub struct DriftStream {
    spec: StreamSpec,
    concepts: ConceptSet,
    schedule: DriftSchedule,
    rng: Rng,
    next: usize,
}

impl DriftStream {
    pub fn spec(&self) -> &StreamSpec {
        &self.spec
    }

    pub fn schedule(&self) -> &DriftSchedule {
        &self.schedule
    }

    pub fn concepts(&self) -> &ConceptSet {
        &self.concepts
    }
}

impl Iterator for DriftStream {
    type Item = Chunk;

    fn next(&mut self) -> Option<Chunk> {
        if self.next >= self.spec.n_chunks {
            return None;
        }
        let chunk = generate_chunk(
            &self.spec,
            &self.concepts,
            &self.schedule,
            self.next,
            &mut self.rng,
        )
        .expect("validated spec");
        self.next += 1;
        Some(chunk)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.spec.n_chunks - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for DriftStream {}

/// Build a stream from `spec.seed`. Concept means are drawn before any chunk.
pub fn generate_stream(spec: &StreamSpec) -> Result<DriftStream> {
    let schedule = build_schedule(spec)?;
    let mut rng = Rng::new(spec.seed);
    let concepts = ConceptSet::draw(spec, &mut rng);
    Ok(DriftStream {
        spec: spec.clone(),
        concepts,
        schedule,
        rng,
        next: 0,
    })
}

/// Write chunks as CSV with columns `f0..f{n-1},label,chunk`.
pub fn write_chunks_csv<W: Write>(
    out: &mut W,
    n_features: usize,
    chunks: impl IntoIterator<Item = Chunk>,
) -> std::io::Result<()> {
    let header: Vec<String> = (0..n_features).map(|j| format!("f{j}")).collect();
    writeln!(out, "{},label,chunk", header.join(","))?;
    let mut line = String::new();
    for chunk in chunks {
        for (row, label) in chunk.features.rows().into_iter().zip(&chunk.labels) {
            line.clear();
            for x in row {
                line.push_str(&format!("{x},"));
            }
            line.push_str(&format!("{label},{}", chunk.index));
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
