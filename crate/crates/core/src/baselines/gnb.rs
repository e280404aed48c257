//! Incremental Gaussian Naive Bayes used as the error source for the
//! supervised detectors.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Variance smoothing relative to the largest per-feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

/// Running count, mean and sum of squared deviations per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningMoments {
    pub count: usize,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl RunningMoments {
    pub fn new(n_features: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; n_features],
            m2: vec![0.0; n_features],
        }
    }

    /// Merge a batch of rows (Chan et al. pairwise update; the batch itself
    /// is summarised with a two-pass pass for accuracy).
    pub fn merge_rows<'a>(&mut self, rows: impl Iterator<Item = &'a [f64]> + Clone) {
        let n_b = rows.clone().count();
        if n_b == 0 {
            return;
        }
        let d = self.mean.len();
        let mut mean_b = vec![0.0; d];
        for row in rows.clone() {
            for (m, x) in mean_b.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean_b.iter_mut().for_each(|m| *m /= n_b as f64);
        let mut m2_b = vec![0.0; d];
        for row in rows {
            for ((acc, x), m) in m2_b.iter_mut().zip(row).zip(&mean_b) {
                *acc += (x - m) * (x - m);
            }
        }
        let n_a = self.count as f64;
        let n_b_f = n_b as f64;
        let total = n_a + n_b_f;
        for j in 0..d {
            let delta = mean_b[j] - self.mean[j];
            self.mean[j] += delta * n_b_f / total;
            self.m2[j] += m2_b[j] + delta * delta * n_a * n_b_f / total;
        }
        self.count += n_b;
    }

    /// Population variance per feature.
    pub fn variance(&self) -> Vec<f64> {
        self.m2
            .iter()
            .map(|m2| {
                if self.count > 0 {
                    m2 / self.count as f64
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    n_features: Option<usize>,
    classes: BTreeMap<u8, RunningMoments>,
    overall: Option<RunningMoments>,
}

impl Default for GaussianNb {
    fn default() -> Self {
        Self::new()
    }
}

impl GaussianNb {
    pub fn new() -> Self {
        Self {
            n_features: None,
            classes: BTreeMap::new(),
            overall: None,
        }
    }

    pub fn is_fitted(&self) -> bool {
        !self.classes.is_empty()
    }

    pub fn class_moments(&self, label: u8) -> Option<&RunningMoments> {
        self.classes.get(&label)
    }

    pub fn partial_fit(&mut self, features: ArrayView2<'_, f64>, labels: &[u8]) -> Result<()> {
        if features.nrows() != labels.len() {
            return Err(Error::param(format!(
                "{} rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        let d = features.ncols();
        match self.n_features {
            Some(expected) if expected != d => return Err(Error::Shape { expected, got: d }),
            _ => self.n_features = Some(d),
        }
        let rows: Vec<&[f64]> = features
            .rows()
            .into_iter()
            .map(|r| r.to_slice().expect("standard layout rows"))
            .collect();
        let mut labels_seen: Vec<u8> = labels.to_vec();
        labels_seen.sort_unstable();
        labels_seen.dedup();
        for label in labels_seen {
            let class_rows = rows
                .iter()
                .zip(labels)
                .filter(move |(_, &y)| y == label)
                .map(|(r, _)| *r);
            self.classes
                .entry(label)
                .or_insert_with(|| RunningMoments::new(d))
                .merge_rows(class_rows);
        }
        self.overall
            .get_or_insert_with(|| RunningMoments::new(d))
            .merge_rows(rows.iter().copied());
        Ok(())
    }

    fn smoothing(&self) -> f64 {
        let max_var = self
            .overall
            .as_ref()
            .map(|m| m.variance().into_iter().fold(0.0, f64::max))
            .unwrap_or(0.0);
        let eps = VAR_SMOOTHING * max_var;
        if eps > 0.0 {
            eps
        } else {
            VAR_SMOOTHING
        }
    }

    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<Vec<u8>> {
        let expected = self.n_features.ok_or(Error::NotFitted)?;
        if !self.is_fitted() {
            return Err(Error::NotFitted);
        }
        if features.ncols() != expected {
            return Err(Error::Shape {
                expected,
                got: features.ncols(),
            });
        }
        let eps = self.smoothing();
        let total: usize = self.classes.values().map(|c| c.count).sum();
        let models: Vec<(u8, f64, Vec<f64>, &[f64])> = self
            .classes
            .iter()
            .map(|(&label, m)| {
                let var: Vec<f64> = m.variance().into_iter().map(|v| v + eps).collect();
                let log_norm = -0.5 * var.iter().map(|v| (2.0 * PI * v).ln()).sum::<f64>();
                let log_prior = (m.count as f64 / total as f64).ln();
                (label, log_prior + log_norm, var, m.mean.as_slice())
            })
            .collect();
        let predictions = features
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = (models[0].0, f64::NEG_INFINITY);
                for (label, constant, var, mean) in &models {
                    let mut score = *constant;
                    for ((x, m), v) in row.iter().zip(*mean).zip(var) {
                        score -= (x - m) * (x - m) / (2.0 * v);
                    }
                    if score > best.1 {
                        best = (*label, score);
                    }
                }
                best.0
            })
            .collect();
        Ok(predictions)
    }
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;

    use super::*;
    use crate::rng::Rng;

    fn blobs(n: usize, seed: u64) -> (Array2<f64>, Vec<u8>) {
        let mut rng = Rng::new(seed);
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let x = Array2::from_shape_fn((n, 3), |(i, _)| {
            let center = if labels[i] == 1 { 5.0 } else { -5.0 };
            rng.normal(center, 1.0)
        });
        (x, labels)
    }

    #[test]
    fn separable_blobs() {
        let (x, y) = blobs(1000, 1);
        let mut nb = GaussianNb::new();
        nb.partial_fit(x.view(), &y).unwrap();
        let (xt, yt) = blobs(1000, 2);
        let pred = nb.predict(xt.view()).unwrap();
        let acc = pred.iter().zip(&yt).filter(|(a, b)| a == b).count() as f64 / 1000.0;
        assert!(acc >= 0.99, "{acc}");
    }

    #[test]
    fn single_class_predicts_that_class() {
        let (x, _) = blobs(50, 3);
        let mut nb = GaussianNb::new();
        nb.partial_fit(x.view(), &[1; 50]).unwrap();
        let pred = nb.predict(blobs(20, 4).0.view()).unwrap();
        assert!(pred.iter().all(|&p| p == 1));
    }

    #[test]
    fn predict_before_fit() {
        let nb = GaussianNb::new();
        assert_eq!(
            nb.predict(Array2::zeros((2, 3)).view()),
            Err(Error::NotFitted)
        );
    }

    #[test]
    fn width_mismatch() {
        let (x, y) = blobs(10, 3);
        let mut nb = GaussianNb::new();
        nb.partial_fit(x.view(), &y).unwrap();
        assert!(nb.predict(Array2::zeros((2, 4)).view()).is_err());
        assert!(nb
            .partial_fit(Array2::zeros((2, 4)).view(), &[0, 1])
            .is_err());
        assert!(nb.partial_fit(Array2::zeros((2, 3)).view(), &[0]).is_err());
    }

    #[test]
    fn incremental_matches_batch_moments() {
        let (x, y) = blobs(600, 5);
        let mut batch = GaussianNb::new();
        batch.partial_fit(x.view(), &y).unwrap();
        let mut inc = GaussianNb::new();
        inc.partial_fit(x.slice(ndarray::s![..250, ..]), &y[..250])
            .unwrap();
        inc.partial_fit(x.slice(ndarray::s![250.., ..]), &y[250..])
            .unwrap();

        for label in [0u8, 1] {
            // two-pass reference over the raw rows
            let rows: Vec<_> = x
                .rows()
                .into_iter()
                .zip(&y)
                .filter(|(_, &l)| l == label)
                .map(|(r, _)| r.to_vec())
                .collect();
            let n = rows.len() as f64;
            for j in 0..3 {
                let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
                let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
                for model in [&batch, &inc] {
                    let m = model.class_moments(label).unwrap();
                    assert!((m.mean[j] - mean).abs() < 1e-10);
                    assert!((m.variance()[j] - var).abs() < 1e-10);
                }
            }
        }
    }
}
