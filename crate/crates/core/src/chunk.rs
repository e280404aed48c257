use ndarray::Array2;

use crate::error::{Error, Result};

/// One batch of a data stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub index: usize,
    pub features: Array2<f64>,
    pub labels: Vec<u8>,
}

impl Chunk {
    pub fn new(index: usize, features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::param(format!(
                "chunk {index}: {} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        Ok(Self {
            index,
            features,
            labels,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }
}
