//! Frozen random multilayer perceptron.
//!
//! One ReLU hidden layer followed by a linear output layer. All parameters
//! are drawn once from `N(0, 0.1²)` and never change, so the network is a
//! fixed nonlinear projection of the feature space onto `n_outputs`
//! activations.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_normal, Rng};

pub const WEIGHT_STD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitOptions {
    pub weight_std: f64,
    /// Draw biases from the weight distribution; `false` leaves them at zero.
    pub random_biases: bool,
}

impl Default for InitOptions {
    fn default() -> Self {
        Self {
            weight_std: WEIGHT_STD,
            random_biases: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomMlp {
    /// `n_features × n_hidden`
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `n_hidden × n_outputs`
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl RandomMlp {
    pub fn n_features(&self) -> usize {
        self.w1.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.w1.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.w2.ncols()
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Hidden-layer output `relu(X·W1 + b1)`.
    pub fn hidden(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                got: x.ncols(),
            });
        }
        let mut h = x.dot(&self.w1);
        h += &self.b1.view().insert_axis(Axis(0));
        h.mapv_inplace(|v| v.max(0.0));
        Ok(h)
    }

    /// Output activations `relu(X·W1 + b1)·W2 + b2`, one row per input row.
    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let h = self.hidden(x)?;
        let mut out = h.dot(&self.w2);
        out += &self.b2.view().insert_axis(Axis(0));
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NetworkDocument::from(self)).expect("plain numeric document")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument =
            serde_json::from_str(text).map_err(|e| Error::param(format!("network json: {e}")))?;
        doc.try_into()
    }
}

/// Draw a network with the default options.
pub fn init_network(
    n_features: usize,
    n_hidden: usize,
    n_outputs: usize,
    rng: &mut Rng,
) -> Result<RandomMlp> {
    init_network_with(n_features, n_hidden, n_outputs, InitOptions::default(), rng)
}

/// Parameters are drawn in the order `W1` (row-major), `b1`, `W2`, `b2`.
pub fn init_network_with(
    n_features: usize,
    n_hidden: usize,
    n_outputs: usize,
    options: InitOptions,
    rng: &mut Rng,
) -> Result<RandomMlp> {
    if n_features == 0 || n_hidden == 0 || n_outputs == 0 {
        return Err(Error::param(format!(
            "network dimensions must be >= 1, got {n_features}x{n_hidden}x{n_outputs}"
        )));
    }
    let std = options.weight_std;
    let draw = |n: usize, rng: &mut Rng| rng_normal(rng, 0.0, std, n);
    let w1 = Array2::from_shape_vec((n_features, n_hidden), draw(n_features * n_hidden, rng)?)
        .expect("shape");
    let b1 = draw(n_hidden, rng)?;
    let w2 = Array2::from_shape_vec((n_hidden, n_outputs), draw(n_hidden * n_outputs, rng)?)
        .expect("shape");
    let b2 = draw(n_outputs, rng)?;
    let (b1, b2) = if options.random_biases {
        (Array1::from(b1), Array1::from(b2))
    } else {
        (Array1::zeros(n_hidden), Array1::zeros(n_outputs))
    };
    Ok(RandomMlp { w1, b1, w2, b2 })
}

/// JSON form: shape header plus row-major parameter arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub n_features: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl From<&RandomMlp> for NetworkDocument {
    fn from(net: &RandomMlp) -> Self {
        Self {
            n_features: net.n_features(),
            n_hidden: net.n_hidden(),
            n_outputs: net.n_outputs(),
            w1: net.w1.iter().copied().collect(),
            b1: net.b1.to_vec(),
            w2: net.w2.iter().copied().collect(),
            b2: net.b2.to_vec(),
        }
    }
}

impl TryFrom<NetworkDocument> for RandomMlp {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Self> {
        let bad = |what: &str| Error::param(format!("network json: `{what}` has the wrong length"));
        let w1 = Array2::from_shape_vec((doc.n_features, doc.n_hidden), doc.w1)
            .map_err(|_| bad("w1"))?;
        let w2 =
            Array2::from_shape_vec((doc.n_hidden, doc.n_outputs), doc.w2).map_err(|_| bad("w2"))?;
        if doc.b1.len() != doc.n_hidden {
            return Err(bad("b1"));
        }
        if doc.b2.len() != doc.n_outputs {
            return Err(bad("b2"));
        }
        Ok(RandomMlp {
            w1,
            b1: Array1::from(doc.b1),
            w2,
            b2: Array1::from(doc.b2),
        })
    }
}
