//! Early Drift Detection Method: monitors the distance (in samples) between
//! consecutive errors. A shrinking `mean + 2·std` of that distance relative
//! to its historical maximum signals drift.

use crate::baselines::ddm::check_error_bit;
use crate::detector::{ErrorMonitor, Verdict};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EddmParams {
    pub beta: f64,
    pub warning: f64,
    pub min_errors: usize,
}

impl Default for EddmParams {
    fn default() -> Self {
        Self {
            beta: 0.9,
            warning: 0.95,
            min_errors: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eddm {
    params: EddmParams,
    n_samples: usize,
    n_errors: usize,
    last_error: usize,
    mean: f64,
    m2: f64,
    max_level: f64,
}

impl Eddm {
    pub fn new(params: EddmParams) -> Self {
        Self {
            params,
            n_samples: 0,
            n_errors: 0,
            last_error: 0,
            mean: 0.0,
            m2: 0.0,
            max_level: 0.0,
        }
    }

    pub fn errors(&self) -> usize {
        self.n_errors
    }

    /// `mean + 2·std` of the inter-error distance.
    pub fn level(&self) -> f64 {
        if self.n_errors == 0 {
            return 0.0;
        }
        self.mean + 2.0 * (self.m2 / self.n_errors as f64).sqrt()
    }
}

impl Default for Eddm {
    fn default() -> Self {
        Self::new(EddmParams::default())
    }
}

impl ErrorMonitor for Eddm {
    fn update(&mut self, value: f64) -> Result<Verdict> {
        check_error_bit(value)?;
        self.n_samples += 1;
        if value == 0.0 {
            return Ok(Verdict::Stable);
        }
        self.n_errors += 1;
        let distance = (self.n_samples - self.last_error) as f64;
        self.last_error = self.n_samples;
        let delta = distance - self.mean;
        self.mean += delta / self.n_errors as f64;
        self.m2 += delta * (distance - self.mean);

        let level = self.level();
        if level > self.max_level {
            self.max_level = level;
            return Ok(Verdict::Stable);
        }
        if self.n_errors < self.params.min_errors {
            return Ok(Verdict::Stable);
        }
        let ratio = level / self.max_level;
        if ratio < self.params.beta {
            self.reset();
            Ok(Verdict::Drift)
        } else if ratio < self.params.warning {
            Ok(Verdict::Warning)
        } else {
            Ok(Verdict::Stable)
        }
    }

    fn reset(&mut self) {
        *self = Self::new(self.params);
    }
}
