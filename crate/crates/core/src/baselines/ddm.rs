//! Drift Detection Method: monitors the running error rate `p` and its
//! binomial standard deviation `s = sqrt(p(1 − p)/n)`.

use crate::detector::{ErrorMonitor, Verdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdmParams {
    pub min_samples: usize,
    pub warning_level: f64,
    pub drift_level: f64,
}

impl Default for DdmParams {
    fn default() -> Self {
        Self {
            min_samples: 30,
            warning_level: 2.0,
            drift_level: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ddm {
    params: DdmParams,
    n: usize,
    p: f64,
    s: f64,
    p_min: f64,
    s_min: f64,
}

impl Ddm {
    pub fn new(params: DdmParams) -> Self {
        Self {
            params,
            n: 0,
            p: 0.0,
            s: 0.0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
        }
    }

    pub fn error_rate(&self) -> f64 {
        self.p
    }

    pub fn samples(&self) -> usize {
        self.n
    }
}

impl Default for Ddm {
    fn default() -> Self {
        Self::new(DdmParams::default())
    }
}

pub(crate) fn check_error_bit(value: f64) -> Result<()> {
    if value == 0.0 || value == 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "error indicator must be 0 or 1, got {value}"
        )))
    }
}

impl ErrorMonitor for Ddm {
    fn update(&mut self, value: f64) -> Result<Verdict> {
        check_error_bit(value)?;
        self.n += 1;
        let n = self.n as f64;
        self.p += (value - self.p) / n;
        self.s = (self.p * (1.0 - self.p) / n).sqrt();
        if self.n < self.params.min_samples {
            return Ok(Verdict::Stable);
        }
        let level = self.p + self.s;
        if level <= self.p_min + self.s_min {
            self.p_min = self.p;
            self.s_min = self.s;
        }
        if level > self.p_min + self.params.drift_level * self.s_min {
            self.reset();
            Ok(Verdict::Drift)
        } else if level > self.p_min + self.params.warning_level * self.s_min {
            Ok(Verdict::Warning)
        } else {
            Ok(Verdict::Stable)
        }
    }

    fn reset(&mut self) {
        *self = Self::new(self.params);
    }
}
