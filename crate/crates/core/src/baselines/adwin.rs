//! ADWIN: adaptive windowing over an exponential histogram.
//!
//! The window is stored as rows of buckets; row `i` holds buckets
//! summarising `2^i` consecutive values, at most `max_buckets` per row.
//! After each insertion every bucket boundary is a candidate cut splitting
//! the window into an older and a newer part. A cut is significant when
//!
//! ```text
//! |μ_old − μ_new| ≥ sqrt(2/m · σ²_W · ln(2/δ')) + 2/(3m) · ln(2/δ')
//! ```
//!
//! with `m = 1/(1/n_old + 1/n_new)`, `σ²_W` the window variance and
//! `δ' = δ/n`. The older part is dropped and the check repeats until no
//! cut is significant.

use std::collections::VecDeque;

use crate::detector::{ErrorMonitor, Verdict};
use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.002;
pub const DEFAULT_MAX_BUCKETS: usize = 5;

/// Summary of consecutive window values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bucket {
    pub width: usize,
    pub sum: f64,
    /// Sum of squared deviations from the bucket mean.
    pub m2: f64,
}

impl Bucket {
    fn single(value: f64) -> Self {
        Self {
            width: 1,
            sum: value,
            m2: 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.width as f64
    }

    fn merge(&self, other: &Bucket) -> Bucket {
        let (na, nb) = (self.width as f64, other.width as f64);
        let delta = other.mean() - self.mean();
        Bucket {
            width: self.width + other.width,
            sum: self.sum + other.sum,
            m2: self.m2 + other.m2 + delta * delta * na * nb / (na + nb),
        }
    }

    fn empty() -> Self {
        Self {
            width: 0,
            sum: 0.0,
            m2: 0.0,
        }
    }

    fn absorb(&self, other: &Bucket) -> Bucket {
        if self.width == 0 {
            *other
        } else {
            self.merge(other)
        }
    }
}

/// The variance-sensitive cut threshold `ε_cut`.
pub fn cut_threshold(n_old: usize, n_new: usize, window_variance: f64, delta: f64) -> f64 {
    let n = (n_old + n_new) as f64;
    let m = 1.0 / (1.0 / n_old as f64 + 1.0 / n_new as f64);
    let log_term = (2.0 * n / delta).ln();
    (2.0 / m * window_variance * log_term).sqrt() + 2.0 / (3.0 * m) * log_term
}

#[derive(Debug, Clone, PartialEq)]
pub struct Adwin {
    delta: f64,
    max_buckets: usize,
    /// `rows[i]` holds buckets of width `2^i`, newest at the front.
    rows: Vec<VecDeque<Bucket>>,
    width: usize,
    detections: usize,
}

impl Default for Adwin {
    fn default() -> Self {
        Self::new(DEFAULT_DELTA).expect("valid default delta")
    }
}

impl Adwin {
    pub fn new(delta: f64) -> Result<Self> {
        Self::with_buckets(delta, DEFAULT_MAX_BUCKETS)
    }

    pub fn with_buckets(delta: f64, max_buckets: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if max_buckets < 2 {
            return Err(Error::param("max_buckets must be >= 2"));
        }
        Ok(Self {
            delta,
            max_buckets,
            rows: Vec::new(),
            width: 0,
            detections: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Buckets ordered from oldest to newest.
    pub fn buckets(&self) -> impl Iterator<Item = &Bucket> + '_ {
        self.rows.iter().rev().flat_map(|row| row.iter().rev())
    }

    /// Width of the oldest (coarsest) bucket.
    pub fn granularity(&self) -> usize {
        self.buckets().next().map_or(1, |b| b.width)
    }

    pub fn total(&self) -> Bucket {
        self.buckets().fold(Bucket::empty(), |acc, b| acc.absorb(b))
    }

    pub fn mean(&self) -> f64 {
        let t = self.total();
        if t.width == 0 {
            0.0
        } else {
            t.mean()
        }
    }

    pub fn detections(&self) -> usize {
        self.detections
    }

    fn insert(&mut self, value: f64) {
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_front(Bucket::single(value));
        self.width += 1;
        let mut level = 0;
        while self.rows[level].len() > self.max_buckets {
            let oldest = self.rows[level].pop_back().expect("row over capacity");
            let next = self.rows[level].pop_back().expect("row over capacity");
            if self.rows.len() == level + 1 {
                self.rows.push(VecDeque::new());
            }
            self.rows[level + 1].push_front(oldest.merge(&next));
            level += 1;
        }
    }

    fn drop_oldest(&mut self) {
        while let Some(row) = self.rows.last_mut() {
            if let Some(bucket) = row.pop_back() {
                self.width -= bucket.width;
                if row.is_empty() {
                    self.rows.pop();
                }
                return;
            }
            self.rows.pop();
        }
    }

    /// Number of oldest buckets to drop at the first significant cut, if any.
    fn find_cut(&self) -> Option<usize> {
        let total = self.total();
        if total.width < 2 {
            return None;
        }
        let variance = total.m2 / total.width as f64;
        let mut old = Bucket::empty();
        let n_buckets = self.bucket_count();
        for (i, bucket) in self.buckets().enumerate().take(n_buckets - 1) {
            old = old.absorb(bucket);
            let n_new = total.width - old.width;
            let new_mean = (total.sum - old.sum) / n_new as f64;
            let eps = cut_threshold(old.width, n_new, variance, self.delta);
            if (old.mean() - new_mean).abs() >= eps {
                return Some(i + 1);
            }
        }
        None
    }

    /// Insert one value and shrink the window while a cut is significant.
    pub fn adwin_update(&mut self, value: f64) -> Result<Verdict> {
        if !value.is_finite() {
            return Err(Error::param(format!(
                "ADWIN input must be finite, got {value}"
            )));
        }
        self.insert(value);
        let mut drift = false;
        while let Some(n_drop) = self.find_cut() {
            drift = true;
            for _ in 0..n_drop {
                self.drop_oldest();
            }
        }
        if drift {
            self.detections += 1;
            Ok(Verdict::Drift)
        } else {
            Ok(Verdict::Stable)
        }
    }
}

impl ErrorMonitor for Adwin {
    fn update(&mut self, value: f64) -> Result<Verdict> {
        self.adwin_update(value)
    }

    fn reset(&mut self) {
        self.rows.clear();
        self.width = 0;
    }
}
