//! Slow reference implementations used to check the production kernels.
//! Each one works from the textbook definition, not from library code.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use padd_core::baselines::Adwin;
use padd_core::{Rng, Verdict};

/// Adaptive Simpson quadrature with an absolute error target.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Two-sided tail of Student's t by integrating the density.
///
/// With `x = sqrt(df)·tan(φ)` the density becomes proportional to
/// `cos(φ)^(df−1)` on `(−π/2, π/2)`, so
/// `p = ∫_{φ₀}^{π/2} cos^(df−1) / ∫_0^{π/2} cos^(df−1)` with `φ₀ = atan(|t|/sqrt(df))`.
pub fn t_two_sided_quadrature(t: f64, df: f64) -> f64 {
    let power = df - 1.0;
    let integrand = |phi: f64| phi.cos().max(0.0).powf(power);
    let phi0 = (t.abs() / df.sqrt()).atan();
    let half = adaptive_simpson(&integrand, 0.0, FRAC_PI_2, 1e-15);
    let tail = adaptive_simpson(&integrand, phi0, FRAC_PI_2, 1e-15);
    (tail / half).min(1.0)
}

/// Pooled two-sample t statistic and degrees of freedom, straight from the
/// textbook formula.
pub fn pooled_t(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let ssa: f64 = a.iter().map(|v| (v - ma).powi(2)).sum();
    let ssb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum();
    let df = (a.len() + b.len() - 2) as f64;
    let sp2 = (ssa + ssb) / df;
    let se = (sp2 * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt();
    ((ma - mb) / se, df)
}

/// Exact two-sided signed-rank p-value by visiting all `2^n` sign
/// assignments in Gray-code order. Ranks are midranks of `|d|`.
pub fn wilcoxon_exact_enumeration(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|v| *v != 0.0).collect();
    let n = d.len();
    assert!(n <= 26, "enumeration oracle limited to small n");
    if n == 0 {
        return 1.0;
    }
    // doubled midranks are integers
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].abs().partial_cmp(&d[j].abs()).unwrap());
    let mut rank2 = vec![0i64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[idx[j + 1]].abs() == d[idx[i]].abs() {
            j += 1;
        }
        for k in i..=j {
            rank2[idx[k]] = (i + 1 + j + 1) as i64;
        }
        i = j + 1;
    }
    let total2: i64 = rank2.iter().sum();
    let observed2: i64 = (0..n).filter(|&k| d[k] > 0.0).map(|k| rank2[k]).sum();
    // compare 2·|2W − total| on the doubled scale
    let observed_dev = (2 * observed2 - total2).abs();

    let mut w2: i64 = 0;
    let mut positive = vec![false; n];
    let mut extreme: u64 = u64::from((2 * w2 - total2).abs() >= observed_dev);
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        positive[bit] = !positive[bit];
        if positive[bit] {
            w2 += rank2[bit];
        } else {
            w2 -= rank2[bit];
        }
        if (2 * w2 - total2).abs() >= observed_dev {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

/// ADWIN evaluated on the raw window: every split point is tested, oldest
/// first, and the older part is removed at the first significant split.
pub struct NaiveAdwin {
    pub delta: f64,
    pub window: Vec<f64>,
}

impl NaiveAdwin {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            window: Vec::new(),
        }
    }

    fn first_cut(&self) -> Option<usize> {
        let n = self.window.len();
        if n < 2 {
            return None;
        }
        let nf = n as f64;
        let mean = self.window.iter().sum::<f64>() / nf;
        let var = self.window.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
        let ln = (2.0 * nf / self.delta).ln();
        for c in 1..n {
            let (old, new) = self.window.split_at(c);
            let m_old = old.iter().sum::<f64>() / old.len() as f64;
            let m_new = new.iter().sum::<f64>() / new.len() as f64;
            let m = 1.0 / (1.0 / old.len() as f64 + 1.0 / new.len() as f64);
            let eps = (2.0 / m * var * ln).sqrt() + 2.0 / (3.0 * m) * ln;
            if (m_old - m_new).abs() >= eps {
                return Some(c);
            }
        }
        None
    }

    pub fn update(&mut self, value: f64) -> bool {
        self.window.push(value);
        let mut cut = false;
        while let Some(c) = self.first_cut() {
            self.window.drain(..c);
            cut = true;
        }
        cut
    }
}

/// Piecewise-stationary sequence for ADWIN fuzzing: Bernoulli or uniform
/// segments with random levels and up to three change points.
pub fn adwin_fuzz_sequence(rng: &mut Rng) -> Vec<f64> {
    let len = 32 + rng.below(481);
    let n_changes = rng.below(4);
    let mut changes: Vec<usize> = (0..n_changes).map(|_| rng.below(len)).collect();
    changes.sort_unstable();
    let binary = rng.next_f64() < 0.6;
    let mut level = rng.next_f64();
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        if changes.contains(&i) {
            level = rng.next_f64();
        }
        let v = if binary {
            f64::from(u8::from(rng.next_f64() < level))
        } else {
            level + 0.3 * (rng.next_f64() - 0.5)
        };
        out.push(v);
    }
    out
}

/// Detection indices of the histogram ADWIN together with the oldest-bucket
/// width around each detection.
pub fn histogram_adwin_trace(values: &[f64], delta: f64) -> (Vec<usize>, Vec<usize>, usize) {
    let mut adwin = Adwin::new(delta).unwrap();
    let mut detections = Vec::new();
    let mut granularity = Vec::new();
    let mut widest = 1;
    for (i, v) in values.iter().enumerate() {
        let before = adwin.granularity();
        if adwin.adwin_update(*v).unwrap() == Verdict::Drift {
            detections.push(i);
            granularity.push(before.max(adwin.granularity()));
        }
        widest = widest.max(adwin.granularity());
    }
    (detections, granularity, widest)
}

pub fn naive_adwin_detections(values: &[f64], delta: f64) -> Vec<usize> {
    let mut naive = NaiveAdwin::new(delta);
    values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| naive.update(*v).then_some(i))
        .collect()
}

/// Compare both ADWIN variants on one sequence. Every histogram detection
/// needs a naive one within the granularity at that point, and every naive
/// detection needs a histogram one within the coarsest granularity of the
/// run; naive detections in the last granularity span are exempt since the
/// sequence ends before the histogram can resolve them.
pub fn adwin_agreement(values: &[f64], delta: f64) -> Result<(), String> {
    let (hist, gran, widest) = histogram_adwin_trace(values, delta);
    let naive = naive_adwin_detections(values, delta);
    for (&at, &g) in hist.iter().zip(&gran) {
        let nearest = naive
            .iter()
            .map(|&n| n.abs_diff(at))
            .min()
            .unwrap_or(usize::MAX);
        if nearest > g {
            return Err(format!(
                "histogram detection {at} (granularity {g}) has no naive match in {naive:?}"
            ));
        }
    }
    let g_max = gran.iter().copied().max().unwrap_or(widest);
    for &at in naive.iter().filter(|&&at| at + g_max < values.len()) {
        let nearest = hist
            .iter()
            .map(|&h| h.abs_diff(at))
            .min()
            .unwrap_or(usize::MAX);
        if nearest > g_max {
            return Err(format!(
                "naive detection {at} has no histogram match within {g_max} in {hist:?}"
            ));
        }
    }
    Ok(())
}

/// Drift Detection Method transcribed from its published description:
/// after each prediction `p_i` is the error rate so far and
/// `s_i = sqrt(p_i(1 − p_i)/i)`; `(p_min, s_min)` is recorded whenever
/// `p_i + s_i` reaches a new minimum (once 30 samples have been seen);
/// drift when `p_i + s_i > p_min + 3·s_min`, warning above `2·s_min`.
/// Returns `0` stable, `1` warning, `2` drift; drift restarts everything.
pub struct DdmTranscription {
    errors: u64,
    seen: u64,
    best: Option<(f64, f64)>,
}

impl DdmTranscription {
    pub fn new() -> Self {
        Self {
            errors: 0,
            seen: 0,
            best: None,
        }
    }

    pub fn step(&mut self, error: bool) -> u8 {
        self.seen += 1;
        self.errors += u64::from(error);
        let i = self.seen as f64;
        let p = self.errors as f64 / i;
        let s = (p * (1.0 - p) / i).sqrt();
        if self.seen < 30 {
            return 0;
        }
        match self.best {
            Some((pm, sm)) if p + s > pm + sm => {}
            _ => self.best = Some((p, s)),
        }
        let (pm, sm) = self.best.unwrap();
        if p + s > pm + 3.0 * sm {
            *self = Self::new();
            2
        } else if p + s > pm + 2.0 * sm {
            1
        } else {
            0
        }
    }
}

/// Distance-measure definitions by explicit pairwise enumeration.
pub fn brute_d1(det: &[usize], drifts: &[usize]) -> Option<f64> {
    if det.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for &x in det {
        let mut best = usize::MAX;
        for &y in drifts {
            best = best.min(x.abs_diff(y));
        }
        total += best as f64;
    }
    Some(total / det.len() as f64)
}

pub fn brute_d2(det: &[usize], drifts: &[usize]) -> Option<f64> {
    if det.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for &y in drifts {
        let mut best = usize::MAX;
        for &x in det {
            best = best.min(x.abs_diff(y));
        }
        total += best as f64;
    }
    Some(total / drifts.len() as f64)
}

pub fn brute_r(det: &[usize], drifts: &[usize]) -> Option<f64> {
    if det.is_empty() {
        return None;
    }
    Some((1.0 - drifts.len() as f64 / det.len() as f64).abs())
}

/// Mean rank per method (rows), 1 for the smallest value in each column,
/// ties sharing the average of their positions.
pub fn brute_mean_ranks(values: &[Vec<f64>]) -> Vec<f64> {
    let k = values.len();
    let n = values[0].len();
    let mut sums = vec![0.0; k];
    for c in 0..n {
        for m in 0..k {
            let v = values[m][c];
            let below = (0..k).filter(|&o| values[o][c] < v).count() as f64;
            let equal = (0..k).filter(|&o| values[o][c] == v).count() as f64;
            // positions below+1 ..= below+equal
            sums[m] += below + (equal + 1.0) / 2.0;
        }
    }
    sums.iter().map(|s| s / n as f64).collect()
}
