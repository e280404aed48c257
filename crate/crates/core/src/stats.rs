//! Statistical kernels: pooled two-sample Student's t-test on top of the
//! regularized incomplete beta function, and the Wilcoxon signed-rank test.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Convergence tolerance of the incomplete-beta continued fraction.
pub const BETA_CF_TOLERANCE: f64 = 1e-14;
pub const BETA_CF_MAX_ITER: usize = 300;
const TINY: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1 − x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for `I_x(a, b)`, modified Lentz evaluation.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < BETA_CF_TOLERANCE {
            break;
        }
    }
    h
}

/// `I_x(a, b)` with `y = 1 − x` supplied separately so callers that know the
/// complement exactly do not lose precision near `x = 1`.
fn incomplete_beta_complemented(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, y) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param(format!(
            "beta shapes must be positive, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("x must lie in [0, 1], got {x}")));
    }
    Ok(incomplete_beta_complemented(a, b, x, 1.0 - x))
}

/// Two-sided tail probability `P(|T| ≥ |t|)` of Student's t with `df`
/// degrees of freedom: `I_{df/(df+t²)}(df/2, 1/2)`.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    incomplete_beta_complemented(0.5 * df, 0.5, x, y).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn mean_and_ss(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss)
}

/// Pooled-variance Student's t-test for two independent samples.
///
/// With zero pooled variance the statistic is degenerate: `p = 1` when the
/// means coincide and `p = 0` otherwise.
pub fn t_test_independent(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::param(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(pooled_t_test(a, b))
}

pub(crate) fn pooled_t_test(a: &[f64], b: &[f64]) -> TTestResult {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, ss_a) = mean_and_ss(a);
    let (mean_b, ss_b) = mean_and_ss(b);
    let df = na + nb - 2.0;
    let pooled_var = (ss_a + ss_b) / df;
    let diff = mean_a - mean_b;
    if pooled_var <= 0.0 {
        return if diff == 0.0 {
            TTestResult { t: 0.0, df, p: 1.0 }
        } else {
            TTestResult {
                t: diff.signum() * f64::INFINITY,
                df,
                p: 0.0,
            }
        };
    }
    let t = diff / (pooled_var * (1.0 / na + 1.0 / nb)).sqrt();
    TTestResult {
        t,
        df,
        p: student_t_two_sided(t, df),
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        // Maclaurin series of erf.
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x2 / n;
            let contrib = term / (2.0 * n + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-17 {
                break;
            }
        }
        1.0 - 2.0 / PI.sqrt() * sum
    } else {
        // Laplace continued fraction, evaluated backwards.
        let mut f = x;
        for k in (1..=80).rev() {
            f = x + (k as f64 * 0.5) / f;
        }
        (-x * x).exp() / (PI.sqrt() * f)
    }
}

/// Upper tail of the standard normal distribution.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Ranks starting at 1, ties receive the mean of the ranks they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Number of nonzero differences.
    pub n: usize,
    pub z: f64,
    pub p: f64,
}

/// Largest number of nonzero differences for which the exact null
/// distribution is used.
pub const WILCOXON_EXACT_MAX: usize = 50;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are discarded and tied magnitudes get midranks. Without
/// ties and with at most [`WILCOXON_EXACT_MAX`] differences the p-value comes
/// from the exact null distribution of `W⁺`. Otherwise it uses the normal
/// approximation `z = (|W⁺ − n(n+1)/4| − ½) / σ` with
/// `σ² = n(n+1)(2n+1)/24 − Σ(t³ − t)/48` over tie groups of size `t`.
/// `z` is reported in both cases.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::param(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 5 {
        return Err(Error::param(format!(
            "signed-rank test needs at least 5 pairs, got {}",
            x.len()
        )));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            n: 0,
            z: 0.0,
            p: 1.0,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&magnitudes);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let mut sorted = magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut tied = false;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tied |= group.len() > 1;
        tie_term += t * t * t - t;
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return Ok(WilcoxonResult {
            w_plus,
            n,
            z: 0.0,
            p: 1.0,
        });
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p = if !tied && n <= WILCOXON_EXACT_MAX {
        signed_rank_exact_p(n, w_plus)
    } else {
        (2.0 * normal_sf(z)).min(1.0)
    };
    Ok(WilcoxonResult { w_plus, n, z, p })
}

/// Two-sided exact p-value of `W⁺` for `n` untied ranks.
fn signed_rank_exact_p(n: usize, w_plus: f64) -> f64 {
    let max_sum = n * (n + 1) / 2;
    // counts[s] = number of sign assignments with W⁺ = s
    let mut counts = vec![0.0f64; max_sum + 1];
    counts[0] = 1.0;
    for rank in 1..=n {
        for s in (rank..=max_sum).rev() {
            counts[s] += counts[s - rank];
        }
    }
    let total = 2f64.powi(n as i32);
    let w = w_plus.round() as usize;
    // the distribution is symmetric about n(n+1)/4
    let lower = w.min(max_sum - w);
    let tail: f64 = counts[..=lower].iter().sum();
    (2.0 * tail / total).min(1.0)
}
