//! Power-law parameters from an in-degree histogram.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InDegreeHistogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMethod {
    /// Discrete maximum likelihood over `k ≥ k_min`.
    Mle,
    /// Least-squares slope of `ln N_k` against `ln k`.
    LoglogLs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub std_error: f64,
    pub method: GammaMethod,
    pub k_min: u64,
    /// Vertices (MLE) or histogram points (least squares) used.
    pub samples: u64,
}

const BERNOULLI_TERMS: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];
const DIRECT_TERMS: u64 = 16;

/// Bernoulli part of the Euler–Maclaurin tail at `x`.
fn zeta_correction(s: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut factorial = 2.0; // (2j)!
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_TERMS.iter().enumerate() {
        sum += b / factorial * rising * power;
        let j = j as f64 + 1.0;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        power /= x * x;
    }
    sum
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^-s` for `s > 1`, `a ≥ 1`.
pub fn hurwitz_zeta(s: f64, a: u64) -> f64 {
    zeta_parts(s, a).0
}

/// `(ζ, ∂ζ/∂s, ∂²ζ/∂s²)` at `(s, a)`.
fn zeta_parts(s: f64, a: u64) -> (f64, f64, f64) {
    let mut z = 0.0;
    let mut z1 = 0.0;
    let mut z2 = 0.0;
    for k in a..a + DIRECT_TERMS {
        let l = (k as f64).ln();
        let t = (k as f64).powf(-s);
        z += t;
        z1 -= l * t;
        z2 += l * l * t;
    }
    let x = (a + DIRECT_TERMS) as f64;
    let lx = x.ln();

    // x^(1−s)/(s−1) + x^(−s)/2, differentiated in closed form
    let u = s - 1.0;
    let p = x.powf(-u);
    let q = 0.5 * x.powf(-s);
    let head = (p / u + q, -p * (lx / u + 1.0 / (u * u)) - lx * q, p * (lx * lx / u + 2.0 * lx / (u * u) + 2.0 / (u * u * u)) + lx * lx * q);

    let h1 = 1e-5;
    let h2 = 1e-4;
    let c = zeta_correction(s, x);
    let c1 = (zeta_correction(s + h1, x) - zeta_correction(s - h1, x)) / (2.0 * h1);
    let c2 = (zeta_correction(s + h2, x) - 2.0 * c + zeta_correction(s - h2, x)) / (h2 * h2);
    (z + head.0 + c, z1 + head.1 + c1, z2 + head.2 + c2)
}

/// `E[ln k]` under the discrete power law on `[k_min, ∞)`.
fn mean_log(gamma: f64, k_min: u64) -> f64 {
    let (z, z1, _) = zeta_parts(gamma, k_min);
    -z1 / z
}

fn usable(hist: &InDegreeHistogram, k_min: u64) -> Vec<(u64, u64)> {
    hist.iter().filter(|&(k, c)| k >= k_min && c > 0).collect()
}

pub fn estimate_gamma(
    hist: &InDegreeHistogram,
    method: GammaMethod,
    k_min: u64,
) -> Result<GammaEstimate> {
    if k_min < 1 {
        return Err(Error::Estimation("k_min must be >= 1".into()));
    }
    let points = usable(hist, k_min);
    if points.len() < 2 {
        return Err(Error::Estimation(format!(
            "need at least 2 distinct in-degrees >= {k_min}, found {}",
            points.len()
        )));
    }
    match method {
        GammaMethod::Mle => mle(&points, k_min),
        GammaMethod::LoglogLs => loglog(&points, k_min),
    }
}

fn mle(points: &[(u64, u64)], k_min: u64) -> Result<GammaEstimate> {
    let n: u64 = points.iter().map(|&(_, c)| c).sum();
    let target = points
        .iter()
        .map(|&(k, c)| c as f64 * (k as f64).ln())
        .sum::<f64>()
        / n as f64;

    // E[ln k] falls monotonically in γ, so the score equation has one root.
    let (mut lo, mut hi) = (1.0 + 1e-9, 40.0);
    if target >= mean_log(lo, k_min) || target <= mean_log(hi, k_min) {
        return Err(Error::Estimation(format!(
            "mean log-degree {target:.4} outside the range reachable for gamma in ({lo}, {hi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_log(mid, k_min) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let (z, z1, z2) = zeta_parts(gamma, k_min);
    let variance = z2 / z - (z1 / z).powi(2);
    Ok(GammaEstimate {
        gamma,
        std_error: 1.0 / (n as f64 * variance).sqrt(),
        method: GammaMethod::Mle,
        k_min,
        samples: n,
    })
}

struct LineFit {
    slope: f64,
    intercept: f64,
    slope_se: f64,
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let fit = line_fit(xs, ys)?;
    Some((fit.slope, fit.intercept, fit.slope_se))
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let sse: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (sse / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_se,
    })
}

fn loglog(points: &[(u64, u64)], k_min: u64) -> Result<GammaEstimate> {
    let xs: Vec<f64> = points.iter().map(|&(k, _)| (k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let fit = line_fit(&xs, &ys)
        .ok_or_else(|| Error::Estimation("degenerate log-log regression".into()))?;
    Ok(GammaEstimate {
        gamma: -fit.slope,
        std_error: fit.slope_se,
        method: GammaMethod::LoglogLs,
        k_min,
        samples: points.len() as u64,
    })
}

/// Least-squares `A` in `ln N_k = ln A − γ ln k` with `γ` fixed.
///
/// Uses the unbroken run `k_min, k_min + 1, …` up to the first `N_k = 0`.
/// Beyond that point the histogram only records the rare degrees that did
/// occur, each with a count of one or two, and those lift the fit well above
/// the bulk of the distribution.
pub fn estimate_scale_a(hist: &InDegreeHistogram, gamma: f64, k_min: u64) -> Result<f64> {
    let k_min = k_min.max(1);
    let points: Vec<(u64, f64)> = (k_min..)
        .map(|k| (k, hist.count(k)))
        .take_while(|&(_, c)| c > 0)
        .map(|(k, c)| (k, c as f64))
        .collect();
    if points.is_empty() && gamma > 1.0 {
        return Err(Error::Estimation(format!("no vertices with in-degree {k_min}")));
    }
    scale_from_counts(&points, gamma)
}

/// Same fit over real-valued `(k, N_k)` pairs; non-positive counts are skipped.
pub fn scale_from_counts(points: &[(u64, f64)], gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(Error::Estimation(format!("gamma must be > 1, got {gamma}")));
    }
    let terms: Vec<f64> = points
        .iter()
        .filter(|&&(k, c)| k >= 1 && c > 0.0)
        .map(|&(k, c)| c.ln() + gamma * (k as f64).ln())
        .collect();
    if terms.is_empty() {
        return Err(Error::Estimation("no usable (k, N_k) pairs".into()));
    }
    Ok((terms.iter().sum::<f64>() / terms.len() as f64).exp())
}
