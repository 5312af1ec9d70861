//! Small statistical helpers shared by the calibration and simulation code.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Wilson score interval for a binomial proportion at confidence `z` (1.96
/// for 95%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided Student-t quantile at the given tail probability.
pub fn t_quantile(df: f64, upper_tail: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("valid t distribution")
        .inverse_cdf(1.0 - upper_tail)
}

/// Sample mean with a t-based confidence interval. `None` for fewer than two
/// values.
pub fn mean_with_t_ci(values: &[f64], confidence: f64) -> Option<(f64, (f64, f64))> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = t_quantile(n - 1.0, (1.0 - confidence) / 2.0);
    let half = t * (var / n).sqrt();
    Some((mean, (mean - half, mean + half)))
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Confidence interval for the slope.
    pub slope_ci: (f64, f64),
}

/// Fits a line and reports a t-based confidence interval on the slope.
/// `None` for fewer than three points or degenerate x spread.
pub fn ols_slope(points: &[(f64, f64)], confidence: f64) -> Option<SlopeFit> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let sigma2 = ssr / (nf - 2.0);
    let se = (sigma2 / sxx).sqrt();
    let t = t_quantile(nf - 2.0, (1.0 - confidence) / 2.0);
    Some(SlopeFit {
        slope,
        intercept,
        slope_ci: (slope - t * se, slope + t * se),
    })
}

/// One-sided two-proportion z statistic for testing `p1 > p2` under a pooled
/// null. Positive values favor `p1 > p2`; 1.645 is the 95% one-sided cutoff.
pub fn two_proportion_z(success1: u64, trials1: u64, success2: u64, trials2: u64) -> f64 {
    let n1 = trials1 as f64;
    let n2 = trials2 as f64;
    let p1 = success1 as f64 / n1;
    let p2 = success2 as f64 / n2;
    let pooled = (success1 + success2) as f64 / (n1 + n2);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    if se == 0.0 {
        return 0.0;
    }
    (p1 - p2) / se
}

/// FNV-1a hash of a byte string, used to fingerprint configurations.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}
