//! One-sided CUSUM baseline with Monte-Carlo threshold calibration.
//!
//! CUSUM assumes the starting density is known, so the comparison harness
//! hands each run's true initial state to it; the two-sided detector gets no
//! such help. The statistic is the standard clamped log-likelihood-ratio
//! random walk; the alarm latches at the first threshold crossing since a
//! single change is all the harness models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{DistributionPair, Which};
use crate::error::{Error, Result};
use crate::sim::mix_seed;
use crate::stats::wilson_interval;

/// Direction of the change CUSUM watches for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    F0ToF1,
    F1ToF0,
}

impl Direction {
    fn source(self) -> Which {
        match self {
            Direction::F0ToF1 => Which::F0,
            Direction::F1ToF0 => Which::F1,
        }
    }

    fn target(self) -> Which {
        match self {
            Direction::F0ToF1 => Which::F1,
            Direction::F1ToF0 => Which::F0,
        }
    }
}

/// Running CUSUM state: `s = max(0, s + log f_target(x) - log f_source(x))`,
/// alarm latched at the first `s >= h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CusumDetector {
    pub s: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub alarmed: bool,
    pub alarm_time: Option<u64>,
    pub n: u64,
}

impl CusumDetector {
    pub fn new(threshold: f64, direction: Direction) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidParams(format!(
                "threshold must be positive and finite, got {threshold}"
            )));
        }
        Ok(CusumDetector {
            s: 0.0,
            threshold,
            direction,
            alarmed: false,
            alarm_time: None,
            n: 0,
        })
    }

    /// Consumes one sample; returns whether the alarm is latched.
    pub fn step(&mut self, pair: &DistributionPair, x: f64) -> Result<bool> {
        let lt = pair.log_density(self.direction.target(), x)?;
        let ls = pair.log_density(self.direction.source(), x)?;
        self.n += 1;
        self.s = (self.s + lt - ls).max(0.0);
        if !self.alarmed && self.s >= self.threshold {
            self.alarmed = true;
            self.alarm_time = Some(self.n);
        }
        Ok(self.alarmed)
    }
}

/// Outcome of a threshold calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCalibration {
    pub threshold: f64,
    /// False-alarm rate measured at the returned threshold.
    pub pfa: f64,
    /// Wilson 95% interval around `pfa`; contains the target by construction.
    pub pfa_ci: (f64, f64),
    pub runs: u64,
    pub iterations: u32,
}

const MAX_BISECTION_ITERS: u32 = 64;

/// Calibrates the alarm threshold so that the probability of any alarm
/// before change time `m` on no-change runs matches `target_pfa`.
///
/// All candidate thresholds are evaluated on the same simulated paths
/// (common random numbers), which makes the measured rate exactly monotone
/// in the threshold; bisection stops at the first threshold whose Wilson 95%
/// interval contains the target.
pub fn calibrate_threshold(
    pair: &DistributionPair,
    direction: Direction,
    m: u64,
    target_pfa: f64,
    runs: u64,
    seed: u64,
) -> Result<ThresholdCalibration> {
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(Error::InvalidParams(format!(
            "target_pfa must lie in (0, 1), got {target_pfa}"
        )));
    }
    if runs < 1000 {
        return Err(Error::InvalidParams(format!(
            "calibration needs runs >= 1000, got {runs}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidParams("change time m must be >= 1".into()));
    }

    // Per run, the largest statistic reached before m; an alarm before m
    // occurs at threshold h iff this maximum reaches h.
    let source = direction.source();
    let mut max_scores = Vec::with_capacity(runs as usize);
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, run));
        let mut s = 0.0f64;
        let mut peak = 0.0f64;
        for _ in 1..m {
            let x = pair.sample(source, &mut rng)?;
            let lt = pair.log_density(direction.target(), x)?;
            let ls = pair.log_density(source, x)?;
            s = (s + lt - ls).max(0.0);
            peak = peak.max(s);
        }
        max_scores.push(peak);
    }

    let pfa_at = |h: f64| -> u64 { max_scores.iter().filter(|&&peak| peak >= h).count() as u64 };

    let mut lo = 1e-9;
    let mut hi = max_scores.iter().copied().fold(0.0f64, f64::max) + 1.0;
    let mut closest = f64::NAN;
    // Bisect until the measured rate sits well inside its interval around
    // the target; fall back to the best interval-compatible threshold seen.
    let mut best: Option<ThresholdCalibration> = None;
    for iteration in 1..=MAX_BISECTION_ITERS {
        let h = 0.5 * (lo + hi);
        let hits = pfa_at(h);
        let pfa = hits as f64 / runs as f64;
        let ci = wilson_interval(hits, runs, 1.96);
        let miss = (pfa - target_pfa).abs();
        if ci.0 <= target_pfa && target_pfa <= ci.1 {
            let candidate = ThresholdCalibration {
                threshold: h,
                pfa,
                pfa_ci: ci,
                runs,
                iterations: iteration,
            };
            if miss <= 0.3 * 0.5 * (ci.1 - ci.0) {
                return Ok(candidate);
            }
            if best
                .as_ref()
                .map(|b| (b.pfa - target_pfa).abs() > miss)
                .unwrap_or(true)
            {
                best = Some(candidate);
            }
        }
        if closest.is_nan() || miss < (closest - target_pfa).abs() {
            closest = pfa;
        }
        if pfa > target_pfa {
            lo = h;
        } else {
            hi = h;
        }
    }
    if let Some(mut found) = best {
        found.iterations = MAX_BISECTION_ITERS;
        return Ok(found);
    }
    // The target rate is not reachable on these paths (e.g. no pre-change
    // samples at all); report the boundary rate.
    let boundary_pfa = pfa_at(lo.max(1e-9)) as f64 / runs as f64;
    if closest.is_nan() || (boundary_pfa - target_pfa).abs() > 0.5 * target_pfa {
        return Err(Error::CalibrationUnreachable {
            target: target_pfa,
            achieved: boundary_pfa,
            boundary: lo,
        });
    }
    Err(Error::CalibrationDidNotConverge {
        iterations: MAX_BISECTION_ITERS,
        closest,
    })
}
