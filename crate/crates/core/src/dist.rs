//! The pair of known densities the detectors discriminate between.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};

/// Selects one of the two densities of a [`DistributionPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    F0,
    F1,
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

const LN_2PI: f64 = 1.8378770664093453;

/// The two candidate densities `f0` and `f1`.
///
/// `GaussianMeanShift` is the classic mean-shift pair `f0 = N(0, sigma^2)`,
/// `f1 = N(mu, sigma^2)` and supports exact densities, sampling, and analytic
/// moment queries. `Custom` wraps caller-supplied density handles; sampling
/// and Monte-Carlo moment estimation additionally require caller-supplied
/// samplers.
#[derive(Clone)]
pub enum DistributionPair {
    GaussianMeanShift {
        mu: f64,
        sigma: f64,
    },
    Custom {
        f0: DensityFn,
        f1: DensityFn,
        sample_f0: Option<SamplerFn>,
        sample_f1: Option<SamplerFn>,
    },
}

impl fmt::Debug for DistributionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionPair::GaussianMeanShift { mu, sigma } => f
                .debug_struct("GaussianMeanShift")
                .field("mu", mu)
                .field("sigma", sigma)
                .finish(),
            DistributionPair::Custom {
                sample_f0,
                sample_f1,
                ..
            } => f
                .debug_struct("Custom")
                .field("sample_f0", &sample_f0.is_some())
                .field("sample_f1", &sample_f1.is_some())
                .finish(),
        }
    }
}

impl DistributionPair {
    /// Mean-shift pair `f0 = N(0, sigma^2)` vs `f1 = N(mu, sigma^2)`.
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(DistributionPair::GaussianMeanShift { mu, sigma })
    }

    /// Gaussian pair at unit variance with the mean shift implied by
    /// `SNR = mu^2 / sigma^2` given in decibels.
    pub fn gaussian_from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidParams(format!(
                "snr_db must be finite, got {snr_db}"
            )));
        }
        let snr = 10f64.powf(snr_db / 10.0);
        Self::gaussian(snr.sqrt(), 1.0)
    }

    pub fn custom(f0: DensityFn, f1: DensityFn) -> Self {
        DistributionPair::Custom {
            f0,
            f1,
            sample_f0: None,
            sample_f1: None,
        }
    }

    pub fn custom_with_samplers(
        f0: DensityFn,
        f1: DensityFn,
        sample_f0: SamplerFn,
        sample_f1: SamplerFn,
    ) -> Self {
        DistributionPair::Custom {
            f0,
            f1,
            sample_f0: Some(sample_f0),
            sample_f1: Some(sample_f1),
        }
    }

    /// `mu^2 / sigma^2` for the Gaussian pair, `None` for custom pairs.
    pub fn gaussian_snr(&self) -> Option<f64> {
        match self {
            DistributionPair::GaussianMeanShift { mu, sigma } => Some((mu / sigma).powi(2)),
            DistributionPair::Custom { .. } => None,
        }
    }

    /// Evaluates the selected density at `x`.
    pub fn density(&self, which: Which, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        let value = match self {
            DistributionPair::GaussianMeanShift { mu, sigma } => {
                let mean = match which {
                    Which::F0 => 0.0,
                    Which::F1 => *mu,
                };
                let z = (x - mean) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            DistributionPair::Custom { f0, f1, .. } => match which {
                Which::F0 => f0(x),
                Which::F1 => f1(x),
            },
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidDensity { x, value });
        }
        Ok(value)
    }

    /// Log of the selected density at `x`.
    ///
    /// For the Gaussian pair this is computed directly, so it stays finite
    /// arbitrarily far into the tails where `density` itself would round to
    /// zero.
    pub fn log_density(&self, which: Which, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        match self {
            DistributionPair::GaussianMeanShift { mu, sigma } => {
                let mean = match which {
                    Which::F0 => 0.0,
                    Which::F1 => *mu,
                };
                let z = (x - mean) / sigma;
                Ok(-0.5 * z * z - sigma.ln() - 0.5 * LN_2PI)
            }
            DistributionPair::Custom { .. } => {
                let value = self.density(which, x)?;
                let log = value.ln();
                if !log.is_finite() {
                    return Err(Error::InvalidDensity { x, value });
                }
                Ok(log)
            }
        }
    }

    /// Draws one sample from the selected density.
    pub fn sample(&self, which: Which, rng: &mut dyn RngCore) -> Result<f64> {
        match self {
            DistributionPair::GaussianMeanShift { mu, sigma } => {
                let mean = match which {
                    Which::F0 => 0.0,
                    Which::F1 => *mu,
                };
                use rand_distr::Distribution;
                let normal = rand_distr::Normal::new(mean, *sigma)
                    .map_err(|e| Error::InvalidParams(e.to_string()))?;
                Ok(normal.sample(&mut RngAdapter(rng)))
            }
            DistributionPair::Custom {
                sample_f0,
                sample_f1,
                ..
            } => {
                let sampler = match which {
                    Which::F0 => sample_f0.as_ref().ok_or(Error::MissingSampler("f0"))?,
                    Which::F1 => sample_f1.as_ref().ok_or(Error::MissingSampler("f1"))?,
                };
                Ok(sampler(rng))
            }
        }
    }
}

// rand's Distribution::sample needs a sized Rng; wrap the dyn reference.
struct RngAdapter<'a>(&'a mut dyn RngCore);

impl rand::RngCore for RngAdapter<'_> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}
