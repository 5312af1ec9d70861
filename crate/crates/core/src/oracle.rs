//! Brute-force risk evaluation, recomputed from scratch at every horizon.
//!
//! This module is deliberately the slow, obviously-correct reference: it
//! materializes the log weight of every hypothesis and sums every
//! (cost, weight) pair, `O(n^2)` work per horizon. The streaming detector is
//! tested against it.
//!
//! Weights are unnormalized: equal hypothesis priors and the evidence term
//! are common positive factors across all hypotheses, so dropping them scales
//! every risk identically and cannot change any argmin.

use crate::dist::{DistributionPair, Which};
use crate::error::{Error, Result};
use crate::hypothesis::{log_cost, CostParams, Decision, HypothesisLabel, Side, NO_CHANGE_RISK};
use crate::numerics::{log_add_exp, LOG_ZERO};

/// Unnormalized log posterior weights of all `2n` hypotheses at horizon `n`.
///
/// `log_w_a[j-1]` is the side-A weight of change index `j`: the sum of
/// `log f0` over samples before `j` plus `log f1` from `j` on (all `log f0`
/// for `j = 1`). `log_w_b` mirrors it with the densities swapped.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub n: usize,
    pub log_w_a: Vec<f64>,
    pub log_w_b: Vec<f64>,
}

/// Computes the weight table by prefix sums of the log densities.
pub fn weights(pair: &DistributionPair, samples: &[f64]) -> Result<WeightTable> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample sequence".into()));
    }
    let n = samples.len();
    // prefix0[i] = sum of log f0 over the first i samples
    let mut prefix0 = Vec::with_capacity(n + 1);
    let mut prefix1 = Vec::with_capacity(n + 1);
    prefix0.push(0.0);
    prefix1.push(0.0);
    for &x in samples {
        let lf0 = pair.log_density(Which::F0, x)?;
        let lf1 = pair.log_density(Which::F1, x)?;
        prefix0.push(prefix0.last().unwrap() + lf0);
        prefix1.push(prefix1.last().unwrap() + lf1);
    }
    let total0 = prefix0[n];
    let total1 = prefix1[n];
    let mut log_w_a = Vec::with_capacity(n);
    let mut log_w_b = Vec::with_capacity(n);
    log_w_a.push(total0);
    log_w_b.push(total1);
    for j in 2..=n {
        log_w_a.push(prefix0[j - 1] + (total1 - prefix1[j - 1]));
        log_w_b.push(prefix1[j - 1] + (total0 - prefix0[j - 1]));
    }
    Ok(WeightTable {
        n,
        log_w_a,
        log_w_b,
    })
}

/// Log-domain risks of declaring each change index on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskTable {
    pub n: usize,
    pub log_risk_a: Vec<f64>,
    pub log_risk_b: Vec<f64>,
}

impl RiskTable {
    /// Minimum change risk (`k >= 2`) on a side, with its argmin. Smallest
    /// achieving index wins exact ties.
    pub fn min_change_risk(&self, side: Side) -> Option<(f64, u64)> {
        let risks = match side {
            Side::A => &self.log_risk_a,
            Side::B => &self.log_risk_b,
        };
        risks
            .iter()
            .enumerate()
            .skip(1)
            .fold(None, |best: Option<(f64, u64)>, (idx, &risk)| match best {
                Some((b, _)) if b <= risk => best,
                _ => Some((risk, (idx + 1) as u64)),
            })
    }
}

/// Evaluates every hypothesis risk from scratch.
pub fn exact_risks(
    pair: &DistributionPair,
    samples: &[f64],
    params: &CostParams,
) -> Result<RiskTable> {
    let table = weights(pair, samples)?;
    let n = table.n;
    let risk_for = |choice: HypothesisLabel| -> f64 {
        let mut acc = LOG_ZERO;
        for j in 1..=n as u64 {
            for (truth_side, w) in [
                (Side::A, table.log_w_a[(j - 1) as usize]),
                (Side::B, table.log_w_b[(j - 1) as usize]),
            ] {
                if let Some(lc) =
                    log_cost(choice, HypothesisLabel::new(truth_side, j), n as u64, params)
                {
                    acc = log_add_exp(acc, lc + w);
                }
            }
        }
        acc
    };
    let mut log_risk_a = Vec::with_capacity(n);
    let mut log_risk_b = Vec::with_capacity(n);
    for k in 1..=n as u64 {
        log_risk_a.push(risk_for(HypothesisLabel::new(Side::A, k)));
        log_risk_b.push(risk_for(HypothesisLabel::new(Side::B, k)));
    }
    Ok(RiskTable {
        n,
        log_risk_a,
        log_risk_b,
    })
}

/// Global minimum-risk hypothesis with the four summary risks.
pub fn exact_argmin(risks: &RiskTable) -> Decision {
    let (change_a, k_a) = match risks.min_change_risk(Side::A) {
        Some((r, k)) => (r, Some(k)),
        None => (NO_CHANGE_RISK, None),
    };
    let (change_b, k_b) = match risks.min_change_risk(Side::B) {
        Some((r, k)) => (r, Some(k)),
        None => (NO_CHANGE_RISK, None),
    };
    Decision::from_summaries(
        risks.log_risk_a[0],
        risks.log_risk_b[0],
        change_a,
        k_a,
        change_b,
        k_b,
    )
}
