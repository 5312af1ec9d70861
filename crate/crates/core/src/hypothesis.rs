//! Hypothesis vocabulary, cost structure, and decisions.
//!
//! At horizon `n` the candidate hypotheses are, per side:
//! - change index 1: no change, every sample from this side's starting
//!   density (side A starts at `f0`, side B at `f1`);
//! - change index `j` in `2..=n`: samples before `j` from the starting
//!   density, samples from `j` on from the other one.
//!
//! Costs grow exponentially in time so that risks remain comparable across
//! horizons: delay at base `a`, incorrect-direction declarations at base `c`,
//! and a flat false-alarm cost `b`.

use std::fmt;

use crate::error::{Error, Result};

/// Which starting density a hypothesis assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Starts at `f0` (changes, if any, switch to `f1`).
    A,
    /// Starts at `f1` (changes, if any, switch to `f0`).
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// One of the `2n` candidate hypotheses: a side and a change index.
///
/// `change_index == 1` means "no change"; `change_index == j >= 2` means the
/// switch happened at sample `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HypothesisLabel {
    pub side: Side,
    pub change_index: u64,
}

impl HypothesisLabel {
    pub fn new(side: Side, change_index: u64) -> Self {
        assert!(change_index >= 1, "change_index must be >= 1");
        HypothesisLabel { side, change_index }
    }

    pub fn is_change(&self) -> bool {
        self.change_index >= 2
    }
}

impl fmt::Display for HypothesisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side, self.change_index)
    }
}

/// The cost triple: unit delay cost base `a > 1`, false-alarm cost
/// `0 < b < inf`, and unit incorrect-detection cost base `c > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CostParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && a > 1.0) {
            return Err(Error::InvalidParams(format!("a must be > 1, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParams(format!(
                "b must be positive and finite, got {b}"
            )));
        }
        if !(c.is_finite() && c > 1.0) {
            return Err(Error::InvalidParams(format!("c must be > 1, got {c}")));
        }
        Ok(CostParams { a, b, c })
    }
}

/// Log of the cost of declaring `choice` when `truth` holds at horizon `n`,
/// or `None` when the cost is zero.
///
/// Same-side costs, with `k` the chosen and `j` the true change index:
/// - `k = 1`: `0` if `j = 1`, else `a^(n-j+1)` (delay since the change);
/// - `k >= 2`: `0` if `j = k`; `a^(k-j)` if `2 <= j < k` (late by `k - j`);
///   `b` if `j = 1` or `j > k` (declared a change that has not happened yet).
///
/// Cross-side costs:
/// - `k = 1`: `c^n` if `j = 1`, else `c^(j-1)`;
/// - `k >= 2`: `c^(k-1)` if `j = 1`; `a^(j-1) c^(n-k+1)` if `1 < j < k`;
///   `a^(k-1) c^(n-j+1)` if `j >= k`.
///
/// Costs are symmetric under swapping both sides, so only the same/cross
/// distinction matters.
pub fn log_cost(
    choice: HypothesisLabel,
    truth: HypothesisLabel,
    n: u64,
    params: &CostParams,
) -> Option<f64> {
    let k = choice.change_index;
    let j = truth.change_index;
    assert!(
        (1..=n).contains(&k) && (1..=n).contains(&j),
        "change indices must lie in 1..=n (k = {k}, j = {j}, n = {n})"
    );
    let la = params.a.ln();
    let lb = params.b.ln();
    let lc = params.c.ln();
    if choice.side == truth.side {
        if k == 1 {
            if j == 1 {
                None
            } else {
                Some((n - j + 1) as f64 * la)
            }
        } else if j == k {
            None
        } else if (2..k).contains(&j) {
            Some((k - j) as f64 * la)
        } else {
            // j = 1 or j > k: a false alarm relative to the truth.
            Some(lb)
        }
    } else if k == 1 {
        if j == 1 {
            Some(n as f64 * lc)
        } else {
            Some((j - 1) as f64 * lc)
        }
    } else if j == 1 {
        Some((k - 1) as f64 * lc)
    } else if j < k {
        Some((j - 1) as f64 * la + (n - k + 1) as f64 * lc)
    } else {
        Some((k - 1) as f64 * la + (n - j + 1) as f64 * lc)
    }
}

/// Linear-domain cost; overflows for horizons where `c^n` exceeds `f64`
/// range, so risk computations use [`log_cost`] instead.
pub fn cost(choice: HypothesisLabel, truth: HypothesisLabel, n: u64, params: &CostParams) -> f64 {
    match log_cost(choice, truth, n, params) {
        None => 0.0,
        Some(l) => l.exp(),
    }
}

/// The minimum-risk hypothesis at some horizon together with the four risk
/// summaries it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub winner: HypothesisLabel,
    /// Log-domain risks in fixed order: no-change side A, no-change side B,
    /// best change side A, best change side B. Change entries are `+inf`
    /// before any change hypothesis exists (horizon 1).
    pub risks: [f64; 4],
    /// Change index attaining each side's change-risk minimum.
    pub k_min_a: Option<u64>,
    pub k_min_b: Option<u64>,
}

impl Decision {
    /// Picks the winner from the four summaries. Exact ties resolve in the
    /// fixed order A-no-change, B-no-change, A-change, B-change.
    pub fn from_summaries(
        no_change_a: f64,
        no_change_b: f64,
        change_a: f64,
        k_min_a: Option<u64>,
        change_b: f64,
        k_min_b: Option<u64>,
    ) -> Decision {
        let mut winner = HypothesisLabel::new(Side::A, 1);
        let mut best = no_change_a;
        let mut consider = |risk: f64, label: HypothesisLabel| {
            if risk < best {
                best = risk;
                winner = label;
            }
        };
        consider(no_change_b, HypothesisLabel::new(Side::B, 1));
        if let Some(k) = k_min_a {
            consider(change_a, HypothesisLabel::new(Side::A, k));
        }
        if let Some(k) = k_min_b {
            consider(change_b, HypothesisLabel::new(Side::B, k));
        }
        Decision {
            winner,
            risks: [no_change_a, no_change_b, change_a, change_b],
            k_min_a,
            k_min_b,
        }
    }

    /// True when the winning hypothesis declares that a change occurred.
    pub fn declares_change(&self) -> bool {
        self.winner.is_change()
    }
}

/// Risk placeholder reported while no change hypothesis exists (horizon 1).
pub(crate) const NO_CHANGE_RISK: f64 = f64::INFINITY;
