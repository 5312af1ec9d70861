//! Log-domain accumulation helpers.
//!
//! All risk arithmetic in this crate happens on logarithms: hypothesis
//! weights decay exponentially with the number of samples and the cost
//! exponents grow with it, so linear-domain doubles would under/overflow on
//! runs of a few hundred samples.

use std::cell::Cell;

/// Additive identity of log-domain sums (`log 0`).
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

thread_local! {
    static LSE_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of `log_add_exp`/`log_sub_exp` calls made on this thread so far.
///
/// Tests use the counter to assert that the streaming detector performs a
/// bounded, horizon-independent amount of work per sample.
pub fn lse_call_count() -> u64 {
    LSE_CALLS.with(|c| c.get())
}

pub fn reset_lse_call_count() {
    LSE_CALLS.with(|c| c.set(0));
}

#[inline]
fn count_call() {
    LSE_CALLS.with(|c| c.set(c.get() + 1));
}

/// Returns `log(exp(a) + exp(b))` without leaving the log domain.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    count_call();
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Returns `log(exp(a) - exp(b))` for `a >= b`.
///
/// Differences within `1e-12` of total cancellation collapse to [`LOG_ZERO`]
/// rather than producing `NaN` or a meaningless tiny residue.
#[inline]
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    count_call();
    if b == LOG_ZERO {
        return a;
    }
    if a == LOG_ZERO {
        return LOG_ZERO;
    }
    let d = b - a;
    if d >= -1e-12 {
        return LOG_ZERO;
    }
    a + (-d.exp()).ln_1p()
}

/// Returns `log(sum(exp(values)))` using the max-subtract transform.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(LOG_ZERO, f64::max);
    if max == LOG_ZERO {
        return LOG_ZERO;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual}"
        );
    }

    #[test]
    fn log_add_exp_matches_linear_domain() {
        let v = log_add_exp(0.5f64.ln(), 0.25f64.ln());
        assert_close(v, 0.75f64.ln(), 1e-14);
    }

    #[test]
    fn log_add_exp_handles_log_zero() {
        assert_eq!(log_add_exp(LOG_ZERO, -3.0), -3.0);
        assert_eq!(log_add_exp(-3.0, LOG_ZERO), -3.0);
        assert_eq!(log_add_exp(LOG_ZERO, LOG_ZERO), LOG_ZERO);
    }

    #[test]
    fn log_add_exp_extreme_magnitudes() {
        assert_close(log_add_exp(1000.0, -1000.0), 1000.0, 1e-12);
    }

    #[test]
    fn log_sub_exp_matches_linear_domain() {
        let v = log_sub_exp(0.75f64.ln(), 0.25f64.ln());
        assert_close(v, 0.5f64.ln(), 1e-14);
    }

    #[test]
    fn log_sub_exp_clamps_cancellation() {
        assert_eq!(log_sub_exp(1.25, 1.25), LOG_ZERO);
        assert_eq!(log_sub_exp(1.25, 1.25 - 1e-15), LOG_ZERO);
        assert_eq!(log_sub_exp(LOG_ZERO, LOG_ZERO), LOG_ZERO);
        assert_eq!(log_sub_exp(-4.0, LOG_ZERO), -4.0);
    }

    #[test]
    fn log_sum_exp_empty_is_log_zero() {
        assert_eq!(log_sum_exp(&[]), LOG_ZERO);
        assert_eq!(log_sum_exp(&[LOG_ZERO, LOG_ZERO]), LOG_ZERO);
    }

    #[test]
    fn log_sum_exp_agrees_with_pairwise_adds() {
        let values = [-2.0, -0.5, -7.25, -1.0];
        let pairwise = values.iter().fold(LOG_ZERO, |acc, &v| log_add_exp(acc, v));
        assert_close(log_sum_exp(&values), pairwise, 1e-13);
    }

    #[test]
    fn call_counter_counts_pairwise_ops() {
        reset_lse_call_count();
        let base = lse_call_count();
        let _ = log_add_exp(-1.0, -2.0);
        let _ = log_sub_exp(-1.0, -2.0);
        assert_eq!(lse_call_count() - base, 2);
    }
}
