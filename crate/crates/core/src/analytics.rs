//! Closed forms for a single entanglement-length doubling (`N = 1`).
//!
//! Notation used below: `A` and `B` are the geometric waiting times for
//! generation on the left and right segment, `Z` the waiting time until a
//! connection attempt can be made, `Y` the connection outcome and `T` the
//! time to a successful connection. With a memory lifetime `tau`, both
//! segments must succeed within `tau` units of each other (inclusive);
//! otherwise the first link is held for `tau` units, lost, and the process
//! restarts from vacuum. Each connection attempt costs one unit of classical
//! signalling, which gives `<T> = (<Z> + 1) / P_1`.

use core::fmt;

use crate::math::{one_minus_q_pow, q_pow};
use crate::model::{Probability, TimeUnits};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticError {
    /// A zero probability makes the expected time infinite.
    DivergentMeanTime,
    /// The multiplexing degree must be at least one.
    ZeroElements,
}

impl fmt::Display for AnalyticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticError::DivergentMeanTime => f.write_str("divergent mean time"),
            AnalyticError::ZeroElements => f.write_str("multiplexing degree must be at least 1"),
        }
    }
}

impl core::error::Error for AnalyticError {}

fn require_positive(p: Probability) -> Result<f64, AnalyticError> {
    if p.get() > 0.0 {
        Ok(p.get())
    } else {
        Err(AnalyticError::DivergentMeanTime)
    }
}

/// Expected waiting time, success time and rate of one doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingStats {
    pub mean_z: f64,
    pub mean_t: f64,
    pub rate: f64,
}

/// `<T>` with ideal memories: `(3 - P0^2) / (P0 P1 (2 - P0))`.
pub fn mean_time_infinite(p0: Probability, p1: Probability) -> Result<f64, AnalyticError> {
    let p0 = require_positive(p0)?;
    let p1 = require_positive(p1)?;
    Ok((3.0 - p0 * p0) / (p0 * p1 * (2.0 - p0)))
}

/// The three contributions to `<Z>_tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitingTerms {
    /// Waiting for the first success in either segment, starting from vacuum.
    pub waiting: f64,
    /// Fruitless generation attempts until the first memory expires.
    pub fruitless: f64,
    /// Waiting for the other segment after a first success.
    pub second_segment: f64,
}

impl WaitingTerms {
    pub fn total(&self) -> f64 {
        self.waiting + self.fruitless + self.second_segment
    }
}

/// `<Z>_tau`, split into its three terms.
pub fn mean_z_terms(p0: Probability, tau: TimeUnits) -> Result<WaitingTerms, AnalyticError> {
    let p0 = require_positive(p0)?;
    let tau = tau.as_f64();
    let q = 1.0 - p0;
    let q_tau1 = q_pow(p0, tau + 1.0);
    // 2 - P0 - 2 q^(tau+1) = 2 (1 - q^(tau+1)) - P0, written to avoid
    // cancellation for small P0.
    let denom = 2.0 * one_minus_q_pow(p0, tau + 1.0) - p0;
    let waiting = 1.0 / (p0 * denom);
    let fruitless = 2.0 * tau * q_tau1 / denom;
    // 1 - q^tau (1 + tau P0) = (1 - q^tau) - tau P0 q^tau
    let inner = one_minus_q_pow(p0, tau) - tau * p0 * q_pow(p0, tau);
    let second_segment = 2.0 * q * inner / (p0 * denom);
    Ok(WaitingTerms {
        waiting,
        fruitless,
        second_segment,
    })
}

/// `<Z>_tau` for a finite memory lifetime.
pub fn mean_z_finite(p0: Probability, tau: TimeUnits) -> Result<f64, AnalyticError> {
    mean_z_terms(p0, tau).map(|t| t.total())
}

/// `<T>_tau`, evaluated from its own closed form (not via `<Z>_tau`).
pub fn mean_time_finite(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
) -> Result<f64, AnalyticError> {
    let t_inf = mean_time_infinite(p0, p1)?;
    let p0 = p0.get();
    let p1 = p1.get();
    let half = 1.0 - p0 / 2.0;
    let x = q_pow(p0, tau.as_f64() + 1.0) / half;
    let numerator = t_inf - ((1.0 + p0) / (p0 * p1)) * x;
    // 1 - x = (1 - q^(tau+1) - P0/2) / (1 - P0/2)
    let one_minus_x = (one_minus_q_pow(p0, tau.as_f64() + 1.0) - p0 / 2.0) / half;
    Ok(numerator / one_minus_x)
}

/// `<Z>_tau`, `<T>_tau` and the rate `1 / <T>_tau` for `n = 1`.
pub fn doubling_stats(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
) -> Result<DoublingStats, AnalyticError> {
    let mean_z = mean_z_finite(p0, tau)?;
    let mean_t = (mean_z + 1.0) / require_positive(p1)?;
    Ok(DoublingStats {
        mean_z,
        mean_t,
        rate: 1.0 / mean_t,
    })
}

/// Small-`P0` approximation of `<Z>_tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticZ {
    pub value: f64,
    /// True when `P0 (tau + 1) < 1`, where the approximation is meant to
    /// apply. It is only accurate when this product is much below one.
    pub in_regime: bool,
}

pub fn mean_z_asymptotic(p0: Probability, tau: TimeUnits) -> Result<AsymptoticZ, AnalyticError> {
    let p0 = require_positive(p0)?;
    let tau = tau.as_f64();
    let s = 1.0 + 2.0 * tau;
    let value = 1.0 / (p0 * p0 * s) + 2.0 * tau / (p0 * s) + 2.0 * tau * tau * (1.0 - p0) / s;
    Ok(AsymptoticZ {
        value,
        in_regime: asymptotic_regime(p0, tau),
    })
}

/// Regime predicate for [`mean_z_asymptotic`]: `P0 < 1 / (tau + 1)`.
pub fn asymptotic_regime(p0: f64, tau: f64) -> bool {
    p0 * (tau + 1.0) < 1.0
}

/// Approximate long-run connection rate of an `N = 1` multiplexed repeater
/// with `n` elements per site, and the residual-entanglement factor `alpha`
/// (`1 - alpha` approximates the probability of residual entanglement).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplexedRate {
    pub rate: f64,
    pub alpha: f64,
}

pub fn multiplexed_rate(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
    n: u32,
) -> Result<MultiplexedRate, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::ZeroElements);
    }
    let p0 = require_positive(p0)?;
    let p1 = require_positive(p1)?;
    let nf = n as f64;
    let tau = tau.as_f64();
    let omqp = |k: f64| one_minus_q_pow(p0, k);

    // At n = 1 every factor of alpha cancels.
    let alpha = if n == 1 {
        1.0
    } else {
        alpha_factor(p0, tau, nf)
    };

    // Powers of q appear as 1 - q^k throughout so small P0 does not cancel:
    //   1 + q^n - 2q^(n(tau+1))  = 2(1 - q^(n(tau+1))) - (1 - q^n)
    //   1 + 2q^n - q^2n - 4q^(n(tau+1)) + 2q^(n(tau+2))
    //     = 4(1 - q^(n(tau+1))) - 2(1 - q^(n(tau+2))) - (1 - q^n)^2
    let omqn = omqp(nf);
    let numerator = p1 * omqn * (2.0 * omqp(nf * (tau + 1.0)) - omqn);
    let denominator =
        4.0 * omqp(nf * (tau + 1.0)) - 2.0 * omqp(nf * (tau + 2.0)) - omqn * omqn + alpha;
    Ok(MultiplexedRate {
        rate: numerator / denominator,
        alpha,
    })
}

/// General expression for `alpha`; the inner exponent is `tau (2n - 1)`.
fn alpha_factor(p0: f64, tau: f64, n: f64) -> f64 {
    let qp = |k: f64| q_pow(p0, k);
    let omqp = |k: f64| one_minus_q_pow(p0, k);
    let m = 2.0 * n - 1.0;
    let inner = omqp(m) + 2.0 * qp(3.0 * n - 2.0) * omqp(tau * m);
    let shared = 2.0 * omqp(n * (tau + 1.0)) - omqp(n);
    qp(n - 1.0) * omqp(n) * inner / (omqp(m) * shared)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ideal_memory_examples() {
        assert_eq!(mean_time_infinite(p(1.0), p(1.0)).unwrap(), 2.0);
        assert!(rel(mean_time_infinite(p(0.5), p(1.0)).unwrap(), 11.0 / 3.0) < 1e-15);
        assert!(
            rel(
                mean_time_infinite(p(0.01), p(0.5)).unwrap(),
                301.497_487_437_185_9
            ) < 1e-12
        );
    }

    #[test]
    fn zero_probability_diverges() {
        assert_eq!(
            mean_time_infinite(p(0.0), p(1.0)),
            Err(AnalyticError::DivergentMeanTime)
        );
        assert_eq!(
            mean_time_infinite(p(0.3), p(0.0)),
            Err(AnalyticError::DivergentMeanTime)
        );
        assert_eq!(
            mean_z_finite(p(0.0), TimeUnits(3)),
            Err(AnalyticError::DivergentMeanTime)
        );
        assert!(mean_time_finite(p(0.2), p(0.0), TimeUnits(3)).is_err());
        assert!(mean_z_asymptotic(p(0.0), TimeUnits(1)).is_err());
        assert!(multiplexed_rate(p(0.0), p(1.0), TimeUnits(1), 3).is_err());
        assert_eq!(
            multiplexed_rate(p(0.2), p(1.0), TimeUnits(1), 0),
            Err(AnalyticError::ZeroElements)
        );
    }

    #[test]
    fn zero_lifetime_needs_simultaneous_success() {
        let terms = mean_z_terms(p(0.2), TimeUnits(0)).unwrap();
        assert!(rel(terms.total(), 25.0) < 1e-14);
        assert_eq!(terms.fruitless, 0.0);
        assert!(terms.second_segment.abs() < 1e-15);
    }

    #[test]
    fn unit_lifetime_terms() {
        // Values from the two-state hitting-time recursion
        // E0 = 1 + 2pq (1 + q E0) + q^2 E0 at p = 0.2.
        let terms = mean_z_terms(p(0.2), TimeUnits(1)).unwrap();
        assert!(rel(terms.total(), 165.0 / 13.0) < 1e-13);
        assert!(rel(terms.waiting, 125.0 / 13.0) < 1e-13);
        assert!(rel(terms.fruitless, 32.0 / 13.0) < 1e-13);
        assert!(rel(terms.second_segment, 8.0 / 13.0) < 1e-13);
        assert!(
            rel(
                mean_time_finite(p(0.2), p(1.0), TimeUnits(1)).unwrap(),
                178.0 / 13.0
            ) < 1e-13
        );
    }

    #[test]
    fn long_lifetime_reaches_ideal_limit() {
        let z = mean_z_finite(p(0.2), TimeUnits(500)).unwrap();
        assert!(rel(z, 2.6 / 0.36) < 1e-12);
        let t = mean_time_finite(p(0.2), p(0.7), TimeUnits(10_000)).unwrap();
        assert!(rel(t, mean_time_infinite(p(0.2), p(0.7)).unwrap()) < 1e-12);
    }

    #[test]
    fn asymptotic_examples() {
        let a = mean_z_asymptotic(p(0.2), TimeUnits(0)).unwrap();
        assert!(rel(a.value, 25.0) < 1e-14);
        let a = mean_z_asymptotic(p(0.001), TimeUnits(10)).unwrap();
        let exact = mean_z_finite(p(0.001), TimeUnits(10)).unwrap();
        assert!(a.in_regime);
        assert!(rel(a.value, exact) < 0.02);
        let a = mean_z_asymptotic(p(0.5), TimeUnits(100)).unwrap();
        assert!(!a.in_regime);
        assert!(a.value.is_finite());
    }

    #[test]
    fn single_element_alpha_is_one() {
        for &(p0, tau) in &[(0.2, 1u64), (0.01, 0), (0.9, 40), (1.0, 3)] {
            let r = multiplexed_rate(p(p0), p(0.5), TimeUnits(tau), 1).unwrap();
            assert_eq!(r.alpha, 1.0);
        }
        let r = multiplexed_rate(p(0.2), p(1.0), TimeUnits(1), 1).unwrap();
        assert!(rel(r.rate, 13.0 / 178.0) < 1e-13);
    }

    #[test]
    fn general_alpha_expression_is_one_at_single_element() {
        for &(p0, tau) in &[(0.2, 1.0), (0.01, 0.0), (0.9, 40.0), (0.5, 7.0)] {
            assert!((alpha_factor(p0, tau, 1.0) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn alpha_breaks_down_for_large_n_and_tau() {
        let r = multiplexed_rate(p(0.1), p(1.0), TimeUnits(200), 50).unwrap();
        assert!(r.alpha < 0.05, "alpha = {}", r.alpha);
    }

    #[test]
    fn alpha_general_form_matches_reference_at_n2() {
        // Direct evaluation with plain powers.
        let (p0, p1, tau, n) = (0.2f64, 0.5f64, 2.0f64, 2.0f64);
        let q: f64 = 1.0 - p0;
        let qn = q.powf(n);
        let alpha = q.powf(n - 1.0)
            * (1.0 - qn)
            * (1.0 - q.powf(2.0 * n - 1.0)
                + 2.0 * q.powf(3.0 * n - 2.0) * (1.0 - q.powf(tau * (2.0 * n - 1.0))))
            / ((1.0 - q.powf(2.0 * n - 1.0)) * (1.0 + qn - 2.0 * q.powf((tau + 1.0) * n)));
        let rate = p1 * (1.0 - qn) * (1.0 + qn - 2.0 * q.powf(n * (tau + 1.0)))
            / (1.0 + 2.0 * qn - q.powf(2.0 * n) - 4.0 * q.powf(n * (tau + 1.0))
                + 2.0 * q.powf(n * (tau + 2.0))
                + alpha);
        let r = multiplexed_rate(p(p0), p(p1), TimeUnits(2), 2).unwrap();
        assert!(rel(r.alpha, alpha) < 1e-13);
        assert!(rel(r.rate, rate) < 1e-13);
    }
}
