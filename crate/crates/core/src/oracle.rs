//! Exact expected hitting times and long-run rates on small instances.
//!
//! The `N = 1` multiplexed chain is written out as a finite Markov chain
//! whose state after each time step is
//!
//! - the ages of the idle links in the left and right segment (after
//!   matching at most one side holds links), each age in `0..=tau`;
//! - the number of connection attempts in flight (all resolve on the next
//!   step, the classical signalling cost being one unit).
//!
//! One step applies, in order: aging and expiry (`age > tau` is dropped),
//! generation on every vacuum element pair, resolution of in-flight
//! attempts (success counts as reward, all consumed elements return to
//! vacuum), and oldest-first pairing of left and right links.
//!
//! With `n = 1` and the success treated as absorbing this is the doubling
//! process whose mean absorption time is `<T>_tau`; with `n > 1` the
//! stationary reward rate is the exact connection rate including residual
//! entanglement. Both are solved by dense Gaussian elimination.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Probability, TimeUnits};

/// Largest chain the oracle will build.
pub const MAX_STATES: usize = 2048;
/// Largest lifetime accepted by [`exact_mean_time_doubling`].
pub const MAX_DOUBLING_TAU: u64 = 64;
/// Largest element count accepted by [`exact_rate_multiplexed`].
pub const MAX_RATE_ELEMENTS: u32 = 3;
/// Largest lifetime accepted by [`exact_rate_multiplexed`].
pub const MAX_RATE_TAU: u64 = 8;

const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleError {
    /// The instance exceeds the oracle's size limits.
    TooLarge,
    /// A probability parameter is zero, so the quantity diverges.
    Divergent,
    /// A transition row does not sum to one.
    RowSum {
        state: usize,
        sum: f64,
    },
    /// An absorbing state does not loop on itself with probability one.
    AbsorbingLeak {
        state: usize,
    },
    Singular,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge => f.write_str("oracle instance too large"),
            OracleError::Divergent => f.write_str("divergent mean time"),
            OracleError::RowSum { state, sum } => {
                write!(f, "transition row {state} sums to {sum}")
            }
            OracleError::AbsorbingLeak { state } => {
                write!(f, "absorbing state {state} does not self-loop")
            }
            OracleError::Singular => f.write_str("singular linear system"),
        }
    }
}

impl core::error::Error for OracleError {}

/// A transition with the number of successes it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub prob: f64,
    pub reward: u32,
}

/// A finite Markov chain with per-transition rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub state_count: usize,
    pub transitions: Vec<Transition>,
    pub absorbing: Vec<bool>,
}

impl ChainSpec {
    /// Dense row-major transition matrix.
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.state_count;
        let mut m = vec![0.0; n * n];
        for t in &self.transitions {
            m[t.from * n + t.to] += t.prob;
        }
        m
    }

    /// Checks row sums and absorbing self-loops.
    pub fn check(&self) -> Result<(), OracleError> {
        let n = self.state_count;
        let m = self.matrix();
        for i in 0..n {
            let row = &m[i * n..(i + 1) * n];
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(OracleError::RowSum { state: i, sum });
            }
            if self.absorbing[i] && (row[i] - 1.0).abs() > ROW_TOLERANCE {
                return Err(OracleError::AbsorbingLeak { state: i });
            }
        }
        Ok(())
    }

    /// Expected number of steps to reach an absorbing state, per state.
    pub fn hitting_times(&self) -> Result<Vec<f64>, OracleError> {
        let n = self.state_count;
        let transient: Vec<usize> = (0..n).filter(|&i| !self.absorbing[i]).collect();
        let mut index = vec![usize::MAX; n];
        for (k, &i) in transient.iter().enumerate() {
            index[i] = k;
        }
        let m = transient.len();
        let mut a = vec![0.0; m * m];
        for k in 0..m {
            a[k * m + k] = 1.0;
        }
        for t in &self.transitions {
            if self.absorbing[t.from] || self.absorbing[t.to] {
                continue;
            }
            a[index[t.from] * m + index[t.to]] -= t.prob;
        }
        let x = solve_dense(a, vec![1.0; m], m)?;
        let mut out = vec![0.0; n];
        for (k, &i) in transient.iter().enumerate() {
            out[i] = x[k];
        }
        Ok(out)
    }

    /// Stationary distribution (assumes a single recurrent class).
    pub fn stationary(&self) -> Result<Vec<f64>, OracleError> {
        let n = self.state_count;
        let p = self.matrix();
        // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[j * n + i] = p[i * n + j];
            }
            a[i * n + i] -= 1.0;
        }
        for j in 0..n {
            a[(n - 1) * n + j] = 1.0;
        }
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        solve_dense(a, b, n)
    }

    /// Expected reward of one step out of each state.
    pub fn expected_reward(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.state_count];
        for t in &self.transitions {
            r[t.from] += t.prob * t.reward as f64;
        }
        r
    }

    /// Long-run reward per step under the stationary distribution.
    pub fn long_run_rate(&self) -> Result<f64, OracleError> {
        let pi = self.stationary()?;
        let r = self.expected_reward();
        Ok(pi.iter().zip(&r).map(|(p, r)| p * r).sum())
    }
}

/// Solves `a x = b` for a dense row-major `n x n` matrix by Gaussian
/// elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>, OracleError> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .ok_or(OracleError::Singular)?;
        if a[pivot * n + col].abs() < 1e-300 {
            return Err(OracleError::Singular);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct DoublingState {
    /// Idle link ages, sorted ascending.
    left: Vec<u32>,
    right: Vec<u32>,
    in_flight: u32,
}

/// Parameters of the `N = 1` chain.
#[derive(Debug, Clone, Copy)]
struct DoublingModel {
    n: u32,
    p0: f64,
    p1: f64,
    tau: u32,
    concurrent: bool,
}

fn binomial_pmf(k: u32, m: u32, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (m - i) as f64 / (i + 1) as f64;
    }
    c * libm::pow(p, k as f64) * libm::pow(1.0 - p, (m - k) as f64)
}

impl DoublingModel {
    /// Successor distribution of `s` as `(next state, successes, prob)`.
    fn step(&self, s: &DoublingState) -> Vec<(DoublingState, u32, f64)> {
        let age = |v: &Vec<u32>| -> Vec<u32> {
            v.iter().map(|a| a + 1).filter(|&a| a <= self.tau).collect()
        };
        let left = age(&s.left);
        let right = age(&s.right);
        let c = s.in_flight;
        let free_l = self.n - left.len() as u32 - c;
        let free_r = self.n - right.len() as u32 - c;
        let generate = self.concurrent || c == 0;
        let (gl_max, gr_max) = if generate { (free_l, free_r) } else { (0, 0) };
        let mut out = Vec::new();
        for gl in 0..=gl_max {
            let pl = if generate {
                binomial_pmf(gl, free_l, self.p0)
            } else {
                1.0
            };
            for gr in 0..=gr_max {
                let pr = if generate {
                    binomial_pmf(gr, free_r, self.p0)
                } else {
                    1.0
                };
                let mut l = left.clone();
                let mut r = right.clone();
                l.extend(core::iter::repeat_n(0, gl as usize));
                r.extend(core::iter::repeat_n(0, gr as usize));
                l.sort_unstable();
                r.sort_unstable();
                let m = l.len().min(r.len());
                // Oldest links (largest ages) are paired first.
                l.truncate(l.len() - m);
                r.truncate(r.len() - m);
                let next = DoublingState {
                    left: l,
                    right: r,
                    in_flight: m as u32,
                };
                for succ in 0..=c {
                    let prob = pl * pr * binomial_pmf(succ, c, self.p1);
                    if prob > 0.0 {
                        out.push((next.clone(), succ, prob));
                    }
                }
            }
        }
        out
    }

    /// Builds the chain reachable from vacuum. With `absorb_on_success`,
    /// every transition with a success goes to a single absorbing state.
    fn build(&self, absorb_on_success: bool) -> Result<ChainSpec, OracleError> {
        let start = DoublingState {
            left: Vec::new(),
            right: Vec::new(),
            in_flight: 0,
        };
        let mut index: BTreeMap<DoublingState, usize> = BTreeMap::new();
        let mut order = vec![start.clone()];
        index.insert(start, 0);
        // State 0 is vacuum; the absorbing state, if any, is appended last.
        let mut raw: Vec<(usize, usize, f64, u32)> = Vec::new();
        let mut to_absorb: Vec<(usize, f64, u32)> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let state = order[i].clone();
            for (next, succ, prob) in self.step(&state) {
                if absorb_on_success && succ > 0 {
                    to_absorb.push((i, prob, succ));
                    continue;
                }
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if order.len() >= MAX_STATES {
                            return Err(OracleError::TooLarge);
                        }
                        order.push(next.clone());
                        index.insert(next, order.len() - 1);
                        order.len() - 1
                    }
                };
                raw.push((i, j, prob, succ));
            }
            i += 1;
        }
        let mut n = order.len();
        let mut absorbing = vec![false; n];
        let mut transitions: Vec<Transition> = raw
            .into_iter()
            .map(|(from, to, prob, reward)| Transition {
                from,
                to,
                prob,
                reward,
            })
            .collect();
        if absorb_on_success {
            let done = n;
            n += 1;
            absorbing.push(true);
            transitions.extend(
                to_absorb
                    .into_iter()
                    .map(|(from, prob, reward)| Transition {
                        from,
                        to: done,
                        prob,
                        reward,
                    }),
            );
            transitions.push(Transition {
                from: done,
                to: done,
                prob: 1.0,
                reward: 0,
            });
        }
        Ok(ChainSpec {
            state_count: n,
            transitions,
            absorbing,
        })
    }
}

/// The `n = 1` doubling chain with success absorbing.
pub fn doubling_chain(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
) -> Result<ChainSpec, OracleError> {
    if tau.0 > MAX_DOUBLING_TAU {
        return Err(OracleError::TooLarge);
    }
    DoublingModel {
        n: 1,
        p0: p0.get(),
        p1: p1.get(),
        tau: tau.0 as u32,
        concurrent: false,
    }
    .build(true)
}

/// Exact `<T>_tau` of one doubling from vacuum, including one unit of
/// signalling per connection attempt and full reset on failure.
pub fn exact_mean_time_doubling(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
) -> Result<f64, OracleError> {
    if p0.is_zero() || p1.is_zero() {
        return Err(OracleError::Divergent);
    }
    let chain = doubling_chain(p0, p1, tau)?;
    chain.check()?;
    Ok(chain.hitting_times()?[0])
}

/// The `N = 1`, `n`-element multiplexed chain as a recurrent chain with
/// connection successes as rewards.
pub fn multiplexed_chain(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
    n: u32,
    concurrent_generation: bool,
) -> Result<ChainSpec, OracleError> {
    if n == 0 || n > MAX_RATE_ELEMENTS || tau.0 > MAX_RATE_TAU {
        return Err(OracleError::TooLarge);
    }
    DoublingModel {
        n,
        p0: p0.get(),
        p1: p1.get(),
        tau: tau.0 as u32,
        concurrent: concurrent_generation,
    }
    .build(false)
}

/// Exact long-run connection rate of the `N = 1` multiplexed repeater with
/// generation paused while attempts are in flight.
pub fn exact_rate_multiplexed(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
    n: u32,
) -> Result<f64, OracleError> {
    exact_rate_multiplexed_with(p0, p1, tau, n, false)
}

/// As [`exact_rate_multiplexed`], choosing whether idle elements keep
/// generating while attempts are in flight.
pub fn exact_rate_multiplexed_with(
    p0: Probability,
    p1: Probability,
    tau: TimeUnits,
    n: u32,
    concurrent_generation: bool,
) -> Result<f64, OracleError> {
    if p0.is_zero() || p1.is_zero() {
        return Ok(0.0);
    }
    let chain = multiplexed_chain(p0, p1, tau, n, concurrent_generation)?;
    chain.check()?;
    chain.long_run_rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn deterministic_doubling() {
        assert!(
            (exact_mean_time_doubling(p(1.0), p(1.0), TimeUnits(0)).unwrap() - 2.0).abs() < 1e-12
        );
    }

    #[test]
    fn unit_lifetime_matches_hand_recursion() {
        let t = exact_mean_time_doubling(p(0.2), p(1.0), TimeUnits(1)).unwrap();
        assert!((t - 178.0 / 13.0).abs() < 1e-10);
    }

    #[test]
    fn frozen_regression() {
        // Frozen from an independent numpy evaluation of the same chain.
        let t = exact_mean_time_doubling(p(0.5), p(0.5), TimeUnits(3)).unwrap();
        assert!((t - 82.0 / 11.0).abs() < 1e-10, "{t}");
    }

    #[test]
    fn state_space_is_small() {
        let chain = doubling_chain(p(0.3), p(0.5), TimeUnits(10)).unwrap();
        // vacuum, one side holding ages 0..=tau, one attempt in flight, absorbing
        assert_eq!(chain.state_count, 2 * 11 + 3);
        chain.check().unwrap();
    }

    #[test]
    fn limits_are_enforced() {
        assert_eq!(
            exact_mean_time_doubling(p(0.3), p(0.5), TimeUnits(65)),
            Err(OracleError::TooLarge)
        );
        assert_eq!(
            exact_rate_multiplexed(p(0.3), p(0.5), TimeUnits(2), 4),
            Err(OracleError::TooLarge)
        );
        assert_eq!(
            exact_rate_multiplexed(p(0.3), p(0.5), TimeUnits(9), 2),
            Err(OracleError::TooLarge)
        );
        assert_eq!(
            exact_mean_time_doubling(p(0.0), p(0.5), TimeUnits(2)),
            Err(OracleError::Divergent)
        );
    }

    #[test]
    fn single_element_rate_is_reciprocal_time() {
        for &(p0, p1, tau) in &[(0.2, 1.0, 1u64), (0.05, 0.3, 5), (0.5, 0.5, 3)] {
            let rate = exact_rate_multiplexed(p(p0), p(p1), TimeUnits(tau), 1).unwrap();
            let t = exact_mean_time_doubling(p(p0), p(p1), TimeUnits(tau)).unwrap();
            assert!((rate * t - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn frozen_multiplexed_rates() {
        // Frozen from an independent numpy evaluation of the same chain.
        let r = exact_rate_multiplexed(p(0.2), p(0.5), TimeUnits(2), 2).unwrap();
        assert!((r - 0.100_765_605_357_926_49).abs() < 1e-12, "{r}");
        let r = exact_rate_multiplexed(p(0.2), p(0.5), TimeUnits(4), 2).unwrap();
        assert!((r - 0.111_247_415_518_805_51).abs() < 1e-12, "{r}");
        let r = exact_rate_multiplexed_with(p(0.2), p(0.5), TimeUnits(2), 2, true).unwrap();
        assert!((r - 0.112_314_819_784_884_47).abs() < 1e-12, "{r}");
    }

    #[test]
    fn stationary_vector_is_a_distribution() {
        let chain = multiplexed_chain(p(0.2), p(0.5), TimeUnits(4), 3, true).unwrap();
        chain.check().unwrap();
        let pi = chain.stationary().unwrap();
        assert!(pi.iter().all(|&x| x >= -1e-12));
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn solver_handles_pivoting() {
        let x = solve_dense(alloc::vec![0.0, 1.0, 1.0, 0.0], alloc::vec![2.0, 3.0], 2).unwrap();
        assert_eq!(x, alloc::vec![3.0, 2.0]);
        assert_eq!(
            solve_dense(alloc::vec![1.0, 2.0, 2.0, 4.0], alloc::vec![1.0, 1.0], 2),
            Err(OracleError::Singular)
        );
    }
}
