//! Rate analysis for quantum-repeater chains with finite memory lifetimes.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithmic
//! piece of the toolkit:
//!
//! - [`model`]: shared domain types (`TimeUnits`, `Probability`,
//!   `RepeaterParams`) and parameter validation.
//! - [`analytics`]: closed forms for entanglement-length doubling (N = 1),
//!   both with ideal and with finite memories, and the multiplexed-rate
//!   approximation.
//! - [`dlcz`]: connection probabilities and clock conversion derived from
//!   physical link parameters.
//! - [`oracle`]: exact Markov-chain solutions on small instances, used to
//!   check the closed forms and the simulator.
//! - [`sim`]: the Monte Carlo engine for N-level chains under parallel and
//!   multiplexed wiring, rate estimation and sweeps.
//! - [`rng`]: the counter-based generator every stochastic component uses.
//!
//! File formats, the CLI and parallel sweep execution live in the
//! `repeater-cli` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod dlcz;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod stats;

mod math;

pub use model::{Architecture, ParamError, Probability, RepeaterParams, TimeUnits};
