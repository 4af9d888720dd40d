#![no_std]

//! Transmission schedules and stability tooling for multi-hop radio networks
//! under adversarial packet injection.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It covers:
//!
//! - [`graph`]: symmetric radio networks, their conflict graphs, degree
//!   statistics and (greedy or exact) conflict-graph colorings.
//! - [`selector`]: universally strong selectors, built either from
//!   polynomials over a prime field or at random, plus exhaustive and
//!   sampling verifiers.
//! - [`schedule`]: cyclic per-link transmission calendars derived from
//!   selectors or colorings, and an empirical `(rho', T)`-frequency check.
//! - [`traffic`]: packets with fixed routes, `(rho, b)`-adversary
//!   admissibility and the trace generators used by the experiments.
//! - [`sim`]: a round-synchronous simulator with LIS/SIS/NFS/FTG queueing
//!   and failure-model accounting.
//! - [`bounds`]: closed-form stability thresholds and latency bounds.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
mod error;
pub mod graph;
pub mod num;
pub mod schedule;
pub mod selector;
pub mod sim;
pub mod traffic;

pub use crate::error::{Error, Result};
pub use crate::num::{Rational, ScaledRate};
