//! Round-synchronous simulation of scheduled radio routing.
//!
//! Each round has three phases: the round's injections join the queue of
//! their first link; every scheduled link with a nonempty queue transmits
//! and the reception rule decides which transmissions get through; each
//! successful link forwards the packet chosen by the queueing policy, which
//! joins its next link's queue (usable from the next round) or is delivered.

mod accounting;
mod engine;
mod policy;

pub use accounting::{
    failure_accounting, failure_accounting_with, tree_counting_check, CountingReport, FailCounting, FailureReport,
    WindowWitness,
};
pub use engine::{
    backlog_slope, run, Delivery, RoundRecord, RunMetrics, SimState, StabilityVerdict, STABILITY_SLOPE_THRESHOLD,
};
pub use policy::{policy_select, Policy};
