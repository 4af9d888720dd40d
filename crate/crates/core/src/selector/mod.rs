//! Selectors and universally strong selectors.
//!
//! A selector is a boolean `t x n` matrix; row `i` is read as the set
//! `T_i` of columns holding a one. The matrix is an `(n, k, eps)`
//! universally strong selector when, for every set `A` of at most `k`
//! columns and every `a` in `A`, at least `eps * t / k` rows meet `A`
//! exactly in `{a}`.

mod bits;
mod matrix;
mod poly;
mod random;
mod verify;

pub use bits::BitRow;
pub use matrix::SelectorMatrix;
pub use poly::{poly_uss, FieldParams};
pub use random::{random_uss, random_uss_size, RandomUss, DEFAULT_MAX_RETRIES};
pub use verify::{
    is_selector, is_selector_with_budget, uss_min_count, uss_min_count_with_budget, uss_sample_check, SampleVerdict,
    SelectorVerdict, UssReport, DEFAULT_ENUMERATION_BUDGET,
};
