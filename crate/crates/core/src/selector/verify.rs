use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_traits::Zero;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bits::BitRow;
use super::matrix::SelectorMatrix;
use crate::num::{binomial, ceil};
use crate::{Error, Rational, Result};

/// Maximum number of column subsets an exhaustive check may enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorVerdict {
    pub holds: bool,
    /// First column subset (lexicographic) that fails, if any.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UssReport {
    /// Minimum over `(A, a)` of the rows meeting `A` exactly in `{a}`.
    pub min_count: usize,
    /// `k * min_count / t`, or zero for an empty matrix.
    pub eps: Rational,
    /// A pair `(A, a)` attaining the minimum.
    pub witness: Option<(Vec<usize>, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleVerdict {
    /// No sampled pair fell short. This is evidence, not proof.
    NotRefuted { trials: usize },
    Refuted {
        subset: Vec<usize>,
        element: usize,
        count: usize,
        required: usize,
    },
}

impl SampleVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, SampleVerdict::Refuted { .. })
    }
}

/// Exhaustive `(n, k, target_m)`-selector check.
pub fn is_selector(m: &SelectorMatrix, k: usize, target_m: usize) -> Result<SelectorVerdict> {
    is_selector_with_budget(m, k, target_m, DEFAULT_ENUMERATION_BUDGET)
}

pub fn is_selector_with_budget(m: &SelectorMatrix, k: usize, target_m: usize, budget: u128) -> Result<SelectorVerdict> {
    if !(1 <= target_m && target_m <= k && k <= m.n()) {
        return Err(Error::param(alloc::format!(
            "selector check needs 1 <= m <= k <= n, got m={target_m}, k={k}, n={}",
            m.n()
        )));
    }
    check_budget(m.n(), k, budget)?;
    let cols = m.columns();
    let mut scratch = Scratch::new(k, m.t());
    let mut witness = None;
    for_each_subset(m.n(), k, |subset| {
        scratch.isolated_counts(&cols, subset);
        let identity_rows = scratch.counts.iter().filter(|&&c| c > 0).count();
        if identity_rows < target_m {
            witness = Some(subset.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(SelectorVerdict {
        holds: witness.is_none(),
        witness,
    })
}

/// Exhaustive minimum isolation count over all `k`-subsets.
///
/// Only subsets of size exactly `k` are enumerated: dropping elements from
/// `A` can only add isolating rows.
pub fn uss_min_count(m: &SelectorMatrix, k: usize) -> Result<UssReport> {
    uss_min_count_with_budget(m, k, DEFAULT_ENUMERATION_BUDGET)
}

pub fn uss_min_count_with_budget(m: &SelectorMatrix, k: usize, budget: u128) -> Result<UssReport> {
    if k == 0 || k > m.n() {
        return Err(Error::param(alloc::format!(
            "isolation count needs 1 <= k <= n, got k={k}, n={}",
            m.n()
        )));
    }
    check_budget(m.n(), k, budget)?;
    let cols = m.columns();
    let mut scratch = Scratch::new(k, m.t());
    let mut best: Option<(usize, Vec<usize>, usize)> = None;
    for_each_subset(m.n(), k, |subset| {
        scratch.isolated_counts(&cols, subset);
        for (i, &count) in scratch.counts.iter().enumerate() {
            if best.as_ref().is_none_or(|b| count < b.0) {
                best = Some((count, subset.to_vec(), subset[i]));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 == 0) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let (min_count, subset, element) = best.expect("at least one subset exists");
    let eps = if m.t() == 0 {
        Rational::zero()
    } else {
        Rational::new((k * min_count) as i128, m.t() as i128)
    };
    Ok(UssReport {
        min_count,
        eps,
        witness: Some((subset, element)),
    })
}

/// Samples `trials` uniform pairs `(A, a)` with `|A| = k` and checks each
/// against `ceil(eps * t / k)`.
pub fn uss_sample_check(m: &SelectorMatrix, k: usize, eps: Rational, trials: usize, seed: u64) -> SampleVerdict {
    assert!(k >= 1 && k <= m.n(), "sample check needs 1 <= k <= n");
    let required =
        ceil(eps * Rational::from_integer(m.t() as i128) / Rational::from_integer(k as i128)).max(0) as usize;
    let cols = m.columns();
    let mut scratch = Scratch::new(k, m.t());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut subset = index::sample(&mut rng, m.n(), k).into_vec();
        subset.sort_unstable();
        let pick = rng.random_range(0..k);
        scratch.isolated_counts(&cols, &subset);
        let count = scratch.counts[pick];
        if count < required {
            return SampleVerdict::Refuted {
                element: subset[pick],
                subset,
                count,
                required,
            };
        }
    }
    SampleVerdict::NotRefuted { trials }
}

fn check_budget(n: usize, k: usize, budget: u128) -> Result<()> {
    let required = binomial(n as u64, k as u64);
    if required > budget {
        return Err(Error::Size {
            what: "exhaustive selector check",
            required,
            limit: budget,
            hint: "use the sampling checker instead",
        });
    }
    Ok(())
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) {
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if visit(&subset).is_break() {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            return;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Buffers for counting, per member `a` of a subset, the rows where `a`
/// is the only member present.
struct Scratch {
    prefix: Vec<Vec<u64>>,
    suffix: Vec<Vec<u64>>,
    counts: Vec<usize>,
}

impl Scratch {
    fn new(k: usize, t: usize) -> Self {
        let words = t.div_ceil(64);
        Scratch {
            prefix: vec![vec![0; words]; k + 1],
            suffix: vec![vec![0; words]; k + 1],
            counts: vec![0; k],
        }
    }

    fn isolated_counts(&mut self, cols: &[BitRow], subset: &[usize]) {
        let k = subset.len();
        for i in 0..k {
            let col = cols[subset[i]].words();
            let (done, rest) = self.prefix.split_at_mut(i + 1);
            for (dst, (&prev, &w)) in rest[0].iter_mut().zip(done[i].iter().zip(col)) {
                *dst = prev | w;
            }
        }
        for i in (0..k).rev() {
            let col = cols[subset[i]].words();
            let (head, tail) = self.suffix.split_at_mut(i + 1);
            for (dst, (&next, &w)) in head[i].iter_mut().zip(tail[0].iter().zip(col)) {
                *dst = next | w;
            }
        }
        for i in 0..k {
            let col = cols[subset[i]].words();
            self.counts[i] = col
                .iter()
                .zip(self.prefix[i].iter().zip(&self.suffix[i + 1]))
                .map(|(&c, (&p, &s))| (c & !(p | s)).count_ones() as usize)
                .sum();
        }
    }
}
