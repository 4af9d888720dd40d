use alloc::format;
use alloc::vec::Vec;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bits::BitRow;
use super::matrix::SelectorMatrix;
use super::verify::{uss_min_count, uss_sample_check, DEFAULT_ENUMERATION_BUDGET};
use crate::num::binomial;
use crate::{Error, Rational, Result};

pub const DEFAULT_MAX_RETRIES: usize = 64;

/// Sample count used when a random draw is too large to verify exhaustively.
const SAMPLE_TRIALS: usize = 10_000;

/// Row count that makes a Bernoulli(1/k) matrix an `(n, k, eps)`
/// universally strong selector with positive probability:
/// `ceil((2ck ln k + 2ck^2 ln(ne/k)) / (c - eps)^2) + 1` with
/// `c = (1 - 1/k)^(k-1)`.
pub fn random_uss_size(n: usize, k: usize, eps: f64) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "random selector needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let kf = k as f64;
    let c = libm::pow(1.0 - 1.0 / kf, kf - 1.0);
    if !(eps >= 0.0 && eps < c) {
        return Err(Error::param(format!(
            "eps={eps} must lie in [0, {c}) for k={k}; the concentration argument needs eps < (1-1/k)^(k-1)"
        )));
    }
    let numerator = 2.0 * c * kf * libm::log(kf) + 2.0 * c * kf * kf * libm::log(n as f64 * core::f64::consts::E / kf);
    let bound = numerator / ((c - eps) * (c - eps));
    Ok(libm::ceil(bound) as usize + 1)
}

/// A verified random selector and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomUss {
    pub matrix: SelectorMatrix,
    /// Draws used, including the accepted one.
    pub attempts: usize,
    /// True when every `k`-subset was checked; false when only sampled.
    pub exhaustive: bool,
}

/// Draws i.i.d. Bernoulli(1/k) matrices of `random_uss_size` rows until one
/// passes verification.
///
/// The attached `claimed_eps` is the exact measured value when the check was
/// exhaustive, and `eps` rounded down to nine decimals otherwise.
pub fn random_uss(n: usize, k: usize, eps: f64, seed: u64, max_retries: usize) -> Result<RandomUss> {
    if k == 1 {
        // p = 1: every row is the full set, so each singleton is isolated by
        // all t rows and eps = 1 holds for any t.
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::param(format!("eps={eps} must lie in [0, 1] for k=1")));
        }
        let t = if eps < 1.0 { random_uss_size(n, 1, eps)? } else { 1 };
        let rows = (0..t).map(|_| BitRow::ones(n)).collect();
        let matrix = SelectorMatrix::new(n, rows)?.with_claims(1, Rational::from_integer(1));
        return Ok(RandomUss {
            matrix,
            attempts: 1,
            exhaustive: true,
        });
    }
    let t = random_uss_size(n, k, eps)?;
    let exhaustive = binomial(n as u64, k as u64) <= DEFAULT_ENUMERATION_BUDGET;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_retries {
        let rows: Vec<BitRow> = (0..t)
            .map(|_| {
                let mut row = BitRow::zeros(n);
                for j in 0..n {
                    if rng.random_ratio(1, k as u32) {
                        row.set(j, true);
                    }
                }
                row
            })
            .collect();
        let matrix = SelectorMatrix::new(n, rows)?;
        let claimed = if exhaustive {
            let report = uss_min_count(&matrix, k)?;
            // min_count >= eps * t / k
            ((k * report.min_count) as f64 >= eps * t as f64).then_some(report.eps)
        } else {
            let strict = rational_near(eps, true);
            let verdict = uss_sample_check(&matrix, k, strict, SAMPLE_TRIALS, rng.random());
            (!verdict.is_refuted()).then(|| rational_near(eps, false))
        };
        if let Some(eps) = claimed {
            return Ok(RandomUss {
                matrix: matrix.with_claims(k, eps),
                attempts: attempt,
                exhaustive,
            });
        }
    }
    Err(Error::Construction(format!(
        "no verified ({n},{k},{eps}) selector after {max_retries} draws"
    )))
}

/// `eps` on a 1e-9 grid, rounded up or down.
fn rational_near(eps: f64, up: bool) -> Rational {
    const SCALE: f64 = 1e9;
    let scaled = if up {
        libm::ceil(eps * SCALE)
    } else {
        libm::floor(eps * SCALE)
    };
    Rational::new(scaled.to_i128().unwrap_or(0), SCALE as i128)
}
