//! Closed-form stability thresholds and latency bounds.
//!
//! Every quantity is an exact rational except the randomized-selector
//! threshold, which carries a symbolic factor `1/e`.

use alloc::format;
use core::fmt;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};

use crate::num::{ceil_log, checked_pow};
use crate::{Error, Rational, Result, ScaledRate};

/// Where a threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdSource {
    /// `eps / (Delta + 1)` for a selector with guarantee `eps`.
    Selector,
    /// `1 / (4 (Delta + 1) ceil(log_{Delta+1} m))` for polynomial selectors.
    PolynomialSelector,
    /// `1 / (e (Delta + 1))` for randomized selectors.
    RandomSelector,
    /// `1 / chi` for a conflict-graph coloring.
    Coloring,
}

impl fmt::Display for ThresholdSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdSource::Selector => "selector",
            ThresholdSource::PolynomialSelector => "polynomial-selector",
            ThresholdSource::RandomSelector => "random-selector",
            ThresholdSource::Coloring => "coloring",
        })
    }
}

/// Which selector threshold to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UssForm {
    /// A concrete selector with guarantee `eps`.
    Direct { eps: Rational },
    /// The polynomial construction on `m` links.
    Polynomial { m: u64 },
    /// The randomized construction.
    Random,
}

/// Injection rates strictly below `rho` are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityBound {
    pub rho: ScaledRate,
    pub source: ThresholdSource,
    /// No algorithm is stable above this rate on every network with these
    /// parameters.
    pub tight: bool,
    pub eps: Option<Rational>,
    pub delta: Option<usize>,
    pub m: Option<u64>,
    pub chi: Option<usize>,
}

impl StabilityBound {
    fn new(rho: ScaledRate, source: ThresholdSource) -> Self {
        StabilityBound {
            rho,
            source,
            tight: false,
            eps: None,
            delta: None,
            m: None,
            chi: None,
        }
    }

    /// Whether `rate` lies strictly below the threshold.
    pub fn admits(&self, rate: Rational) -> bool {
        self.rho.exceeds(rate)
    }
}

/// Selector-schedule threshold for conflict in-degree `delta`.
pub fn uss_threshold(form: UssForm, delta: usize) -> Result<StabilityBound> {
    if delta == 0 {
        return Err(Error::param("selector thresholds need delta >= 1"));
    }
    let d1 = Rational::from_integer(delta as i128 + 1);
    let mut bound = match form {
        UssForm::Direct { eps } => {
            if eps <= Rational::zero() || eps > Rational::one() {
                return Err(Error::param(format!("eps={eps} must lie in (0, 1]")));
            }
            let mut b = StabilityBound::new(ScaledRate::exact(eps / d1), ThresholdSource::Selector);
            b.eps = Some(eps);
            b
        }
        UssForm::Polynomial { m } => {
            if m < 2 {
                return Err(Error::param(format!("polynomial threshold needs m >= 2, got {m}")));
            }
            let log = ceil_log(delta as u64 + 1, m);
            let rho = Rational::new(1, 4 * (delta as i128 + 1) * log as i128);
            let mut b = StabilityBound::new(ScaledRate::exact(rho), ThresholdSource::PolynomialSelector);
            b.m = Some(m);
            b
        }
        UssForm::Random => StabilityBound::new(
            ScaledRate::with_e_power(Rational::one() / d1, -1),
            ThresholdSource::RandomSelector,
        ),
    };
    bound.delta = Some(delta);
    Ok(bound)
}

/// Coloring-schedule threshold `1/chi`; tight.
pub fn coloring_threshold(chi: usize) -> Result<StabilityBound> {
    if chi == 0 {
        return Err(Error::param("coloring threshold needs chi >= 1"));
    }
    let mut b = StabilityBound::new(
        ScaledRate::exact(Rational::new(1, chi as i128)),
        ThresholdSource::Coloring,
    );
    b.tight = true;
    b.chi = Some(chi);
    Ok(b)
}

fn overflow() -> Error {
    Error::Overflow("latency bound arithmetic")
}

fn check_latency_inputs(rho: Rational, rho_prime: Rational, window: u64, b: u64, max_route_len: u32) -> Result<()> {
    if rho <= Rational::zero() || rho >= rho_prime || rho_prime > Rational::one() {
        return Err(Error::param(format!(
            "latency bounds need 0 < rho < rho' <= 1, got rho={rho}, rho'={rho_prime}"
        )));
    }
    if window == 0 || b == 0 || max_route_len == 0 {
        return Err(Error::param("latency bounds need T, b and L of at least 1"));
    }
    Ok(())
}

/// `x^L` with `x = 1 - rho/rho'`.
fn survival(rho: Rational, rho_prime: Rational, max_route_len: u32) -> Result<Rational> {
    let x = Rational::one() - rho.checked_div(&rho_prime).ok_or_else(overflow)?;
    checked_pow(x, max_route_len)
}

/// `c' = (b-1)(1 - x^L) / (x^L rho T) + 1/x^L` where `x = 1 - rho/rho'`.
pub fn active_class_bound(
    rho: Rational,
    rho_prime: Rational,
    window: u64,
    b: u64,
    max_route_len: u32,
) -> Result<Rational> {
    check_latency_inputs(rho, rho_prime, window, b, max_route_len)?;
    let xl = survival(rho, rho_prime, max_route_len)?;
    let t = Rational::from_integer(window as i128);
    let burst = Rational::from_integer(b as i128 - 1);
    let denom = xl
        .checked_mul(&rho)
        .and_then(|v| v.checked_mul(&t))
        .ok_or_else(overflow)?;
    let first = burst
        .checked_mul(&(Rational::one() - xl))
        .and_then(|v| v.checked_div(&denom))
        .ok_or_else(overflow)?;
    first.checked_add(&xl.recip()).ok_or_else(overflow)
}

/// `(1 - x^L)/(rho T) * (b - 1) + c (1 - x^L)` windows, `x = 1 - rho/rho'`.
pub fn delivery_window_bound(
    rho: Rational,
    rho_prime: Rational,
    window: u64,
    b: u64,
    max_route_len: u32,
    c: Rational,
) -> Result<Rational> {
    check_latency_inputs(rho, rho_prime, window, b, max_route_len)?;
    if c < Rational::zero() {
        return Err(Error::param(format!("c={c} must be nonnegative")));
    }
    let one_minus = Rational::one()
        .checked_sub(&survival(rho, rho_prime, max_route_len)?)
        .ok_or_else(overflow)?;
    let rt = rho
        .checked_mul(&Rational::from_integer(window as i128))
        .ok_or_else(overflow)?;
    let first = one_minus
        .checked_div(&rt)
        .and_then(|v| v.checked_mul(&Rational::from_integer(b as i128 - 1)))
        .ok_or_else(overflow)?;
    let second = c.checked_mul(&one_minus).ok_or_else(overflow)?;
    first.checked_add(&second).ok_or_else(overflow)
}

/// Per-packet delivery bound for a `(rho', T)`-frequent schedule under a
/// `(rho, b)`-adversary with routes of at most `L` links.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyBound {
    pub rho: Rational,
    pub rho_prime: Rational,
    pub window: u64,
    pub b: u64,
    pub max_route_len: u32,
    pub c_prime: Rational,
    /// Windows of length `T` a packet needs at most.
    pub window_bound: Rational,
}

impl LatencyBound {
    pub fn new(rho: Rational, rho_prime: Rational, window: u64, b: u64, max_route_len: u32) -> Result<Self> {
        let c_prime = active_class_bound(rho, rho_prime, window, b, max_route_len)?;
        let window_bound = delivery_window_bound(rho, rho_prime, window, b, max_route_len, c_prime)?;
        Ok(LatencyBound {
            rho,
            rho_prime,
            window,
            b,
            max_route_len,
            c_prime,
            window_bound,
        })
    }

    /// The bound in rounds, `window_bound * T`.
    pub fn rounds(&self) -> Rational {
        self.window_bound * Rational::from_integer(self.window as i128)
    }

    /// `c'` without its additive `1/x^L` term.
    pub fn c_prime_without_offset(&self) -> Result<Rational> {
        let xl = survival(self.rho, self.rho_prime, self.max_route_len)?;
        Ok(self.c_prime - xl.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn selector_thresholds() {
        let b = uss_threshold(UssForm::Direct { eps: r(36, 289) }, 3).unwrap();
        assert_eq!(b.rho.as_rational(), Some(r(9, 289)));
        assert_eq!(b.source, ThresholdSource::Selector);
        let b = uss_threshold(UssForm::Direct { eps: r(1, 1) }, 1).unwrap();
        assert_eq!(b.rho.as_rational(), Some(r(1, 2)));
        let b = uss_threshold(UssForm::Random, 1).unwrap();
        assert_eq!(b.rho, ScaledRate::with_e_power(r(1, 2), -1));
        assert!((b.rho.to_f64() - 1.0 / (2.0 * core::f64::consts::E)).abs() < 1e-15);
        // log_4 16 = 2
        let b = uss_threshold(UssForm::Polynomial { m: 16 }, 3).unwrap();
        assert_eq!(b.rho.as_rational(), Some(r(1, 32)));
        let b = uss_threshold(UssForm::Polynomial { m: 17 }, 3).unwrap();
        assert_eq!(b.rho.as_rational(), Some(r(1, 48)));
    }

    #[test]
    fn selector_threshold_errors() {
        assert!(uss_threshold(UssForm::Random, 0).is_err());
        assert!(uss_threshold(UssForm::Direct { eps: r(0, 1) }, 2).is_err());
        assert!(uss_threshold(UssForm::Direct { eps: r(3, 2) }, 2).is_err());
        assert!(uss_threshold(UssForm::Polynomial { m: 1 }, 2).is_err());
    }

    #[test]
    fn coloring_thresholds() {
        let b = coloring_threshold(4).unwrap();
        assert_eq!(b.rho.as_rational(), Some(r(1, 4)));
        assert!(b.tight);
        assert!(b.admits(r(1, 5)));
        assert!(!b.admits(r(1, 4)));
        assert_eq!(coloring_threshold(1).unwrap().rho.as_rational(), Some(r(1, 1)));
        assert!(coloring_threshold(0).is_err());
    }

    #[test]
    fn coloring_beats_random_selector_by_e() {
        for delta in 1..10 {
            let col = coloring_threshold(delta + 1).unwrap();
            let rnd = uss_threshold(UssForm::Random, delta).unwrap();
            let ratio = col.rho / rnd.rho;
            assert!((ratio.to_f64() - core::f64::consts::E).abs() < 1e-12);
        }
    }

    #[test]
    fn active_class_example() {
        assert_eq!(active_class_bound(r(1, 8), r(1, 4), 4, 2, 2).unwrap(), r(10, 1));
        // b = 1 leaves only 1/x^L
        assert_eq!(active_class_bound(r(1, 8), r(1, 4), 4, 1, 2).unwrap(), r(4, 1));
        assert!(active_class_bound(r(1, 4), r(1, 4), 4, 2, 2).is_err());
        assert!(active_class_bound(r(1, 8), r(1, 4), 0, 2, 2).is_err());
    }

    #[test]
    fn active_class_grows_towards_rho_prime() {
        let mut last = Rational::zero();
        for k in 1..20 {
            let c = active_class_bound(r(k, 80), r(1, 4), 4, 3, 3).unwrap();
            assert!(c > last);
            last = c;
        }
    }

    #[test]
    fn delivery_window_example() {
        assert_eq!(
            delivery_window_bound(r(1, 8), r(1, 4), 4, 2, 2, r(10, 1)).unwrap(),
            r(9, 1)
        );
        assert_eq!(
            delivery_window_bound(r(1, 8), r(1, 4), 4, 1, 2, r(0, 1)).unwrap(),
            r(0, 1)
        );
        let lb = LatencyBound::new(r(1, 8), r(1, 4), 4, 2, 2).unwrap();
        assert_eq!(lb.rounds(), r(36, 1));
        assert_eq!(lb.c_prime_without_offset().unwrap(), r(6, 1));
    }

    #[test]
    fn fixed_point_of_the_class_bound() {
        for (rho, rp, t, b, l) in [
            (r(1, 8), r(1, 4), 4u64, 2u64, 2u32),
            (r(1, 20), r(1, 6), 6, 5, 4),
            (r(3, 40), r(1, 10), 10, 1, 3),
            (r(1, 100), r(1, 3), 3, 7, 1),
        ] {
            let c = active_class_bound(rho, rp, t, b, l).unwrap();
            let w = delivery_window_bound(rho, rp, t, b, l, c).unwrap();
            assert_eq!(w, c - Rational::one());
        }
    }
}
