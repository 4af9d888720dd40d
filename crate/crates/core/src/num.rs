//! Exact arithmetic helpers shared by the other modules.

use alloc::format;
use core::fmt;
use core::ops::{Div, Mul};
use core::str::FromStr;

use num_traits::{One, Zero};

use crate::{Error, Result};

/// Exact rational number.
pub type Rational = num_rational::Ratio<i128>;

/// Parses `p/q`, a bare integer, or a finite decimal literal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::param(format!("`{s}` is not a rational literal (expected <p>/<q>)"));
    if let Some((p, q)) = s.split_once('/') {
        let p = i128::from_str(p.trim()).map_err(|_| bad())?;
        let q = i128::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::param(format!("`{s}` has a zero denominator")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_val = if int.is_empty() || int == "-" {
            0
        } else {
            i128::from_str(int).map_err(|_| bad())?
        };
        let den = 10i128.pow(frac.len() as u32);
        let frac_val = i128::from_str(frac).map_err(|_| bad())?;
        let magnitude = int_val.abs() * den + frac_val;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, den));
    }
    i128::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Smallest integer `>= r`.
pub fn ceil(r: Rational) -> i128 {
    r.ceil().to_integer()
}

/// `base^exp` with overflow reported instead of wrapping.
pub fn checked_pow(base: Rational, exp: u32) -> Result<Rational> {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for _ in 0..exp {
        num = num
            .checked_mul(*base.numer())
            .ok_or(Error::Overflow("rational power"))?;
        den = den
            .checked_mul(*base.denom())
            .ok_or(Error::Overflow("rational power"))?;
    }
    Ok(Rational::new(num, den))
}

/// Smallest `d` with `base^d >= n` (so `ceil(log_base n)` for `n >= 1`).
pub fn ceil_log(base: u64, n: u64) -> u32 {
    assert!(base >= 2, "logarithm base must be at least 2");
    let mut d = 0;
    let mut power: u128 = 1;
    while power < n as u128 {
        power *= base as u128;
        d += 1;
    }
    d
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc == C(n, i), so acc * (n - i) is divisible by i + 1.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// A positive quantity of the form `coeff * e^e_power`.
///
/// Products and quotients of two rates are exact in `coeff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaledRate {
    pub coeff: Rational,
    pub e_power: i32,
}

impl ScaledRate {
    pub fn exact(coeff: Rational) -> Self {
        ScaledRate { coeff, e_power: 0 }
    }

    pub fn with_e_power(coeff: Rational, e_power: i32) -> Self {
        ScaledRate { coeff, e_power }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.e_power == 0 || self.coeff.is_zero()).then_some(self.coeff)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(self.coeff) * libm::exp(self.e_power as f64)
    }

    /// Strict comparison `r < self`. Exact when no power of `e` is involved,
    /// floating point otherwise.
    pub fn exceeds(&self, r: Rational) -> bool {
        match self.as_rational() {
            Some(c) => r < c,
            None => to_f64(r) < self.to_f64(),
        }
    }
}

impl Mul for ScaledRate {
    type Output = ScaledRate;
    fn mul(self, rhs: ScaledRate) -> ScaledRate {
        ScaledRate::with_e_power(self.coeff * rhs.coeff, self.e_power + rhs.e_power)
    }
}

impl Div for ScaledRate {
    type Output = ScaledRate;
    fn div(self, rhs: ScaledRate) -> ScaledRate {
        ScaledRate::with_e_power(self.coeff / rhs.coeff, self.e_power - rhs.e_power)
    }
}

impl From<Rational> for ScaledRate {
    fn from(r: Rational) -> Self {
        ScaledRate::exact(r)
    }
}

impl fmt::Display for ScaledRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.e_power {
            0 => write!(f, "{}", self.coeff),
            1 if self.coeff.is_one() => write!(f, "e"),
            -1 if self.coeff.is_one() => write!(f, "1/e"),
            p => write!(f, "{}*e^{}", self.coeff, p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/16").unwrap(), Rational::new(3, 16));
        assert_eq!(parse_rational(" 4 ").unwrap(), Rational::from_integer(4));
        assert_eq!(parse_rational("0.125").unwrap(), Rational::new(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(64, 4), 635_376);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn primes_and_logs() {
        assert_eq!(next_prime(16), 17);
        assert_eq!(next_prime(24), 29);
        assert_eq!(next_prime(2), 2);
        assert_eq!(ceil_log(4, 16), 2);
        assert_eq!(ceil_log(2, 8), 3);
        assert_eq!(ceil_log(4, 64), 3);
        assert_eq!(ceil_log(3, 27), 3);
        assert_eq!(ceil_log(2, 2), 1);
        assert_eq!(ceil_log(3, 28), 4);
    }

    #[test]
    fn scaled_rate_ratio_cancels_rational_part() {
        let a = ScaledRate::exact(Rational::new(1, 4));
        let b = ScaledRate::with_e_power(Rational::new(1, 4), -1);
        let r = a / b;
        assert_eq!(r.coeff, Rational::from_integer(1));
        assert_eq!(r.e_power, 1);
        assert!((r.to_f64() - core::f64::consts::E).abs() < 1e-12);
        assert!(b.exceeds(Rational::new(1, 11)));
        assert!(!b.exceeds(Rational::new(1, 10)));
    }
}
