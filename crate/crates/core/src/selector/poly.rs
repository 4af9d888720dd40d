use alloc::format;
use alloc::vec::Vec;

use super::bits::BitRow;
use super::matrix::SelectorMatrix;
use crate::num::{ceil_log, next_prime};
use crate::{Error, Rational, Result};

/// Field sizing for the polynomial construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    /// Polynomial degree, `ceil(log_k n)`.
    pub d: u64,
    /// `c * k * d`.
    pub q_nominal: u64,
    /// Smallest prime `>= q_nominal`; the field actually used.
    pub q: u64,
    pub c: u64,
    pub k: u64,
}

impl FieldParams {
    pub fn new(n: usize, k: usize, c: usize) -> Result<Self> {
        if n < 2 || k < 2 || k > n {
            return Err(Error::param(format!(
                "polynomial selector needs n >= 2 and 2 <= k <= n, got n={n}, k={k}"
            )));
        }
        if c < 1 {
            return Err(Error::param("construction constant c must be at least 1"));
        }
        let (n, k, c) = (n as u64, k as u64, c as u64);
        let d = ceil_log(k, n) as u64;
        let q_nominal = c * k * d;
        let q = next_prime(q_nominal);
        debug_assert!((q as u128).pow(d as u32 + 1) >= n as u128);
        Ok(FieldParams { d, q_nominal, q, c, k })
    }

    /// Rows of the resulting matrix, `q^2`.
    pub fn rows(&self) -> usize {
        (self.q * self.q) as usize
    }

    /// Guarantee for the field actually used: `k (q - k d) / q^2`.
    pub fn guaranteed_eps(&self) -> Rational {
        let unique = (self.q as i128 - (self.k * self.d) as i128).max(0);
        Rational::new(self.k as i128 * unique, (self.q * self.q) as i128)
    }

    /// Guarantee when `q` equals its nominal value: `(c - 1) / (c^2 d)`,
    /// which is `1 / (4 d)` for `c = 2`.
    pub fn nominal_eps(&self) -> Rational {
        Rational::new(self.c as i128 - 1, (self.c * self.c * self.d) as i128)
    }
}

/// Universally strong selector from polynomial evaluations over `GF(q)`.
///
/// Column `i` is the `i`-th polynomial of degree `<= d` in lexicographic
/// coefficient order (constant term varying fastest); it has a one in row
/// `x * q + P_i(x)` for every `x` in the field.
pub fn poly_uss(n: usize, k: usize, c: usize) -> Result<SelectorMatrix> {
    let params = FieldParams::new(n, k, c)?;
    let q = params.q;
    let mut rows: Vec<BitRow> = (0..params.rows()).map(|_| BitRow::zeros(n)).collect();
    let mut coeffs = alloc::vec![0u64; params.d as usize + 1];
    for col in 0..n {
        let mut idx = col as u64;
        for c in coeffs.iter_mut() {
            *c = idx % q;
            idx /= q;
        }
        for x in 0..q {
            let y = coeffs.iter().rev().fold(0u64, |acc, &a| (acc * x + a) % q);
            rows[(x * q + y) as usize].set(col, true);
        }
    }
    Ok(SelectorMatrix::new(n, rows)?.with_claims(k, params.guaranteed_eps()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selector::uss_min_count;

    #[test]
    fn field_params_for_sixteen_by_four() {
        let p = FieldParams::new(16, 4, 2).unwrap();
        assert_eq!((p.d, p.q_nominal, p.q, p.rows()), (2, 16, 17, 289));
        assert_eq!(p.guaranteed_eps(), Rational::new(36, 289));
        assert_eq!(p.nominal_eps(), Rational::new(1, 8));
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(poly_uss(1, 1, 2).is_err());
        assert!(poly_uss(8, 1, 2).is_err());
        assert!(poly_uss(3, 4, 2).is_err());
        assert!(poly_uss(8, 2, 0).is_err());
    }

    #[test]
    fn n_equals_k() {
        let m = poly_uss(2, 2, 2).unwrap();
        assert_eq!(m.t(), 25);
        assert_eq!(m.claimed_eps(), Some(Rational::new(6, 25)));
        let r = uss_min_count(&m, 2).unwrap();
        assert!(r.eps >= Rational::new(6, 25));
    }

    #[test]
    fn column_structure() {
        let m = poly_uss(16, 4, 2).unwrap();
        let p = FieldParams::new(16, 4, 2).unwrap();
        let cols = m.columns();
        for col in &cols {
            assert_eq!(col.count_ones() as u64, p.q);
        }
        assert_eq!(m.total_ones() as u64, 16 * p.q);
        for i in 0..16 {
            for j in i + 1..16 {
                let shared = cols[i]
                    .words()
                    .iter()
                    .zip(cols[j].words())
                    .map(|(a, b)| (a & b).count_ones() as u64)
                    .sum::<u64>();
                assert!(shared <= p.d, "columns {i},{j} agree on {shared} arguments");
            }
        }
    }
}
