use alloc::vec::Vec;

use super::bits::BitRow;
use crate::{Error, Rational, Result};

/// Boolean `t x n` matrix, optionally carrying the `(k, eps)` it is known
/// to satisfy as a universally strong selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorMatrix {
    n: usize,
    rows: Vec<BitRow>,
    claimed_k: Option<usize>,
    claimed_eps: Option<Rational>,
}

impl SelectorMatrix {
    pub fn new(n: usize, rows: Vec<BitRow>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("a selector needs at least one column"));
        }
        if let Some(bad) = rows.iter().position(|r| r.width() != n) {
            return Err(Error::param(alloc::format!(
                "row {bad} has width {}, expected {n}",
                rows[bad].width()
            )));
        }
        Ok(SelectorMatrix {
            n,
            rows,
            claimed_k: None,
            claimed_eps: None,
        })
    }

    pub fn zeros(t: usize, n: usize) -> Result<Self> {
        SelectorMatrix::new(n, (0..t).map(|_| BitRow::zeros(n)).collect())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = SelectorMatrix::zeros(n, n)?;
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        Ok(m)
    }

    /// Parses rows written as `0`/`1` strings.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut parsed = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let mut bits = BitRow::zeros(row.len());
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => bits.set(j, true),
                    other => {
                        return Err(Error::param(alloc::format!(
                            "row {i} contains `{other}`; expected only 0 and 1"
                        )))
                    }
                }
            }
            parsed.push(bits);
        }
        SelectorMatrix::new(n, parsed)
    }

    /// Number of columns (elements).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows (sets).
    pub fn t(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value);
        self.claimed_k = None;
        self.claimed_eps = None;
    }

    pub fn claimed_k(&self) -> Option<usize> {
        self.claimed_k
    }

    pub fn claimed_eps(&self) -> Option<Rational> {
        self.claimed_eps
    }

    /// Attaches `(k, eps)` guarantees. Callers must have verified them or
    /// obtained the matrix from a construction that proves them.
    pub fn with_claims(mut self, k: usize, eps: Rational) -> Self {
        self.claimed_k = Some(k);
        self.claimed_eps = Some(eps);
        self
    }

    /// Column-major view: one bit vector of width `t` per column.
    pub fn columns(&self) -> Vec<BitRow> {
        let mut cols: Vec<BitRow> = (0..self.n).map(|_| BitRow::zeros(self.t())).collect();
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones_iter() {
                cols[j].set(i, true);
            }
        }
        cols
    }

    /// Keeps the listed columns, in the given order. Claims are dropped.
    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BitRow::zeros(keep.len());
                for (dst, &src) in keep.iter().enumerate() {
                    out.set(dst, row.get(src));
                }
                out
            })
            .collect();
        SelectorMatrix::new(keep.len(), rows)
    }

    pub fn total_ones(&self) -> usize {
        self.rows.iter().map(BitRow::count_ones).sum()
    }
}
