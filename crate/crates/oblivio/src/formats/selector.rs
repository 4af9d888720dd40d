use oblivio_core::selector::{BitRow, SelectorMatrix};

use super::{lookup, LineReader};
use crate::error::{CliError, Result};

/// Parses `uss n=<n> t=<t> k=<k> eps=<p>/<q>` followed by `t` rows of `0`/`1`
/// characters of width `n`. `k` and `eps` may be omitted together for a
/// matrix without a claimed guarantee.
pub fn parse_selector(source: &str, text: &str) -> Result<SelectorMatrix> {
    let mut r = LineReader::new(source, text);
    let line = r.next_content().ok_or_else(|| r.error("empty selector file"))?;
    let fields = r.header(line, "uss")?;
    let required = |key: &str| lookup(&fields, key).ok_or_else(|| r.error(format!("header lacks `{key}=`")));
    let n: usize = r.number(required("n")?, "n")?;
    let t: usize = r.number(required("t")?, "t")?;
    let claims = match (lookup(&fields, "k"), lookup(&fields, "eps")) {
        (Some(k), Some(eps)) => Some((r.number::<usize>(k, "k")?, r.rational(eps, "eps")?)),
        (None, None) => None,
        _ => return Err(r.error("`k=` and `eps=` must appear together")),
    };
    let mut rows = Vec::with_capacity(t);
    while let Some(line) = r.next_content() {
        if line.len() != n {
            return Err(r.error(format!("row has width {}, expected {n}", line.len())));
        }
        let mut row = BitRow::zeros(n);
        for (i, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => row.set(i, true),
                other => return Err(r.error(format!("unexpected character `{other}` in row"))),
            }
        }
        rows.push(row);
    }
    if rows.len() != t {
        return Err(r.error(format!("header promises {t} rows, file has {}", rows.len())));
    }
    let m = SelectorMatrix::new(n, rows).map_err(|e| r.error(e.to_string()))?;
    Ok(match claims {
        Some((k, eps)) => m.with_claims(k, eps),
        None => m,
    })
}

pub fn write_selector(m: &SelectorMatrix) -> Result<String> {
    let mut out = format!("uss n={} t={}", m.n(), m.t());
    match (m.claimed_k(), m.claimed_eps()) {
        (Some(k), Some(eps)) => out.push_str(&format!(" k={k} eps={}/{}\n", eps.numer(), eps.denom())),
        (None, None) => out.push('\n'),
        _ => return Err(CliError::param("selector claims must name both k and eps")),
    }
    for row in m.rows() {
        out.extend((0..m.n()).map(|i| if row.get(i) { '1' } else { '0' }));
        out.push('\n');
    }
    Ok(out)
}
