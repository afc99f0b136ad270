//! Plain-text series format:
//!
//! ```text
//! # modulus=<m|Z> order=<N>
//! 0 <a(0)>
//! 1 <a(1)>
//! ...
//! ```
//!
//! The writer emits every index. The reader accepts gaps (missing indices are
//! zero) but requires strictly increasing indices below `order`.

use std::fmt::Write as _;

use num_bigint::BigInt;

use super::Series;
use crate::error::{Error, Result};
use crate::modring::Modulus;

impl Series {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.order() * 8 + 32);
        let _ = writeln!(out, "# modulus={} order={}", self.modulus(), self.order());
        for n in 0..self.order() {
            let _ = writeln!(out, "{} {}", n, self.coeff(n));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Series> {
        let mut offset = 0usize;
        let mut lines = text.split_inclusive('\n');
        let perr = |pos: usize, msg: String| Error::Parse { pos, msg };

        let header = lines.next().ok_or_else(|| perr(0, "missing header".into()))?;
        let (modulus, order) = parse_header(header.trim_end())?;
        offset += header.len();

        let mut series = Series::zero(order, modulus);
        let mut last: Option<usize> = None;
        for line in lines {
            let pos = offset;
            offset += line.len();
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let (n, c) = line
                .split_once(' ')
                .ok_or_else(|| perr(pos, format!("expected `n coefficient`, got {line:?}")))?;
            let n: usize = n.parse().map_err(|_| perr(pos, format!("bad index {n:?}")))?;
            let c: BigInt = c
                .parse()
                .map_err(|_| perr(pos, format!("bad coefficient {c:?}")))?;
            if n >= order {
                return Err(perr(pos, format!("index {n} is beyond order {order}")));
            }
            if last.is_some_and(|l| n <= l) {
                return Err(perr(pos, format!("index {n} is not increasing")));
            }
            if let Modulus::Residues(m) = modulus {
                if c < BigInt::from(0) || c >= BigInt::from(m) {
                    return Err(perr(pos, format!("coefficient {c} is not reduced modulo {m}")));
                }
            }
            series.set(n, &c);
            last = Some(n);
        }
        Ok(series)
    }
}

fn parse_header(line: &str) -> Result<(Modulus, usize)> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected `# modulus=<m|Z> order=<N>`, got {line:?}"),
    };
    let rest = line.strip_prefix("# ").ok_or_else(bad)?;
    let mut modulus = None;
    let mut order = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("modulus", v)) => modulus = Some(v.parse::<Modulus>()?),
            Some(("order", v)) => order = Some(v.parse::<usize>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok((modulus.ok_or_else(bad)?, order.ok_or_else(bad)?))
}
