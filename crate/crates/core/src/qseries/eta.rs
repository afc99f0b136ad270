use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{euler_product, Series};
use crate::error::{domain, Error, Result};
use crate::modring::{Modulus, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaFactor {
    pub delta: u64,
    pub r: i64,
}

/// `∏ η(δz)^{r_δ}` attached to a level `N` with every `δ | N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotient {
    level: u64,
    factors: Vec<EtaFactor>,
}

impl EtaQuotient {
    pub fn new(level: u64, factors: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        if level == 0 {
            return domain("level must be positive");
        }
        let mut out: Vec<EtaFactor> = Vec::new();
        for (delta, r) in factors {
            if delta == 0 || !level.is_multiple_of(delta) {
                return domain(format!("delta {delta} does not divide level {level}"));
            }
            if r == 0 {
                return domain(format!("exponent of delta {delta} is zero"));
            }
            if out.iter().any(|f| f.delta == delta) {
                return domain(format!("delta {delta} appears twice"));
            }
            out.push(EtaFactor { delta, r });
        }
        Ok(EtaQuotient { level, factors: out })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn factors(&self) -> &[EtaFactor] {
        &self.factors
    }

    /// Same factors attached to another level.
    pub fn with_level(&self, level: u64) -> Result<Self> {
        Self::new(level, self.factors.iter().map(|f| (f.delta, f.r)))
    }

    /// Exponent of `q` contributed by the `q^{δ/24}` prefactors: `Σ δ r_δ / 24`.
    pub fn offset(&self) -> Rational {
        let s: i128 = self.factors.iter().map(|f| f.delta as i128 * f.r as i128).sum();
        Rational::new(s, 24).expect("nonzero denominator")
    }

    /// `q^offset · s` where `s = ∏ (q^δ; q^δ)_∞^{r_δ}` to `order` terms.
    pub fn expand(&self, order: usize, modulus: Modulus) -> (Rational, Series) {
        let mut s = Series::one(order, modulus);
        for f in &self.factors {
            let part = euler_product(f.delta as usize, f.r, order, modulus);
            s = s.mul(&part).expect("same modulus");
        }
        (self.offset(), s)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}:{}", x.delta, x.r)).collect();
        write!(f, "{}@{}", parts.join(","), self.level)
    }
}

/// Parses `delta:exponent` pairs separated by commas with an optional
/// `@level` suffix, e.g. `4:2,16:2,8:-2@64`. Without a level, the lcm of the
/// deltas is used.
impl FromStr for EtaQuotient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        let (body, level_part) = match s.find('@') {
            Some(at) => (&s[..at], Some((at + 1, &s[at + 1..]))),
            None => (s, None),
        };
        let mut factors = Vec::new();
        let mut pos = 0usize;
        if !body.trim().is_empty() {
            for item in body.split(',') {
                let colon = item
                    .find(':')
                    .ok_or_else(|| err(pos, "expected `delta:exponent`"))?;
                let (d, r) = (&item[..colon], &item[colon + 1..]);
                let delta: u64 = d
                    .trim()
                    .parse()
                    .map_err(|_| err(pos, "delta must be a positive integer"))?;
                let r: i64 = r
                    .trim()
                    .parse()
                    .map_err(|_| err(pos + colon + 1, "exponent must be an integer"))?;
                if delta == 0 {
                    return Err(err(pos, "delta must be a positive integer"));
                }
                factors.push((delta, r));
                pos += item.len() + 1;
            }
        }
        let level = match level_part {
            Some((at, l)) => l
                .trim()
                .parse::<u64>()
                .ok()
                .filter(|&l| l > 0)
                .ok_or_else(|| err(at, "level must be a positive integer"))?,
            None => factors
                .iter()
                .fold(1u64, |acc, &(d, _)| num_integer::lcm(acc, d)),
        };
        EtaQuotient::new(level, factors).map_err(|e| match e {
            Error::Domain(msg) => Error::Parse { pos: 0, msg },
            other => other,
        })
    }
}
