//! Exact arithmetic substrate: moduli, exact rationals, the Kronecker symbol,
//! divisor sums and the Dirichlet character modulo 4.
//!
//! Inputs here are desk-scale, so factorization is plain trial division.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Coefficient domain of a series: the integers, or residues modulo `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulus {
    Integers,
    Residues(u64),
}

impl Modulus {
    pub fn residues(m: u64) -> Result<Self> {
        if m < 2 {
            return domain(format!("modulus must be at least 2, got {m}"));
        }
        Ok(Modulus::Residues(m))
    }

    pub fn value(&self) -> Option<u64> {
        match self {
            Modulus::Integers => None,
            Modulus::Residues(m) => Some(*m),
        }
    }

    /// True when reducing a value in `self` modulo `target` is well defined.
    pub fn reducible_to(&self, target: u64) -> bool {
        match self {
            Modulus::Integers => true,
            Modulus::Residues(m) => m % target == 0,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Integers => write!(f, "Z"),
            Modulus::Residues(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z" {
            return Ok(Modulus::Integers);
        }
        let m: u64 = s.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("invalid modulus {s:?}"),
        })?;
        Modulus::residues(m)
    }
}

/// Exact rational number with a positive, reduced denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return domain("zero denominator");
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("invalid rational {s:?}"),
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.is_integer() && self.numer() == *other
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        Some(self.0.cmp(&Ratio::from_integer(*other)))
    }
}

/// Kronecker symbol `(a|n)`, including the extensions to even and
/// non-positive `n`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= twos;
        // (a|2) = -1 exactly when a = ±3 (mod 8)
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol for odd positive n.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The non-principal character modulo 4.
pub fn chi4(d: i64) -> i32 {
    match d.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order. `n = 1` gives an empty list.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// All positive divisors of `n >= 1`, sorted ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// `p`-adic valuation of `n > 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn divisor_sum(n: u64, f: impl Fn(u64) -> i128) -> Result<i128> {
    if n < 1 {
        return domain("divisor sums need n >= 1");
    }
    Ok(divisors(n).into_iter().map(f).sum())
}

/// Sum of the positive divisors of `n`.
pub fn sigma1(n: u64) -> Result<i128> {
    divisor_sum(n, |d| d as i128)
}

/// `Σ_{d|n} chi4(d) d²`.
pub fn sigma2_chi(n: u64) -> Result<i128> {
    divisor_sum(n, |d| chi4(d as i64) as i128 * (d as i128) * (d as i128))
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return domain("modulus must be positive");
    }
    let m_i = m as i128;
    let e = (a as i128).extended_gcd(&m_i);
    if e.gcd != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(e.x.rem_euclid(m_i) as u64)
}

/// Reduce a signed value into `[0, m)`.
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Squarefree kernel of `sign · ∏ base^exp`, keeping the sign. Works on the
/// factored form so huge exponents never materialize the product.
pub fn squarefree_kernel(negative: bool, factors: &[(u64, i64)]) -> i64 {
    let mut parity: std::collections::BTreeMap<u64, i64> = Default::default();
    for &(base, exp) in factors {
        for (q, e) in factorize(base) {
            *parity.entry(q).or_default() += e as i64 * exp;
        }
    }
    let mag: i64 = parity
        .into_iter()
        .filter(|(_, e)| e.rem_euclid(2) == 1)
        .map(|(q, _)| q as i64)
        .product();
    if negative {
        -mag
    } else {
        mag
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
