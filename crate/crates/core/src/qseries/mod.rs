//! Truncated power series in `q` with exact coefficients.
//!
//! A [`Series`] holds the coefficients `a(0..order)` either as arbitrary
//! precision integers or as residues modulo a machine-word modulus. All
//! kernels skip zero coefficients, so products and inverses involving the
//! sparse theta and pentagonal series cost `O(N·√N)` rather than `O(N²)`.

mod eta;
mod kernel;
mod text;

pub use eta::{EtaFactor, EtaQuotient};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::modring::Modulus;
use kernel::{IntKernel, Kernel, ResKernel};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Coeffs {
    Int(Vec<BigInt>),
    Res(Vec<u64>),
}

/// Truncated q-expansion `a(0) + a(1) q + … + a(order-1) q^(order-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    modulus: Modulus,
    coeffs: Coeffs,
}

impl Series {
    pub fn zero(order: usize, modulus: Modulus) -> Self {
        let coeffs = match modulus {
            Modulus::Integers => Coeffs::Int(vec![BigInt::zero(); order]),
            Modulus::Residues(_) => Coeffs::Res(vec![0; order]),
        };
        Series { modulus, coeffs }
    }

    pub fn one(order: usize, modulus: Modulus) -> Self {
        let mut s = Self::zero(order, modulus);
        if order > 0 {
            s.set_i64(0, 1);
        }
        s
    }

    /// Build from small integers, padding with zeros or truncating to `order`.
    pub fn from_i64(values: &[i64], order: usize, modulus: Modulus) -> Self {
        let mut s = Self::zero(order, modulus);
        for (n, &v) in values.iter().enumerate().take(order) {
            s.set_i64(n, v);
        }
        s
    }

    /// Build from integer coefficients, reducing them if `modulus` asks for it.
    pub fn from_bigints(values: Vec<BigInt>, modulus: Modulus) -> Self {
        let coeffs = match modulus {
            Modulus::Integers => Coeffs::Int(values),
            Modulus::Residues(m) => Coeffs::Res(values.iter().map(|v| reduce_big(v, m)).collect()),
        };
        Series { modulus, coeffs }
    }

    /// Build from residues; every entry must already lie in `[0, m)`.
    pub fn from_residues(values: Vec<u64>, m: u64) -> Result<Self> {
        let modulus = Modulus::residues(m)?;
        if let Some(v) = values.iter().find(|&&v| v >= m) {
            return domain(format!("residue {v} is not reduced modulo {m}"));
        }
        Ok(Series { modulus, coeffs: Coeffs::Res(values) })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coeffs::Int(v) => v.len(),
            Coeffs::Res(v) => v.len(),
        }
    }

    /// Coefficient of `q^n` (zero past the truncation order).
    pub fn coeff(&self, n: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Int(v) => v.get(n).cloned().unwrap_or_default(),
            Coeffs::Res(v) => BigInt::from(v.get(n).copied().unwrap_or(0)),
        }
    }

    /// Coefficient of `q^n` as an `i64`, if it fits.
    pub fn coeff_i64(&self, n: usize) -> Option<i64> {
        match &self.coeffs {
            Coeffs::Int(v) => v.get(n).map_or(Some(0), |c| c.to_i64()),
            Coeffs::Res(v) => i64::try_from(v.get(n).copied().unwrap_or(0)).ok(),
        }
    }

    /// Coefficient of `q^n` reduced into `[0, m)`.
    pub fn residue(&self, n: usize, m: u64) -> u64 {
        match &self.coeffs {
            Coeffs::Int(v) => v.get(n).map_or(0, |c| reduce_big(c, m)),
            Coeffs::Res(v) => v.get(n).map_or(0, |&c| c % m),
        }
    }

    pub fn is_zero_at(&self, n: usize) -> bool {
        match &self.coeffs {
            Coeffs::Int(v) => v.get(n).is_none_or(Zero::is_zero),
            Coeffs::Res(v) => v.get(n).is_none_or(|&c| c == 0),
        }
    }

    pub fn is_zero(&self) -> bool {
        (0..self.order()).all(|n| self.is_zero_at(n))
    }

    /// Raw residues when the series is taken modulo some `m`.
    pub fn residues(&self) -> Option<&[u64]> {
        match &self.coeffs {
            Coeffs::Res(v) => Some(v),
            Coeffs::Int(_) => None,
        }
    }

    /// Raw integer coefficients when the series lives over ℤ.
    pub fn integers(&self) -> Option<&[BigInt]> {
        match &self.coeffs {
            Coeffs::Int(v) => Some(v),
            Coeffs::Res(_) => None,
        }
    }

    pub fn set_i64(&mut self, n: usize, value: i64) {
        self.set(n, &BigInt::from(value));
    }

    pub fn set(&mut self, n: usize, value: &BigInt) {
        match &mut self.coeffs {
            Coeffs::Int(v) => v[n] = value.clone(),
            Coeffs::Res(v) => {
                let m = self.modulus.value().expect("residue series has a modulus");
                v[n] = reduce_big(value, m);
            }
        }
    }

    /// Keep only the first `order` coefficients (never extends).
    pub fn truncate(&self, order: usize) -> Series {
        let order = order.min(self.order());
        let coeffs = match &self.coeffs {
            Coeffs::Int(v) => Coeffs::Int(v[..order].to_vec()),
            Coeffs::Res(v) => Coeffs::Res(v[..order].to_vec()),
        };
        Series { modulus: self.modulus, coeffs }
    }

    fn check_same_modulus(&self, other: &Series) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: other.modulus.to_string(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Series,
        int_op: impl Fn(&BigInt, &BigInt) -> BigInt,
        res_op: impl Fn(u64, u64, u64) -> u64,
    ) -> Result<Series> {
        self.check_same_modulus(other)?;
        let order = self.order().min(other.order());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Int(a), Coeffs::Int(b)) => {
                Coeffs::Int((0..order).map(|n| int_op(&a[n], &b[n])).collect())
            }
            (Coeffs::Res(a), Coeffs::Res(b)) => {
                let m = self.modulus.value().unwrap();
                Coeffs::Res((0..order).map(|n| res_op(a[n], b[n], m)).collect())
            }
            _ => unreachable!("same modulus implies same storage"),
        };
        Ok(Series { modulus: self.modulus, coeffs })
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.zip_with(other, |a, b| a + b, |a, b, m| ((a as u128 + b as u128) % m as u128) as u64)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.zip_with(other, |a, b| a - b, |a, b, m| ((a as u128 + (m - b) as u128) % m as u128) as u64)
    }

    /// Multiply every coefficient by the integer `c`.
    pub fn scale(&self, c: &BigInt) -> Series {
        let coeffs = match &self.coeffs {
            Coeffs::Int(v) => Coeffs::Int(v.iter().map(|a| a * c).collect()),
            Coeffs::Res(v) => {
                let m = self.modulus.value().unwrap();
                let c = reduce_big(c, m) as u128;
                Coeffs::Res(v.iter().map(|&a| ((a as u128 * c) % m as u128) as u64).collect())
            }
        };
        Series { modulus: self.modulus, coeffs }
    }

    pub fn neg(&self) -> Series {
        self.scale(&BigInt::from(-1))
    }

    /// Cauchy product truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_same_modulus(other)?;
        let order = self.order().min(other.order());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Int(a), Coeffs::Int(b)) => Coeffs::Int(IntKernel.mul(a, b, order)),
            (Coeffs::Res(a), Coeffs::Res(b)) => {
                Coeffs::Res(ResKernel::new(self.modulus.value().unwrap()).mul(a, b, order))
            }
            _ => unreachable!("same modulus implies same storage"),
        };
        Ok(Series { modulus: self.modulus, coeffs })
    }

    /// Multiplicative inverse up to truncation. The constant term must be a
    /// unit of the coefficient ring.
    pub fn invert(&self) -> Result<Series> {
        let coeffs = match &self.coeffs {
            Coeffs::Int(a) => Coeffs::Int(IntKernel.invert(a)?),
            Coeffs::Res(a) => Coeffs::Res(ResKernel::new(self.modulus.value().unwrap()).invert(a)?),
        };
        Ok(Series { modulus: self.modulus, coeffs })
    }

    pub fn pow(&self, mut e: u64) -> Series {
        let mut result = Series::one(self.order(), self.modulus);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same modulus");
            }
        }
        result
    }

    /// Coefficientwise reduction into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> Result<Series> {
        let target = Modulus::residues(m)?;
        if !self.modulus.reducible_to(m) {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: target.to_string(),
            });
        }
        let coeffs = match &self.coeffs {
            Coeffs::Int(v) => v.iter().map(|c| reduce_big(c, m)).collect(),
            Coeffs::Res(v) => v.iter().map(|&c| c % m).collect(),
        };
        Ok(Series { modulus: target, coeffs: Coeffs::Res(coeffs) })
    }

    /// Substitute `q -> q^s`, keeping the truncation order.
    pub fn dilate(&self, s: usize) -> Series {
        assert!(s >= 1, "dilation factor must be positive");
        let order = self.order();
        let mut out = Series::zero(order, self.modulus);
        for n in (0..order).take_while(|n| n * s < order) {
            if !self.is_zero_at(n) {
                out.set(n * s, &self.coeff(n));
            }
        }
        out
    }

    /// Multiply by `q^k`, keeping the truncation order.
    pub fn shift(&self, k: usize) -> Series {
        let order = self.order();
        let mut out = Series::zero(order, self.modulus);
        for n in 0..order.saturating_sub(k) {
            if !self.is_zero_at(n) {
                out.set(n + k, &self.coeff(n));
            }
        }
        out
    }

    /// Indices of nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..self.order()).filter(|&n| !self.is_zero_at(n)).collect()
    }
}

fn reduce_big(c: &BigInt, m: u64) -> u64 {
    c.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

/// `ψ(sign · q^scale) = Σ_n sign^{T_n} q^{scale·T_n}` with `T_n = n(n+1)/2`.
pub fn psi_series(sign: i32, scale: usize, order: usize, modulus: Modulus) -> Result<Series> {
    if sign != 1 && sign != -1 {
        return domain(format!("sign must be ±1, got {sign}"));
    }
    if scale == 0 {
        return domain("scale must be positive");
    }
    let mut s = Series::zero(order, modulus);
    for n in 0usize.. {
        let t = n * (n + 1) / 2;
        let e = t * scale;
        if e >= order {
            break;
        }
        let c = if sign == -1 && t % 2 == 1 { -1 } else { 1 };
        s.set_i64(e, c);
    }
    Ok(s)
}

/// `∏_{n≥1} (1 - q^{delta·n})^r` to `order` terms.
pub fn euler_product(delta: usize, r: i64, order: usize, modulus: Modulus) -> Series {
    assert!(delta >= 1, "delta must be positive");
    if r == 0 {
        return Series::one(order, modulus);
    }
    // Pentagonal number theorem: Σ_k (-1)^k q^{k(3k-1)/2} over all integers k.
    let mut base = Series::zero(order, modulus);
    base.set_i64(0, 1);
    for k in 1usize.. {
        let lo = k * (3 * k - 1) / 2 * delta;
        if lo >= order {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        base.set_i64(lo, sign);
        let hi = k * (3 * k + 1) / 2 * delta;
        if hi < order {
            base.set_i64(hi, sign);
        }
    }
    let positive = base.pow(r.unsigned_abs());
    if r > 0 {
        positive
    } else {
        positive.invert().expect("constant term 1 is a unit")
    }
}

impl Series {
    pub fn is_one(&self) -> bool {
        self.order() == 0 || (self.coeff(0).is_one() && (1..self.order()).all(|n| self.is_zero_at(n)))
    }

    /// True when every coefficient is divisible by `m` (as an integer), or
    /// zero modulo `m` for residue series whose modulus `m` divides.
    pub fn divisible_by(&self, m: u64) -> bool {
        match &self.coeffs {
            Coeffs::Int(v) => v.iter().all(|c| reduce_big(c, m) == 0),
            Coeffs::Res(v) => v.iter().all(|&c| c % m == 0),
        }
    }

    /// Signed representative of each residue in `(-m/2, m/2]`; integers are
    /// returned as they are.
    pub fn centered(&self, n: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Int(_) => self.coeff(n),
            Coeffs::Res(v) => {
                let m = self.modulus.value().unwrap();
                let c = v.get(n).copied().unwrap_or(0);
                if c > m / 2 {
                    BigInt::from(c) - BigInt::from(m)
                } else {
                    BigInt::from(c)
                }
            }
        }
    }
}

impl Series {
    /// Largest absolute coefficient, handy for sanity checks over ℤ.
    pub fn max_abs(&self) -> BigInt {
        (0..self.order()).map(|n| self.coeff(n).abs()).max().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: Modulus = Modulus::Integers;

    fn ints(s: &Series) -> Vec<i64> {
        (0..s.order()).map(|n| s.coeff_i64(n).unwrap()).collect()
    }

    #[test]
    fn mul_examples() {
        let a = Series::from_i64(&[1, 1], 3, Z);
        let b = Series::from_i64(&[1, -1], 3, Z);
        assert_eq!(ints(&a.mul(&b).unwrap()), vec![1, 0, -1]);

        let f = Series::from_i64(&[3, -2, 0, 7], 4, Z);
        assert_eq!(f.mul(&Series::one(4, Z)).unwrap(), f);

        let geo = Series::from_i64(&[1; 5], 5, Z);
        let one_minus_q = Series::from_i64(&[1, -1], 5, Z);
        assert!(geo.mul(&one_minus_q).unwrap().is_one());
    }

    #[test]
    fn mul_truncates_to_smaller_order() {
        let a = Series::from_i64(&[1, 2, 3], 3, Z);
        let b = Series::from_i64(&[1, 1, 1, 1, 1], 5, Z);
        assert_eq!(a.mul(&b).unwrap().order(), 3);
    }

    #[test]
    fn mul_rejects_modulus_mismatch() {
        let a = Series::one(4, Z);
        let b = Series::one(4, Modulus::Residues(3));
        assert!(matches!(a.mul(&b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn invert_examples() {
        let f = Series::from_i64(&[1, -1], 4, Z);
        assert_eq!(ints(&f.invert().unwrap()), vec![1, 1, 1, 1]);
        let g = Series::from_i64(&[2, 1], 4, Z);
        assert!(matches!(g.invert(), Err(Error::NonUnit(_))));
        // 2 is a unit mod 5 but not mod 4.
        let h = Series::from_i64(&[2, 1], 4, Modulus::Residues(5));
        assert!(h.mul(&h.invert().unwrap()).unwrap().is_one());
        let h = Series::from_i64(&[2, 1], 4, Modulus::Residues(4));
        assert!(h.invert().is_err());
        // -1 is a unit over Z.
        let k = Series::from_i64(&[-1, 3, 5], 6, Z);
        assert!(k.mul(&k.invert().unwrap()).unwrap().is_one());
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(ints(&euler_product(1, 1, 8, Z)), vec![1, -1, -1, 0, 0, 1, 0, 1]);
        assert!(euler_product(5, 0, 10, Z).is_one());
        assert_eq!(ints(&euler_product(2, 1, 3, Z)), vec![1, 0, -1]);
    }

    /// Factor-by-factor multiplication of (1 - q^n).
    fn euler_oracle(order: usize) -> Vec<i64> {
        let mut c = vec![0i64; order];
        c[0] = 1;
        for n in 1..order {
            for i in (n..order).rev() {
                c[i] -= c[i - n];
            }
        }
        c
    }

    #[test]
    fn euler_product_matches_direct_expansion() {
        let order = 1000;
        assert_eq!(ints(&euler_product(1, 1, order, Z)), euler_oracle(order));
        // Support sits exactly on generalized pentagonal numbers.
        let pent: std::collections::BTreeSet<usize> = (0i64..40)
            .flat_map(|k| [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2])
            .filter(|&e| e < order as i64)
            .map(|e| e as usize)
            .collect();
        let support: std::collections::BTreeSet<usize> =
            euler_product(1, 1, order, Z).support().into_iter().collect();
        assert_eq!(support, pent);
    }

    #[test]
    fn euler_product_negative_power_is_partition_numbers() {
        let p = euler_product(1, -1, 12, Z);
        assert_eq!(ints(&p), vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56]);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(
            psi_series(1, 1, 12, Z).unwrap().support(),
            vec![0, 1, 3, 6, 10]
        );
        assert_eq!(
            ints(&psi_series(-1, 1, 12, Z).unwrap()),
            vec![1, -1, 0, -1, 0, 0, 1, 0, 0, 0, 1, 0]
        );
        assert_eq!(psi_series(1, 3, 12, Z).unwrap().support(), vec![0, 3, 9]);
        assert!(psi_series(2, 1, 12, Z).is_err());
    }

    #[test]
    fn psi_is_indicator_of_triangular_numbers() {
        let order = 2000;
        let psi = psi_series(1, 1, order, Z).unwrap();
        for n in 0..order {
            let triangular = (0..order).take_while(|j| j * (j + 1) / 2 <= n).any(|j| j * (j + 1) / 2 == n);
            assert_eq!(psi.coeff_i64(n).unwrap(), triangular as i64, "n={n}");
        }
    }

    #[test]
    fn reduce_mod_examples() {
        let f = Series::from_i64(&[1, -2], 2, Z);
        let r = f.reduce_mod(3).unwrap();
        assert_eq!(r.residues().unwrap(), &[1, 1]);
        assert_eq!(r.reduce_mod(3).unwrap(), r);
        let nine = f.reduce_mod(9).unwrap();
        assert_eq!(nine.reduce_mod(3).unwrap(), r);
        assert!(r.reduce_mod(9).is_err());
    }

    #[test]
    fn binomial_congruence_small() {
        // (q;q)^3 ≡ (q^3;q^3) mod 3
        let lhs = euler_product(1, 3, 200, Modulus::Residues(3));
        let rhs = euler_product(3, 1, 200, Modulus::Residues(3));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dilate_and_shift() {
        let f = Series::from_i64(&[1, 2, 3], 7, Z);
        assert_eq!(ints(&f.dilate(3)), vec![1, 0, 0, 2, 0, 0, 3]);
        assert_eq!(ints(&f.shift(5)), vec![0, 0, 0, 0, 0, 1, 2]);
    }

    fn arb_series(modulus: Modulus) -> impl Strategy<Value = Series> {
        prop::collection::vec(-50i64..50, 64).prop_map(move |v| Series::from_i64(&v, 64, modulus))
    }

    fn arb_modulus() -> impl Strategy<Value = Modulus> {
        prop_oneof![Just(Modulus::Integers), (2u64..100).prop_map(Modulus::Residues)]
    }

    proptest! {
        #[test]
        fn ring_laws((f, g, h) in arb_modulus().prop_flat_map(|m| (arb_series(m), arb_series(m), arb_series(m)))) {
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
            prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
            prop_assert_eq!(
                f.mul(&g.add(&h).unwrap()).unwrap(),
                f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
            );
            prop_assert_eq!(f.sub(&g).unwrap().add(&g).unwrap(), f);
        }

        #[test]
        fn invert_is_two_sided(mut v in prop::collection::vec(-50i64..50, 64), m in prop_oneof![Just(0u64), (2u64..100)]) {
            v[0] = 1;
            let modulus = if m == 0 { Modulus::Integers } else { Modulus::Residues(m) };
            let f = Series::from_i64(&v, 64, modulus);
            let g = f.invert().unwrap();
            prop_assert!(f.mul(&g).unwrap().is_one());
            prop_assert!(g.mul(&f).unwrap().is_one());
            prop_assert_eq!(g.invert().unwrap(), f);
        }
    }
}
