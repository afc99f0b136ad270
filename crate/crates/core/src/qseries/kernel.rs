//! Convolution and inversion kernels shared by both coefficient backends.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::modring::mod_inverse;

pub(super) trait Kernel {
    type Elem: Clone;
    type Acc: Clone;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    fn acc_zero(&self) -> Self::Acc;
    fn fma(&self, acc: &mut Self::Acc, a: &Self::Elem, b: &Self::Elem);
    fn finish(&self, acc: Self::Acc) -> Self::Elem;
    fn mul_elem(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, e: &Self::Elem) -> Self::Elem;
    fn unit_inverse(&self, e: &Self::Elem) -> Result<Self::Elem>;

    fn nonzero(&self, a: &[Self::Elem], order: usize) -> Vec<usize> {
        (0..a.len().min(order)).filter(|&i| !self.is_zero(&a[i])).collect()
    }

    fn mul(&self, a: &[Self::Elem], b: &[Self::Elem], order: usize) -> Vec<Self::Elem> {
        let na = self.nonzero(a, order);
        let nb = self.nonzero(b, order);
        let mut acc = vec![self.acc_zero(); order];
        for &i in &na {
            for &j in nb.iter().take_while(|&&j| i + j < order) {
                self.fma(&mut acc[i + j], &a[i], &b[j]);
            }
        }
        acc.into_iter().map(|x| self.finish(x)).collect()
    }

    fn invert(&self, f: &[Self::Elem]) -> Result<Vec<Self::Elem>> {
        let order = f.len();
        if order == 0 {
            return Ok(Vec::new());
        }
        let inv0 = self.unit_inverse(&f[0])?;
        let neg_inv0 = self.neg(&inv0);
        let tail: Vec<usize> = self.nonzero(f, order).into_iter().filter(|&j| j > 0).collect();
        let mut g = Vec::with_capacity(order);
        g.push(inv0);
        for n in 1..order {
            let mut acc = self.acc_zero();
            for &j in tail.iter().take_while(|&&j| j <= n) {
                self.fma(&mut acc, &f[j], &g[n - j]);
            }
            let s = self.finish(acc);
            g.push(if self.is_zero(&s) { self.zero() } else { self.mul_elem(&neg_inv0, &s) });
        }
        Ok(g)
    }
}

pub(super) struct IntKernel;

impl Kernel for IntKernel {
    type Elem = BigInt;
    type Acc = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn is_zero(&self, e: &BigInt) -> bool {
        e.is_zero()
    }
    fn acc_zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn fma(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc += a * b;
    }
    fn finish(&self, acc: BigInt) -> BigInt {
        acc
    }
    fn mul_elem(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, e: &BigInt) -> BigInt {
        -e
    }
    fn unit_inverse(&self, e: &BigInt) -> Result<BigInt> {
        if e.abs().is_one() {
            Ok(e.clone())
        } else {
            Err(Error::NonUnit(e.to_string()))
        }
    }
}

/// Residues modulo `m`, accumulated in `u128` and reduced once per output.
pub(super) struct ResKernel {
    m: u64,
    // Products of two residues fit in u64, so sums of them never overflow
    // u128 at any order we can store.
    wide: bool,
}

impl ResKernel {
    pub(super) fn new(m: u64) -> Self {
        ResKernel { m, wide: m > u32::MAX as u64 }
    }
}

impl Kernel for ResKernel {
    type Elem = u64;
    type Acc = u128;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }
    fn acc_zero(&self) -> u128 {
        0
    }
    #[inline]
    fn fma(&self, acc: &mut u128, a: &u64, b: &u64) {
        *acc += *a as u128 * *b as u128;
        if self.wide {
            *acc %= self.m as u128;
        }
    }
    fn finish(&self, acc: u128) -> u64 {
        (acc % self.m as u128) as u64
    }
    fn mul_elem(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }
    fn neg(&self, e: &u64) -> u64 {
        (self.m - e % self.m) % self.m
    }
    fn unit_inverse(&self, e: &u64) -> Result<u64> {
        mod_inverse(*e as i64, self.m).map_err(|_| Error::NonUnit(format!("{e} mod {}", self.m)))
    }
}
