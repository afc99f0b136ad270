//! `pod_ℓ(n)`: partitions of `n` with no part divisible by `ℓ` and pairwise
//! distinct odd parts (even parts unrestricted), and `t_k(n)`: ordered
//! representations of `n` as a sum of `k` triangular numbers.

use num_bigint::BigInt;

use crate::error::{domain, Result};
use crate::modring::Modulus;
use crate::qseries::{psi_series, Series};

/// Largest `n` the enumeration oracle accepts.
pub const BRUTEFORCE_LIMIT: u64 = 80;

/// `pod_ℓ(0..order)` over ℤ or modulo some `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PodTable {
    ell: u64,
    series: Series,
}

impl PodTable {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn modulus(&self) -> Modulus {
        self.series.modulus()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn value(&self, n: usize) -> BigInt {
        self.series.coeff(n)
    }

    pub fn residue(&self, n: usize, m: u64) -> u64 {
        self.series.residue(n, m)
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn into_series(self) -> Series {
        self.series
    }
}

/// Expands `ψ(-q^ℓ) / ψ(-q)` to `order` terms.
///
/// The product identity behind this generating function needs `ℓ` odd; for
/// even `ℓ` the series is still computed but no longer counts the partitions
/// described above.
pub fn pod_series(ell: u64, order: usize, modulus: Modulus) -> Result<PodTable> {
    if ell < 2 {
        return domain(format!("ell must be at least 2, got {ell}"));
    }
    if order < 1 {
        return domain("order must be at least 1");
    }
    let num = psi_series(-1, ell as usize, order, modulus)?;
    let den = psi_series(-1, 1, order, modulus)?.invert()?;
    Ok(PodTable { ell, series: num.mul(&den)? })
}

/// Counts the partitions directly. Parts are chosen in non-increasing order,
/// so a repeated odd part would have to follow itself immediately; choosing
/// an odd part therefore caps the next part one below it.
pub fn pod_bruteforce(ell: u64, n: u64) -> Result<u64> {
    if ell < 2 {
        return domain(format!("ell must be at least 2, got {ell}"));
    }
    if n > BRUTEFORCE_LIMIT {
        return domain(format!(
            "enumeration is limited to n <= {BRUTEFORCE_LIMIT}; use pod_series for n = {n}"
        ));
    }
    fn count(rem: u64, max_part: u64, ell: u64) -> u64 {
        if rem == 0 {
            return 1;
        }
        (1..=rem.min(max_part))
            .filter(|p| p % ell != 0)
            .map(|p| count(rem - p, if p % 2 == 1 { p - 1 } else { p }, ell))
            .sum()
    }
    Ok(count(n, n, ell))
}

/// `ψ(q)^k` to `order` terms: the coefficient of `q^n` is `t_k(n)`.
pub fn triangular_reps(k: u64, order: usize, modulus: Modulus) -> Result<Series> {
    if k < 1 {
        return domain("k must be at least 1");
    }
    Ok(psi_series(1, 1, order, modulus)?.pow(k))
}

/// `t_k(0..order)` over ℤ.
pub fn t_k(k: u64, order: usize) -> Result<Vec<BigInt>> {
    let s = triangular_reps(k, order, Modulus::Integers)?;
    Ok((0..order).map(|n| s.coeff(n)).collect())
}

fn is_triangular(x: u64) -> bool {
    // x = T_j  <=>  8x + 1 is an odd perfect square
    let s = 8 * x as u128 + 1;
    let r = s.isqrt();
    r * r == s
}

/// `t_2(n)` by walking the first summand over all triangular numbers `<= n`.
pub fn t2_point(n: u64) -> u64 {
    let mut count = 0;
    let mut j = 0u64;
    while j * (j + 1) / 2 <= n {
        if is_triangular(n - j * (j + 1) / 2) {
            count += 1;
        }
        j += 1;
    }
    count
}

/// `pod_3(n) mod 3` without a table.
///
/// Over `F_3`, `ψ(-q^3) = ψ(-q)^3`, so the generating function reduces to
/// `ψ(-q)^2`, whose `q^n` coefficient is `(-1)^n t_2(n)`. This costs
/// `O(√n)` per index.
pub fn pod3_mod3_point(n: u64) -> u64 {
    let t = t2_point(n) % 3;
    if n.is_multiple_of(2) {
        t
    } else {
        (3 - t) % 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn pod3_small_values() {
        let t = pod_series(3, 10, Modulus::Integers).unwrap();
        let got: Vec<i64> = (0..10).map(|n| t.series().coeff_i64(n).unwrap()).collect();
        assert_eq!(got, vec![1, 1, 1, 1, 2, 3, 3, 4, 6, 7]);
        assert_eq!(t.value(2), t.value(0));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(pod_bruteforce(3, 4).unwrap(), 2);
        assert_eq!(pod_bruteforce(7, 0).unwrap(), 1);
        assert_eq!(pod_bruteforce(5, 1).unwrap(), 1);
        let expect: Vec<u64> = vec![1, 1, 1, 1, 2, 3, 3, 4, 6, 7];
        let got: Vec<u64> = (0..10).map(|n| pod_bruteforce(3, n).unwrap()).collect();
        assert_eq!(got, expect);
        assert!(pod_bruteforce(3, 81).is_err());
        assert!(pod_bruteforce(1, 5).is_err());
    }

    #[test]
    fn series_matches_bruteforce() {
        for ell in [3u64, 5, 7, 9, 11, 15] {
            let t = pod_series(ell, 61, Modulus::Integers).unwrap();
            for n in 0..=60u64 {
                assert_eq!(
                    t.value(n as usize),
                    BigInt::from(pod_bruteforce(ell, n).unwrap()),
                    "ell={ell} n={n}"
                );
            }
        }
    }

    #[test]
    fn pod_values_are_positive() {
        for ell in [3u64, 5, 7, 9, 15] {
            let t = pod_series(ell, 800, Modulus::Integers).unwrap();
            assert!((0..800).all(|n| t.value(n).is_positive()), "ell={ell}");
        }
    }

    #[test]
    fn pod_series_rejects_bad_input() {
        assert!(pod_series(1, 10, Modulus::Integers).is_err());
        assert!(pod_series(3, 0, Modulus::Integers).is_err());
    }

    #[test]
    fn residue_table_matches_integer_table() {
        let z = pod_series(5, 500, Modulus::Integers).unwrap();
        let m = pod_series(5, 500, Modulus::Residues(25)).unwrap();
        assert!((0..500).all(|n| z.residue(n, 25) == m.residue(n, 25)));
    }

    #[test]
    fn t_k_examples() {
        let t4 = t_k(4, 10).unwrap();
        assert_eq!(t4[1], BigInt::from(4));
        assert_eq!(t4[0], BigInt::from(1));
        let t1 = t_k(1, 30).unwrap();
        for (n, c) in t1.iter().enumerate() {
            assert_eq!(*c, BigInt::from(is_triangular(n as u64) as u8));
        }
        assert!(t_k(0, 10).is_err());
    }

    #[test]
    fn t_k_matches_tuple_count() {
        let tri: Vec<u64> = (0..20).map(|j| j * (j + 1) / 2).filter(|&t| t <= 100).collect();
        let mut counts = vec![[0u64; 5]; 101];
        for &a in &tri {
            counts[a as usize][1] += 1;
            for &b in &tri {
                if a + b <= 100 {
                    counts[(a + b) as usize][2] += 1;
                }
                for &c in &tri {
                    if a + b + c <= 100 {
                        counts[(a + b + c) as usize][3] += 1;
                    }
                    for &d in &tri {
                        if a + b + c + d <= 100 {
                            counts[(a + b + c + d) as usize][4] += 1;
                        }
                    }
                }
            }
        }
        for k in 1..=4u64 {
            let series = t_k(k, 101).unwrap();
            for n in 0..=100 {
                assert_eq!(series[n], BigInt::from(counts[n][k as usize]), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn t2_point_matches_series() {
        let t2 = t_k(2, 3000).unwrap();
        for n in 0..3000u64 {
            assert_eq!(BigInt::from(t2_point(n)), t2[n as usize]);
        }
    }

    #[test]
    fn pod3_point_evaluator_matches_table() {
        let t = pod_series(3, 20_000, Modulus::Residues(3)).unwrap();
        for n in 0..20_000u64 {
            assert_eq!(pod3_mod3_point(n), t.residue(n as usize, 3), "n={n}");
        }
    }
}
