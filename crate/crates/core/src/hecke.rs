//! Hecke operators on truncated q-expansions of integral weight forms.
//!
//! For `f = Σ a(n) qⁿ` of weight `k` and character `χ`,
//! `f | T_m = Σ_n ( Σ_{d | gcd(n,m)} χ(d) d^{k-1} a(nm/d²) ) qⁿ`.
//! Coefficient `n` of the image needs `a(nm)`, so an expansion known to order
//! `N` yields `f | T_m` to order `⌊N/m⌋`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::modring::{divisors, gcd, is_prime, kronecker, Modulus};
use crate::qseries::{EtaQuotient, Series};

/// Fewest trusted coefficients on which an eigenvalue is reported.
pub const MIN_OVERLAP: usize = 40;

/// A Dirichlet character given as an evaluator `d ↦ {-1, 0, 1}`.
#[derive(Clone)]
pub struct Character {
    name: String,
    eval: Arc<dyn Fn(i64) -> i32 + Send + Sync>,
}

impl Character {
    pub fn from_fn(name: impl Into<String>, eval: impl Fn(i64) -> i32 + Send + Sync + 'static) -> Self {
        Character { name: name.into(), eval: Arc::new(eval) }
    }

    /// `d ↦ (disc | d)` on `d` coprime to `level`, zero elsewhere.
    pub fn kronecker(disc: i64, level: u64) -> Self {
        Self::from_fn(format!("({disc}/.) mod {level}"), move |d| {
            if gcd(d.unsigned_abs(), level) == 1 {
                kronecker(disc, d)
            } else {
                0
            }
        })
    }

    pub fn trivial(level: u64) -> Self {
        Self::kronecker(1, level)
    }

    pub fn eval(&self, d: i64) -> i32 {
        (self.eval)(d)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character({})", self.name)
    }
}

/// A q-expansion over ℤ tagged with weight, level and character.
#[derive(Debug, Clone)]
pub struct ModularFormExpansion {
    pub series: Series,
    pub weight: u32,
    pub level: u64,
    pub character: Character,
}

impl ModularFormExpansion {
    pub fn new(series: Series, weight: u32, level: u64, character: Character) -> Result<Self> {
        if series.modulus() != Modulus::Integers {
            return domain("modular form expansions are kept over ℤ");
        }
        if weight == 0 {
            return domain("weight must be positive");
        }
        Ok(ModularFormExpansion { series, weight, level, character })
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, n: usize) -> BigInt {
        self.series.coeff(n)
    }

    fn with_series(&self, series: Series) -> Self {
        ModularFormExpansion { series, ..self.clone() }
    }
}

/// `f | T_m`, valid to order `⌊N/m⌋`.
pub fn hecke_apply(f: &ModularFormExpansion, m: u64) -> Result<ModularFormExpansion> {
    if m == 0 {
        return domain("Hecke index m must be positive");
    }
    let n_in = f.order();
    if (n_in as u64) < m {
        return domain(format!("expansion of order {n_in} is too short for T_{m}"));
    }
    let n_out = n_in / m as usize;
    let m_us = m as usize;
    let mut out = Series::zero(n_out, Modulus::Integers);
    for n in 0..n_out {
        let g = gcd(n as u64, m);
        let mut c = BigInt::zero();
        for d in divisors(g) {
            let chi = f.character.eval(d as i64);
            if chi == 0 {
                continue;
            }
            let a = f.coeff(n * m_us / (d * d) as usize);
            if a.is_zero() {
                continue;
            }
            let term = BigInt::from(d).pow(f.weight - 1) * a;
            if chi > 0 {
                c += term;
            } else {
                c -= term;
            }
        }
        out.set(n, &c);
    }
    Ok(f.with_series(out))
}

/// The integer `λ` with `f | T_m = λ f` on the first `⌊N/m⌋` coefficients,
/// where `N = min(order, f.order())`. `None` when no such `λ` exists or when
/// fewer than [`MIN_OVERLAP`] coefficients can be compared.
pub fn eigen_ratio(f: &ModularFormExpansion, m: u64, order: usize) -> Result<Option<i64>> {
    let a1 = f.coeff(1);
    if !a1.abs().is_one() {
        return domain(format!("a(1) = {a1} is not a unit"));
    }
    let order = order.min(f.order());
    if order / (m.max(1) as usize) < MIN_OVERLAP {
        return Ok(None);
    }
    let truncated = f.with_series(f.series.truncate(order));
    let image = hecke_apply(&truncated, m)?;
    let lambda = image.coeff(1) * &a1;
    let matches = (0..image.order()).all(|n| image.coeff(n) == &lambda * f.coeff(n));
    Ok(if matches { lambda.to_i64() } else { None })
}

/// `η(4z)² η(16z)² / η(8z)²` as a weight-1 form on `Γ₀(64)` with character
/// `(-1/·)`, expanded to `order` terms.
pub fn eigenform_eta(order: usize) -> ModularFormExpansion {
    let e: EtaQuotient = "4:2,16:2,8:-2@64".parse().expect("valid eta spec");
    let (offset, s) = e.expand(order, Modulus::Integers);
    debug_assert_eq!(offset, 1);
    ModularFormExpansion::new(s.shift(1), 1, 64, Character::kronecker(-1, 64)).expect("valid form")
}

/// Checks `a(pn) + χ(p) p^{k-1} a(n/p) = 0` for every `n` with `pn` below the
/// expansion order, reading `a(n/p) = 0` when `p ∤ n`. Returns the first
/// failing `n`.
pub fn recurrence_failure(f: &ModularFormExpansion, p: u64) -> Option<u64> {
    let chi = f.character.eval(p as i64);
    let pw = BigInt::from(p).pow(f.weight - 1);
    let p_us = p as usize;
    (1..f.order())
        .take_while(|n| n * p_us < f.order())
        .find(|&n| {
            let back = if n % p_us == 0 { f.coeff(n / p_us) * &pw * chi } else { BigInt::zero() };
            !(f.coeff(n * p_us) + back).is_zero()
        })
        .map(|n| n as u64)
}

/// `a(pn) + (-1/p) a(n/p) = 0` for the eta eigenform, `p ≡ 3 (mod 4)` prime.
pub fn verify_recurrence(p: u64, order: usize) -> Result<bool> {
    if p % 4 != 3 || !is_prime(p) {
        return domain(format!("{p} is not a prime congruent to 3 mod 4"));
    }
    Ok(recurrence_failure(&eigenform_eta(order), p).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::kronecker;
    use crate::partitions::pod_series;
    use proptest::prelude::*;

    #[test]
    fn character_vanishes_off_units() {
        let chi = Character::kronecker(-1, 64);
        assert_eq!(chi.eval(2), 0);
        assert_eq!(chi.eval(3), -1);
        assert_eq!(chi.eval(5), 1);
        assert_eq!(chi.name(), "(-1/.) mod 64");
    }

    #[test]
    fn eigenform_leading_coefficients() {
        let f = eigenform_eta(30);
        let got: Vec<i64> = [1, 5, 9, 13, 17, 21].iter().map(|&n| f.series.coeff_i64(n).unwrap()).collect();
        assert_eq!(got, vec![1, -2, 1, -2, 2, 0]);
        assert_eq!(f.weight, 1);
        assert_eq!(f.level, 64);
    }

    /// `q ψ(-q^4)²`, written with `t_2`, is the same series.
    #[test]
    fn eigenform_is_signed_t2() {
        let f = eigenform_eta(4000);
        for n in 0..4000usize {
            let want = if n % 4 == 1 {
                let m = (n / 4) as u64;
                let t = crate::partitions::t2_point(m) as i64;
                if m.is_multiple_of(2) { t } else { -t }
            } else {
                0
            };
            assert_eq!(f.series.coeff_i64(n).unwrap(), want, "n={n}");
        }
    }

    #[test]
    fn bridge_to_pod3() {
        let f = eigenform_eta(4 * 2001 + 2);
        let pod = pod_series(3, 2001, Modulus::Residues(3)).unwrap();
        for n in 0..=2000usize {
            assert_eq!(f.series.residue(4 * n + 1, 3), pod.residue(n, 3));
        }
    }

    #[test]
    fn t1_is_identity() {
        let f = eigenform_eta(200);
        let g = hecke_apply(&f, 1).unwrap();
        assert_eq!(g.series, f.series);
        assert!(hecke_apply(&f, 0).is_err());
    }

    #[test]
    fn t3_annihilates_and_t5_scales() {
        let f = eigenform_eta(1800);
        let g = hecke_apply(&f, 3).unwrap();
        assert_eq!(g.order(), 600);
        assert!(g.series.is_zero());

        let f = eigenform_eta(2000);
        let g = hecke_apply(&f, 5).unwrap();
        assert_eq!(g.order(), 400);
        assert_eq!(g.series, f.series.truncate(400).scale(&BigInt::from(-2)));
    }

    #[test]
    fn eigen_ratio_examples() {
        let f = eigenform_eta(4000);
        assert_eq!(eigen_ratio(&f, 7, 4000).unwrap(), Some(0));
        assert_eq!(eigen_ratio(&f, 1, 4000).unwrap(), Some(1));
        assert_eq!(eigen_ratio(&f, 5, 4000).unwrap(), Some(-2));
        assert_eq!(eigen_ratio(&f, 13, 4000).unwrap(), Some(-2));
        // Too little overlap to say anything.
        assert_eq!(eigen_ratio(&f, 101, 4000).unwrap(), None);

        let fake = ModularFormExpansion::new(
            Series::from_i64(&[1, 1, 1], 400, Modulus::Integers),
            1,
            64,
            Character::kronecker(-1, 64),
        )
        .unwrap();
        assert_eq!(eigen_ratio(&fake, 3, 400).unwrap(), None);

        let no_unit = ModularFormExpansion::new(
            Series::from_i64(&[0, 2], 400, Modulus::Integers),
            1,
            64,
            Character::trivial(64),
        )
        .unwrap();
        assert!(eigen_ratio(&no_unit, 3, 400).is_err());
    }

    #[test]
    fn eigenvalues_vanish_at_primes_3_mod_4() {
        let f = eigenform_eta(4000);
        for p in (3..=100u64).filter(|&p| p % 4 == 3 && is_prime(p)) {
            assert_eq!(eigen_ratio(&f, p, 4000).unwrap(), Some(0), "p={p}");
        }
    }

    #[test]
    fn eigenvalues_are_multiplicative() {
        let f = eigenform_eta(16_000);
        let lam: Vec<Option<i64>> = (0..=20u64)
            .map(|m| if m == 0 { None } else { eigen_ratio(&f, m, 16_000).unwrap() })
            .collect();
        let mut checked = 0;
        for m1 in 1..=20u64 {
            for m2 in 1..=20u64 {
                if gcd(m1, m2) != 1 {
                    continue;
                }
                if let (Some(a), Some(b), Some(ab)) =
                    (lam[m1 as usize], lam[m2 as usize], eigen_ratio(&f, m1 * m2, 16_000).unwrap())
                {
                    assert_eq!(ab, a * b, "m1={m1} m2={m2}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn recurrence_examples() {
        assert!(verify_recurrence(3, 2000).unwrap());
        assert!(verify_recurrence(7, 2000).unwrap());
        assert!(verify_recurrence(5, 2000).is_err());
        assert!(verify_recurrence(15, 2000).is_err());
        let f = eigenform_eta(200);
        assert_eq!(f.coeff(121), f.coeff(1));
        assert_eq!(kronecker(-1, 11), -1);
    }

    #[test]
    fn recurrence_failure_reports_first_index() {
        let mut s = eigenform_eta(200).series;
        s.set_i64(9, 5);
        let f = ModularFormExpansion::new(s, 1, 64, Character::kronecker(-1, 64)).unwrap();
        assert_eq!(recurrence_failure(&f, 3), Some(3));
    }

    proptest! {
        #[test]
        fn hecke_is_linear(a in prop::collection::vec(-20i64..20, 120), b in prop::collection::vec(-20i64..20, 120), m in 1u64..6, w in 1u32..4) {
            let mk = |v: &[i64]| ModularFormExpansion::new(
                Series::from_i64(v, 120, Modulus::Integers), w, 12, Character::kronecker(-3, 12)).unwrap();
            let (f, g) = (mk(&a), mk(&b));
            let sum = mk(&a).with_series(f.series.add(&g.series).unwrap());
            let lhs = hecke_apply(&sum, m).unwrap().series;
            let rhs = hecke_apply(&f, m).unwrap().series.add(&hecke_apply(&g, m).unwrap().series).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
