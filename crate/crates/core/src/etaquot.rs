//! Modularity certificates for eta-quotients on `Γ₀(N)`.
//!
//! A quotient `∏ η(δz)^{r_δ}` of integral weight whose exponents satisfy the
//! two congruences `Σ δ r_δ ≡ 0` and `Σ (N/δ) r_δ ≡ 0 (mod 24)` transforms
//! like a form of weight `Σ r_δ / 2` with quadratic character
//! `d ↦ ((-1)^k ∏ δ^{r_δ} | d)`. It is a holomorphic modular form when its
//! order of vanishing at every cusp `c/d` is nonnegative.
//!
//! The module also builds the family
//!
//! ```text
//! B_{ℓ,p,k} = η(24z)^{p^{a+k}-1} η(48z) η(24ℓz) η(96ℓz) / (η(96z) η(48ℓz) η(24p^a z)^{p^k})
//! ```
//!
//! whose expansion is congruent modulo `p^k` to `Σ pod_ℓ(n) q^{24n+3(ℓ-1)}`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modring::{divisors, gcd, kronecker, squarefree_kernel, valuation, Modulus, Rational};
use crate::partitions::pod_series;
use crate::qseries::EtaQuotient;

/// The arithmetic conditions that do not involve cusps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularityConditions {
    pub quotient: String,
    pub level: u64,
    pub weight: Rational,
    pub weight_integral: bool,
    /// `Σ δ r_δ ≡ 0 (mod 24)`
    pub condition24_up: bool,
    /// `Σ (N/δ) r_δ ≡ 0 (mod 24)`
    pub condition24_down: bool,
    /// Squarefree kernel of `(-1)^k ∏ δ^{r_δ}`; absent for half-integral weight.
    pub character_discriminant: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspOrder {
    pub d: u64,
    pub order: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    #[serde(flatten)]
    pub conditions: ModularityConditions,
    pub cusp_orders: Vec<CuspOrder>,
    pub holomorphic: bool,
    /// All conditions hold and every cusp order is nonnegative.
    pub modular_form: bool,
}

pub fn weight(e: &EtaQuotient) -> Rational {
    let s: i128 = e.factors().iter().map(|f| f.r as i128).sum();
    Rational::new(s, 2).expect("nonzero denominator")
}

fn sum_up(e: &EtaQuotient) -> i128 {
    e.factors().iter().map(|f| f.delta as i128 * f.r as i128).sum()
}

fn sum_down(e: &EtaQuotient, level: u64) -> i128 {
    e.factors()
        .iter()
        .map(|f| (level / f.delta) as i128 * f.r as i128)
        .sum()
}

pub fn check_conditions(e: &EtaQuotient) -> ModularityConditions {
    let w = weight(e);
    let weight_integral = w.is_integer();
    let character_discriminant = weight_integral.then(|| {
        let factors: Vec<(u64, i64)> = e.factors().iter().map(|f| (f.delta, f.r)).collect();
        squarefree_kernel(w.numer().rem_euclid(2) == 1, &factors)
    });
    ModularityConditions {
        quotient: e.to_string(),
        level: e.level(),
        weight: w,
        weight_integral,
        condition24_up: sum_up(e) % 24 == 0,
        condition24_down: sum_down(e, e.level()) % 24 == 0,
        character_discriminant,
    }
}

/// Smallest multiple `u·N₀` (`1 <= u <= 24`) of the quotient's level at which
/// both mod-24 conditions hold. Both conditions are periodic in `u` with
/// period 24, so the search is exhaustive.
pub fn minimal_level(e: &EtaQuotient) -> Result<u64> {
    let base = e.level();
    if sum_up(e) % 24 != 0 {
        return domain(format!(
            "Σ δ r_δ = {} is not divisible by 24 at any level",
            sum_up(e)
        ));
    }
    (1..=24u64)
        .map(|u| u * base)
        .find(|&n| sum_down(e, n) % 24 == 0)
        .ok_or_else(|| Error::Domain(format!("no multiple of {base} up to 24·{base} satisfies the conditions")))
}

/// Value of the Nebentypus character at `d`, evaluated factor by factor so the
/// product `∏ δ^{r_δ}` is never formed.
pub fn character_value(e: &EtaQuotient, d: i64) -> Result<i32> {
    let w = weight(e);
    if !w.is_integer() {
        return Err(Error::Unsupported("character of a half-integral weight quotient".into()));
    }
    if gcd(d.unsigned_abs(), e.level()) != 1 {
        return domain(format!("{d} is not coprime to the level {}", e.level()));
    }
    let mut value = if w.numer().rem_euclid(2) == 1 { kronecker(-1, d) } else { 1 };
    for f in e.factors() {
        if f.r.rem_euclid(2) == 1 {
            value *= kronecker(f.delta as i64, d);
        }
    }
    Ok(value)
}

/// Order of vanishing at the cusp `c/d` (independent of `c`):
/// `N/24 · Σ gcd(d,δ)² r_δ / (gcd(d, N/d) · d · δ)`.
pub fn cusp_order(e: &EtaQuotient, d: u64) -> Result<Rational> {
    let n = e.level();
    if d == 0 || !n.is_multiple_of(d) {
        return domain(format!("{d} does not divide the level {n}"));
    }
    let g = gcd(d, n / d) as i128;
    let sum: Rational = e
        .factors()
        .iter()
        .map(|f| {
            let gd = gcd(d, f.delta) as i128;
            Rational::new(gd * gd * f.r as i128, g * d as i128 * f.delta as i128).unwrap()
        })
        .sum();
    Ok(sum * Rational::new(n as i128, 24).unwrap())
}

/// Conditions plus the cusp order at every divisor of the level.
pub fn holomorphy_report(e: &EtaQuotient) -> CertificationReport {
    let conditions = check_conditions(e);
    let cusp_orders: Vec<CuspOrder> = divisors(e.level())
        .into_iter()
        .map(|d| CuspOrder { d, order: cusp_order(e, d).expect("d divides the level") })
        .collect();
    let holomorphic = cusp_orders.iter().all(|c| !c.order.is_negative());
    let modular_form = holomorphic
        && conditions.weight_integral
        && conditions.condition24_up
        && conditions.condition24_down;
    CertificationReport { conditions, cusp_orders, holomorphic, modular_form }
}

/// One member `B_{ℓ,p,k}` of the eta-quotient family tied to `pod_ℓ mod p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BFamily {
    pub ell: u64,
    pub p: u64,
    pub a: u32,
    pub k: u32,
    pub quotient: EtaQuotient,
}

impl BFamily {
    /// The seven factors as written, before equal deltas are merged
    /// (`24ℓ = 24p^a` when `ℓ = p^a`).
    pub fn raw_factors(&self) -> [(u64, i64); 7] {
        let (ell, p) = (self.ell, self.p);
        let pa = p.pow(self.a);
        let pk = p.pow(self.k) as i64;
        [
            (24, pa as i64 * pk - 1),
            (48, 1),
            (24 * ell, 1),
            (96 * ell, 1),
            (96, -1),
            (48 * ell, -1),
            (24 * pa, -pk),
        ]
    }

    /// `p^k(p^a - 1)/2`.
    pub fn expected_weight(&self) -> Rational {
        let pk = self.p.pow(self.k) as i128;
        let pa = self.p.pow(self.a) as i128;
        Rational::new(pk * (pa - 1), 2).unwrap()
    }

    /// `384ℓ`.
    pub fn nominal_level(&self) -> u64 {
        384 * self.ell
    }

    /// The exponent of `q` at which `pod_ℓ(0)` sits: `3(ℓ-1)`.
    pub fn shift(&self) -> u64 {
        3 * (self.ell - 1)
    }
}

fn merge_factors(raw: &[(u64, i64)]) -> Vec<(u64, i64)> {
    let mut merged: Vec<(u64, i64)> = Vec::new();
    for &(delta, r) in raw {
        match merged.iter_mut().find(|(d, _)| *d == delta) {
            Some(entry) => entry.1 += r,
            None => merged.push((delta, r)),
        }
    }
    merged.retain(|&(_, r)| r != 0);
    merged
}

/// Assembles `B_{ℓ,p,k}` and attaches the smallest level (a multiple of
/// `96ℓ`) at which the mod-24 conditions hold.
pub fn build_b(ell: u64, p: u64, k: u32) -> Result<BFamily> {
    if ell < 3 || ell.is_multiple_of(2) {
        return domain(format!("ell must be odd and greater than 1, got {ell}"));
    }
    if !crate::modring::is_prime(p) || !ell.is_multiple_of(p) {
        return domain(format!("{p} is not a prime divisor of {ell}"));
    }
    if k < 1 {
        return domain("k must be positive");
    }
    let a = valuation(ell, p);
    let mut fam = BFamily {
        ell,
        p,
        a,
        k,
        quotient: EtaQuotient::new(1, [])?,
    };
    let quotient = EtaQuotient::new(96 * ell, merge_factors(&fam.raw_factors()))?;
    let level = minimal_level(&quotient)?;
    fam.quotient = quotient.with_level(level)?;
    Ok(fam)
}

/// `η(48z) η(24ℓz) η(96ℓz) / (η(24z) η(96z) η(48ℓz))`, i.e. `B_{ℓ,p,k}`
/// without the factor `A^{p^k} = η(24z)^{p^{a+k}} / η(24p^a z)^{p^k}`.
pub fn untwisted_b(ell: u64) -> Result<EtaQuotient> {
    EtaQuotient::new(
        96 * ell,
        merge_factors(&[(48, 1), (24 * ell, 1), (96 * ell, 1), (24, -1), (96, -1), (48 * ell, -1)]),
    )
}

/// `A^{p^k} = η(24z)^{p^{a+k}} / η(24p^a z)^{p^k}`.
pub fn a_power(ell: u64, p: u64, k: u32) -> Result<EtaQuotient> {
    let fam = build_b(ell, p, k)?;
    let pa = p.pow(fam.a);
    let pk = p.pow(k) as i64;
    EtaQuotient::new(24 * pa, [(24, pa as i64 * pk), (24 * pa, -pk)])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PodComparison {
    pub holds: bool,
    /// Exponent of `q` of the first mismatching coefficient.
    pub first_failure: Option<u64>,
    pub offset: Rational,
    pub modulus: u64,
    pub terms: usize,
    /// Set when the comparison cannot be made at all (fractional offset).
    pub structural: Option<String>,
}

/// Compares `q^offset · e` modulo `m` with `Σ pod_ℓ(n) q^{24n + 3(ℓ-1)}` over
/// `terms` coefficients of the expansion.
pub fn compare_with_pod(e: &EtaQuotient, ell: u64, m: u64, terms: usize) -> Result<PodComparison> {
    let modulus = Modulus::residues(m)?;
    let offset = e.offset();
    let mut out = PodComparison {
        holds: false,
        first_failure: None,
        offset,
        modulus: m,
        terms,
        structural: None,
    };
    if !offset.is_integer() || offset.is_negative() {
        out.structural = Some(format!("q-offset {offset} is not a nonnegative integer"));
        return Ok(out);
    }
    let offset = offset.numer() as u64;
    let (_, series) = e.expand(terms, modulus);
    let shift = 3 * (ell - 1);
    let pod = pod_series(ell, (offset as usize + terms) / 24 + 1, modulus)?;
    for j in 0..terms {
        let exponent = offset + j as u64;
        let expected = if exponent >= shift && (exponent - shift).is_multiple_of(24) {
            pod.residue(((exponent - shift) / 24) as usize, m)
        } else {
            0
        };
        if series.residue(j, m) != expected {
            out.first_failure = Some(exponent);
            return Ok(out);
        }
    }
    out.holds = true;
    Ok(out)
}

/// `B_{ℓ,p,k} ≡ Σ pod_ℓ(n) q^{24n+3(ℓ-1)} (mod p^k)` over `terms` coefficients.
pub fn verify_lemma2(ell: u64, p: u64, k: u32, terms: usize) -> Result<PodComparison> {
    if terms < 24 {
        return domain("at least 24 terms are needed");
    }
    let fam = build_b(ell, p, k)?;
    compare_with_pod(&fam.quotient, ell, p.pow(k), terms)
}
