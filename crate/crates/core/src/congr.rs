//! Congruence families `pod_ℓ(An + B) ≡ ±pod_ℓ(A'n + B') (mod m)` and finite
//! scans over them, plus the divisor-sum and triangular-number identities.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modring::{gcd, is_prime, mod_inverse, reduce_i128, sigma1, sigma2_chi, Modulus};
use crate::partitions::{pod3_mod3_point, pod_series, triangular_reps, PodTable};

/// Largest table a scan builds before switching to point evaluation.
pub const TABLE_LIMIT: u64 = 1 << 19;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CongruenceFamily {
    pub ell: u64,
    pub lhs_a: u64,
    pub lhs_b: u64,
    pub rhs_a: u64,
    pub rhs_b: u64,
    pub sign: i32,
    pub modulus: u64,
    pub tag: String,
}

impl CongruenceFamily {
    pub fn new(ell: u64, lhs: (u64, u64), rhs: (u64, u64), sign: i32, modulus: u64, tag: impl Into<String>) -> Result<Self> {
        let fam = CongruenceFamily {
            ell,
            lhs_a: lhs.0,
            lhs_b: lhs.1,
            rhs_a: rhs.0,
            rhs_b: rhs.1,
            sign,
            modulus,
            tag: tag.into(),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell < 2 {
            return domain(format!("{}: ell must be at least 2", self.tag));
        }
        if self.lhs_a == 0 || self.rhs_a == 0 {
            return domain(format!("{}: progression steps must be positive", self.tag));
        }
        if self.sign != 1 && self.sign != -1 {
            return domain(format!("{}: sign must be +1 or -1", self.tag));
        }
        if self.modulus == 0 {
            return domain(format!("{}: modulus must be positive", self.tag));
        }
        Ok(())
    }

    pub fn lhs(&self) -> (u64, u64) {
        (self.lhs_a, self.lhs_b)
    }

    pub fn rhs(&self) -> (u64, u64) {
        (self.rhs_a, self.rhs_b)
    }

    /// Table order needed to check `n = 0..=n_test`.
    pub fn required_order(&self, n_test: u64) -> Result<u64> {
        let at = |a: u64, b: u64| a.checked_mul(n_test).and_then(|x| x.checked_add(b));
        match (at(self.lhs_a, self.lhs_b), at(self.rhs_a, self.rhs_b)) {
            (Some(l), Some(r)) => Ok(l.max(r) + 1),
            _ => domain(format!("{}: indices overflow at n = {n_test}", self.tag)),
        }
    }

    /// `self` followed by `next`, whose left side must be `self`'s right side.
    pub fn compose(&self, next: &CongruenceFamily) -> Result<CongruenceFamily> {
        if self.ell != next.ell || self.rhs() != next.lhs() {
            return domain(format!("{} and {} do not chain", self.tag, next.tag));
        }
        CongruenceFamily::new(
            self.ell,
            self.lhs(),
            next.rhs(),
            self.sign * next.sign,
            gcd(self.modulus, next.modulus),
            format!("{}∘{}", self.tag, next.tag),
        )
    }
}

impl fmt::Display for CongruenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |a: u64, b: u64| match (a, b) {
            (1, 0) => "n".to_string(),
            (1, b) => format!("n+{b}"),
            (a, 0) => format!("{a}n"),
            (a, b) => format!("{a}n+{b}"),
        };
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(
            f,
            "pod_{}({}) ≡ {}pod_{}({}) (mod {})",
            self.ell,
            arg(self.lhs_a, self.lhs_b),
            sign,
            self.ell,
            arg(self.rhs_a, self.rhs_b),
            self.modulus
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMethod {
    Table,
    Point,
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: u64,
    pub lhs_index: u64,
    pub rhs_index: u64,
    pub lhs_residue: u64,
    pub rhs_residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: CongruenceFamily,
    pub n_test: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub method: ScanMethod,
}

fn scan(
    fam: &CongruenceFamily,
    n_test: u64,
    method: ScanMethod,
    residue: impl Fn(u64) -> u64,
) -> FamilyReport {
    let m = fam.modulus;
    let counterexample = (0..=n_test).find_map(|n| {
        let (li, ri) = (fam.lhs_a * n + fam.lhs_b, fam.rhs_a * n + fam.rhs_b);
        let (l, r) = (residue(li), residue(ri));
        let r_signed = if fam.sign < 0 { (m - r) % m } else { r };
        (l != r_signed).then_some(Counterexample { n, lhs_index: li, rhs_index: ri, lhs_residue: l, rhs_residue: r })
    });
    FamilyReport { family: fam.clone(), n_test, passed: counterexample.is_none(), counterexample, method }
}

/// Checks `fam` against an existing table, which must reduce to the family
/// modulus and reach every index the scan touches.
pub fn verify_family_with(fam: &CongruenceFamily, table: &PodTable, n_test: u64) -> Result<FamilyReport> {
    fam.validate()?;
    if table.ell() != fam.ell {
        return domain(format!("table is for ell = {}, family needs {}", table.ell(), fam.ell));
    }
    if fam.modulus == 1 {
        return Ok(scan(fam, n_test, ScanMethod::Trivial, |_| 0));
    }
    if !table.modulus().reducible_to(fam.modulus) {
        return Err(Error::ModulusMismatch {
            left: table.modulus().to_string(),
            right: fam.modulus.to_string(),
        });
    }
    let required = fam.required_order(n_test)?;
    if required > table.order() as u64 {
        return Err(Error::InsufficientTable { required, available: table.order() as u64 });
    }
    Ok(scan(fam, n_test, ScanMethod::Table, |i| table.residue(i as usize, fam.modulus)))
}

fn point_evaluable(fam: &CongruenceFamily) -> bool {
    fam.ell == 3 && fam.modulus == 3
}

/// Scans `n = 0..=n_test`. Tables are built modulo the family modulus; past
/// [`TABLE_LIMIT`], families of `pod_3` mod 3 use the point evaluator.
pub fn verify_family(fam: &CongruenceFamily, n_test: u64) -> Result<FamilyReport> {
    fam.validate()?;
    if fam.modulus == 1 {
        return Ok(scan(fam, n_test, ScanMethod::Trivial, |_| 0));
    }
    let required = fam.required_order(n_test)?;
    if required > TABLE_LIMIT && point_evaluable(fam) {
        return Ok(scan(fam, n_test, ScanMethod::Point, pod3_mod3_point));
    }
    let table = pod_series(fam.ell, required as usize, Modulus::residues(fam.modulus)?)?;
    verify_family_with(fam, &table, n_test)
}

/// Verifies many families, sharing one table per `(ell, modulus)` and running
/// the groups in parallel. Reports come back in input order.
pub fn verify_batch(families: &[CongruenceFamily], n_test: u64) -> Result<Vec<FamilyReport>> {
    let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, fam) in families.iter().enumerate() {
        fam.validate()?;
        groups.entry((fam.ell, fam.modulus)).or_default().push(i);
    }
    let done: Vec<Vec<(usize, FamilyReport)>> = groups
        .into_par_iter()
        .map(|((ell, m), idx)| -> Result<Vec<(usize, FamilyReport)>> {
            let mut tabled = Vec::new();
            let mut out = Vec::new();
            for &i in &idx {
                let req = families[i].required_order(n_test)?;
                if m == 1 || (req > TABLE_LIMIT && point_evaluable(&families[i])) {
                    out.push((i, verify_family(&families[i], n_test)?));
                } else {
                    tabled.push((i, req));
                }
            }
            if let Some(order) = tabled.iter().map(|&(_, r)| r).max() {
                let table = pod_series(ell, order as usize, Modulus::residues(m)?)?;
                for (i, _) in tabled {
                    out.push((i, verify_family_with(&families[i], &table, n_test)?));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut flat: Vec<(usize, FamilyReport)> = done.into_iter().flatten().collect();
    flat.sort_by_key(|(i, _)| *i);
    Ok(flat.into_iter().map(|(_, r)| r).collect())
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or_else(|| Error::Domain(format!("{p}^{e} overflows")))
}

fn require_p3mod4(p: u64) -> Result<()> {
    if !is_prime(p) || p % 4 != 3 {
        return domain(format!("{p} is not a prime congruent to 3 mod 4"));
    }
    Ok(())
}

fn exact_div(num: u64, den: u64, what: &str) -> Result<u64> {
    if !num.is_multiple_of(den) {
        return domain(format!("{what} = {num}/{den} is not an integer"));
    }
    Ok(num / den)
}

/// `pod_3(p^{k+1}n + pδ + (3p-1)/4) ≡ pod_3(p^{k-1}n + (4δ+3-p)/(4p)) (mod 3)`
/// for a prime `p ≡ 3 (mod 4)` dividing `4δ + 3`.
pub fn theorem2_family(p: u64, k: u32, delta: u64) -> Result<CongruenceFamily> {
    require_p3mod4(p)?;
    if k < 1 {
        return domain("k must be positive");
    }
    let four_d3 = delta.checked_mul(4).and_then(|x| x.checked_add(3)).ok_or_else(|| Error::Domain("delta too large".into()))?;
    if four_d3 % p != 0 {
        return domain(format!("{p} does not divide 4·{delta}+3 = {four_d3}"));
    }
    let lhs_b = p * delta + exact_div(3 * p - 1, 4, "(3p-1)/4")?;
    let rhs_b = exact_div(four_d3 - p, 4 * p, "(4δ+3-p)/(4p)")?;
    CongruenceFamily::new(
        3,
        (checked_pow(p, k + 1)?, lhs_b),
        (checked_pow(p, k - 1)?, rhs_b),
        1,
        3,
        format!("thm2(p={p},k={k},delta={delta})"),
    )
}

/// The `count` smallest `δ ≥ 0` with `p | 4δ + 3`.
pub fn theorem2_deltas(p: u64, count: usize) -> Vec<u64> {
    (0..).filter(|d| (4 * d + 3) % p == 0).take(count).collect()
}

/// `pod_3(p^{2k}n + (p^{2k}-1)/4) ≡ pod_3(n) (mod 3)`.
pub fn corollary2_family(p: u64, k: u32) -> Result<CongruenceFamily> {
    require_p3mod4(p)?;
    if k < 1 {
        return domain("k must be positive");
    }
    let a = checked_pow(p, 2 * k)?;
    CongruenceFamily::new(3, (a, exact_div(a - 1, 4, "(p^2k-1)/4")?), (1, 0), 1, 3, format!("cor2(p={p},k={k})"))
}

/// `pod_3(p^{2k+1}n + (p^{2k}-1)/4) ≡ pod_3(pn) (mod 3)`.
pub fn corollary3_family(p: u64, k: u32) -> Result<CongruenceFamily> {
    require_p3mod4(p)?;
    if k < 1 {
        return domain("k must be positive");
    }
    let a = checked_pow(p, 2 * k)?;
    CongruenceFamily::new(
        3,
        (checked_pow(p, 2 * k + 1)?, exact_div(a - 1, 4, "(p^2k-1)/4")?),
        (p, 0),
        1,
        3,
        format!("cor3(p={p},k={k})"),
    )
}

/// `pod_3(9^k n + (9^k-1)/4) ≡ pod_3(n) (mod 3)`.
pub fn veena_family(k: u32) -> Result<CongruenceFamily> {
    let mut fam = corollary2_family(3, k)?;
    fam.tag = format!("veena(k={k})");
    Ok(fam)
}

/// The three prime-power congruences modulo `3^2`, `3^3` and `3^4`.
pub fn gireesh_families() -> Vec<CongruenceFamily> {
    [((9, 2), (1, 0), 9, "gireesh(mod 9)"), ((27, 20), (3, 2), 27, "gireesh(mod 27)"), ((243, 182), (27, 20), 81, "gireesh(mod 81)")]
        .into_iter()
        .map(|(l, r, m, tag)| CongruenceFamily::new(3, l, r, 1, m, tag).expect("valid family"))
        .collect()
}

/// [`theorem2_family`] steps whose composition is [`corollary2_family`]`(p, k)`:
/// step `j` uses exponent `2j-1` and `δ = (p^{2j-1}-3)/4`, for `j = k, ..., 1`.
pub fn corollary2_chain(p: u64, k: u32) -> Result<Vec<CongruenceFamily>> {
    require_p3mod4(p)?;
    (1..=k)
        .rev()
        .map(|j| {
            let pk = checked_pow(p, 2 * j - 1)?;
            theorem2_family(p, 2 * j - 1, exact_div(pk - 3, 4, "(p^(2j-1)-3)/4")?)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub direct: FamilyReport,
    pub steps: Vec<FamilyReport>,
    pub composed: CongruenceFamily,
    pub composition_matches: bool,
    pub agree: bool,
}

/// Verifies [`corollary2_family`] directly and through [`corollary2_chain`].
/// Each step's right side is the next step's left side at the same `n`, so
/// the steps passing on `0..=n_test` imply the direct family does too.
pub fn verify_chain(p: u64, k: u32, n_test: u64) -> Result<ChainReport> {
    let direct_fam = corollary2_family(p, k)?;
    let chain = corollary2_chain(p, k)?;
    let mut composed = chain[0].clone();
    for next in &chain[1..] {
        composed = composed.compose(next)?;
    }
    let composition_matches =
        composed.lhs() == direct_fam.lhs() && composed.rhs() == direct_fam.rhs() && composed.modulus == direct_fam.modulus;
    let direct = verify_family(&direct_fam, n_test)?;
    let steps = verify_batch(&chain, n_test)?;
    let agree = steps.iter().all(|s| s.passed) == direct.passed;
    Ok(ChainReport { direct, steps, composed, composition_matches, agree })
}

/// Two candidate offsets for `pod_3(343n + B) ≡ pod_3(7n) (mod 3)`: the
/// `p = 7, k = 1` case of [`corollary3_family`] gives `B = (7²-1)/4 = 12`; `B = 24`
/// is the other reading in circulation.
pub fn corollary3_example_candidates() -> [CongruenceFamily; 2] {
    [
        CongruenceFamily::new(3, (343, 12), (7, 0), 1, 3, "cor3-example(343n+12)").expect("valid"),
        CongruenceFamily::new(3, (343, 24), (7, 0), 1, 3, "cor3-example(343n+24)").expect("valid"),
    ]
}

/// Outcome of scanning a closed-form identity for `pod_ℓ` modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub n_test: u64,
    pub passed: bool,
    pub counterexample: Option<u64>,
}

fn identity_scan(name: String, n_test: u64, ok: impl Fn(u64) -> Result<bool>) -> Result<IdentityReport> {
    let mut counterexample = None;
    for n in 0..=n_test {
        if !ok(n)? {
            counterexample = Some(n);
            break;
        }
    }
    Ok(IdentityReport { name, n_test, passed: counterexample.is_none(), counterexample })
}

fn sign_pow(n: u64) -> i128 {
    if n.is_multiple_of(2) { 1 } else { -1 }
}

/// `pod_5(n) ≡ (-1)^n σ₁(2n+1) (mod 5)`.
pub fn verify_pod5(n_test: u64) -> Result<IdentityReport> {
    let t = pod_series(5, n_test as usize + 1, Modulus::Residues(5))?;
    identity_scan("pod5".into(), n_test, |n| {
        let rhs = sign_pow(n) * sigma1(2 * n + 1)?;
        Ok(t.residue(n as usize, 5) == reduce_i128(rhs, 5))
    })
}

/// `pod_7(n) ≡ (-1)^{n+1} 8⁻¹ σ_{2,χ}(4n+3) (mod 7)`, with `8⁻¹ ≡ 1`.
pub fn verify_pod7(n_test: u64) -> Result<IdentityReport> {
    let inv8 = mod_inverse(8, 7)? as i128;
    let t = pod_series(7, n_test as usize + 1, Modulus::Residues(7))?;
    identity_scan("pod7".into(), n_test, |n| {
        let rhs = -sign_pow(n) * inv8 * sigma2_chi(4 * n + 3)?;
        Ok(t.residue(n as usize, 7) == reduce_i128(rhs, 7))
    })
}

/// `pod_p(n) ≡ (-1)^n t_{p-1}(n) (mod p)` for an odd prime `p`.
pub fn verify_podp(p: u64, n_test: u64) -> Result<IdentityReport> {
    if p == 2 || !is_prime(p) {
        return domain(format!("{p} is not an odd prime"));
    }
    let order = n_test as usize + 1;
    let m = Modulus::Residues(p);
    let pod = pod_series(p, order, m)?;
    let t = triangular_reps(p - 1, order, m)?;
    identity_scan(format!("podp(p={p})"), n_test, |n| {
        let rhs = sign_pow(n) * t.residue(n as usize, p) as i128;
        Ok(pod.residue(n as usize, p) == reduce_i128(rhs, p))
    })
}

/// `t_4(n) = σ₁(2n+1)` exactly.
pub fn verify_t4_sigma(n_test: u64) -> Result<IdentityReport> {
    let t = triangular_reps(4, n_test as usize + 1, Modulus::Integers)?;
    identity_scan("t4=sigma1(2n+1)".into(), n_test, |n| Ok(t.coeff(n as usize) == sigma1(2 * n + 1)?.into()))
}
