//! Empirical densities `#{0 ≤ n < X : pod_ℓ(n) ≡ r (mod M)} / X`.
//!
//! Counts run over the half-open range `[0, X)`, so the ratio is a proportion
//! of exactly `X` indices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::modring::{Modulus, Rational};
use crate::partitions::pod_series;

/// Largest cutoff a scan accepts; the table is held in memory.
pub const MAX_CUTOFF: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub ell: u64,
    pub modulus: u64,
    pub residue: u64,
    pub cutoffs: Vec<u64>,
    pub counts: Vec<u64>,
    pub ratios: Vec<Rational>,
    /// `ratios` rounded half-up to six decimal places.
    pub decimals: Vec<String>,
}

impl DensityReport {
    /// Aligned `X  count  ratio` table.
    pub fn render_table(&self) -> String {
        let rows: Vec<[String; 3]> = self
            .cutoffs
            .iter()
            .zip(&self.counts)
            .zip(&self.decimals)
            .map(|((x, c), d)| [x.to_string(), c.to_string(), d.clone()])
            .collect();
        let head = ["X".to_string(), "count".to_string(), "ratio".to_string()];
        let width: Vec<usize> = (0..3)
            .map(|i| rows.iter().map(|r| r[i].len()).chain([head[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = format!(
            "# pod_{} ≡ {} (mod {})\n",
            self.ell, self.residue, self.modulus
        );
        for row in std::iter::once(&head).chain(rows.iter()) {
            out.push_str(&format!("{:>w0$}  {:>w1$}  {:>w2$}\n", row[0], row[1], row[2], w0 = width[0], w1 = width[1], w2 = width[2]));
        }
        out
    }
}

/// `num/den` rounded half-up to six places, rendered as a decimal.
pub fn six_places(num: u64, den: u64) -> String {
    let scaled = (num as u128 * 2_000_000 + den as u128) / (2 * den as u128);
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

fn validate(ell: u64, m: u64, r: u64, cutoffs: &[u64]) -> Result<()> {
    if ell < 2 {
        return domain(format!("ell must be at least 2, got {ell}"));
    }
    if m == 0 {
        return domain("modulus must be positive");
    }
    if r >= m {
        return domain(format!("residue {r} is not in [0, {m})"));
    }
    if cutoffs.is_empty() {
        return domain("at least one cutoff is required");
    }
    if cutoffs[0] == 0 {
        return domain("cutoffs must be positive");
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return domain("cutoffs must be strictly ascending");
    }
    let top = *cutoffs.last().expect("nonempty");
    if top > MAX_CUTOFF {
        return domain(format!("cutoff {top} exceeds the supported maximum {MAX_CUTOFF}"));
    }
    Ok(())
}

/// Number of `n < X` in each residue class mod `m`, for one `X`.
pub fn residue_counts(ell: u64, m: u64, x: u64) -> Result<Vec<u64>> {
    validate(ell, m, 0, &[x])?;
    if m == 1 {
        return Ok(vec![x]);
    }
    let table = pod_series(ell, x as usize, Modulus::residues(m)?)?;
    let mut counts = vec![0u64; m as usize];
    for &v in table.series().residues().expect("residue table") {
        counts[v as usize] += 1;
    }
    Ok(counts)
}

/// One scan up to the largest cutoff, with the count snapshotted at each.
pub fn density_curve(ell: u64, m: u64, r: u64, cutoffs: &[u64]) -> Result<DensityReport> {
    validate(ell, m, r, cutoffs)?;
    let top = *cutoffs.last().expect("nonempty");
    let counts: Vec<u64> = if m == 1 {
        cutoffs.to_vec()
    } else {
        let table = pod_series(ell, top as usize, Modulus::residues(m)?)?;
        let vals = table.series().residues().expect("residue table");
        let mut counts = Vec::with_capacity(cutoffs.len());
        let (mut seen, mut running) = (0usize, 0u64);
        for &x in cutoffs {
            running += vals[seen..x as usize].iter().filter(|&&v| v == r).count() as u64;
            seen = x as usize;
            counts.push(running);
        }
        counts
    };
    let ratios = cutoffs
        .iter()
        .zip(&counts)
        .map(|(&x, &c)| Rational::new(c as i128, x as i128))
        .collect::<Result<Vec<_>>>()?;
    let decimals = cutoffs.iter().zip(&counts).map(|(&x, &c)| six_places(c, x)).collect();
    Ok(DensityReport { ell, modulus: m, residue: r, cutoffs: cutoffs.to_vec(), counts, ratios, decimals })
}

/// Single-cutoff [`density_curve`].
pub fn density(ell: u64, m: u64, r: u64, x: u64) -> Result<DensityReport> {
    density_curve(ell, m, r, &[x])
}

/// Independent `(ell, M, r)` curves scanned in parallel, in input order.
pub fn density_curves(requests: &[(u64, u64, u64)], cutoffs: &[u64]) -> Result<Vec<DensityReport>> {
    requests.par_iter().map(|&(ell, m, r)| density_curve(ell, m, r, cutoffs)).collect()
}
