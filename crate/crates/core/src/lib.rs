//! Exact computation with ℓ-regular partitions with distinct odd parts.
//!
//! The crate is organized bottom-up:
//!
//! - [`modring`]: Kronecker symbols, divisor sums, exact rationals, moduli.
//! - [`qseries`]: truncated q-series, Euler products, theta series and eta-quotients.
//! - [`partitions`]: `pod_ℓ(n)` by generating function and by enumeration, `t_k(n)`.
//! - [`etaquot`]: modularity conditions, characters and cusp orders of eta-quotients.
//! - [`hecke`]: Hecke operators on q-expansions and eigenform checks.
//! - [`congr`]: congruence families and finite-range scanners.
//! - [`density`]: empirical densities of residue classes of `pod_ℓ`.

pub mod congr;
pub mod density;
pub mod error;
pub mod etaquot;
pub mod hecke;
pub mod modring;
pub mod partitions;
pub mod qseries;

pub use error::{Error, Result};
pub use modring::{Modulus, Rational};
pub use qseries::{EtaQuotient, Series};
