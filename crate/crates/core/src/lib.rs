//! k-Lehmer numbers: integers n with φ(n) | (n-1)^k.
//!
//! - [`arith`]: 128-bit primality, factorization, φ, λ, rad, valuations.
//! - [`lehmer`]: membership in L_k and L_∞, the Lehmer index, the
//!   semiprime criterion and the 3·2^r + 1 pair family.
//! - [`carmichael`]: Korselt, λ and radical tests, Chernick's U_k(m),
//!   Fermat pseudoprime bases.
//! - [`sieve`]: segmented bulk classification, C_k(10^j) tables and the
//!   α(k) search.
//! - [`cli`]: the `klehmer` command line.

pub mod arith;
pub mod carmichael;
pub mod cli;
mod decimal;
pub mod error;
pub mod lehmer;
pub mod sieve;

pub use arith::{FactoredInteger, Valuation, MAX_NATURAL};
pub use error::{Error, Result};
pub use lehmer::LehmerIndex;
