//! Families of primitive cubic and quartic Dirichlet characters: exact
//! arithmetic in Z[ω] and Z[i], power-residue symbols, central L-values via
//! the approximate functional equation, and empirical moment experiments.
//!
//! The crate is organized bottom-up:
//!
//! * [`ring`] — exact arithmetic in the two Euclidean rings, primary
//!   normalization, and norm-equation splitting of rational primes.
//! * [`symbols`] — cubic and quartic residue symbols as exact roots of unity.
//! * [`characters`] — enumeration of the character families by conductor,
//!   evaluation, Gauss sums and root numbers.
//! * [`lvalue`] — L(1/2, χ) two ways: smoothed approximate functional
//!   equation and a direct Hurwitz-zeta oracle.
//! * [`constants`] — the arithmetic constants g(c), r_K, ζ_K(2), c_K,
//!   Z_K(u, ℓ) and the smooth conductor weight Φ with its Mellin transform.
//! * [`mollifier`] — block prime sums, truncated exponentials, mollifier
//!   Dirichlet polynomials.
//! * [`experiments`] — twisted first moments, 2k-th moments, Pólya-type
//!   character sums, the lower-bounds-principle inequality, GRH log-bound
//!   diagnostics, non-vanishing counts.

pub mod characters;
pub mod constants;
pub mod experiments;
pub mod kahan;
pub mod lvalue;
pub mod mollifier;
pub mod ring;
pub mod sieve;
pub mod special;
pub mod symbols;

pub use characters::{FamilySlice, PrimitiveCharacter};
pub use ring::{EisensteinInt, Family, GaussianInt, KElt, KPrime};
pub use symbols::SymbolValue;
