//! Arithmetic and spectral tooling for dilated function systems `f(kx)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`ntheory`]: sieve-backed multiplicative functions and `zeta`.
//! * [`sequences`]: index sets `K`, factor closures, geometric blocks and
//!   the complexity functional `theta_K`.
//! * [`spectral`]: GCD matrices, the Jordan-totient factorisation, a cyclic
//!   Jacobi eigensolver and quadratic-form bounds.
//! * [`dilated`]: exact L² norms of dilated sums by frequency-collision
//!   counting, band energies, quadrature and Dirichlet-series probes.
//! * [`criteria`]: coefficient-side summability criteria with verdicts.
//! * [`cli`]: the batch runner behind the `dilated` binary.

pub mod cli;
pub mod criteria;
pub mod dilated;
mod error;
pub mod ntheory;
pub mod numerics;
pub mod sequences;
pub mod spectral;

pub use error::{Error, Result};
