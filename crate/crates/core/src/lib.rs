//! Minimum moduli of compressed shifts, truncated Toeplitz operators and
//! dual truncated Toeplitz operators on model spaces `K_u = H² ⊖ uH²` of a
//! finite Blaschke product `u`.
//!
//! Every operator is realized as a finite matrix built from certified
//! Fourier windows; closed-form values from operator theory live in
//! [`oracle`] and are used to cross-check the numerics.

pub mod error;
pub mod fourier;
pub mod linalg;
pub mod minmod;
pub mod modelspace;
pub mod operators;
pub mod oracle;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
