//! Numerical laboratory for the prime geodesic theorem.
//!
//! The modules follow the pipeline:
//! [`group`] enumerates length spectra,
//! [`spectral`] turns eigenvalues into Selberg zeta zeros,
//! [`summatory`] evaluates ψ, ψ₁, ψ₂ exactly,
//! [`explicit`] fits and evaluates the explicit formulas,
//! and [`exceptional`] scans the exceptional sets and reconstructs ψ off them.
//! [`oscillatory`] and [`numeric`] are the shared numerical kernels.

// `!(a > b)` is used deliberately so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exceptional;
pub mod explicit;
pub mod group;
pub mod numeric;
pub mod oscillatory;
pub mod spectral;
pub mod summatory;

pub use error::{Error, Result};

/// Name and version stamped into every file the library writes.
pub const TOOL_VERSION: &str = concat!("geodesic-lab ", env!("CARGO_PKG_VERSION"));

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/zeros.md")]
    mod zeros {}
    #[doc = include_str!("../../../book/src/summatory.md")]
    mod summatory {}
    #[doc = include_str!("../../../book/src/explicit.md")]
    mod explicit {}
    #[doc = include_str!("../../../book/src/exceptional.md")]
    mod exceptional {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
