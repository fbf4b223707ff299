//! BIBO stability analysis for one-dimensional hyperbolic boundary control systems
//!
//! `x_t = P1 ∂ξ(H x) + P0 H x` on `[a, b]`, with boundary input `u = WB [(Hx)(b); (Hx)(a)]`
//! and output `y = WC [(Hx)(b); (Hx)(a)]`.
//!
//! The pipeline runs [`system::validate_system`], [`spectral::diagonalize`] into Riemann
//! invariants, [`spectral::decompose_boundary`] into `(K, M)`, and finally
//! [`certify::certify`], which looks for a Neumann-series certificate on the atomic impulse
//! response. [`transfer`] evaluates `G(s)` from the spatial ODE and [`simulate`] runs the
//! delay-line dynamics directly, so both act as independent checks on the certificate.

pub mod certify;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod ode;
pub mod simulate;
pub mod spectral;
pub mod system;
pub mod transfer;

pub use error::{Error, ErrorKind, Result};
pub use system::HyperbolicSystem;
