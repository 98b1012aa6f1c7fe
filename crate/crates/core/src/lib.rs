//! Numerical core for the fractional semilinear heat equation
//!
//! ```text
//! u_t = −(−Δ)^{α/2} u + |u|^{p−1} u
//! ```
//!
//! The crate is `no_std` (it needs `alloc`). Discrete Fourier transforms are
//! supplied by the caller through [`field::FftBackend`], so the same code runs
//! on top of any FFT library.
//!
//! Modules, bottom up:
//!
//! * [`constants`]: gamma function, closed-form constants, critical exponents
//!   and the σ root solver.
//! * [`radial`]: quadrature for the integral fractional Laplacian of radial
//!   profiles, used as an independent check of the steady state.
//! * [`field`]: periodic grids, sampled data, the fractional heat semigroup and
//!   weighted norms.
//! * [`linear`]: the semigroup generated by the Hardy operator
//!   `(−Δ)^{α/2} − κ|x|^{−α}`.
//! * [`nonlinear`]: split-step integrator with blowup detection and monitors.
//! * [`morrey`]: grid estimators of homogeneous Morrey norms.
//! * [`analysis`]: power-law fits, threshold bisection, envelope formulas and
//!   convergence checks.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod constants;
mod error;
pub mod field;
pub mod linear;
pub mod morrey;
pub mod nonlinear;
pub mod quadrature;
pub mod radial;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
