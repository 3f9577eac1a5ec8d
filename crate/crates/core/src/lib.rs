//! Projection constants of spaces of trigonometric and Dirichlet polynomials.
//!
//! The projection constant of `Trig_E(G)`, the polynomials on a compact abelian
//! group spanned by a finite character set `E`, equals the Haar integral
//! `∫_G |Σ_{γ∈E} γ| dm`. For Dirichlet polynomials `Σ_{n∈J} a_n e^{-ω_n s}` the
//! group can always be realized as a finite torus through the Bohr lift, or the
//! integral replaced by a time average along the real line. This crate provides
//! the numerics behind both routes:
//!
//! * [`numtheory`]: sieving, factorization and the Bohr lift `n = 𝔭^α ↦ α`.
//! * [`indexsets`]: the multi-index families the integrals run over.
//! * [`kernels`]: Dirichlet kernels and their Lebesgue constants.
//! * [`integrate`]: Monte Carlo / lattice-rule torus integrals and time averages.
//! * [`constants`]: closed forms, brackets and reference curves.
//! * [`dirichlet`]: frequencies, the Bohr transform and the projection-constant dispatcher.
//! * [`sidon`]: certified Sidon-constant bounds.
//!
//! The crate is `no_std` (it needs `alloc`). Parallel execution, caching and IO
//! live in the companion `projconst` crate, which plugs into [`Backend`].
#![no_std]

extern crate alloc;

pub mod constants;
pub mod dirichlet;
mod error;
mod exec;
pub mod indexsets;
pub mod integrate;
pub mod kernels;
pub mod math;
pub mod numtheory;
pub mod quad;
pub mod sidon;

pub use error::{Error, Result};
pub use exec::{Backend, Sequential};
pub use num_complex::Complex64;
