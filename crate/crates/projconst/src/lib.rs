//! Parallel runtime, file formats, experiment registry and reports on top of
//! [`projconst_core`].
//!
//! [`Runtime`] implements the core crate's `Backend` with a rayon pool and
//! shared caches; everything numerical lives in the core crate and is
//! re-exported.

pub mod experiments;
pub mod formats;
pub mod report;
pub mod runtime;

pub use projconst_core;
pub use runtime::Runtime;
