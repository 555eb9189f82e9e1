//! Finite real spectral triples built from the tripled lattice representation
//! of functions on a discrete circle or segment.
//!
//! The pipeline runs bottom-up:
//!
//! * [`qmatrix`] builds the integer intersection matrix and its exact
//!   determinant and kernel data.
//! * [`triple`] turns the matrix into a Hilbert space with grading, real
//!   structure and the left/right algebra representations.
//! * [`dirac`] assembles constrained Dirac operators and checks the axioms.
//! * [`calculus`] decomposes `[D, a]` into per-point blocks, their kernels and
//!   rotated forms.
//! * [`product`] forms `D⊗1 + γ⊗D` on two factors.
//! * [`analysis`] runs convergence sweeps, spectra and surveys.
//!
//! The `fintriple` binary (feature `cli`) exposes all of these as subcommands.

pub mod analysis;
pub mod calculus;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dirac;
mod error;
pub mod linalg;
pub mod product;
pub mod qmatrix;
pub mod samples;
pub mod triple;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default seed for the pseudorandom algebra elements used by the axiom checks.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;
