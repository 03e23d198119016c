//! Exact solutions for a particle (or many equal-mass particles) subject to the
//! four-parameter family of penetrable point interactions in one dimension.
//!
//! The interaction at `x = 0` is the boundary condition
//!
//! ```text
//! (psi'(+0), 2m psi(+0))^T = e^{i theta} [[alpha, beta], [delta, gamma]] (psi'(-0), 2m psi(-0))^T
//! ```
//!
//! with `alpha*gamma - beta*delta = 1` and `hbar = 1`. Modules:
//!
//! * [`interaction`] parameters, validation and the boundary matrix
//! * [`one_body`] bound states, jump ratio, root-count phase diagram
//! * [`scattering`] transmission and reflection amplitudes
//! * [`many_body`] N-body bound states built from the pair solution
//! * [`diffraction`] three-body ray amplitudes and the no-diffraction test
//! * [`verify`] independent numerical oracles
//! * [`suite`] oracle-vs-closed-form check suites

pub mod diffraction;
pub mod error;
pub mod interaction;
pub mod many_body;
pub mod one_body;
pub mod scattering;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use interaction::{BoundaryMatrix, InteractionKind, InteractionParams};

pub use num_complex::Complex64 as C64;
