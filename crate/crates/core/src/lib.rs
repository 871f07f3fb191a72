//! Exact truncated-Fock-space simulation of a single-photon "noise eater":
//! a Mach-Zehnder interferometer whose noisy rail is conditionally cleaned
//! by tapping off and detecting exactly one photon.
//!
//! The crate has three layers:
//!
//! * [`fock`] — sparse multimode Fock states and exact linear optics
//!   (beam splitters, phase shifters, loss by ancilla dilation) plus
//!   threshold/number-resolved detection functionals;
//! * [`sources`] — the input states: probabilistic single photons,
//!   weak-coherent and pair-source multi-photon noise, and partially
//!   distinguishable variants;
//! * [`experiment`] — the interferometer itself: fringes, visibilities,
//!   their closed-form counterparts, recovery-setting optimization, and
//!   Poisson count emulation.
//!
//! The numeric engine and the closed forms are developed independently and
//! verify each other; the test suites hold them to 1e−10 agreement.

pub mod error;
pub mod experiment;
pub mod fock;
pub mod sources;

pub use error::{Error, Result};
