//! Truncated-Fock-space states and exact linear optics on them.

pub mod detect;
pub mod ops;
pub mod state;

pub use detect::{click_probability, coincidence_probability, DetectorKind, DetectorSpec, Ensemble};
pub use ops::{apply_beam_splitter, apply_loss, apply_phase_shifter, apply_two_mode};
pub use state::{FockState, OccupationVector, NORM_SLACK, PRUNE_THRESHOLD};
