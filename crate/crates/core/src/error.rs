//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {index} out of range for a {modes}-mode state")]
    InvalidMode { index: usize, modes: usize },

    #[error("beam splitter requires two distinct modes, got {0}")]
    DegenerateModePair(usize),

    #[error("detectors must watch pairwise distinct modes (mode {0} repeated)")]
    DuplicateDetectorModes(usize),

    #[error("transmissivity/efficiency {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("two-mode matrix is not unitary (max deviation {0:.3e})")]
    NonUnitaryMatrix(f64),

    #[error("ket with {total} photons exceeds the cutoff of {cutoff}")]
    CutoffExceeded { total: u32, cutoff: u32 },

    #[error("state norm {0} exceeds 1")]
    NormExceeded(f64),

    #[error("source parameter {value} leaves a truncation tail of {tail:.3e} (limit {limit:.0e})")]
    TruncationTail { value: f64, tail: f64, limit: f64 },

    #[error("no root bracketed in [{lo}, {hi}] for target {target}")]
    RootNotBracketed { lo: f64, hi: f64, target: f64 },

    #[error("fringe is degenerate: {0}")]
    DegenerateFringe(String),

    #[error("optimization objective is flat; no optimum claimed")]
    DegenerateObjective,

    #[error("visibility estimation failed: {0}")]
    EstimationFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
