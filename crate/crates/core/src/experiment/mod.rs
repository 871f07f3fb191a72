//! The noise-eater experiment: circuit assembly, fringes, closed forms,
//! recovery optimization, and count statistics.

pub mod analytic;
pub mod circuit;
pub mod counts;
pub mod fringe;
pub mod optimize;
pub mod params;

pub use analytic::{visibility_equal_sources, AnalyticCoefficients, V_THRESHOLD};
pub use circuit::{
    conditional_probability, d1_detector, d2_detector, heralded_conditional_probability,
    mode_layout, run_circuit, tap_detector, unconditional_probability, ModeLayout,
};
pub use counts::{
    estimate_visibility, simulate_counts, simulate_dark_counts, CountRecord, VisibilityEstimate,
};
pub use fringe::{
    conditional_fringe, heralded_conditional_fringe, unconditional_fringe, Fringe,
    HARMONIC_RESIDUAL,
};
pub use optimize::{
    corollary_sweep, golden_section_maximize, optimize_recovery, uncorrected_visibility,
    CorollaryRow, RecoveryOptimum,
};
pub use params::{ExperimentParams, PhiGrid};
