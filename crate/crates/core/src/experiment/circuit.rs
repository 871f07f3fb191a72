//! Assembly of the interferometer and single-phase-point evaluation.
//!
//! Wiring, in propagation order: the signal photon is split onto rails A
//! and B by a balanced beam splitter; arm A carries the attenuator η_A and
//! the phase shifter φ; rail B meets the noise source on a coupler of
//! transmissivity T (the noise photon is reflected into the rail, the
//! leftover exits on the coupler's far port); the tap then diverts an
//! intensity fraction T_R of rail B to the subtraction detector D_R; a
//! final balanced beam splitter merges the rails.
//!
//! D₁ sits on the merged output port whose fringe is minimal at φ = 0.
//! The tap keeps the continuing rail amplitude real, √(1−T_R), and puts
//! the i on the diverted photons.
//!
//! When the noise is partially distinguishable (overlap s < 1), every rail
//! is doubled into (match, orthogonal) internal sub-modes; all optical
//! elements act identically on both, and detectors respond to the summed
//! occupation of their port.

use crate::error::Result;
use crate::fock::detect::{DetectorKind, DetectorSpec, Ensemble};
use crate::fock::ops::{apply_beam_splitter, apply_loss, apply_phase_shifter};
use crate::fock::state::{FockState, OccupationVector};
use crate::fock::{click_probability, coincidence_probability};
use crate::sources::{
    bernoulli_photon, noise_with_overlap, poisson_noise_state, spdc_pair_state, SourceKind,
};

use super::params::ExperimentParams;

/// Positions of the circuit's ports in the mode register.
#[derive(Debug, Clone)]
pub struct ModeLayout {
    /// Arm-A sub-modes; after the final merge this is the D₁ port.
    pub arm_a: Vec<usize>,
    /// Rail-B sub-modes; after the final merge this is the D₂ port.
    pub rail_b: Vec<usize>,
    /// Noise-input sub-modes (the coupler's exit port after the coupling).
    pub noise: Vec<usize>,
    /// Tap output watched by D_R.
    pub tap: Vec<usize>,
    /// Herald mode(s) of a pair source; carried, never detected.
    pub herald: Vec<usize>,
    /// Mode count before loss ancillas are appended.
    pub initial_modes: usize,
    /// Photon-number cutoff used for the run.
    pub cutoff: u32,
    doubled: bool,
}

/// Compute the register layout for a parameter set.
pub fn mode_layout(params: &ExperimentParams) -> ModeLayout {
    let doubled = params.noise.overlap < 1.0;
    let spdc = matches!(params.noise.kind, SourceKind::Spdc { .. });
    // The cutoff must admit every photon the sources can emit at once
    // (herald included); a larger user-configured cutoff is honored.
    let cutoff = params.n_max.max(1 + params.noise.max_photons());
    if doubled {
        ModeLayout {
            arm_a: vec![0, 1],
            rail_b: vec![2, 3],
            noise: vec![4, 5],
            tap: vec![6, 7],
            herald: if spdc { vec![8, 9] } else { vec![] },
            initial_modes: if spdc { 10 } else { 8 },
            cutoff,
            doubled,
        }
    } else {
        ModeLayout {
            arm_a: vec![0],
            rail_b: vec![1],
            noise: vec![2],
            tap: vec![3],
            herald: if spdc { vec![4] } else { vec![] },
            initial_modes: if spdc { 5 } else { 4 },
            cutoff,
            doubled,
        }
    }
}

/// Place one emitted noise state (possibly doubled) at its register
/// positions: noise sub-modes first, then herald sub-modes.
fn noise_positions(layout: &ModeLayout) -> Vec<usize> {
    let mut pos = layout.noise.clone();
    pos.extend_from_slice(&layout.herald);
    pos
}

/// The noise source's emitted branches as (weight, state in layout order).
fn noise_branches(params: &ExperimentParams, layout: &ModeLayout) -> Result<Vec<(f64, FockState)>> {
    let raw: Vec<(f64, FockState)> = match params.noise.kind {
        SourceKind::SinglePhoton => bernoulli_photon(params.eta_n)?
            .branches()
            .iter()
            .map(|(w, s)| (*w, s.clone()))
            .collect(),
        SourceKind::Poisson { lambda } => vec![(1.0, poisson_noise_state(lambda)?)],
        SourceKind::Spdc { epsilon } => {
            // Emitted as (herald, noise); reorder to noise-first to match
            // the register layout.
            let state = spdc_pair_state(epsilon)?;
            let swapped = state
                .amplitudes()
                .map(|(occ, amp)| {
                    (OccupationVector::new(vec![occ.count(1), occ.count(0)]), *amp)
                })
                .collect();
            vec![(1.0, FockState::from_amplitudes(2, state.cutoff(), swapped)?)]
        }
    };
    if !layout.doubled {
        return Ok(raw);
    }
    raw.into_iter()
        .map(|(w, s)| Ok((w, noise_with_overlap(&s, params.noise.overlap)?)))
        .collect()
}

/// Initial register: signal ⊗ noise branches, everything else in vacuum.
fn initial_ensemble(params: &ExperimentParams, layout: &ModeLayout) -> Result<Ensemble> {
    let signal_mode = layout.arm_a[0];
    let noise_pos = noise_positions(layout);
    let mut ens = Ensemble::new();
    for (ws, sig) in bernoulli_photon(params.eta_s)?.branches() {
        for (wn, noise) in &noise_branches(params, layout)? {
            let state = FockState::compose(
                layout.initial_modes,
                layout.cutoff,
                &[(sig, &[signal_mode]), (noise, &noise_pos)],
            )?;
            ens.push(ws * wn, state)?;
        }
    }
    Ok(ens)
}

/// Push one branch through the optics. `merge` controls whether the final
/// balanced beam splitter is applied.
fn apply_interferometer(
    state: &FockState,
    params: &ExperimentParams,
    layout: &ModeLayout,
    phi: f64,
    merge: bool,
) -> Result<FockState> {
    let sub = layout.arm_a.len();
    let mut s = state.clone();
    for i in 0..sub {
        s = apply_beam_splitter(&s, (layout.arm_a[i], layout.rail_b[i]), 0.5)?;
    }
    for i in 0..sub {
        s = apply_loss(&s, layout.arm_a[i], params.eta_a)?;
    }
    if params.compensate_tap && params.t_r > 0.0 {
        for i in 0..sub {
            s = apply_loss(&s, layout.arm_a[i], 1.0 - params.t_r)?;
        }
    }
    for i in 0..sub {
        s = apply_phase_shifter(&s, layout.arm_a[i], phi)?;
    }
    for i in 0..sub {
        s = apply_beam_splitter(&s, (layout.rail_b[i], layout.noise[i]), params.t)?;
    }
    for i in 0..sub {
        // Divert intensity fraction T_R of the rail into the tap port.
        s = apply_beam_splitter(&s, (layout.rail_b[i], layout.tap[i]), 1.0 - params.t_r)?;
    }
    if merge {
        for i in 0..sub {
            s = apply_beam_splitter(&s, (layout.arm_a[i], layout.rail_b[i]), 0.5)?;
        }
    }
    Ok(s)
}

/// Run the full circuit at one phase and return the output mixture.
pub fn run_circuit(params: &ExperimentParams, phi: f64) -> Result<Ensemble> {
    params.validate()?;
    let layout = mode_layout(params);
    initial_ensemble(params, &layout)?
        .map(|state| apply_interferometer(state, params, &layout, phi, true))
}

/// Detector D₁ on the merged arm-A port.
pub fn d1_detector(params: &ExperimentParams, layout: &ModeLayout) -> Result<DetectorSpec> {
    DetectorSpec::new(layout.arm_a.clone(), params.eta_d, DetectorKind::Threshold)
}

/// Detector D₂ on the complementary output port.
pub fn d2_detector(params: &ExperimentParams, layout: &ModeLayout) -> Result<DetectorSpec> {
    DetectorSpec::new(layout.rail_b.clone(), params.eta_d, DetectorKind::Threshold)
}

/// Subtraction detector D_R: exactly-one-photon projection with per-photon
/// efficiency η_R by default, plain threshold when configured.
pub fn tap_detector(params: &ExperimentParams, layout: &ModeLayout) -> Result<DetectorSpec> {
    let kind = if params.tap_threshold_detector {
        DetectorKind::Threshold
    } else {
        DetectorKind::NumberResolving(1)
    };
    DetectorSpec::new(layout.tap.clone(), params.eta_r, kind)
}

/// Unconditional click probability at D₁ for one phase.
pub fn unconditional_probability(params: &ExperimentParams, phi: f64) -> Result<f64> {
    let layout = mode_layout(params);
    let ens = run_circuit(params, phi)?;
    click_probability(&ens, &d1_detector(params, &layout)?)
}

/// Coincidence probability of a D₁ click with a D_R subtraction event, for
/// one phase.
pub fn conditional_probability(params: &ExperimentParams, phi: f64) -> Result<f64> {
    let layout = mode_layout(params);
    let ens = run_circuit(params, phi)?;
    coincidence_probability(
        &ens,
        &[d1_detector(params, &layout)?, tap_detector(params, &layout)?],
    )
}

/// Coincidence probability restricted to runs where the signal source
/// fired, for one phase.
///
/// The conditional analysis treats each source branch separately, and only
/// branches carrying the signal photon contribute to the recovered fringe;
/// coincidences between two noise photons with no signal present are
/// accidentals outside that analysis. With a single-photon noise source
/// the restriction is vacuous — a lone noise photon cannot fire two
/// detectors — so this equals [`conditional_probability`] exactly there.
/// Multi-photon noise studies use this branch-local conditional.
pub fn heralded_conditional_probability(params: &ExperimentParams, phi: f64) -> Result<f64> {
    params.validate()?;
    let layout = mode_layout(params);
    let noise_pos = noise_positions(&layout);
    let signal = FockState::basis(OccupationVector::new(vec![1]), 1)?;
    let mut ens = Ensemble::new();
    for (wn, noise) in &noise_branches(params, &layout)? {
        let state = FockState::compose(
            layout.initial_modes,
            layout.cutoff,
            &[(&signal, &[layout.arm_a[0]]), (noise, &noise_pos)],
        )?;
        ens.push(params.eta_s * wn, state)?;
    }
    let out = ens.map(|state| apply_interferometer(state, params, &layout, phi, true))?;
    coincidence_probability(
        &out,
        &[d1_detector(params, &layout)?, tap_detector(params, &layout)?],
    )
}
