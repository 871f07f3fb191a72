//! Classical mixtures of pure states and photon detection functionals.
//!
//! All detection quantities are diagonal in the Fock basis, so mixtures are
//! represented as weighted lists of pure branches rather than density
//! matrices, and unobserved modes (loss ancillas, exit ports, heralds) are
//! marginalized implicitly: they simply never enter the click formula.

use crate::error::{Error, Result};
use crate::fock::state::FockState;

/// A weighted classical mixture of pure states.
///
/// Weights are probabilities; branch states may be sub-normalized, and the
/// total probability Σ wᵢ‖ψᵢ‖² never exceeds one.
#[derive(Debug, Clone)]
pub struct Ensemble {
    branches: Vec<(f64, FockState)>,
}

impl Ensemble {
    pub fn new() -> Self {
        Ensemble { branches: Vec::new() }
    }

    pub fn pure(state: FockState) -> Self {
        Ensemble { branches: vec![(1.0, state)] }
    }

    pub fn push(&mut self, weight: f64, state: FockState) -> Result<()> {
        if weight < 0.0 {
            return Err(Error::InvalidParameter(format!("negative branch weight {weight}")));
        }
        self.branches.push((weight, state));
        let total = self.total_probability();
        if total > 1.0 + 1e-12 {
            return Err(Error::NormExceeded(total));
        }
        Ok(())
    }

    pub fn branches(&self) -> &[(f64, FockState)] {
        &self.branches
    }

    /// Σ wᵢ‖ψᵢ‖².
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|(w, s)| w * s.norm_squared()).sum()
    }

    /// Apply a pure-state map to every branch.
    pub fn map<F>(&self, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&FockState) -> Result<FockState>,
    {
        let mut out = Vec::with_capacity(self.branches.len());
        for (w, s) in &self.branches {
            out.push((*w, f(s)?));
        }
        Ok(Ensemble { branches: out })
    }

    /// Weighted mean photon number of one mode across all branches.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        let mut total = 0.0;
        for (w, s) in &self.branches {
            total += w * s.mean_photon_number(mode)?;
        }
        Ok(total)
    }
}

impl Default for Ensemble {
    fn default() -> Self {
        Self::new()
    }
}

/// Detector response model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Clicks on one or more photons; a ket with n photons clicks with
    /// probability 1 − (1−η)ⁿ.
    Threshold,
    /// Projects on exactly the requested photon count before applying the
    /// per-photon efficiency: a ket contributes η^k when it holds exactly k
    /// photons at the detector and zero otherwise.
    NumberResolving(u32),
}

/// A detector watching one port of the circuit.
///
/// A port is usually a single mode; when rails carry internal sub-modes
/// (partially distinguishable light) the detector watches all of them and
/// responds to their summed occupation, since it cannot resolve the internal
/// degree of freedom.
#[derive(Debug, Clone)]
pub struct DetectorSpec {
    modes: Vec<usize>,
    efficiency: f64,
    kind: DetectorKind,
}

impl DetectorSpec {
    pub fn threshold(mode: usize, efficiency: f64) -> Result<Self> {
        Self::new(vec![mode], efficiency, DetectorKind::Threshold)
    }

    pub fn number_resolving(mode: usize, count: u32, efficiency: f64) -> Result<Self> {
        Self::new(vec![mode], efficiency, DetectorKind::NumberResolving(count))
    }

    pub fn new(modes: Vec<usize>, efficiency: f64, kind: DetectorKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::OutOfRange(efficiency));
        }
        if modes.is_empty() {
            return Err(Error::InvalidParameter("detector watches no mode".into()));
        }
        Ok(DetectorSpec { modes, efficiency, kind })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    /// Click probability given `n` photons at the port.
    fn click_given(&self, n: u32) -> f64 {
        match self.kind {
            DetectorKind::Threshold => 1.0 - (1.0 - self.efficiency).powi(n as i32),
            DetectorKind::NumberResolving(k) => {
                if n == k {
                    self.efficiency.powi(k as i32)
                } else {
                    0.0
                }
            }
        }
    }

    fn port_count(&self, occ: &crate::fock::state::OccupationVector) -> u32 {
        self.modes.iter().map(|&m| occ.count(m)).sum()
    }

    fn validate_against(&self, state: &FockState) -> Result<()> {
        for &m in &self.modes {
            state.check_mode(m)?;
        }
        Ok(())
    }
}

/// Probability that the detector clicks, marginalizing every other mode.
pub fn click_probability(ens: &Ensemble, det: &DetectorSpec) -> Result<f64> {
    let mut total = 0.0;
    for (w, state) in ens.branches() {
        det.validate_against(state)?;
        let p: f64 = state
            .amplitudes()
            .map(|(occ, amp)| amp.norm_sqr() * det.click_given(det.port_count(occ)))
            .sum();
        total += w * p;
    }
    Ok(total)
}

/// Joint probability that every listed detector clicks. Detector ports must
/// be pairwise disjoint; conditioned on a basis ket the clicks are then
/// independent.
pub fn coincidence_probability(ens: &Ensemble, dets: &[DetectorSpec]) -> Result<f64> {
    let mut seen = std::collections::BTreeSet::new();
    for det in dets {
        for &m in det.modes() {
            if !seen.insert(m) {
                return Err(Error::DuplicateDetectorModes(m));
            }
        }
    }
    let mut total = 0.0;
    for (w, state) in ens.branches() {
        let mut p = 0.0;
        for det in dets {
            det.validate_against(state)?;
        }
        for (occ, amp) in state.amplitudes() {
            let joint: f64 = dets.iter().map(|d| d.click_given(d.port_count(occ))).product();
            p += amp.norm_sqr() * joint;
        }
        total += w * p;
    }
    Ok(total)
}
