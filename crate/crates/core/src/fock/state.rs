//! Sparse multimode Fock states with a total-photon-number cutoff.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitudes below this are dropped from the sparse amplitude map.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Slack allowed on the unit-norm bound; branch states may be sub-normalized
/// but never super-normalized beyond rounding.
pub const NORM_SLACK: f64 = 1e-12;

/// Occupation numbers of one basis ket, one entry per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        OccupationVector(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        OccupationVector(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn count(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Copy with `mode` set to `count`.
    pub fn with_count(&self, mode: usize, count: u32) -> Self {
        let mut counts = self.0.clone();
        counts[mode] = count;
        OccupationVector(counts)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// A pure state of `modes` bosonic modes, stored as a sparse map from
/// occupation vectors to complex amplitudes.
///
/// The total photon number of every stored ket is bounded by `cutoff`;
/// constructing a ket beyond the cutoff is an error, never a silent
/// truncation. Sub-normalized states are allowed (they arise as weighted
/// branches of an [`Ensemble`](super::detect::Ensemble)); norms above one
/// are rejected.
#[derive(Debug, Clone)]
pub struct FockState {
    modes: usize,
    cutoff: u32,
    amps: BTreeMap<OccupationVector, Complex64>,
}

impl FockState {
    /// The vacuum of `modes` modes.
    pub fn vacuum(modes: usize, cutoff: u32) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(OccupationVector::vacuum(modes), Complex64::new(1.0, 0.0));
        FockState { modes, cutoff, amps }
    }

    /// A single basis ket.
    pub fn basis(occ: OccupationVector, cutoff: u32) -> Result<Self> {
        Self::from_amplitudes(occ.modes(), cutoff, vec![(occ, Complex64::new(1.0, 0.0))])
    }

    /// Build a state from explicit ket amplitudes. Kets past the cutoff or a
    /// norm above one are rejected.
    pub fn from_amplitudes(
        modes: usize,
        cutoff: u32,
        entries: Vec<(OccupationVector, Complex64)>,
    ) -> Result<Self> {
        let mut amps = BTreeMap::new();
        for (occ, amp) in entries {
            if occ.modes() != modes {
                return Err(Error::InvalidParameter(format!(
                    "ket {occ} has {} modes, state has {modes}",
                    occ.modes()
                )));
            }
            let total = occ.total();
            if total > cutoff {
                return Err(Error::CutoffExceeded { total, cutoff });
            }
            if amp.norm() >= PRUNE_THRESHOLD {
                *amps.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        let state = FockState { modes, cutoff, amps };
        let norm_sq = state.norm_squared();
        if norm_sq > 1.0 + NORM_SLACK {
            return Err(Error::NormExceeded(norm_sq.sqrt()));
        }
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn ket_count(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm. Errors on an (all-pruned) zero state.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_squared().sqrt();
        if norm < PRUNE_THRESHOLD {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        let mut out = self.clone();
        for amp in out.amps.values_mut() {
            *amp /= norm;
        }
        Ok(out)
    }

    /// Mean photon number of one mode, ⟨n̂ₖ⟩.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(self
            .amps
            .iter()
            .map(|(occ, amp)| occ.count(mode) as f64 * amp.norm_sqr())
            .sum())
    }

    /// Append a fresh vacuum mode at the end; used by the loss dilation.
    pub fn append_vacuum_mode(&self) -> Self {
        let amps = self
            .amps
            .iter()
            .map(|(occ, amp)| {
                let mut counts = occ.counts().to_vec();
                counts.push(0);
                (OccupationVector::new(counts), *amp)
            })
            .collect();
        FockState { modes: self.modes + 1, cutoff: self.cutoff, amps }
    }

    /// Embed several component states into one larger register.
    ///
    /// `parts` maps each component's modes onto positions of the combined
    /// state; unmentioned positions stay in vacuum. Position sets must be
    /// disjoint. The combined kets must respect `cutoff`.
    pub fn compose(
        total_modes: usize,
        cutoff: u32,
        parts: &[(&FockState, &[usize])],
    ) -> Result<Self> {
        let mut used = vec![false; total_modes];
        for (part, positions) in parts {
            if part.modes() != positions.len() {
                return Err(Error::InvalidParameter(format!(
                    "component has {} modes but {} positions were given",
                    part.modes(),
                    positions.len()
                )));
            }
            for &p in *positions {
                if p >= total_modes {
                    return Err(Error::InvalidMode { index: p, modes: total_modes });
                }
                if used[p] {
                    return Err(Error::InvalidParameter(format!(
                        "mode position {p} assigned twice in compose"
                    )));
                }
                used[p] = true;
            }
        }

        let mut entries: Vec<(OccupationVector, Complex64)> =
            vec![(OccupationVector::vacuum(total_modes), Complex64::new(1.0, 0.0))];
        for (part, positions) in parts {
            let mut next = Vec::with_capacity(entries.len() * part.ket_count());
            for (occ, amp) in part.amplitudes() {
                for (base, base_amp) in &entries {
                    let mut counts = base.counts().to_vec();
                    for (local, &pos) in positions.iter().enumerate() {
                        counts[pos] = occ.count(local);
                    }
                    next.push((OccupationVector::new(counts), amp * base_amp));
                }
            }
            entries = next;
        }
        Self::from_amplitudes(total_modes, cutoff, entries)
    }

    /// Largest absolute amplitude difference against `other`, over the union
    /// of both supports. Requires matching mode counts.
    pub fn max_amplitude_difference(&self, other: &FockState) -> f64 {
        let mut worst: f64 = 0.0;
        for (occ, amp) in self.amplitudes() {
            worst = worst.max((amp - other.amplitude(occ)).norm());
        }
        for (occ, amp) in other.amplitudes() {
            worst = worst.max((amp - self.amplitude(occ)).norm());
        }
        worst
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::InvalidMode { index: mode, modes: self.modes });
        }
        Ok(())
    }

    pub(crate) fn from_map_unchecked(
        modes: usize,
        cutoff: u32,
        amps: BTreeMap<OccupationVector, Complex64>,
    ) -> Self {
        FockState { modes, cutoff, amps }
    }
}

/// Convenience constructor used throughout tests: `ket(&[1, 0], 4)`.
pub fn ket(counts: &[u32], cutoff: u32) -> FockState {
    FockState::basis(OccupationVector::new(counts.to_vec()), cutoff)
        .expect("basis ket within cutoff")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_normalized() {
        let v = FockState::vacuum(3, 4);
        assert_eq!(v.modes(), 3);
        assert!((v.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_exceeded_is_an_error() {
        let occ = OccupationVector::new(vec![3, 2]);
        let err = FockState::basis(occ, 4).unwrap_err();
        assert!(matches!(err, Error::CutoffExceeded { total: 5, cutoff: 4 }));
    }

    #[test]
    fn norm_above_one_rejected() {
        let entries = vec![
            (OccupationVector::new(vec![0]), c(1.0, 0.0)),
            (OccupationVector::new(vec![1]), c(0.5, 0.0)),
        ];
        assert!(matches!(
            FockState::from_amplitudes(1, 4, entries),
            Err(Error::NormExceeded(_))
        ));
    }

    #[test]
    fn tiny_amplitudes_are_pruned() {
        let entries = vec![
            (OccupationVector::new(vec![0]), c(1.0, 0.0)),
            (OccupationVector::new(vec![1]), c(1e-16, 0.0)),
        ];
        let state = FockState::from_amplitudes(1, 4, entries).unwrap();
        assert_eq!(state.ket_count(), 1);
    }

    #[test]
    fn mean_photon_number_counts_per_mode() {
        let entries = vec![
            (OccupationVector::new(vec![2, 0]), c(0.6, 0.0)),
            (OccupationVector::new(vec![0, 1]), c(0.0, 0.8)),
        ];
        let state = FockState::from_amplitudes(2, 4, entries).unwrap();
        assert!((state.mean_photon_number(0).unwrap() - 0.72).abs() < 1e-15);
        assert!((state.mean_photon_number(1).unwrap() - 0.64).abs() < 1e-15);
        assert!(state.mean_photon_number(2).is_err());
    }

    #[test]
    fn compose_places_components_disjointly() {
        let a = ket(&[1], 4);
        let b = ket(&[2], 4);
        let s = FockState::compose(3, 4, &[(&a, &[0]), (&b, &[2])]).unwrap();
        assert_eq!(s.ket_count(), 1);
        assert!(
            (s.amplitude(&OccupationVector::new(vec![1, 0, 2])) - c(1.0, 0.0)).norm() < 1e-15
        );
        // Overlapping positions are rejected.
        assert!(FockState::compose(3, 4, &[(&a, &[0]), (&b, &[0])]).is_err());
        // Cutoff applies to the combined ket.
        assert!(FockState::compose(3, 2, &[(&a, &[0]), (&b, &[2])]).is_err());
    }

    #[test]
    fn normalized_rescales() {
        let entries = vec![(OccupationVector::new(vec![1]), c(0.5, 0.0))];
        let state = FockState::from_amplitudes(1, 4, entries).unwrap();
        let n = state.normalized().unwrap();
        assert!((n.norm_squared() - 1.0).abs() < 1e-14);
    }
}
