//! Input states for the interferometer: probabilistic single photons,
//! weak-coherent (Poisson-amplitude) noise, down-conversion pair noise, and
//! partially distinguishable variants of any of them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::detect::Ensemble;
use crate::fock::state::{FockState, OccupationVector};

/// Largest tolerated weight in the discarded tail of a truncated source
/// state, relative to its norm.
pub const TRUNCATION_TAIL_LIMIT: f64 = 1e-6;

/// What the noise port emits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// A single photon present with probability η_N (an incoherent mixture
    /// of vacuum and one photon).
    SinglePhoton,
    /// Down-conversion pair state (1−ε²/2)|00⟩ + ε|11⟩ + ε²|22⟩ over
    /// (herald, noise), renormalized. The herald is carried through the
    /// circuit but never detected.
    Spdc { epsilon: f64 },
    /// Poisson-amplitude state p₀|0⟩ + p₁|1⟩ + p₂|2⟩ with
    /// p_k = λᵏ e^{−λ}/k!, renormalized.
    Poisson { lambda: f64 },
}

/// A noise source plus its internal-mode overlap with the signal.
///
/// `overlap` is the squared overlap s of the noise photon's internal mode
/// with the signal's; the noise creation operator becomes
/// √s·(match) + √(1−s)·(orthogonal). s = 1 is fully coherent noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub overlap: f64,
}

impl SourceSpec {
    pub fn single_photon() -> Self {
        SourceSpec { kind: SourceKind::SinglePhoton, overlap: 1.0 }
    }

    pub fn spdc(epsilon: f64) -> Self {
        SourceSpec { kind: SourceKind::Spdc { epsilon }, overlap: 1.0 }
    }

    pub fn poisson(lambda: f64) -> Self {
        SourceSpec { kind: SourceKind::Poisson { lambda }, overlap: 1.0 }
    }

    pub fn with_overlap(mut self, s: f64) -> Self {
        self.overlap = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err(Error::OutOfRange(self.overlap));
        }
        match self.kind {
            SourceKind::SinglePhoton => Ok(()),
            SourceKind::Spdc { epsilon } => {
                spdc_pair_state(epsilon)?;
                Ok(())
            }
            SourceKind::Poisson { lambda } => {
                poisson_noise_state(lambda)?;
                Ok(())
            }
        }
    }

    /// Most photons this source can inject, herald included.
    pub fn max_photons(&self) -> u32 {
        match self.kind {
            SourceKind::SinglePhoton => 1,
            SourceKind::Poisson { .. } => 2,
            SourceKind::Spdc { .. } => 4,
        }
    }

    /// Modes of the emitted state before any internal-mode doubling.
    pub fn emitted_modes(&self) -> usize {
        match self.kind {
            SourceKind::SinglePhoton | SourceKind::Poisson { .. } => 1,
            SourceKind::Spdc { .. } => 2,
        }
    }
}

/// Single-mode source firing one photon with probability `eta`:
/// the mixture {(1−η, |0⟩), (η, |1⟩)}.
pub fn bernoulli_photon(eta: f64) -> Result<Ensemble> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange(eta));
    }
    let mut ens = Ensemble::new();
    ens.push(1.0 - eta, FockState::basis(OccupationVector::new(vec![0]), 1)?)?;
    ens.push(eta, FockState::basis(OccupationVector::new(vec![1]), 1)?)?;
    Ok(ens)
}

/// Mean photon number of the Poisson-amplitude state before
/// renormalization: λ²e^{−2λ} + ½λ⁴e^{−2λ}.
pub fn poisson_noise_mean(lambda: f64) -> f64 {
    let e = (-2.0 * lambda).exp();
    lambda.powi(2) * e + 0.5 * lambda.powi(4) * e
}

/// Mean photon number of the pair state's noise mode before
/// renormalization: ε² + 2ε⁴.
pub fn spdc_noise_mean(epsilon: f64) -> f64 {
    epsilon.powi(2) + 2.0 * epsilon.powi(4)
}

/// Normalized single-mode state with amplitudes p₀, p₁, p₂ where
/// p_k = λᵏ e^{−λ}/k!.
///
/// The raw amplitudes are not normalized; the state is renormalized
/// explicitly and the pre-normalization mean is available separately as
/// [`poisson_noise_mean`]. The discarded k ≥ 3 tail must stay below
/// [`TRUNCATION_TAIL_LIMIT`].
pub fn poisson_noise_state(lambda: f64) -> Result<FockState> {
    if lambda < 0.0 {
        return Err(Error::OutOfRange(lambda));
    }
    let e = (-lambda).exp();
    let p = [e, lambda * e, 0.5 * lambda * lambda * e];
    let tail = (lambda.powi(3) * e / 6.0).powi(2);
    let norm_sq: f64 = p.iter().map(|a| a * a).sum();
    if tail / norm_sq > TRUNCATION_TAIL_LIMIT {
        return Err(Error::TruncationTail {
            value: lambda,
            tail: tail / norm_sq,
            limit: TRUNCATION_TAIL_LIMIT,
        });
    }
    let norm = norm_sq.sqrt();
    let entries = p
        .iter()
        .enumerate()
        .map(|(k, &amp)| (OccupationVector::new(vec![k as u32]), Complex64::new(amp / norm, 0.0)))
        .collect();
    FockState::from_amplitudes(1, 2, entries)
}

/// Normalized two-mode (herald, noise) pair state
/// (1−ε²/2)|00⟩ + ε|11⟩ + ε²|22⟩.
///
/// Same renormalization policy as [`poisson_noise_state`]; the ε³|33⟩ tail
/// of the physical pair source must stay below [`TRUNCATION_TAIL_LIMIT`].
pub fn spdc_pair_state(epsilon: f64) -> Result<FockState> {
    if epsilon < 0.0 {
        return Err(Error::OutOfRange(epsilon));
    }
    let amps = [1.0 - 0.5 * epsilon * epsilon, epsilon, epsilon * epsilon];
    let tail = epsilon.powi(6);
    let norm_sq: f64 = amps.iter().map(|a| a * a).sum();
    if tail / norm_sq > TRUNCATION_TAIL_LIMIT {
        return Err(Error::TruncationTail {
            value: epsilon,
            tail: tail / norm_sq,
            limit: TRUNCATION_TAIL_LIMIT,
        });
    }
    let norm = norm_sq.sqrt();
    let entries = amps
        .iter()
        .enumerate()
        .map(|(k, &amp)| {
            let k = k as u32;
            (OccupationVector::new(vec![k, k]), Complex64::new(amp / norm, 0.0))
        })
        .collect();
    FockState::from_amplitudes(2, 4, entries)
}

/// Solve for the λ whose pre-normalization mean matches the pair state's,
/// λ²e^{−2λ} + ½λ⁴e^{−2λ} = ε² + 2ε⁴, by bisection to a 1e−12 residual.
///
/// The mean is strictly increasing on [0, 1], which covers every ε that
/// passes the truncation check.
pub fn epsilon_to_lambda(epsilon: f64) -> Result<f64> {
    if epsilon < 0.0 {
        return Err(Error::OutOfRange(epsilon));
    }
    let target = spdc_noise_mean(epsilon);
    if target == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if poisson_noise_mean(hi) < target {
        return Err(Error::RootNotBracketed { lo, hi, target });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if poisson_noise_mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let residual = (poisson_noise_mean(lambda) - target).abs();
    if residual > 1e-12 {
        return Err(Error::RootNotBracketed { lo, hi, target });
    }
    Ok(lambda)
}

/// Embed a noise state into the doubled internal-mode layout.
///
/// Every mode j of the input becomes a (match, orthogonal) pair at
/// (2j, 2j+1), and each photon is created as √s·(match) + √(1−s)·(orth).
/// s = 1 reproduces the single-internal-mode state exactly (in the match
/// sub-modes).
pub fn noise_with_overlap(state: &FockState, s: f64) -> Result<FockState> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(s));
    }
    let sa = s.sqrt();
    let oa = (1.0 - s).sqrt();
    let fact = |n: u32| -> f64 { (1..=n).map(|k| k as f64).product() };

    let mut entries: Vec<(OccupationVector, Complex64)> = Vec::new();
    for (occ, amp) in state.amplitudes() {
        // Per-mode binomial split of |n⟩ into (match, orth) occupations.
        let mut partial: Vec<(Vec<u32>, Complex64)> = vec![(Vec::new(), *amp)];
        for mode in 0..state.modes() {
            let n = occ.count(mode);
            let mut next = Vec::with_capacity(partial.len() * (n as usize + 1));
            for k in 0..=n {
                let coeff = (fact(n) / (fact(k) * fact(n - k))).sqrt()
                    * sa.powi(k as i32)
                    * oa.powi((n - k) as i32);
                if coeff == 0.0 {
                    continue;
                }
                for (counts, a) in &partial {
                    let mut c = counts.clone();
                    c.push(k);
                    c.push(n - k);
                    next.push((c, a * coeff));
                }
            }
            partial = next;
        }
        for (counts, a) in partial {
            entries.push((OccupationVector::new(counts), a));
        }
    }
    FockState::from_amplitudes(state.modes() * 2, state.cutoff(), entries)
}
