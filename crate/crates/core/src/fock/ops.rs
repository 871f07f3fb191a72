//! Linear-optical primitives: beam splitter, phase shifter, loss.
//!
//! Beam-splitter phase convention (the single source of truth for the whole
//! crate): a creation operator on either input mode maps to
//!
//! ```text
//! a† → √T a† + i √(1−T) b†
//! ```
//!
//! i.e. the transmitted amplitude is real `√T` and the reflected amplitude
//! picks up `i √(1−T)`, in both directions. Loss is implemented as a beam
//! splitter of transmissivity η coupling the lossy mode to a freshly
//! appended vacuum ancilla; the ancilla is kept in the state and is
//! marginalized implicitly by the detection functionals.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::state::{FockState, OccupationVector, PRUNE_THRESHOLD};

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn check_unitary(u: &[[Complex64; 2]; 2]) -> Result<()> {
    // U U† = I, max-entry deviation.
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let mut entry = Complex64::new(0.0, 0.0);
            for (a, b) in u[r].iter().zip(&u[c]) {
                entry += a * b.conj();
            }
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((entry - target).norm());
        }
    }
    if worst > 1e-12 {
        return Err(Error::NonUnitaryMatrix(worst));
    }
    Ok(())
}

/// Apply an arbitrary two-mode unitary `u` to modes `(p, q)`:
/// `p† → u[0][0] p† + u[0][1] q†` and `q† → u[1][0] p† + u[1][1] q†`.
///
/// Photon number is conserved per ket, so the cutoff can never overflow.
pub fn apply_two_mode(
    state: &FockState,
    modes: (usize, usize),
    u: [[Complex64; 2]; 2],
) -> Result<FockState> {
    let (p, q) = modes;
    state.check_mode(p)?;
    state.check_mode(q)?;
    if p == q {
        return Err(Error::DegenerateModePair(p));
    }
    check_unitary(&u)?;

    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, amp) in state.amplitudes() {
        let m = occ.count(p);
        let n = occ.count(q);
        if m + n == 0 {
            *out.entry(occ.clone()).or_insert(Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        // (u00 p† + u01 q†)^m (u10 p† + u11 q†)^n on vacuum, collected by the
        // photon count `a` that ends up in mode p.
        let norm_in = (factorial(m) * factorial(n)).sqrt();
        for a in 0..=(m + n) {
            let b = m + n - a;
            let mut coeff = Complex64::new(0.0, 0.0);
            let j_lo = a.saturating_sub(n);
            let j_hi = a.min(m);
            for j in j_lo..=j_hi {
                let k = a - j;
                coeff += binomial(m, j)
                    * binomial(n, k)
                    * u[0][0].powu(j)
                    * u[0][1].powu(m - j)
                    * u[1][0].powu(k)
                    * u[1][1].powu(n - k);
            }
            if coeff.norm() == 0.0 {
                continue;
            }
            coeff *= (factorial(a) * factorial(b)).sqrt() / norm_in;
            let new_occ = occ.with_count(p, a).with_count(q, b);
            *out.entry(new_occ).or_insert(Complex64::new(0.0, 0.0)) += amp * coeff;
        }
    }
    out.retain(|_, amp| amp.norm() >= PRUNE_THRESHOLD);
    Ok(FockState::from_map_unchecked(state.modes(), state.cutoff(), out))
}

/// Beam splitter of intensity transmissivity `t` on modes `(p, q)`, in the
/// crate-wide convention documented at module level.
pub fn apply_beam_splitter(
    state: &FockState,
    modes: (usize, usize),
    t: f64,
) -> Result<FockState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(t));
    }
    let tr = t.sqrt();
    let rf = Complex64::new(0.0, (1.0 - t).sqrt());
    let u = [
        [Complex64::new(tr, 0.0), rf],
        [rf, Complex64::new(tr, 0.0)],
    ];
    apply_two_mode(state, modes, u)
}

/// Phase shifter exp(iφ n̂) on one mode.
pub fn apply_phase_shifter(state: &FockState, mode: usize, phi: f64) -> Result<FockState> {
    state.check_mode(mode)?;
    let out = state
        .amplitudes()
        .map(|(occ, amp)| {
            let n = occ.count(mode);
            (occ.clone(), amp * Complex64::from_polar(1.0, phi * n as f64))
        })
        .collect();
    Ok(FockState::from_map_unchecked(state.modes(), state.cutoff(), out))
}

/// Pure-loss channel of intensity transmission `eta` on one mode, dilated
/// with a fresh vacuum ancilla appended after the existing modes. The
/// returned state has one extra mode.
pub fn apply_loss(state: &FockState, mode: usize, eta: f64) -> Result<FockState> {
    state.check_mode(mode)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange(eta));
    }
    let extended = state.append_vacuum_mode();
    apply_beam_splitter(&extended, (mode, extended.modes() - 1), eta)
}
