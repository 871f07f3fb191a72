//! Sampled interference fringes, harmonic fits, and visibility extraction.

use crate::error::{Error, Result};

use super::circuit::{conditional_probability, unconditional_probability};
use super::params::ExperimentParams;

/// Fit residual below which the fringe counts as exactly harmonic and the
/// fitted visibility (exact for A + B·cos(φ−φ₀)) is preferred over the
/// sampled max/min ratio.
pub const HARMONIC_RESIDUAL: f64 = 1e-10;

/// A detection probability sampled over a phase grid, with its harmonic
/// decomposition P(φ) ≈ offset + cos_amp·cos φ + sin_amp·sin φ.
#[derive(Debug, Clone)]
pub struct Fringe {
    samples: Vec<(f64, f64)>,
    pub offset: f64,
    pub cos_amp: f64,
    pub sin_amp: f64,
    /// Largest absolute deviation of the samples from the fit.
    pub residual: f64,
    /// Fringe contrast (P_max − P_min)/(P_max + P_min).
    pub visibility: f64,
}

impl Fringe {
    /// Build a fringe from (φ in radians, probability) samples. Needs at
    /// least five samples spanning at least π, and every sample in [0, 1].
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 5 {
            return Err(Error::InvalidParameter(format!(
                "fringe needs at least 5 phase samples, got {}",
                samples.len()
            )));
        }
        let span = samples.iter().map(|(p, _)| *p).fold(f64::NEG_INFINITY, f64::max)
            - samples.iter().map(|(p, _)| *p).fold(f64::INFINITY, f64::min);
        if span < std::f64::consts::PI - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "phase samples span only {span:.3} rad; need at least π"
            )));
        }
        for &(phi, p) in &samples {
            if !(0.0..=1.0 + 1e-12).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "probability {p} at φ={phi} outside [0, 1]"
                )));
            }
        }

        let (offset, cos_amp, sin_amp) = harmonic_fit(&samples);
        let residual = samples
            .iter()
            .map(|&(phi, p)| (p - (offset + cos_amp * phi.cos() + sin_amp * phi.sin())).abs())
            .fold(0.0, f64::max);

        let p_max = samples.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max);
        let p_min = samples.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min);
        if p_max + p_min <= 0.0 {
            return Err(Error::DegenerateFringe("no counts at any phase".into()));
        }
        let grid_visibility = (p_max - p_min) / (p_max + p_min);
        let visibility = if residual < HARMONIC_RESIDUAL && offset > 0.0 {
            (cos_amp.hypot(sin_amp) / offset).min(1.0)
        } else {
            grid_visibility
        };

        Ok(Fringe { samples, offset, cos_amp, sin_amp, residual, visibility })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.samples.iter().map(|(_, p)| *p).collect()
    }

    /// Modulation amplitude of the harmonic fit.
    pub fn amplitude(&self) -> f64 {
        self.cos_amp.hypot(self.sin_amp)
    }

    pub fn p_max(&self) -> f64 {
        self.samples.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn p_min(&self) -> f64 {
        self.samples.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min)
    }
}

/// Least-squares fit of offset + a·cos φ + b·sin φ via the 3×3 normal
/// equations.
pub(crate) fn harmonic_fit(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(phi, y) in samples {
        let basis = [1.0, phi.cos(), phi.sin()];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            rhs[r] += basis[r] * y;
        }
    }
    let sol = solve3(m, rhs);
    (sol[0], sol[1], sol[2])
}

/// Gaussian elimination with partial pivoting on a 3×3 system.
pub(crate) fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_row = m[col];
        for row in (col + 1)..3 {
            let f = m[row][col] / pivot_row[col];
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                m[row][c] -= f * pv;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..3 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// Click probability at D₁ over the configured phase grid.
pub fn unconditional_fringe(params: &ExperimentParams) -> Result<Fringe> {
    let samples = params
        .phi_grid
        .points_radians()
        .into_iter()
        .map(|phi| Ok((phi, unconditional_probability(params, phi)?)))
        .collect::<Result<Vec<_>>>()?;
    Fringe::from_samples(samples)
}

/// Coincidence probability of D₁ with the subtraction detector D_R over
/// the configured phase grid. Requires an open tap (T_R > 0); at T_R = 0
/// the coincidence rate is identically zero.
pub fn conditional_fringe(params: &ExperimentParams) -> Result<Fringe> {
    if params.t_r <= 0.0 {
        return Err(Error::DegenerateFringe(
            "conditional fringe needs T_R > 0; the tap is closed".into(),
        ));
    }
    let samples = params
        .phi_grid
        .points_radians()
        .into_iter()
        .map(|phi| Ok((phi, conditional_probability(params, phi)?)))
        .collect::<Result<Vec<_>>>()?;
    Fringe::from_samples(samples)
}

/// Like [`conditional_fringe`], but restricted to signal-carrying source
/// branches (see
/// [`heralded_conditional_probability`][super::circuit::heralded_conditional_probability]).
/// Identical to [`conditional_fringe`] for single-photon noise.
pub fn heralded_conditional_fringe(params: &ExperimentParams) -> Result<Fringe> {
    if params.t_r <= 0.0 {
        return Err(Error::DegenerateFringe(
            "conditional fringe needs T_R > 0; the tap is closed".into(),
        ));
    }
    let samples = params
        .phi_grid
        .points_radians()
        .into_iter()
        .map(|phi| {
            Ok((phi, super::circuit::heralded_conditional_probability(params, phi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Fringe::from_samples(samples)
}

/// Exact visibility of an exactly harmonic fringe from three phase points.
///
/// Every fringe this circuit produces is first-harmonic (arm A never holds
/// more than one photon), so P(0), P(π/2) and P(π) determine it completely.
/// Returns `None` when the fringe carries no counts.
pub(crate) fn three_point_visibility<F>(mut probe: F) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let p0 = probe(0.0)?;
    let p_quarter = probe(std::f64::consts::FRAC_PI_2)?;
    let p_half = probe(std::f64::consts::PI)?;
    let offset = 0.5 * (p0 + p_half);
    if offset <= 0.0 {
        return Ok(None);
    }
    let a = 0.5 * (p0 - p_half);
    let b = p_quarter - offset;
    Ok(Some((a.hypot(b) / offset).min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_harmonic_coefficients() {
        let samples: Vec<(f64, f64)> = (0..=180)
            .map(|i| {
                let phi = i as f64 * std::f64::consts::TAU / 180.0;
                (phi, 0.3 + 0.1 * phi.cos() - 0.05 * phi.sin())
            })
            .collect();
        let fringe = Fringe::from_samples(samples).unwrap();
        assert!((fringe.offset - 0.3).abs() < 1e-12);
        assert!((fringe.cos_amp - 0.1).abs() < 1e-12);
        assert!((fringe.sin_amp + 0.05).abs() < 1e-12);
        assert!(fringe.residual < 1e-12);
        let v = (0.1f64.hypot(0.05)) / 0.3;
        assert!((fringe.visibility - v).abs() < 1e-12);
    }

    #[test]
    fn needs_enough_span_and_samples() {
        let short: Vec<(f64, f64)> = (0..4).map(|i| (i as f64, 0.5)).collect();
        assert!(Fringe::from_samples(short).is_err());
        let narrow: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 0.5)).collect();
        assert!(Fringe::from_samples(narrow).is_err());
    }

    #[test]
    fn all_zero_fringe_is_degenerate() {
        let zeros: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.5, 0.0)).collect();
        assert!(matches!(
            Fringe::from_samples(zeros),
            Err(Error::DegenerateFringe(_))
        ));
    }

    #[test]
    fn out_of_range_probability_rejected() {
        let bad: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.5, 1.2)).collect();
        assert!(Fringe::from_samples(bad).is_err());
    }

    #[test]
    fn three_point_matches_full_fit() {
        let f = |phi: f64| Ok(0.4 + 0.12 * phi.cos() + 0.03 * phi.sin());
        let v = three_point_visibility(f).unwrap().unwrap();
        assert!((v - 0.12f64.hypot(0.03) / 0.4).abs() < 1e-14);
    }
}
