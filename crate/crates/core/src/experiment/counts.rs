//! Photo-count emulation and visibility estimation from counts.
//!
//! Counts at each phase point are Poisson with mean
//! rate·P(φ)·duration + dark_rate·duration, drawn from a per-point RNG
//! stream derived from one seed, so results do not depend on evaluation
//! order. Error bars follow Poisson statistics throughout.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

use super::fringe::{harmonic_fit, solve3, Fringe};

/// Raw photo-counts for one fringe measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    /// Phase of each sample, radians.
    pub phi: Vec<f64>,
    /// Detected counts per phase point.
    pub counts: Vec<u64>,
    /// Integration time per phase point, seconds.
    pub duration: f64,
    /// Source count rate at unit probability, counts/second.
    pub rate: f64,
    /// Dark-count rate, counts/second.
    pub dark_rate: f64,
    /// Seed the record was drawn from.
    pub seed: u64,
}

/// Fitted visibility with its propagated Poisson uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub visibility: f64,
    pub sigma: f64,
}

fn poisson_draw(rng: &mut ChaCha12Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Draw Poisson counts for every phase point of `fringe`.
///
/// Each point uses ChaCha stream `i` of the given seed; a fixed seed gives
/// a bit-identical record regardless of evaluation order.
pub fn simulate_counts(
    fringe: &Fringe,
    rate: f64,
    duration: f64,
    dark_rate: f64,
    seed: u64,
) -> Result<CountRecord> {
    for (name, v) in [("rate", rate), ("duration", duration), ("dark_rate", dark_rate)] {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be ≥ 0")));
        }
    }
    let mut phi = Vec::with_capacity(fringe.samples().len());
    let mut counts = Vec::with_capacity(fringe.samples().len());
    for (i, &(p, prob)) in fringe.samples().iter().enumerate() {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mean = rate * prob * duration + dark_rate * duration;
        phi.push(p);
        counts.push(poisson_draw(&mut rng, mean));
    }
    Ok(CountRecord { phi, counts, duration, rate, dark_rate, seed })
}

/// Dark-count-only record over the same phase grid (source blocked).
pub fn simulate_dark_counts(
    phi: &[f64],
    duration: f64,
    dark_rate: f64,
    seed: u64,
) -> Result<Vec<u64>> {
    if duration < 0.0 || dark_rate < 0.0 {
        return Err(Error::InvalidParameter("negative duration or dark rate".into()));
    }
    Ok(phi
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            poisson_draw(&mut rng, dark_rate * duration)
        })
        .collect())
}

/// Estimate the fringe visibility from raw counts.
///
/// The minimum of the supplied dark counts, converted to a rate, is
/// subtracted uniformly from the measured rates; the cleaned rates are fit
/// with offset + a·cos φ + b·sin φ and the estimate is V = √(a²+b²)/offset.
/// The uncertainty is propagated from the per-point Poisson variances
/// through the least-squares solution.
pub fn estimate_visibility(
    record: &CountRecord,
    dark_counts: &[u64],
) -> Result<VisibilityEstimate> {
    let n = record.phi.len();
    if n < 5 {
        return Err(Error::EstimationFailed(format!("only {n} phase samples")));
    }
    if dark_counts.len() != n {
        return Err(Error::EstimationFailed(format!(
            "{} dark samples for {n} phase points",
            dark_counts.len()
        )));
    }
    if record.duration <= 0.0 {
        return Err(Error::EstimationFailed("zero integration time".into()));
    }
    let span = record.phi.iter().fold(f64::NEG_INFINITY, |a, &p| a.max(p))
        - record.phi.iter().fold(f64::INFINITY, |a, &p| a.min(p));
    if span < std::f64::consts::PI - 1e-9 {
        return Err(Error::EstimationFailed(format!(
            "phase span {span:.3} rad is below π"
        )));
    }

    let dark_floor = dark_counts.iter().copied().min().unwrap_or(0) as f64 / record.duration;
    let rates: Vec<(f64, f64)> = record
        .phi
        .iter()
        .zip(&record.counts)
        .map(|(&phi, &c)| (phi, c as f64 / record.duration - dark_floor))
        .collect();

    let (offset, a, b) = harmonic_fit(&rates);
    if offset <= 0.0 {
        return Err(Error::EstimationFailed(format!(
            "non-positive fringe offset {offset} after dark subtraction"
        )));
    }
    let amp = a.hypot(b);
    let visibility = amp / offset;

    // Cov(θ) = M⁻¹ (Xᵀ diag(σᵢ²) X) M⁻¹ with M = XᵀX, σᵢ² = countsᵢ (raw
    // Poisson variance) in rate units; then the delta method on
    // V = √(a²+b²)/offset.
    let mut m = [[0.0f64; 3]; 3];
    let mut xs = [[0.0f64; 3]; 3];
    for (i, &phi) in record.phi.iter().enumerate() {
        let basis = [1.0, phi.cos(), phi.sin()];
        let var = record.counts[i] as f64 / record.duration.powi(2);
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
                xs[r][c] += basis[r] * basis[c] * var;
            }
        }
    }
    // Columns of M⁻¹ via three solves.
    let mut m_inv = [[0.0f64; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0f64; 3];
        e[col] = 1.0;
        let x = solve3(m, e);
        for row in 0..3 {
            m_inv[row][col] = x[row];
        }
    }
    let mut cov = [[0.0f64; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += m_inv[r][i] * xs[i][j] * m_inv[j][c];
                }
            }
            cov[r][c] = acc;
        }
    }
    let grad = if amp > 0.0 {
        [-amp / (offset * offset), a / (amp * offset), b / (amp * offset)]
    } else {
        [0.0, 1.0 / offset, 1.0 / offset]
    };
    let mut var_v = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            var_v += grad[r] * cov[r][c] * grad[c];
        }
    }
    Ok(VisibilityEstimate { visibility, sigma: var_v.max(0.0).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_fringe(offset: f64, visibility: f64, points: usize) -> Fringe {
        let samples: Vec<(f64, f64)> = (0..points)
            .map(|i| {
                let phi = i as f64 * std::f64::consts::TAU / (points - 1) as f64;
                (phi, offset * (1.0 + visibility * phi.cos()))
            })
            .collect();
        Fringe::from_samples(samples).unwrap()
    }

    #[test]
    fn zero_duration_gives_zero_counts() {
        let fringe = synthetic_fringe(0.4, 0.5, 37);
        let rec = simulate_counts(&fringe, 1e5, 0.0, 100.0, 1).unwrap();
        assert!(rec.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let fringe = synthetic_fringe(0.4, 0.5, 37);
        let a = simulate_counts(&fringe, 1e4, 2.0, 50.0, 99).unwrap();
        let b = simulate_counts(&fringe, 1e4, 2.0, 50.0, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(&fringe, 1e4, 2.0, 50.0, 100).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn sample_mean_tracks_poisson_law() {
        // Constant fringe: the replicate mean must sit within 3σ of
        // rate·P·duration.
        let samples: Vec<(f64, f64)> =
            (0..12).map(|i| (i as f64 * 0.3, 0.25)).collect();
        let fringe = Fringe::from_samples(samples).unwrap();
        let mean = 1000.0 * 0.25 * 1.0;
        let replicates = 10_000;
        let mut total = 0u64;
        for seed in 0..replicates {
            let rec = simulate_counts(&fringe, 1000.0, 1.0, 0.0, seed).unwrap();
            total += rec.counts.iter().sum::<u64>();
        }
        let n = (replicates as usize * fringe.samples().len()) as f64;
        let sample_mean = total as f64 / n;
        let sigma_of_mean = (mean / n).sqrt();
        assert!(
            (sample_mean - mean).abs() < 3.0 * sigma_of_mean,
            "mean {sample_mean} vs {mean} ± {sigma_of_mean}"
        );
    }

    #[test]
    fn noiseless_counts_recover_the_visibility() {
        // Counts set exactly to their means (large enough that integer
        // rounding is negligible) recover V to 1e−6.
        let offset = 0.4;
        let v = 0.5;
        let rate = 1e8;
        let phi: Vec<f64> = (0..37).map(|i| i as f64 * std::f64::consts::TAU / 36.0).collect();
        let counts: Vec<u64> = phi
            .iter()
            .map(|p| (rate * offset * (1.0 + v * p.cos())).round() as u64)
            .collect();
        let record = CountRecord {
            phi: phi.clone(),
            counts,
            duration: 1.0,
            rate,
            dark_rate: 0.0,
            seed: 0,
        };
        let est = estimate_visibility(&record, &vec![0; phi.len()]).unwrap();
        assert!((est.visibility - v).abs() < 1e-6, "V̂ = {}", est.visibility);
    }

    #[test]
    fn dark_floor_is_subtracted() {
        let offset = 0.2;
        let v = 0.3;
        let rate = 1e8;
        let dark = 5e5;
        let phi: Vec<f64> = (0..37).map(|i| i as f64 * std::f64::consts::TAU / 36.0).collect();
        let counts: Vec<u64> = phi
            .iter()
            .map(|p| (rate * offset * (1.0 + v * p.cos()) + dark).round() as u64)
            .collect();
        let record = CountRecord {
            phi: phi.clone(),
            counts,
            duration: 1.0,
            rate,
            dark_rate: dark,
            seed: 0,
        };
        let dark_counts = vec![dark as u64; phi.len()];
        let est = estimate_visibility(&record, &dark_counts).unwrap();
        assert!((est.visibility - v).abs() < 1e-6, "V̂ = {}", est.visibility);
    }

    #[test]
    fn all_dark_record_fails_estimation() {
        let phi: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let record = CountRecord {
            phi: phi.clone(),
            counts: vec![100; 10],
            duration: 1.0,
            rate: 0.0,
            dark_rate: 100.0,
            seed: 0,
        };
        // Dark floor equals the counts themselves: offset collapses to ~0.
        let est = estimate_visibility(&record, &[100; 10]);
        assert!(est.is_err());
    }

    #[test]
    fn hundredfold_fewer_counts_tenfold_sigma() {
        // Poisson error bars scale as 1/√N: dividing the rate by 100
        // multiplies σ_V by about 10.
        let fringe = synthetic_fringe(0.4, 0.5, 37);
        let high = simulate_counts(&fringe, 1e6, 1.0, 0.0, 7).unwrap();
        let low = simulate_counts(&fringe, 1e4, 1.0, 0.0, 7).unwrap();
        let zeros = vec![0u64; 37];
        let sigma_high = estimate_visibility(&high, &zeros).unwrap().sigma;
        let sigma_low = estimate_visibility(&low, &zeros).unwrap().sigma;
        let ratio = sigma_low / sigma_high;
        assert!((7.0..14.0).contains(&ratio), "σ ratio {ratio}");
    }
}
