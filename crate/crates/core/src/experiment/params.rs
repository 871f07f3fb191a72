//! Experiment configuration: every dial of the interferometer.

use crate::error::{Error, Result};
use crate::sources::SourceSpec;

/// Inclusive phase grid, specified in degrees on the outside and handed to
/// the engine in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiGrid {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

impl PhiGrid {
    pub fn degrees(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Self> {
        let grid = PhiGrid { start_deg, stop_deg, step_deg };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_deg <= 0.0 || !self.step_deg.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phase step must be positive, got {}",
                self.step_deg
            )));
        }
        if self.stop_deg < self.start_deg {
            return Err(Error::InvalidParameter(format!(
                "phase range [{}, {}] is empty",
                self.start_deg, self.stop_deg
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop_deg - self.start_deg) / self.step_deg + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points_degrees(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.start_deg + i as f64 * self.step_deg).collect()
    }

    pub fn points_radians(&self) -> Vec<f64> {
        self.points_degrees().iter().map(|d| d.to_radians()).collect()
    }
}

impl Default for PhiGrid {
    /// 361 points over one full fringe period.
    fn default() -> Self {
        PhiGrid { start_deg: 0.0, stop_deg: 360.0, step_deg: 1.0 }
    }
}

/// All dials of the experiment.
///
/// `t_r` is the intensity fraction diverted from the noisy rail to the tap
/// detector D_R; `t_r = 0` removes the noise eater. The attenuator `eta_a`
/// sits in the other arm, followed by the phase shifter.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentParams {
    pub eta_s: f64,
    pub eta_n: f64,
    pub t: f64,
    pub t_r: f64,
    pub eta_a: f64,
    pub eta_d: f64,
    pub eta_r: f64,
    pub noise: SourceSpec,
    pub phi_grid: PhiGrid,
    pub n_max: u32,
    /// Mirror the tap's rail attenuation in the other arm. The reference
    /// configuration leaves it off.
    pub compensate_tap: bool,
    /// Use a threshold detector at D_R instead of the exactly-one-photon
    /// projection.
    pub tap_threshold_detector: bool,
}

impl ExperimentParams {
    /// Balanced configuration: attenuator matched to the noise-coupler
    /// transmission, η_A = T.
    pub fn balanced(t: f64) -> Self {
        ExperimentParams { t, eta_a: t, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_s", self.eta_s),
            ("eta_n", self.eta_n),
            ("t", self.t),
            ("t_r", self.t_r),
            ("eta_a", self.eta_a),
            ("eta_d", self.eta_d),
            ("eta_r", self.eta_r),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        self.noise.validate()?;
        self.phi_grid.validate()?;
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            eta_s: 1e-3,
            eta_n: 1e-3,
            t: 0.109,
            t_r: 0.75,
            eta_a: 0.109,
            eta_d: 0.5,
            eta_r: 0.5,
            noise: SourceSpec::single_photon(),
            phi_grid: PhiGrid::default(),
            n_max: 4,
            compensate_tap: false,
            tap_threshold_detector: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_row_count_is_inclusive() {
        let g = PhiGrid::degrees(0.0, 360.0, 10.0).unwrap();
        assert_eq!(g.len(), 37);
        assert_eq!(PhiGrid::default().len(), 361);
        let single = PhiGrid::degrees(0.109, 0.109, 1.0).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn grid_rejects_bad_steps() {
        assert!(PhiGrid::degrees(0.0, 360.0, 0.0).is_err());
        assert!(PhiGrid::degrees(0.0, 360.0, -1.0).is_err());
        assert!(PhiGrid::degrees(10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn params_validate_ranges() {
        let mut p = ExperimentParams::default();
        assert!(p.validate().is_ok());
        p.eta_d = 1.2;
        assert!(p.validate().is_err());
        p.eta_d = 0.5;
        p.t = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn balanced_matches_attenuator_to_coupler() {
        let p = ExperimentParams::balanced(0.3);
        assert_eq!(p.eta_a, 0.3);
        assert_eq!(p.t, 0.3);
    }
}
