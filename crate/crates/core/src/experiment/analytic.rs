//! Closed-form single-photon-noise fringe expressions.
//!
//! These are the analytic counterparts of the simulated fringes for the
//! single-photon noise source; the oracle tests require the numeric engine
//! to reproduce them to 1e−10. All formulas refer to detection at D₁, the
//! output port whose fringe is minimal at φ = 0.

use crate::experiment::params::ExperimentParams;

/// Best conditional visibility attainable with a fully distinguishable
/// noise photon, 1/√2. A recovered visibility above this line certifies
/// (partial) coherence between signal and noise.
pub const V_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// All closed-form coefficients for one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticCoefficients {
    pub eta_s: f64,
    pub eta_n: f64,
    pub t: f64,
    pub t_r: f64,
    pub eta_a: f64,
    pub eta_d: f64,
    pub eta_r: f64,
    /// Constant part of the unconditional fringe, P = (η_D/4)(W₁ + W₂ cos φ).
    pub w1: f64,
    /// Modulated part; non-positive in this detection-port convention.
    pub w2: f64,
    /// Conditional-path coefficients: P_c ∝ K₁²(K₂² + K₃² − 2K₂K₃ cos φ)/2.
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl AnalyticCoefficients {
    pub fn from_params(p: &ExperimentParams) -> Self {
        Self::new(p.eta_s, p.eta_n, p.t, p.t_r, p.eta_a, p.eta_d, p.eta_r)
    }

    pub fn new(
        eta_s: f64,
        eta_n: f64,
        t: f64,
        t_r: f64,
        eta_a: f64,
        eta_d: f64,
        eta_r: f64,
    ) -> Self {
        let w1 = 2.0 * eta_n + eta_s * eta_a + eta_s * eta_n * t * eta_d * eta_a
            - 2.0 * eta_n * t
            - eta_s * eta_n * eta_d * t
            + eta_s * t
            - eta_s * eta_n * eta_d * eta_a
            + eta_s * eta_n * t * t * eta_d;
        let w2 = 2.0 * eta_s * eta_n * eta_d * t.sqrt() * eta_a.sqrt()
            - 2.0 * eta_s * eta_n * t.powf(1.5) * eta_d * eta_a.sqrt()
            - 2.0 * eta_s * t.sqrt() * eta_a.sqrt();
        let k1 = (eta_s * eta_n / 2.0).sqrt();
        let k2 = 2.0 * (t * (1.0 - t) * t_r * (1.0 - t_r)).sqrt();
        let k3 = (eta_a * (1.0 - t) * t_r).sqrt();
        AnalyticCoefficients { eta_s, eta_n, t, t_r, eta_a, eta_d, eta_r, w1, w2, k1, k2, k3 }
    }

    /// Noise-photon-only contribution, η_D η_N (1−η_S)(1−T)/2.
    pub fn p1(&self) -> f64 {
        self.eta_d * self.eta_n * (1.0 - self.eta_s) * (1.0 - self.t) / 2.0
    }

    /// Signal-photon-only contribution,
    /// η_D η_S (1−η_N)(η_A + T − 2√(η_A T) cos φ)/4.
    pub fn p2(&self, phi: f64) -> f64 {
        self.eta_d * self.eta_s * (1.0 - self.eta_n) / 4.0
            * (self.eta_a + self.t - 2.0 * (self.eta_a * self.t).sqrt() * phi.cos())
    }

    /// Both-photons contribution. The detector-efficiency grouping follows
    /// from the 1 − (1−η_D)ⁿ threshold rule applied to the full output
    /// state, attenuator loss branch included:
    ///
    /// (η_D η_S η_N /4)·(η_A(1−η_D) + 2 − T + η_D T(T−1+η_A)
    ///                   + (η_D(1−T) − 1)·2√(η_A T) cos φ)
    pub fn p3(&self, phi: f64) -> f64 {
        let (t, ea, ed) = (self.t, self.eta_a, self.eta_d);
        self.eta_d * self.eta_s * self.eta_n / 4.0
            * (ea * (1.0 - ed) + 2.0 - t + ed * t * (t - 1.0 + ea)
                + (ed * (1.0 - t) - 1.0) * 2.0 * (ea * t).sqrt() * phi.cos())
    }

    /// Unconditional click probability at D₁ with the tap closed,
    /// P = P₁ + P₂ + P₃ = (η_D/4)(W₁ + W₂ cos φ).
    pub fn p_unconditional(&self, phi: f64) -> f64 {
        self.eta_d / 4.0 * (self.w1 + self.w2 * phi.cos())
    }

    /// Conditional coincidence probability (D₁ click and exactly one photon
    /// subtracted into D_R),
    ///
    /// P_c = ¼ η_S η_N T_R η_D η_R (1−T)(η_A + 4T(1−T_R) − 4 cos φ √(η_A T(1−T_R)))
    pub fn p_conditional(&self, phi: f64) -> f64 {
        0.25 * self.eta_s
            * self.eta_n
            * self.t_r
            * self.eta_d
            * self.eta_r
            * (1.0 - self.t)
            * (self.eta_a + 4.0 * self.t * (1.0 - self.t_r)
                - 4.0 * phi.cos() * (self.eta_a * self.t * (1.0 - self.t_r)).sqrt())
    }

    /// Unconditional visibility |W₂|/W₁; matches the fringe contrast when
    /// the paths are balanced (η_A = T).
    pub fn visibility(&self) -> f64 {
        if self.w1 == 0.0 {
            return 0.0;
        }
        self.w2.abs() / self.w1
    }

    /// Conditional visibility 2K₂K₃/(K₂² + K₃²); independent of η_S, η_N,
    /// η_D and η_R.
    pub fn conditional_visibility(&self) -> f64 {
        let denom = self.k2 * self.k2 + self.k3 * self.k3;
        if denom == 0.0 {
            return 0.0;
        }
        2.0 * self.k2 * self.k3 / denom
    }
}

/// Balanced-path visibility for equal source probabilities η_S = η_N and
/// η_D = ½: V = (2T + η_S T(T−1))/(2 + η_S T(T−1)).
pub fn visibility_equal_sources(eta_s: f64, t: f64) -> f64 {
    (2.0 * t + eta_s * t * (t - 1.0)) / (2.0 + eta_s * t * (t - 1.0))
}
