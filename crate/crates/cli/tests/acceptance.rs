//! Acceptance suite: one test per criterion, each printing its measured
//! quantities and asserting the pinned tolerance inside a runtime budget.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion measurement lines.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use noise_eater_core::experiment::{
    conditional_probability, corollary_sweep, estimate_visibility, optimize_recovery,
    simulate_counts, unconditional_fringe, unconditional_probability, uncorrected_visibility,
    AnalyticCoefficients, ExperimentParams, Fringe, visibility_equal_sources,
    V_THRESHOLD,
};
use noise_eater_core::fock::{
    apply_beam_splitter, apply_phase_shifter, FockState, OccupationVector,
};
use noise_eater_core::sources::{
    epsilon_to_lambda, poisson_noise_mean, spdc_noise_mean, SourceSpec,
};

// Criterion 1: analytic-oracle equality.
const ORACLE_DRAWS: usize = 150;
const ORACLE_TOL: f64 = 1e-10;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);

// Criterion 2: visibility law.
const LAW_COUPLINGS: [f64; 5] = [0.109, 0.3, 0.5, 0.7, 0.9];
const LAW_EQ_TOL: f64 = 1e-6;
const LAW_VS_T_TOL: f64 = 2e-3;
const LAW_BUDGET: Duration = Duration::from_secs(10);

// Criterion 3: perfect recovery.
const RECOVERY_COUPLINGS: [f64; 3] = [0.109, 0.5, 0.9];
const RECOVERY_SETTING_TOL: f64 = 1e-3;
const RECOVERY_V_TOL: f64 = 1e-6;
const RECOVERY_INVARIANCE_TOL: f64 = 1e-9;
const RECOVERY_BUDGET: Duration = Duration::from_secs(60);

// Criterion 4: distinguishability threshold.
const THRESHOLD_TOL: f64 = 1e-3;
const COHERENT_RECOVERY_TOL: f64 = 1e-6;
const THRESHOLD_BUDGET: Duration = Duration::from_secs(30);

// Criterion 5: multi-photon-noise sweep.
const SWEEP_EPSILON: f64 = 0.05;
const SWEEP_ETA: f64 = 1e-3;
const MODEL_AGREEMENT_TOL: f64 = 1e-3;
const SWEEP_BUDGET: Duration = Duration::from_secs(300);

// Criterion 6: Fock-core oracles.
const EXPANSION_TOL: f64 = 1e-12;
const PROPERTY_CASES: usize = 1000;
const FOCK_BUDGET: Duration = Duration::from_secs(30);

// Criterion 7: experimental anchors.
const ANCHOR_COUPLING: f64 = 0.109;
const ANCHOR_BAND: (f64, f64) = (0.09, 0.12);
const IMPROVEMENT_FACTOR: f64 = 8.0;
const ANCHOR_BUDGET: Duration = Duration::from_secs(10);

// Criterion 8: count emulation.
const CALIBRATION_REPLICATES: u64 = 10_000;
const CALIBRATION_SIGMAS: f64 = 3.0;
const COUNTS_BUDGET: Duration = Duration::from_secs(60);

fn assert_budget(start: Instant, budget: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

fn random_params(rng: &mut ChaCha12Rng) -> ExperimentParams {
    ExperimentParams {
        eta_s: rng.gen(),
        eta_n: rng.gen(),
        t: rng.gen(),
        t_r: 0.0,
        eta_a: rng.gen(),
        eta_d: rng.gen(),
        eta_r: rng.gen(),
        ..ExperimentParams::default()
    }
}

#[test]
fn criterion_1_analytic_oracle_equality() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xacc1);

    let mut worst_unconditional: f64 = 0.0;
    for _ in 0..ORACLE_DRAWS {
        let params = random_params(&mut rng);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let analytic = AnalyticCoefficients::from_params(&params);
        let sim = unconditional_probability(&params, phi).unwrap();
        worst_unconditional = worst_unconditional.max((sim - analytic.p_unconditional(phi)).abs());
    }

    let mut worst_conditional: f64 = 0.0;
    for _ in 0..ORACLE_DRAWS {
        let mut params = random_params(&mut rng);
        params.t_r = rng.gen();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let analytic = AnalyticCoefficients::from_params(&params);
        let sim = conditional_probability(&params, phi).unwrap();
        worst_conditional = worst_conditional.max((sim - analytic.p_conditional(phi)).abs());
    }

    println!(
        "[criterion 1] oracle equality over {ORACLE_DRAWS}+{ORACLE_DRAWS} draws: \
         worst |Δ| unconditional {worst_unconditional:.3e}, conditional {worst_conditional:.3e} \
         (tolerance {ORACLE_TOL:.0e})"
    );
    assert!(worst_unconditional < ORACLE_TOL);
    assert!(worst_conditional < ORACLE_TOL);
    assert_budget(start, ORACLE_BUDGET, "criterion 1");
}

#[test]
fn criterion_2_visibility_law() {
    let start = Instant::now();
    let mut worst_eq: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    for &t in &LAW_COUPLINGS {
        let params = ExperimentParams {
            eta_s: SWEEP_ETA,
            eta_n: SWEEP_ETA,
            eta_d: 0.5,
            t_r: 0.0,
            ..ExperimentParams::balanced(t)
        };
        let v = unconditional_fringe(&params).unwrap().visibility;
        worst_eq = worst_eq.max((v - visibility_equal_sources(SWEEP_ETA, t)).abs());
        worst_t = worst_t.max((v - t).abs());
    }
    println!(
        "[criterion 2] visibility law on T ∈ {LAW_COUPLINGS:?}: worst |V − V_closed| \
         {worst_eq:.3e} (tol {LAW_EQ_TOL:.0e}), worst |V − T| {worst_t:.3e} (tol {LAW_VS_T_TOL:.0e})"
    );
    assert!(worst_eq < LAW_EQ_TOL);
    assert!(worst_t <= LAW_VS_T_TOL);
    assert_budget(start, LAW_BUDGET, "criterion 2");
}

#[test]
fn criterion_3_perfect_recovery() {
    let start = Instant::now();
    let rate_sets = [
        (1e-3, 1e-3, 0.5, 0.5),
        (0.7, 0.2, 0.9, 0.3),
    ];
    for &t in &RECOVERY_COUPLINGS {
        let mut visibilities = Vec::new();
        for &(eta_s, eta_n, eta_d, eta_r) in &rate_sets {
            let base = ExperimentParams {
                eta_s,
                eta_n,
                eta_d,
                eta_r,
                ..ExperimentParams::default()
            };
            let opt = optimize_recovery(t, &base).unwrap();
            assert!(
                (opt.eta_a - t).abs() < RECOVERY_SETTING_TOL,
                "T={t}: η_A* = {} not at T",
                opt.eta_a
            );
            assert!(
                (opt.t_r - 0.75).abs() < RECOVERY_SETTING_TOL,
                "T={t}: T_R* = {} not at 3/4",
                opt.t_r
            );
            assert!(
                (opt.visibility - 1.0).abs() < RECOVERY_V_TOL,
                "T={t}: V* = {}",
                opt.visibility
            );
            visibilities.push(opt.visibility);
        }
        let spread = visibilities
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!(
            spread.1 - spread.0 <= RECOVERY_INVARIANCE_TOL,
            "T={t}: V* varies with source/detector rates by {:.3e}",
            spread.1 - spread.0
        );
        println!(
            "[criterion 3] T={t}: (η_A*, T_R*) = (T, 3/4) within {RECOVERY_SETTING_TOL}, \
             V* = 1 within {RECOVERY_V_TOL}, rate-invariance spread {:.3e}",
            spread.1 - spread.0
        );
    }
    assert_budget(start, RECOVERY_BUDGET, "criterion 3");
}

#[test]
fn criterion_4_distinguishability_threshold() {
    let start = Instant::now();

    let distinguishable = ExperimentParams {
        noise: SourceSpec::single_photon().with_overlap(0.0),
        ..ExperimentParams::default()
    };
    let opt0 = optimize_recovery(ANCHOR_COUPLING, &distinguishable).unwrap();
    println!(
        "[criterion 4] s=0 recovered V* = {:.9} vs 1/√2 = {V_THRESHOLD:.9} \
         (tolerance {THRESHOLD_TOL:.0e})",
        opt0.visibility
    );
    assert!((opt0.visibility - V_THRESHOLD).abs() < THRESHOLD_TOL);

    let coherent = ExperimentParams::default();
    let opt1 = optimize_recovery(ANCHOR_COUPLING, &coherent).unwrap();
    println!(
        "[criterion 4] s=1 recovered V* = {:.9} vs 1 (tolerance {COHERENT_RECOVERY_TOL:.0e})",
        opt1.visibility
    );
    assert!((opt1.visibility - 1.0).abs() < COHERENT_RECOVERY_TOL);
    assert_budget(start, THRESHOLD_BUDGET, "criterion 4");
}

fn corollary_grid() -> Vec<f64> {
    (0..11).map(|i| 0.1 + 0.08 * i as f64).collect()
}

fn corollary_base(noise: SourceSpec) -> ExperimentParams {
    ExperimentParams {
        eta_s: SWEEP_ETA,
        eta_n: SWEEP_ETA,
        eta_d: 0.5,
        noise,
        ..ExperimentParams::default()
    }
}

#[test]
fn criterion_5a_correction_improves_every_point() {
    let start = Instant::now();
    let grid = corollary_grid();
    for noise in [
        SourceSpec::spdc(SWEEP_EPSILON),
        SourceSpec::poisson(epsilon_to_lambda(SWEEP_EPSILON).unwrap()),
    ] {
        let rows = corollary_sweep(&corollary_base(noise), &grid).unwrap();
        for row in &rows {
            assert!(
                row.v_corrected > row.v_uncorrected,
                "T={}: corrected {} vs uncorrected {}",
                row.t,
                row.v_corrected,
                row.v_uncorrected
            );
        }
    }
    println!(
        "[criterion 5a] corrected V strictly exceeds uncorrected V at all {} grid points \
         for both noise models",
        grid.len()
    );
    assert_budget(start, SWEEP_BUDGET, "criterion 5a");
}

#[test]
fn criterion_5b_multiphoton_noise_lowers_both_curves() {
    let start = Instant::now();
    let grid = corollary_grid();
    let single_photon = ExperimentParams {
        eta_s: SWEEP_ETA,
        eta_n: SWEEP_ETA,
        eta_d: 0.5,
        ..ExperimentParams::default()
    };
    for noise in [
        SourceSpec::spdc(SWEEP_EPSILON),
        SourceSpec::poisson(epsilon_to_lambda(SWEEP_EPSILON).unwrap()),
    ] {
        let rows = corollary_sweep(&corollary_base(noise), &grid).unwrap();
        for row in &rows {
            let counterpart = uncorrected_visibility(&single_photon, row.t).unwrap();
            assert!(
                row.v_uncorrected < counterpart,
                "T={}: uncorrected {} not below single-photon {}",
                row.t,
                row.v_uncorrected,
                counterpart
            );
            // The single-photon recovered counterpart is exactly 1.
            assert!(
                row.v_corrected < 1.0,
                "T={}: corrected {} not below 1",
                row.t,
                row.v_corrected
            );
        }
    }
    println!(
        "[criterion 5b] both multi-photon curves sit strictly below their \
         single-photon counterparts at all {} grid points",
        grid.len()
    );
    assert_budget(start, SWEEP_BUDGET, "criterion 5b");
}

/// Known red, kept at the stated tolerance on purpose: the two noise
/// models cannot agree to 1e−3 at matched mean. Their two-photon
/// fractions differ fourfold (amplitude ratio λ/2 versus ε), so the
/// recovered curves separate at strongly noise-coupled (low-T) points,
/// and the amplitude sets' unequal norms shift the effective one-photon
/// odds by ~11% under the raw-amplitude mean-matching rule, separating
/// the uncorrected curves as well. The diagnostics below report the gaps
/// for that rule and for matching the normalized-state means.
#[test]
fn criterion_5c_pair_and_poisson_noise_agree() {
    let start = Instant::now();
    let grid = corollary_grid();

    let spdc_rows =
        corollary_sweep(&corollary_base(SourceSpec::spdc(SWEEP_EPSILON)), &grid).unwrap();

    let lambda = epsilon_to_lambda(SWEEP_EPSILON).unwrap();
    let poisson_rows =
        corollary_sweep(&corollary_base(SourceSpec::poisson(lambda)), &grid).unwrap();

    // Diagnostic variant: match the means of the normalized states instead
    // of the raw amplitude sets.
    let normalized_poisson_mean = |l: f64| {
        let e = (-l).exp();
        let norm_sq = e * e * (1.0 + l * l + 0.25 * l.powi(4));
        poisson_noise_mean(l) / norm_sq
    };
    let spdc_norm_sq = (1.0 - 0.5 * SWEEP_EPSILON * SWEEP_EPSILON).powi(2)
        + SWEEP_EPSILON.powi(2)
        + SWEEP_EPSILON.powi(4);
    let target = spdc_noise_mean(SWEEP_EPSILON) / spdc_norm_sq;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normalized_poisson_mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_normalized = 0.5 * (lo + hi);
    let poisson_norm_rows =
        corollary_sweep(&corollary_base(SourceSpec::poisson(lambda_normalized)), &grid).unwrap();

    let mut worst: f64 = 0.0;
    println!(
        "[criterion 5c] per-point gaps, raw-amplitude matching λ = {lambda:.6} \
         (diagnostic: normalized-mean matching λ = {lambda_normalized:.6}):"
    );
    println!(
        "{:>6} {:>14} {:>14} {:>16} {:>16}",
        "T", "Δ_uncorrected", "Δ_corrected", "Δ_unc(normλ)", "Δ_cor(normλ)"
    );
    for ((s, p), pn) in spdc_rows.iter().zip(&poisson_rows).zip(&poisson_norm_rows) {
        let d_unc = (s.v_uncorrected - p.v_uncorrected).abs();
        let d_cor = (s.v_corrected - p.v_corrected).abs();
        let d_unc_n = (s.v_uncorrected - pn.v_uncorrected).abs();
        let d_cor_n = (s.v_corrected - pn.v_corrected).abs();
        println!(
            "{:>6.2} {:>14.3e} {:>14.3e} {:>16.3e} {:>16.3e}",
            s.t, d_unc, d_cor, d_unc_n, d_cor_n
        );
        worst = worst.max(d_unc).max(d_cor);
    }
    println!(
        "[criterion 5c] worst gap {worst:.3e} against tolerance {MODEL_AGREEMENT_TOL:.0e}"
    );
    assert_budget(start, SWEEP_BUDGET, "criterion 5c");
    assert!(
        worst < MODEL_AGREEMENT_TOL,
        "pair-source and matched-mean Poisson noise disagree by up to {worst:.3e} (> \
         {MODEL_AGREEMENT_TOL:.0e}); the two noise states carry fourfold different \
         two-photon fractions at matched mean, so sub-1e-3 agreement is not attainable \
         at strongly coupled (low T) points"
    );
}

#[test]
fn criterion_6_fock_core_oracles() {
    let start = Instant::now();
    let fact = |n: u32| -> f64 { (1..=n).map(|k| k as f64).product() };

    // Brute-force expansion oracle for every two-mode input with n ≤ 3.
    let mut rng = ChaCha12Rng::seed_from_u64(0xacc6);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let t: f64 = rng.gen();
        let u = [
            [Complex64::new(t.sqrt(), 0.0), Complex64::new(0.0, (1.0 - t).sqrt())],
            [Complex64::new(0.0, (1.0 - t).sqrt()), Complex64::new(t.sqrt(), 0.0)],
        ];
        for m in 0..=3u32 {
            for n in 0..=(3 - m) {
                let mut poly: std::collections::BTreeMap<u32, Complex64> = Default::default();
                poly.insert(0, Complex64::new(1.0, 0.0));
                let grow = |row: [Complex64; 2],
                            poly: &std::collections::BTreeMap<u32, Complex64>| {
                    let mut next: std::collections::BTreeMap<u32, Complex64> =
                        Default::default();
                    for (&a, &c) in poly {
                        *next.entry(a + 1).or_insert(Complex64::new(0.0, 0.0)) += c * row[0];
                        *next.entry(a).or_insert(Complex64::new(0.0, 0.0)) += c * row[1];
                    }
                    next
                };
                for _ in 0..m {
                    poly = grow(u[0], &poly);
                }
                for _ in 0..n {
                    poly = grow(u[1], &poly);
                }
                let state = FockState::basis(OccupationVector::new(vec![m, n]), 4).unwrap();
                let out = apply_beam_splitter(&state, (0, 1), t).unwrap();
                for (a, coeff) in poly {
                    let expected = coeff * (fact(a) * fact(m + n - a)).sqrt()
                        / (fact(m) * fact(n)).sqrt();
                    let got = out.amplitude(&OccupationVector::new(vec![a, m + n - a]));
                    worst = worst.max((got - expected).norm());
                }
            }
        }
    }
    println!(
        "[criterion 6] beam-splitter expansion oracle worst |Δ| = {worst:.3e} \
         (tolerance {EXPANSION_TOL:.0e})"
    );
    assert!(worst < EXPANSION_TOL);

    // Unitarity and photon-number conservation on random states.
    let mut worst_norm: f64 = 0.0;
    for case in 0..PROPERTY_CASES {
        let modes = rng.gen_range(2..=5);
        let mut entries = Vec::new();
        for _ in 0..rng.gen_range(1..=6) {
            let mut counts = vec![0u32; modes];
            for _ in 0..rng.gen_range(0..=4u32) {
                counts[rng.gen_range(0..modes)] += 1;
            }
            entries.push((
                OccupationVector::new(counts),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ));
        }
        let state = FockState::from_amplitudes(modes, 4, entries)
            .unwrap_or_else(|_| FockState::vacuum(modes, 4))
            .normalized()
            .unwrap();
        let p = rng.gen_range(0..modes);
        let q = (p + rng.gen_range(1..modes)) % modes;
        let out = apply_beam_splitter(&state, (p, q), rng.gen()).unwrap();
        worst_norm = worst_norm.max((out.norm_squared() - state.norm_squared()).abs());
        let in_totals: std::collections::BTreeSet<u32> =
            state.amplitudes().map(|(o, _)| o.total()).collect();
        for (o, _) in out.amplitudes() {
            assert!(
                in_totals.contains(&o.total()),
                "case {case}: photon number not conserved"
            );
        }
        let shifted = apply_phase_shifter(&state, p, rng.gen_range(0.0..7.0)).unwrap();
        worst_norm = worst_norm.max((shifted.norm_squared() - state.norm_squared()).abs());
    }
    println!(
        "[criterion 6] unitarity/number conservation on {PROPERTY_CASES} random cases: \
         worst norm drift {worst_norm:.3e}"
    );
    assert!(worst_norm < 1e-12);
    assert_budget(start, FOCK_BUDGET, "criterion 6");
}

#[test]
fn criterion_7_experimental_anchors() {
    let start = Instant::now();
    let params = ExperimentParams {
        eta_s: SWEEP_ETA,
        eta_n: SWEEP_ETA,
        eta_d: 0.5,
        t_r: 0.0,
        ..ExperimentParams::balanced(ANCHOR_COUPLING)
    };
    let v_uncorrected = unconditional_fringe(&params).unwrap().visibility;
    assert!(
        (ANCHOR_BAND.0..=ANCHOR_BAND.1).contains(&v_uncorrected),
        "uncorrected V {v_uncorrected} outside {ANCHOR_BAND:?}"
    );

    let recovered = optimize_recovery(ANCHOR_COUPLING, &params).unwrap();
    assert!(
        (recovered.visibility - 1.0).abs() < RECOVERY_V_TOL,
        "ideal recovered V = {}",
        recovered.visibility
    );
    println!(
        "[criterion 7] uncorrected V({ANCHOR_COUPLING}) = {v_uncorrected:.4} within \
         {ANCHOR_BAND:?} (measured 0.097 ± 0.005); ideal recovered V = {:.9} \
         (measured 0.915 ± 0.017)",
        recovered.visibility
    );

    // The shipped sweep must render the eight-fold-improvement story.
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_noise-eater"))
        .args(["sweep", "--t-grid", "0.109:0.109:1"])
        .output()
        .expect("sweep runs");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    let header = &rows[0];
    let idx = |name: &str| header.iter().position(|c| *c == name).unwrap();
    let uncorrected: f64 = rows[1][idx("v_uncorrected_coherent")].parse().unwrap();
    let recovered_cli: f64 = rows[1][idx("v_recovered")].parse().unwrap();
    let improvement = recovered_cli / uncorrected;
    println!(
        "[criterion 7] CLI sweep at T = {ANCHOR_COUPLING}: recovered/uncorrected = \
         {improvement:.2} (needs ≥ {IMPROVEMENT_FACTOR})"
    );
    assert!(improvement >= IMPROVEMENT_FACTOR);
    assert_budget(start, ANCHOR_BUDGET, "criterion 7");
}

#[test]
fn criterion_8_count_emulation() {
    let start = Instant::now();
    let offset = 0.4;
    let true_visibility = 0.5;
    let samples: Vec<(f64, f64)> = (0..37)
        .map(|i| {
            let phi = i as f64 * std::f64::consts::TAU / 36.0;
            (phi, offset * (1.0 + true_visibility * phi.cos()))
        })
        .collect();
    let fringe = Fringe::from_samples(samples).unwrap();

    // Determinism under a fixed seed.
    let a = simulate_counts(&fringe, 1e5, 1.0, 0.0, 77).unwrap();
    let b = simulate_counts(&fringe, 1e5, 1.0, 0.0, 77).unwrap();
    assert_eq!(a, b, "fixed seed must reproduce the record bit-for-bit");

    // Unbiasedness of the estimator over many replicates.
    let zeros = vec![0u64; fringe.samples().len()];
    let mut estimates = Vec::with_capacity(CALIBRATION_REPLICATES as usize);
    for seed in 0..CALIBRATION_REPLICATES {
        let record = simulate_counts(&fringe, 1e5, 1.0, 0.0, seed).unwrap();
        estimates.push(estimate_visibility(&record, &zeros).unwrap().visibility);
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sigma_of_mean = (var / n).sqrt();
    let bias = mean - true_visibility;
    println!(
        "[criterion 8] estimator over {CALIBRATION_REPLICATES} replicates: mean V̂ = \
         {mean:.7}, true V = {true_visibility}, bias {bias:.2e} vs {CALIBRATION_SIGMAS}σ = \
         {:.2e}",
        CALIBRATION_SIGMAS * sigma_of_mean
    );
    assert!(
        bias.abs() <= CALIBRATION_SIGMAS * sigma_of_mean,
        "estimator biased: {bias:.3e} beyond {CALIBRATION_SIGMAS}σ = {:.3e}",
        CALIBRATION_SIGMAS * sigma_of_mean
    );
    assert_budget(start, COUNTS_BUDGET, "criterion 8");
}
