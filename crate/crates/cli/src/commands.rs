//! The six subcommands.

use noise_eater_core::error::Error as CoreError;
use noise_eater_core::experiment::{
    conditional_fringe, corollary_sweep, estimate_visibility, heralded_conditional_fringe,
    optimize_recovery, simulate_counts, simulate_dark_counts, unconditional_fringe,
    ExperimentParams, V_THRESHOLD,
};
use noise_eater_core::sources::SourceSpec;

use crate::config::{NoiseKindArg, RunConfig};
use crate::output::{Cell, Table};
use crate::CliError;

/// Fringe scan: uncorrected (tap closed) and conditional probabilities per
/// phase, plus the conditional fringe normalized by the sum of its extreme
/// samples.
pub fn cmd_fringe(cfg: &RunConfig) -> Result<(), CliError> {
    let uncorrected = ExperimentParams { t_r: 0.0, ..cfg.params.clone() };
    let unc = unconditional_fringe(&uncorrected).map_err(CliError::numeric_from)?;
    let cond = conditional_fringe(&cfg.params).map_err(CliError::numeric_from)?;

    let norm = cond.p_max() + cond.p_min();
    let mut table = Table::new(vec![
        "phi_deg",
        "p_uncorrected",
        "p_conditional",
        "p_normalized",
    ]);
    let degrees = cfg.params.phi_grid.points_degrees();
    for (i, phi_deg) in degrees.iter().enumerate() {
        let (_, pu) = unc.samples()[i];
        let (_, pc) = cond.samples()[i];
        table.push_row(vec![
            Cell::Num(*phi_deg),
            Cell::Num(pu),
            Cell::Num(pc),
            Cell::Num(pc / norm),
        ]);
    }
    table.summary.push(("v_uncorrected", unc.visibility));
    table.summary.push(("v_conditional", cond.visibility));
    table.write("fringe", cfg.format, cfg.out.as_deref())
}

/// Visibility against the noise coupling T: uncorrected for coherent and
/// fully distinguishable noise, recovered at the matched settings
/// (η_A = T, T_R = 3/4), and the 1/√2 benchmark line.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "t",
        "v_uncorrected_coherent",
        "v_uncorrected_distinguishable",
        "v_recovered",
        "v_threshold",
    ]);
    for t in cfg.t_grid.points()? {
        let coherent = ExperimentParams {
            t,
            eta_a: t,
            t_r: 0.0,
            noise: SourceSpec::single_photon(),
            ..cfg.params.clone()
        };
        let v_coherent =
            unconditional_fringe(&coherent).map_err(CliError::numeric_from)?.visibility;

        let distinguishable = ExperimentParams {
            noise: SourceSpec::single_photon().with_overlap(0.0),
            ..coherent.clone()
        };
        let v_dist =
            unconditional_fringe(&distinguishable).map_err(CliError::numeric_from)?.visibility;

        let recovered = ExperimentParams {
            t,
            eta_a: t,
            t_r: 0.75,
            ..cfg.params.clone()
        };
        let v_recovered = match heralded_conditional_fringe(&recovered) {
            Ok(fringe) => fringe.visibility,
            // No coincidences at all (e.g. T at a boundary): no contrast.
            Err(CoreError::DegenerateFringe(_)) => 0.0,
            Err(e) => return Err(CliError::numeric_from(e)),
        };

        table.push_row(vec![
            Cell::Num(t),
            Cell::Num(v_coherent),
            Cell::Num(v_dist),
            Cell::Num(v_recovered),
            Cell::Num(V_THRESHOLD),
        ]);
    }
    table.write("sweep", cfg.format, cfg.out.as_deref())
}

/// Optimal noise-eater settings per coupling value.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<(), CliError> {
    let ts = if cfg.t_grid_given {
        cfg.t_grid.points()?
    } else {
        vec![cfg.params.t]
    };
    let mut table = Table::new(vec!["t", "eta_a_opt", "t_r_opt", "v_opt"]);
    for t in ts {
        let opt = optimize_recovery(t, &cfg.params).map_err(CliError::numeric_from)?;
        table.push_row(vec![
            Cell::Num(t),
            Cell::Num(opt.eta_a),
            Cell::Num(opt.t_r),
            Cell::Num(opt.visibility),
        ]);
    }
    table.write("optimize", cfg.format, cfg.out.as_deref())
}

/// Multi-photon-noise sweep: per-T uncorrected visibility and recovered
/// visibility at the per-T optimized tap.
pub fn cmd_corollary(cfg: &RunConfig) -> Result<(), CliError> {
    // The corollary studies multi-photon noise; a plain single-photon
    // request falls back to the pair source at the configured ε.
    let noise = match cfg.noise_kind {
        NoiseKindArg::Poisson => SourceSpec::poisson(cfg.lambda),
        _ => SourceSpec::spdc(cfg.epsilon),
    }
    .with_overlap(cfg.params.noise.overlap);
    let base = ExperimentParams { noise, ..cfg.params.clone() };
    let rows = corollary_sweep(&base, &cfg.t_grid.points()?).map_err(CliError::numeric_from)?;

    let mut table = Table::new(vec!["t", "v_uncorrected", "t_r_opt", "v_corrected"]);
    for row in rows {
        table.push_row(vec![
            Cell::Num(row.t),
            Cell::Num(row.v_uncorrected),
            Cell::Num(row.t_r_opt),
            Cell::Num(row.v_corrected),
        ]);
    }
    table.write("corollary", cfg.format, cfg.out.as_deref())
}

/// Emulated photo-counts over the phase grid, with the fitted visibility.
pub fn cmd_counts(cfg: &RunConfig, conditional: bool) -> Result<(), CliError> {
    let fringe = if conditional {
        conditional_fringe(&cfg.params).map_err(CliError::numeric_from)?
    } else {
        let uncorrected = ExperimentParams { t_r: 0.0, ..cfg.params.clone() };
        unconditional_fringe(&uncorrected).map_err(CliError::numeric_from)?
    };
    let record = simulate_counts(&fringe, cfg.rate, cfg.duration, cfg.dark_rate, cfg.seed)
        .map_err(CliError::numeric_from)?;
    let dark = simulate_dark_counts(
        &record.phi,
        cfg.duration,
        cfg.dark_rate,
        cfg.seed.wrapping_add(1),
    )
    .map_err(CliError::numeric_from)?;
    let estimate = estimate_visibility(&record, &dark).map_err(CliError::numeric_from)?;

    let mut table = Table::new(vec![
        "phi_deg",
        "probability",
        "expected_counts",
        "counts",
        "dark_counts",
    ]);
    let degrees = cfg.params.phi_grid.points_degrees();
    for (i, phi_deg) in degrees.iter().enumerate() {
        let (_, p) = fringe.samples()[i];
        let expected = cfg.rate * p * cfg.duration + cfg.dark_rate * cfg.duration;
        table.push_row(vec![
            Cell::Num(*phi_deg),
            Cell::Num(p),
            Cell::Num(expected),
            Cell::Int(record.counts[i]),
            Cell::Int(dark[i]),
        ]);
    }
    table.summary.push(("v_hat", estimate.visibility));
    table.summary.push(("sigma_v", estimate.sigma));
    table.write("counts", cfg.format, cfg.out.as_deref())
}
