//! Run configuration: command-line flags merged over an optional flat
//! key-value config file, with defaults applied last.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use noise_eater_core::experiment::{ExperimentParams, PhiGrid};
use noise_eater_core::sources::{epsilon_to_lambda, SourceSpec};

use crate::CliError;

/// `start:stop:step` inclusive grid, used for phases (degrees) and for the
/// coupling sweep (unitless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!(
                "grid '{text}' must have the form start:stop:step"
            )));
        }
        let mut vals = [0.0f64; 3];
        for (i, p) in parts.iter().enumerate() {
            vals[i] = p
                .parse()
                .map_err(|_| CliError::usage(format!("grid component '{p}' is not a number")))?;
        }
        Ok(GridSpec { start: vals[0], stop: vals[1], step: vals[2] })
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.step <= 0.0 || self.step.is_nan() || self.stop < self.start {
            return Err(CliError::numeric(format!(
                "grid {}:{}:{} is not a forward range",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Noise-source selector on the CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NoiseKindArg {
    Single,
    Spdc,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Raw option values as given on the command line; `None` means "not
/// provided" so the config file and defaults can fill it in.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RawOptions {
    /// Signal-photon emission probability η_S
    #[arg(long)]
    pub eta_s: Option<f64>,
    /// Noise-photon emission probability η_N (single-photon source)
    #[arg(long)]
    pub eta_n: Option<f64>,
    /// Attenuator transmission η_A in the signal arm [default: T]
    #[arg(long)]
    pub eta_a: Option<f64>,
    /// Efficiency η_D of the fringe detector D₁
    #[arg(long)]
    pub eta_d: Option<f64>,
    /// Efficiency η_R of the subtraction detector D_R
    #[arg(long)]
    pub eta_r: Option<f64>,
    /// Noise-coupler transmission T
    #[arg(long)]
    pub t: Option<f64>,
    /// Intensity fraction T_R diverted to D_R
    #[arg(long)]
    pub t_r: Option<f64>,
    /// Squared internal-mode overlap s between noise and signal
    #[arg(long)]
    pub overlap: Option<f64>,
    /// Noise source kind
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKindArg>,
    /// Pair amplitude ε of the spdc noise source
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Amplitude scale λ of the poisson noise source [default: matched to ε]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Phase grid start:stop:step in degrees
    #[arg(long, value_name = "START:STOP:STEP", allow_hyphen_values = true)]
    pub phi_grid: Option<String>,
    /// Coupling grid start:stop:step for sweeps
    #[arg(long, value_name = "START:STOP:STEP", allow_hyphen_values = true)]
    pub t_grid: Option<String>,
    /// Photon-number cutoff
    #[arg(long)]
    pub n_max: Option<u32>,
    /// RNG seed for count emulation
    #[arg(long)]
    pub seed: Option<u64>,
    /// Source count rate at unit probability, counts/s
    #[arg(long)]
    pub rate: Option<f64>,
    /// Integration time per phase point, seconds
    #[arg(long)]
    pub duration: Option<f64>,
    /// Dark-count rate, counts/s
    #[arg(long)]
    pub dark_rate: Option<f64>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key-value config file; flags override file entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ExperimentParams,
    pub noise_kind: NoiseKindArg,
    pub epsilon: f64,
    pub lambda: f64,
    pub t_grid: GridSpec,
    /// Whether a T grid was requested explicitly (flag or config file).
    pub t_grid_given: bool,
    pub seed: u64,
    pub rate: f64,
    pub duration: f64,
    pub dark_rate: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "eta-s", "eta-n", "eta-a", "eta-d", "eta-r", "t", "t-r", "overlap", "noise", "epsilon",
    "lambda", "phi-grid", "t-grid", "n-max", "seed", "rate", "duration", "dark-rate", "format",
    "out",
];

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "{}:{}: expected 'key = value', got '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!(
                "{}:{}: unknown config key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn numeric<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("config value {key} = '{raw}' is invalid"))),
    }
}

impl RunConfig {
    /// Merge flags over the config file (if any) and apply defaults.
    pub fn resolve(raw: &RawOptions) -> Result<Self, CliError> {
        let file = match &raw.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };

        let eta_s = raw.eta_s.or(numeric(&file, "eta-s")?).unwrap_or(1e-3);
        let eta_n = raw.eta_n.or(numeric(&file, "eta-n")?).unwrap_or(1e-3);
        let t = raw.t.or(numeric(&file, "t")?).unwrap_or(0.109);
        let t_r = raw.t_r.or(numeric(&file, "t-r")?).unwrap_or(0.75);
        let eta_a = raw.eta_a.or(numeric(&file, "eta-a")?).unwrap_or(t);
        let eta_d = raw.eta_d.or(numeric(&file, "eta-d")?).unwrap_or(0.5);
        let eta_r = raw.eta_r.or(numeric(&file, "eta-r")?).unwrap_or(0.5);
        let overlap = raw.overlap.or(numeric(&file, "overlap")?).unwrap_or(1.0);
        let n_max = raw.n_max.or(numeric(&file, "n-max")?).unwrap_or(4);
        let seed = raw.seed.or(numeric(&file, "seed")?).unwrap_or(42);
        let rate = raw.rate.or(numeric(&file, "rate")?).unwrap_or(5e4);
        let duration = raw.duration.or(numeric(&file, "duration")?).unwrap_or(3.0);
        let dark_rate = raw.dark_rate.or(numeric(&file, "dark-rate")?).unwrap_or(200.0);
        let epsilon = raw.epsilon.or(numeric(&file, "epsilon")?).unwrap_or(0.05);

        let noise_kind = match raw.noise {
            Some(k) => k,
            None => match file.get("noise").map(String::as_str) {
                None => NoiseKindArg::Single,
                Some("single") => NoiseKindArg::Single,
                Some("spdc") => NoiseKindArg::Spdc,
                Some("poisson") => NoiseKindArg::Poisson,
                Some(other) => {
                    return Err(CliError::usage(format!("unknown noise kind '{other}'")))
                }
            },
        };

        let lambda = match raw.lambda.or(numeric(&file, "lambda")?) {
            Some(l) => l,
            None => epsilon_to_lambda(epsilon).map_err(CliError::numeric_from)?,
        };

        let phi_text = match &raw.phi_grid {
            Some(s) => s.clone(),
            None => file.get("phi-grid").cloned().unwrap_or_else(|| "0:360:1".to_string()),
        };
        let phi_spec = GridSpec::parse(&phi_text)?;
        let phi_grid = PhiGrid::degrees(phi_spec.start, phi_spec.stop, phi_spec.step)
            .map_err(CliError::numeric_from)?;

        let t_grid_given = raw.t_grid.is_some() || file.contains_key("t-grid");
        let t_text = match &raw.t_grid {
            Some(s) => s.clone(),
            None => file.get("t-grid").cloned().unwrap_or_else(|| "0.1:0.9:0.08".to_string()),
        };
        let t_grid = GridSpec::parse(&t_text)?;

        let format = match raw.format {
            Some(f) => f,
            None => match file.get("format").map(String::as_str) {
                None | Some("csv") => OutputFormat::Csv,
                Some("json") => OutputFormat::Json,
                Some(other) => {
                    return Err(CliError::usage(format!("unknown format '{other}'")))
                }
            },
        };
        let out = raw.out.clone().or_else(|| file.get("out").map(PathBuf::from));

        let noise = match noise_kind {
            NoiseKindArg::Single => SourceSpec::single_photon(),
            NoiseKindArg::Spdc => SourceSpec::spdc(epsilon),
            NoiseKindArg::Poisson => SourceSpec::poisson(lambda),
        }
        .with_overlap(overlap);

        let params = ExperimentParams {
            eta_s,
            eta_n,
            t,
            t_r,
            eta_a,
            eta_d,
            eta_r,
            noise,
            phi_grid,
            n_max,
            compensate_tap: false,
            tap_threshold_detector: false,
        };
        params.validate().map_err(CliError::numeric_from)?;

        Ok(RunConfig {
            params,
            noise_kind,
            epsilon,
            lambda,
            t_grid,
            t_grid_given,
            seed,
            rate,
            duration,
            dark_rate,
            format,
            out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_rows() {
        let g = GridSpec::parse("0:360:10").unwrap();
        assert_eq!(g.points().unwrap().len(), 37);
        assert!(GridSpec::parse("0:360").is_err());
        assert!(GridSpec::parse("a:b:c").is_err());
        assert!(GridSpec::parse("5:1:1").unwrap().points().is_err());
    }

    #[test]
    fn defaults_follow_t() {
        let cfg = RunConfig::resolve(&RawOptions::default()).unwrap();
        assert_eq!(cfg.params.t, 0.109);
        assert_eq!(cfg.params.eta_a, 0.109);
        assert_eq!(cfg.params.t_r, 0.75);
        assert_eq!(cfg.params.phi_grid.len(), 361);
    }

    #[test]
    fn explicit_eta_a_wins_over_t_default() {
        let raw = RawOptions { t: Some(0.3), eta_a: Some(0.9), ..Default::default() };
        let cfg = RunConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.params.eta_a, 0.9);
    }

    #[test]
    fn lambda_defaults_to_matched_mean() {
        let raw = RawOptions { epsilon: Some(0.05), ..Default::default() };
        let cfg = RunConfig::resolve(&raw).unwrap();
        let expected = epsilon_to_lambda(0.05).unwrap();
        assert_eq!(cfg.lambda, expected);
    }

    #[test]
    fn out_of_range_values_are_validation_errors() {
        let raw = RawOptions { t: Some(1.5), ..Default::default() };
        let err = RunConfig::resolve(&raw).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
