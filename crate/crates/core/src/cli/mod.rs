//! Command-line front end.
//!
//! Every run resolves a [`RunConfig`] from flags layered over an optional
//! `key = value` config file, validates that exactly the parameters of the
//! chosen mode are present, computes, and only then writes artifacts.
//!
//! Exit codes: 0 success, 2 config error, 3 domain error, 4 tolerance
//! failure (1 for I/O errors).

pub mod config;
pub mod output;
pub mod svg;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::fieldstats::{self, nominal_rabi_period, poisson_weights, revival_report, DEFAULT_TAIL_TOL};
use crate::jcm::{self, closed_form_series, dressed_spectrum, general_series, JcmCase};
use crate::oracle::{integrate_jcm, semiclassical_trajectory, IntegratorConfig};
use crate::semiclassical::{population_series, SemiclassicalCase};
use crate::state::{bare_state, AtomicLevel, JcmParams, PopulationSeries, SemiclassicalParams, TimeGrid};

/// Relative output and plot paths are resolved under this directory when set.
pub const OUTPUT_DIR_ENV: &str = "CASCADE_OUTPUT_DIR";

pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Classically driven atom, closed forms.
    Semiclassical,
    /// Quantized field in a number state.
    JcmNumber,
    /// Quantized field in a coherent state (Poisson average).
    JcmCoherent,
    /// Compare closed forms with the numerical oracle.
    OracleCheck,
    /// Print eigenvalues, Euler matrix and Euler angles of one manifold.
    DressedInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => CliError::Config(e.to_string()),
            Error::StepControl { .. } => CliError::Tolerance(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

/// Cascade three-level atom: semiclassical, number-state and coherent-state
/// level populations.
///
/// All frequencies are in rad per unit time with ħ = 1. The number- and
/// coherent-state figures use g = 0.1.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "cascade", version, allow_negative_numbers = true)]
pub struct Args {
    /// Simulation mode (may also be given as `mode = ...` in the config file).
    #[arg(value_enum)]
    pub mode: Option<Mode>,
    /// `key = value` config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial atomic level: upper, middle or lower.
    #[arg(long)]
    pub initial: Option<String>,
    /// Atomic level spacing.
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Classical drive frequency.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Classical coupling strength.
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Atom-field coupling of the quantized mode.
    #[arg(long)]
    pub g: Option<f64>,
    /// Detuning omega0 - omega of the quantized mode (default 0).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Photon number of the middle bare state |n, 0>.
    #[arg(long)]
    pub n: Option<i64>,
    /// Mean photon number of the coherent state.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// End of the time grid (grid starts at 0).
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of grid points (default 2000).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Series format (default csv).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write an SVG plot of the series here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// For oracle-check: which propagator to check (semiclassical or jcm-number).
    #[arg(long = "mode", value_enum)]
    pub check_mode: Option<Mode>,
    /// For oracle-check: largest accepted deviation (default 1e-8).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Fully resolved and validated run description. Serializes to the
/// `params` echo block of JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<AtomicLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub steps: usize,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub plot: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

struct ModeRules {
    required: &'static [&'static str],
    optional: &'static [&'static str],
}

const SERIES_OPTIONAL: &[&str] = &["steps", "format", "output", "plot"];

fn rules(mode: Mode) -> ModeRules {
    match mode {
        Mode::Semiclassical => ModeRules { required: &["initial", "omega0", "omega", "omega1", "t_max"], optional: SERIES_OPTIONAL },
        Mode::JcmNumber => ModeRules {
            required: &["initial", "g", "n", "t_max"],
            optional: &["delta", "steps", "format", "output", "plot"],
        },
        Mode::JcmCoherent => ModeRules {
            required: &["initial", "g", "nbar", "t_max"],
            optional: &["delta", "steps", "format", "output", "plot"],
        },
        Mode::DressedInfo => ModeRules { required: &["g", "n"], optional: &["delta", "format", "output"] },
        Mode::OracleCheck => ModeRules { required: &["check_mode"], optional: &["steps", "tolerance"] },
    }
}

impl RunConfig {
    /// Merges the config file (if any) under the flags and validates the
    /// result for the selected mode.
    pub fn from_args(mut args: Args) -> Result<RunConfig, CliError> {
        if let Some(path) = args.config.clone() {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
            config::apply_file(&mut args, &config::parse(&text)?)?;
        }
        let mode = args
            .mode
            .ok_or_else(|| CliError::Config("no mode given (positional argument or `mode = ...`)".into()))?;
        let initial = args
            .initial
            .as_deref()
            .map(str::parse::<AtomicLevel>)
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let cfg = RunConfig {
            mode,
            check_mode: args.check_mode,
            initial,
            omega0: args.omega0,
            omega: args.omega,
            omega1: args.omega1,
            g: args.g,
            delta: args.delta,
            n: args.n,
            nbar: args.nbar,
            t_max: args.t_max,
            steps: args.steps.unwrap_or(DEFAULT_STEPS),
            format: args.format.unwrap_or_default(),
            output: args.output,
            plot: args.plot,
            tolerance: args.tolerance,
        };
        let mut present: BTreeSet<&str> = BTreeSet::new();
        for (key, set) in [
            ("check_mode", cfg.check_mode.is_some()),
            ("initial", cfg.initial.is_some()),
            ("omega0", cfg.omega0.is_some()),
            ("omega", cfg.omega.is_some()),
            ("omega1", cfg.omega1.is_some()),
            ("g", cfg.g.is_some()),
            ("delta", cfg.delta.is_some()),
            ("n", cfg.n.is_some()),
            ("nbar", cfg.nbar.is_some()),
            ("t_max", cfg.t_max.is_some()),
            ("steps", args.steps.is_some()),
            ("format", args.format.is_some()),
            ("output", cfg.output.is_some()),
            ("plot", cfg.plot.is_some()),
            ("tolerance", cfg.tolerance.is_some()),
        ] {
            if set {
                present.insert(key);
            }
        }

        let mut required: Vec<&str> = rules(mode).required.to_vec();
        let mut allowed: Vec<&str> = rules(mode).optional.to_vec();
        allowed.extend_from_slice(&required);
        if mode == Mode::OracleCheck {
            let inner = match cfg.check_mode {
                Some(m @ (Mode::Semiclassical | Mode::JcmNumber)) => rules(m),
                Some(other) => {
                    return Err(CliError::Config(format!("oracle-check supports semiclassical and jcm-number, not {other:?}")))
                }
                None => return Err(CliError::Config("oracle-check needs --mode semiclassical|jcm-number".into())),
            };
            required.extend_from_slice(inner.required);
            allowed.extend_from_slice(inner.required);
            if inner.optional.contains(&"delta") {
                allowed.push("delta");
            }
        }
        let missing: Vec<&str> = required.iter().copied().filter(|k| !present.contains(k)).collect();
        if !missing.is_empty() {
            return Err(CliError::Config(format!("{mode:?} needs: {}", missing.join(", "))));
        }
        let extra: Vec<&str> = present.iter().copied().filter(|k| !allowed.contains(k)).collect();
        if !extra.is_empty() {
            return Err(CliError::Config(format!("{mode:?} does not take: {}", extra.join(", "))));
        }
        if cfg.steps == 0 {
            return Err(CliError::Config("steps must be >= 1".into()));
        }
        if let Some(t) = cfg.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("t-max must be > 0, got {t}")));
            }
        }
        if let Some(tol) = cfg.tolerance {
            if !(tol > 0.0) {
                return Err(CliError::Config(format!("tolerance must be > 0, got {tol}")));
            }
        }
        Ok(cfg)
    }

    fn grid(&self) -> Result<TimeGrid, CliError> {
        let t_max = self.t_max.ok_or_else(|| CliError::Config("t-max missing".into()))?;
        Ok(TimeGrid::new(0.0, t_max, self.steps)?)
    }

    fn initial_level(&self) -> Result<AtomicLevel, CliError> {
        self.initial.ok_or_else(|| CliError::Config("initial level missing".into()))
    }

    fn semiclassical_params(&self) -> Result<SemiclassicalParams, CliError> {
        let get = |v: Option<f64>, k: &str| v.ok_or_else(|| CliError::Config(format!("{k} missing")));
        Ok(SemiclassicalParams::new(get(self.omega0, "omega0")?, get(self.omega, "omega")?, get(self.omega1, "omega1")?)?)
    }

    fn jcm_params(&self) -> Result<JcmParams, CliError> {
        let g = self.g.ok_or_else(|| CliError::Config("g missing".into()))?;
        let n = self.n.ok_or_else(|| CliError::Config("n missing".into()))?;
        Ok(JcmParams::new(g, self.delta.unwrap_or(0.0), n)?)
    }

    fn title(&self) -> String {
        let initial = self.initial.map(|l| l.name()).unwrap_or("-");
        match self.mode {
            Mode::Semiclassical => format!(
                "semiclassical, initial {initial}, omega0={} omega={} omega1={}",
                self.omega0.unwrap_or(0.0),
                self.omega.unwrap_or(0.0),
                self.omega1.unwrap_or(0.0)
            ),
            Mode::JcmNumber => format!("number state n={}, initial {initial}, g={}", self.n.unwrap_or(0), self.g.unwrap_or(0.0)),
            Mode::JcmCoherent => {
                format!("coherent state nbar={}, initial {initial}, g={}", self.nbar.unwrap_or(0.0), self.g.unwrap_or(0.0))
            }
            _ => String::new(),
        }
    }
}

/// `path` joined under `$CASCADE_OUTPUT_DIR` when it is relative and the
/// variable is set.
pub fn resolve_output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_artifact(path: &Path, contents: &str) -> Result<(), CliError> {
    let path = resolve_output_path(path);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Population series for the series-producing modes.
pub fn compute_series(cfg: &RunConfig) -> Result<PopulationSeries, CliError> {
    let grid = cfg.grid()?;
    let level = cfg.initial_level()?;
    match cfg.mode {
        Mode::Semiclassical => {
            Ok(population_series(&cfg.semiclassical_params()?, SemiclassicalCase::from_initial(level), &grid))
        }
        Mode::JcmNumber => number_state_series(&cfg.jcm_params()?, level, &grid),
        Mode::JcmCoherent => {
            let g = cfg.g.ok_or_else(|| CliError::Config("g missing".into()))?;
            let nbar = cfg.nbar.ok_or_else(|| CliError::Config("nbar missing".into()))?;
            let field = poisson_weights(nbar, DEFAULT_TAIL_TOL)?;
            Ok(fieldstats::averaged_populations(&field, g, cfg.delta.unwrap_or(0.0), JcmCase::from_initial(level), &grid)?)
        }
        other => Err(CliError::Config(format!("{other:?} does not produce a population series"))),
    }
}

fn number_state_series(params: &JcmParams, level: AtomicLevel, grid: &TimeGrid) -> Result<PopulationSeries, CliError> {
    let case = JcmCase::from_initial(level);
    if params.delta == 0.0 {
        Ok(closed_form_series(params, case, grid)?)
    } else {
        if case == JcmCase::CaseVI && params.n == 0 {
            // same message as the closed-form path
            jcm::evolve_closed_form(&JcmParams { delta: 0.0, ..*params }, case, 0.0)?;
        }
        Ok(general_series(params, &bare_state(level), grid)?)
    }
}

/// Largest population deviation between the closed form (or dressed-state
/// propagator when detuned) and the numerical oracle over the grid.
pub fn oracle_deviation(cfg: &RunConfig) -> Result<f64, CliError> {
    let check = cfg.check_mode.ok_or_else(|| CliError::Config("check mode missing".into()))?;
    let inner = RunConfig { mode: check, ..cfg.clone() };
    let grid = inner.grid()?;
    let level = inner.initial_level()?;
    let closed = compute_series(&inner)?;
    let times = grid.points();
    let oracle: PopulationSeries = match check {
        Mode::Semiclassical => {
            let params = inner.semiclassical_params()?;
            let traj = semiclassical_trajectory(&params, &bare_state(level), &times, &IntegratorConfig::default())?;
            PopulationSeries::from_rows(times.iter().copied().zip(traj.iter().map(|s| s.populations())))
        }
        Mode::JcmNumber => {
            let params = inner.jcm_params()?;
            let init = bare_state(level);
            PopulationSeries::from_rows(times.iter().map(|&t| (t, integrate_jcm(&params, &init, t).populations())))
        }
        other => return Err(CliError::Config(format!("oracle-check cannot check {other:?}"))),
    };
    Ok(closed.max_abs_diff(&oracle))
}

#[derive(Serialize)]
struct DressedInfo {
    n: u32,
    g: f64,
    delta: f64,
    eigenvalues: [f64; 3],
    t_matrix: [[f64; 3]; 3],
    psi: f64,
    theta: f64,
    phi: f64,
}

fn dressed_info(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.jcm_params()?;
    let s = dressed_spectrum(&params);
    let info = DressedInfo {
        n: params.n,
        g: params.g,
        delta: params.delta,
        eigenvalues: s.eigenvalues(),
        t_matrix: s.t_matrix.entries,
        psi: s.t_matrix.angles.psi,
        theta: s.t_matrix.angles.theta,
        phi: s.t_matrix.angles.phi,
    };
    Ok(match cfg.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&info).expect("finite floats serialize");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = format!("manifold n = {}, g = {}, delta = {}\n", info.n, info.g, info.delta);
            text.push_str(&format!(
                "eigenvalues: lambda_plus = {:.16e}, lambda_zero = {:.16e}, lambda_minus = {:.16e}\n",
                info.eigenvalues[0], info.eigenvalues[1], info.eigenvalues[2]
            ));
            text.push_str("T (rows are dressed states over |n+1,->, |n,0>, |n-1,+>):\n");
            for row in &info.t_matrix {
                text.push_str(&format!("  {:>24.16e} {:>24.16e} {:>24.16e}\n", row[0], row[1], row[2]));
            }
            text.push_str(&format!(
                "euler angles (rad): psi = {:.16e}, theta = {:.16e}, phi = {:.16e}\n",
                info.psi, info.theta, info.phi
            ));
            text
        }
    })
}

/// Executes one run. Series and reports go to `stdout` unless an output
/// path is configured.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cfg.mode {
        Mode::DressedInfo => {
            let text = dressed_info(cfg)?;
            match &cfg.output {
                Some(path) => write_artifact(path, &text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
        }
        Mode::OracleCheck => {
            let tol = cfg.tolerance.unwrap_or(DEFAULT_ORACLE_TOLERANCE);
            let deviation = oracle_deviation(cfg)?;
            writeln!(
                stdout,
                "oracle-check {:?}: max deviation {deviation:.3e} over {} points (tolerance {tol:.1e})",
                cfg.check_mode.expect("validated"),
                cfg.steps
            )?;
            if !(deviation <= tol) {
                return Err(CliError::Tolerance(format!("deviation {deviation:.3e} exceeds {tol:.1e}")));
            }
        }
        Mode::Semiclassical | Mode::JcmNumber | Mode::JcmCoherent => {
            let series = compute_series(cfg)?;
            if cfg.mode == Mode::JcmCoherent {
                let window = nominal_rabi_period(cfg.g.unwrap_or(1.0), cfg.nbar.unwrap_or(0.0));
                match revival_report(&series, window) {
                    Ok(r) => eprintln!(
                        "collapse near t = {:.1}, revival near t = {:.1} (envelope {:.3} of {:.3}, {} level)",
                        r.collapse_time_estimate, r.first_revival_time, r.revival_peak_height, r.initial_amplitude, r.level
                    ),
                    Err(e) => eprintln!("collapse/revival: {e}"),
                }
            }
            let out = series.clamped();
            let text = match cfg.format {
                Format::Csv => output::write_csv(&out),
                Format::Json => output::write_json(cfg, &out),
            };
            match &cfg.output {
                Some(path) => write_artifact(path, &text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
            if let Some(path) = &cfg.plot {
                write_artifact(path, &svg::render(&out, &cfg.title()))?;
            }
        }
    }
    Ok(())
}
