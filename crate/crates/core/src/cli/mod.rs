//! Command-line front end: `verify`, `table`, `wigner` and `thresholds`.
//!
//! Settings come from an optional JSON file (`--config`) with individual
//! flags layered on top. Exit codes: 0 success, 1 invalid configuration,
//! 2 oracle failure (including failed verification checks), 3 I/O failure.

mod commands;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fock_oracle::OracleConfig;
use crate::phase_space::AxisKind;
use crate::state_params::StateParams;

pub use commands::{cmd_table, cmd_thresholds, cmd_wigner, r_grid, TableRow};
pub use verify::{cmd_verify, Check, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ORACLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Verify,
    Table,
    Wigner,
    Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Smoke,
    Desk,
}

/// Tabulated observable of `table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
pub enum Quantity {
    #[default]
    #[serde(rename = "g")]
    #[value(name = "g")]
    G,
    #[serde(rename = "R_ab")]
    #[value(name = "R_ab")]
    Rab,
    #[serde(rename = "SV")]
    #[value(name = "SV")]
    Sv,
    #[serde(rename = "fidelity")]
    #[value(name = "fidelity")]
    Fidelity,
}

impl Quantity {
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::G => "g",
            Quantity::Rab => "R_ab",
            Quantity::Sv => "SV",
            Quantity::Fidelity => "fidelity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Sum,
    Diff,
}

impl From<Axis> for AxisKind {
    fn from(a: Axis) -> Self {
        match a {
            Axis::Sum => AxisKind::Sum,
            Axis::Diff => AxisKind::Diff,
        }
    }
}

/// Squeezing range plus the thermal occupations and `(m, n)` pairs to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sweep {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub nbar: Vec<f64>,
    pub mn: Vec<(u32, u32)>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            r_min: 0.05,
            r_max: 1.5,
            r_step: 0.01,
            nbar: vec![0.01],
            mn: vec![(0, 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WignerSettings {
    pub axis: Axis,
    /// Points per axis.
    pub grid: usize,
    /// Half-width of the square `[−box, box]²`.
    #[serde(rename = "box")]
    pub box_halfwidth: f64,
}

impl Default for WignerSettings {
    fn default() -> Self {
        WignerSettings {
            axis: Axis::Sum,
            grid: 61,
            box_halfwidth: 3.0,
        }
    }
}

/// Everything a subcommand needs. Deserializable from the `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub params: StateParams,
    pub sweep: Option<Sweep>,
    pub oracle: OracleConfig,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub quantity: Quantity,
    pub wigner: WignerSettings,
    pub profile: Profile,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            params: StateParams {
                m: 0,
                n: 1,
                r: 0.3,
                nbar: 0.2,
            },
            sweep: None,
            oracle: OracleConfig::default(),
            output_path: None,
            format: Format::Csv,
            quantity: Quantity::G,
            wigner: WignerSettings::default(),
            profile: Profile::Smoke,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        self.oracle.validate()?;
        if let Some(s) = &self.sweep {
            if !(s.r_step > 0.0 && s.r_step.is_finite()) {
                return Err(Error::InvalidParams(format!("r_step = {} must be positive", s.r_step)));
            }
            if !(s.r_min >= 0.0 && s.r_max >= s.r_min && s.r_max.is_finite()) {
                return Err(Error::InvalidParams(format!("bad r range [{}, {}]", s.r_min, s.r_max)));
            }
            if s.nbar.is_empty() || s.mn.is_empty() {
                return Err(Error::InvalidParams(
                    "sweep needs at least one nbar and one (m, n)".into(),
                ));
            }
            for &nbar in &s.nbar {
                for &(m, n) in &s.mn {
                    StateParams { m, n, r: s.r_min, nbar }.validate()?;
                }
            }
        }
        if self.wigner.grid == 0 {
            return Err(Error::InvalidParams("wigner grid needs at least one point".into()));
        }
        if !(self.wigner.box_halfwidth >= 0.0 && self.wigner.box_halfwidth.is_finite()) {
            return Err(Error::InvalidParams("wigner box must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// The sweep, or a one-point sweep built from `params`.
    pub fn sweep_or_point(&self) -> Sweep {
        self.sweep.clone().unwrap_or_else(|| Sweep {
            r_min: self.params.r,
            r_max: self.params.r,
            r_step: 1.0,
            nbar: vec![self.params.nbar],
            mn: vec![(self.params.m, self.params.n)],
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "patmsts",
    version,
    about = "Photon-added two-mode squeezed thermal states: closed forms and Fock-space checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the closed-form vs oracle checks and write a JSON report.
    Verify(Flags),
    /// Tabulate g, R_ab, SV or fidelity over a sweep.
    Table(Flags),
    /// Sample the Wigner function on a quadrature grid.
    Wigner(Flags),
    /// Entanglement thresholds r_a (photon-added) and r_c (photon-subtracted).
    Thresholds(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    nbar: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_step: Option<f64>,
    #[arg(long)]
    quantity: Option<Quantity>,
    #[arg(long)]
    axis: Option<Axis>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long = "box")]
    box_halfwidth: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    profile: Option<Profile>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Oracle(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "invalid configuration: {s}"),
            CliError::Oracle(s) => write!(f, "oracle failure: {s}"),
            CliError::Io(s) => write!(f, "i/o failure: {s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::OrderOverflow { .. } | Error::NonFinite(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Oracle(e.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn merge(kind: CommandKind, flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    cfg.command = Some(kind);
    let p = &mut cfg.params;
    p.m = flags.m.unwrap_or(p.m);
    p.n = flags.n.unwrap_or(p.n);
    p.r = flags.r.unwrap_or(p.r);
    p.nbar = flags.nbar.unwrap_or(p.nbar);

    let range_flag = flags.r_min.is_some() || flags.r_max.is_some() || flags.r_step.is_some();
    if range_flag && cfg.sweep.is_none() {
        cfg.sweep = Some(Sweep {
            nbar: vec![cfg.params.nbar],
            mn: vec![(cfg.params.m, cfg.params.n)],
            ..Sweep::default()
        });
    }
    if let Some(s) = cfg.sweep.as_mut() {
        s.r_min = flags.r_min.unwrap_or(s.r_min);
        s.r_max = flags.r_max.unwrap_or(s.r_max);
        s.r_step = flags.r_step.unwrap_or(s.r_step);
        if let Some(nbar) = flags.nbar {
            s.nbar = vec![nbar];
        }
        if flags.m.is_some() || flags.n.is_some() {
            s.mn = vec![(cfg.params.m, cfg.params.n)];
        }
    }
    if let Some(q) = flags.quantity {
        cfg.quantity = q;
    }
    if let Some(a) = flags.axis {
        cfg.wigner.axis = a;
    }
    cfg.wigner.grid = flags.grid.unwrap_or(cfg.wigner.grid);
    cfg.wigner.box_halfwidth = flags.box_halfwidth.unwrap_or(cfg.wigner.box_halfwidth);
    if flags.out.is_some() {
        cfg.output_path = flags.out.clone();
    }
    cfg.format = flags.format.unwrap_or(cfg.format);
    cfg.profile = flags.profile.unwrap_or(cfg.profile);
    cfg.oracle = cfg.oracle.with_env_overrides()?;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `text` to the configured path, or stdout when none is set.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn dispatch(kind: CommandKind, flags: &Flags) -> Result<i32, CliError> {
    let cfg = merge(kind, flags)?;
    match kind {
        CommandKind::Verify => {
            let report = cmd_verify(&cfg)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            emit(&cfg, &(json + "\n"))?;
            eprintln!(
                "verify: {} checks, {} failed, {} known discrepancies recorded",
                report.summary.checks, report.summary.failed, report.summary.discrepancies
            );
            Ok(if report.summary.failed == 0 {
                EXIT_OK
            } else {
                EXIT_ORACLE
            })
        }
        CommandKind::Table => emit(&cfg, &cmd_table(&cfg)?).map(|_| EXIT_OK),
        CommandKind::Wigner => emit(&cfg, &cmd_wigner(&cfg)?).map(|_| EXIT_OK),
        CommandKind::Thresholds => emit(&cfg, &cmd_thresholds(&cfg)?).map(|_| EXIT_OK),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (kind, flags) = match &cli.command {
        Command::Verify(f) => (CommandKind::Verify, f),
        Command::Table(f) => (CommandKind::Table, f),
        Command::Wigner(f) => (CommandKind::Wigner, f),
        Command::Thresholds(f) => (CommandKind::Thresholds, f),
    };
    match dispatch(kind, flags) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("patmsts: {e}");
            e.exit_code()
        }
    }
}
