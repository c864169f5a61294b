//! Run settings: command-line flags override a JSON config file, which
//! overrides per-command defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use snakevqe::{Boundary, SnakeConfig};

pub const OUT_ENV: &str = "SNAKEVQE_OUT";
pub const DEFAULT_OUT: &str = "snakevqe-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Snake,
    Gd,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Snake => "snake",
            Optimizer::Gd => "gd",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Synthetic {
    H2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Periodic,
    Clamped,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Clamped => Boundary::Clamped,
        }
    }
}

/// Hamiltonian family selection.
#[derive(Args, Clone, Debug, Default)]
pub struct FamilyFlags {
    /// Family JSON file
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    pub family: Option<PathBuf>,
    /// Bundled synthetic family
    #[arg(long, value_enum)]
    pub synthetic: Option<Synthetic>,
}

/// Ansatz selection.
#[derive(Args, Clone, Debug, Default)]
pub struct AnsatzFlags {
    /// Builtin ansatz name or ansatz JSON file
    #[arg(long, value_name = "NAME|PATH")]
    pub ansatz: Option<String>,
    /// Replace the ansatz reference bitstring
    #[arg(long, value_name = "BITS")]
    pub reference: Option<String>,
}

/// Optimizer and output settings shared by the run commands.
#[derive(Args, Clone, Debug, Default)]
pub struct RunFlags {
    /// JSON config file with the same keys as the long flags
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Stretch stiffness α along the family axis
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bend stiffness β along the family axis
    #[arg(long)]
    pub beta: Option<f64>,
    /// Step size η
    #[arg(long)]
    pub eta: Option<f64>,
    /// Stiffness decay rate Γ (0: no decay)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Boundary mode of the stiffness matrix
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// Iteration budget
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Stop when every member gradient ∞-norm is below this
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// Seed for the random initial parameters
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: $SNAKEVQE_OUT or ./snakevqe-out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Record a trajectory snapshot every N iterations (0: first and last only)
    #[arg(long, value_name = "N")]
    pub snapshot_stride: Option<usize>,
    /// Also write SVG plots
    #[arg(long)]
    pub plot: bool,
    /// Include wall time in JSON reports (makes them non-reproducible)
    #[arg(long)]
    pub wall_time: bool,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub family: Option<PathBuf>,
    pub synthetic: Option<Synthetic>,
    pub ansatz: Option<String>,
    pub reference: Option<String>,
    pub optimizer: Option<Optimizer>,
    pub members: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub boundary: Option<BoundaryArg>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub snapshot_stride: Option<usize>,
    pub plot: Option<bool>,
    pub wall_time: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

pub enum FamilySource {
    File(PathBuf),
    Synthetic(Synthetic),
}

pub fn family_source(flags: &FamilyFlags, file: &FileConfig) -> Option<FamilySource> {
    match (&flags.family, flags.synthetic) {
        (Some(p), _) => Some(FamilySource::File(p.clone())),
        (None, Some(s)) => Some(FamilySource::Synthetic(s)),
        (None, None) => match (&file.family, file.synthetic) {
            (Some(_), Some(_)) => None,
            (Some(p), None) => Some(FamilySource::File(p.clone())),
            (None, Some(s)) => Some(FamilySource::Synthetic(s)),
            (None, None) => None,
        },
    }
}

/// Per-command fallbacks for settings not given by flag or file.
pub struct Defaults {
    pub snake: SnakeConfig,
    pub snapshot_stride: usize,
}

pub struct RunSettings {
    pub snake: SnakeConfig,
    pub out: PathBuf,
    pub snapshot_stride: usize,
    pub plot: bool,
    pub wall_time: bool,
}

pub fn resolve_run(flags: &RunFlags, file: &FileConfig, defaults: Defaults) -> Result<RunSettings> {
    let d = defaults.snake;
    let snake = SnakeConfig {
        alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
        beta: flags.beta.or(file.beta).unwrap_or(d.beta),
        eta: flags.eta.or(file.eta).unwrap_or(d.eta),
        gamma: flags.gamma.or(file.gamma).unwrap_or(d.gamma),
        max_iters: flags.max_iters.or(file.max_iters).unwrap_or(d.max_iters),
        grad_tol: flags.grad_tol.or(file.grad_tol).unwrap_or(d.grad_tol),
        boundary: flags
            .boundary
            .or(file.boundary)
            .map(Boundary::from)
            .unwrap_or(d.boundary),
        seed: flags.seed.or(file.seed).unwrap_or(d.seed),
    };
    if let Err(e) = snake.validate() {
        bail!(e);
    }
    Ok(RunSettings {
        snake,
        out: output_dir(flags.out.as_ref(), file),
        snapshot_stride: flags
            .snapshot_stride
            .or(file.snapshot_stride)
            .unwrap_or(defaults.snapshot_stride),
        plot: flags.plot || file.plot.unwrap_or(false),
        wall_time: flags.wall_time || file.wall_time.unwrap_or(false),
    })
}

pub fn output_dir(flag: Option<&PathBuf>, file: &FileConfig) -> PathBuf {
    flag.cloned()
        .or_else(|| file.out.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}
