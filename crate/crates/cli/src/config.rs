//! Command-line arguments, optional TOML config files, and the merged run
//! configuration.
//!
//! Config files hold flat keys with the same names as the long flags, using
//! underscores (`gamma_d = -1.0`, `n_traj = 10000`, `psi0 = "ket2"`). Flags
//! given on the command line take precedence over file values.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gliou::generalized::{GLParams, LadderParams};
use gliou::state::psi0;
use gliou::C64;
use serde::Deserialize;

use crate::error::CliError;
use crate::output::Format;

pub const DEFAULT_POINTS: usize = 201;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_N_TRAJ: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "gliou", version, about = "Generalized Liouvillian dynamics of a driven qubit")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and exceptional-point diagnostics, optionally over a sweep.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Sweep one parameter: NAME:FROM:TO with NAME in gamma_d, gamma_j, omega.
        #[arg(long)]
        sweep: Vec<String>,
    },
    /// Normalized state evolution on a time grid.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Drive strengths on the exceptional-point surface.
    EpLocus {
        #[command(flatten)]
        common: CommonArgs,
        /// FROM:TO:N grid of damping rates.
        #[arg(long, allow_hyphen_values = true)]
        gamma_d_range: Option<String>,
        /// FROM:TO:N grid of jump rates.
        #[arg(long)]
        gamma_j_range: Option<String>,
    },
    /// Postselected Monte-Carlo trajectories of the three-level ladder.
    Trajectories {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Data files for one figure panel.
    Reproduce {
        #[command(flatten)]
        common: CommonArgs,
        /// fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig3c or fig3e.
        #[arg(long)]
        panel: String,
        /// Also write a matplotlib script reading the data files.
        #[arg(long)]
        plot_stub: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with flat parameter keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (a directory for `reproduce`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_d: Option<f64>,
    #[arg(long)]
    pub gamma_j: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long = "gamma-1")]
    pub gamma_1: Option<f64>,
    #[arg(long = "gamma-2")]
    pub gamma_2: Option<f64>,
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// psi0, ket1, ket2, or amplitudes RE1,IM1,RE2,IM2.
    #[arg(long, allow_hyphen_values = true)]
    pub psi0: Option<String>,
    /// Worker threads for trajectories.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    format: Option<String>,
    gamma_d: Option<f64>,
    gamma_j: Option<f64>,
    omega: Option<f64>,
    gamma_1: Option<f64>,
    gamma_2: Option<f64>,
    n_traj: Option<usize>,
    dt: Option<f64>,
    seed: Option<u64>,
    t_max: Option<f64>,
    points: Option<usize>,
    psi0: Option<String>,
    workers: Option<usize>,
}

impl CommonArgs {
    /// Fills unset flags from the config file, if one was given.
    pub fn merged(&self) -> Result<CommonArgs, CliError> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path)?;
        let f: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))?;
        Ok(CommonArgs {
            config: self.config.clone(),
            out: self.out.clone().or(f.out),
            format: self.format.clone().or(f.format),
            gamma_d: self.gamma_d.or(f.gamma_d),
            gamma_j: self.gamma_j.or(f.gamma_j),
            omega: self.omega.or(f.omega),
            gamma_1: self.gamma_1.or(f.gamma_1),
            gamma_2: self.gamma_2.or(f.gamma_2),
            n_traj: self.n_traj.or(f.n_traj),
            dt: self.dt.or(f.dt),
            seed: self.seed.or(f.seed),
            t_max: self.t_max.or(f.t_max),
            points: self.points.or(f.points),
            psi0: self.psi0.clone().or(f.psi0),
            workers: self.workers.or(f.workers),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum System {
    Generalized(GLParams),
    Ladder(LadderParams),
}

impl System {
    /// Largest rate setting the default time scale.
    pub fn rate_scale(&self) -> f64 {
        match self {
            System::Generalized(p) => p.gamma_d.abs().max(p.gamma_j),
            System::Ladder(p) => p.gamma_1.max(p.gamma_2),
        }
    }

    pub fn generalized(&self) -> GLParams {
        match self {
            System::Generalized(p) => *p,
            System::Ladder(p) => p.effective(),
        }
    }
}

/// Which parameter family a command uses when the flags name neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Generalized,
    Ladder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: System,
    pub psi0: [C64; 2],
    pub psi0_label: String,
    pub t_max: f64,
    pub points: usize,
    pub n_traj: usize,
    pub dt: Option<f64>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn parse_psi0(s: &str) -> Result<[C64; 2], CliError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match s.trim() {
        "psi0" => Ok(psi0()),
        "ket1" => Ok([one, zero]),
        "ket2" => Ok([zero, one]),
        other => {
            let parts: Vec<f64> = other
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Config(format!("cannot parse initial state '{other}'")))?;
            if parts.len() != 4 || parts.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(format!(
                    "explicit initial state needs four finite numbers RE1,IM1,RE2,IM2, got '{other}'"
                )));
            }
            let a = [C64::new(parts[0], parts[1]), C64::new(parts[2], parts[3])];
            let norm = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
            if norm == 0.0 {
                return Err(CliError::Config("initial state is the zero vector".into()));
            }
            Ok([a[0] / norm, a[1] / norm])
        }
    }
}

/// Parses `FROM:TO` or `FROM:TO:N`.
pub fn parse_range(s: &str, need_count: bool) -> Result<(f64, f64, Option<usize>), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("cannot parse range '{s}'"));
    let expected = if need_count { 3 } else { 2 };
    if parts.len() != expected {
        return Err(bad());
    }
    let from: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let to: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !from.is_finite() || !to.is_finite() {
        return Err(bad());
    }
    let n = if need_count {
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(CliError::Config(format!("range '{s}' needs at least one point")));
        }
        Some(n)
    } else {
        None
    };
    Ok((from, to, n))
}

/// `n` evenly spaced values from `from` to `to`.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn resolve_system(a: &CommonArgs, default: SystemKind) -> Result<System, CliError> {
    let ladder = a.gamma_1.is_some() || a.gamma_2.is_some();
    let generalized = a.gamma_d.is_some() || a.gamma_j.is_some();
    if ladder && generalized {
        return Err(CliError::Config(
            "give either gamma_d/gamma_j or gamma_1/gamma_2, not both".into(),
        ));
    }
    let omega = a.omega.unwrap_or(0.0);
    let kind = if ladder {
        SystemKind::Ladder
    } else if generalized {
        SystemKind::Generalized
    } else {
        default
    };
    Ok(match kind {
        SystemKind::Ladder => {
            System::Ladder(LadderParams::new(a.gamma_1.unwrap_or(1.0), a.gamma_2.unwrap_or(1.0), omega)?)
        }
        SystemKind::Generalized => {
            System::Generalized(GLParams::new(a.gamma_d.unwrap_or(1.0), a.gamma_j.unwrap_or(1.0), omega)?)
        }
    })
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs, default: SystemKind) -> Result<Self, CliError> {
        let a = args.merged()?;
        let system = resolve_system(&a, default)?;
        let psi0_label = a.psi0.clone().unwrap_or_else(|| "psi0".into());
        let psi0 = parse_psi0(&psi0_label)?;
        let points = a.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(CliError::Config(format!("need at least 2 time points, got {points}")));
        }
        let t_max = match a.t_max {
            Some(t) => t,
            None => {
                let r = system.rate_scale();
                if r > 0.0 {
                    10.0 / r
                } else {
                    10.0
                }
            }
        };
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::Config(format!("t_max must be positive, got {t_max}")));
        }
        let n_traj = a.n_traj.unwrap_or(DEFAULT_N_TRAJ);
        if n_traj == 0 {
            return Err(CliError::Config("n_traj must be positive".into()));
        }
        if a.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        let format = match &a.format {
            Some(f) => Format::parse(f)?,
            None => Format::Csv,
        };
        Ok(Self {
            system,
            psi0,
            psi0_label,
            t_max,
            points,
            n_traj,
            dt: a.dt,
            seed: a.seed.unwrap_or(DEFAULT_SEED),
            workers: a.workers,
            format,
            out: a.out.clone(),
        })
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max, self.points)
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    /// Parameter echo for output headers.
    pub fn system_params(&self) -> Vec<(String, String)> {
        match self.system {
            System::Generalized(p) => vec![
                ("gamma_d".into(), p.gamma_d.to_string()),
                ("gamma_j".into(), p.gamma_j.to_string()),
                ("omega".into(), p.omega.to_string()),
            ],
            System::Ladder(p) => vec![
                ("gamma_1".into(), p.gamma_1.to_string()),
                ("gamma_2".into(), p.gamma_2.to_string()),
                ("omega".into(), p.omega.to_string()),
            ],
        }
    }

    pub fn time_params(&self) -> Vec<(String, String)> {
        let label = self.psi0_label.replace(' ', "");
        vec![
            ("psi0".into(), label),
            ("t_max".into(), self.t_max.to_string()),
            ("points".into(), self.points.to_string()),
        ]
    }
}
