//! Command-line front end for the `gliou` library: configuration, scenario
//! runners and CSV / JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;

use config::{Cli, Command, RunConfig, SystemKind};
use error::CliError;

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { common, sweep } => {
            let cfg = RunConfig::from_args(&common, SystemKind::Generalized)?;
            let table = commands::spectrum(&cfg, &sweep)?;
            output::emit(&table.render(cfg.format), cfg.out_path())
        }
        Command::Evolve { common } => {
            let cfg = RunConfig::from_args(&common, SystemKind::Generalized)?;
            let table = commands::evolve(&cfg)?;
            output::emit(&table.render(cfg.format), cfg.out_path())
        }
        Command::EpLocus { common, gamma_d_range, gamma_j_range } => {
            let cfg = RunConfig::from_args(&common, SystemKind::Generalized)?;
            let table = commands::ep_locus_table(&cfg, gamma_d_range.as_deref(), gamma_j_range.as_deref())?;
            output::emit(&table.render(cfg.format), cfg.out_path())
        }
        Command::Trajectories { common } => {
            let cfg = RunConfig::from_args(&common, SystemKind::Ladder)?;
            let table = commands::trajectories(&cfg)?;
            output::emit(&table.render(cfg.format), cfg.out_path())
        }
        Command::Reproduce { common, panel, plot_stub } => {
            let cfg = RunConfig::from_args(&common, SystemKind::Generalized)?;
            let dir = cfg.out.clone().unwrap_or_else(|| ".".into());
            for path in reproduce::write_panel(&panel, &cfg, &dir, plot_stub)? {
                log::info!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
