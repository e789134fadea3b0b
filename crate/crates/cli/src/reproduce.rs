//! Data files for the figure panels.
//!
//! Fig. 2 panels hold three curves at |γ_d| = 1 (negative, positive and zero
//! damping); Fig. 3 panels compare the zero-damping, jump-free and Lindblad
//! cases at one drive strength. All curves start from the default state and
//! use the grid t ∈ [0, 10/γ] with 201 points unless overridden.

use std::path::{Path, PathBuf};

use gliou::generalized::{GLParams, LadderParams};
use gliou::observables::{bloch, collinearity, p2_poly, BlochVector};
use gliou::state::DensityMatrix;

use crate::commands::{evolve, trajectories};
use crate::config::{RunConfig, System};
use crate::error::CliError;
use crate::output::{Cell, Format, Table};

pub const PANELS: [&str; 8] = ["fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3e"];

/// One output file: a curve name and its table.
#[derive(Clone, Debug)]
pub struct Curve {
    pub name: String,
    pub table: Table,
}

fn with_system(base: &RunConfig, system: System) -> RunConfig {
    RunConfig { system, ..base.clone() }
}

fn gl(gamma_d: f64, gamma_j: f64, omega: f64) -> Result<System, CliError> {
    Ok(System::Generalized(GLParams::new(gamma_d, gamma_j, omega)?))
}

fn fig2(base: &RunConfig, gamma_j: f64, omega: f64) -> Result<Vec<Curve>, CliError> {
    let mut out = Vec::new();
    for (name, gd) in [("negative", -1.0), ("positive", 1.0), ("zero", 0.0)] {
        let cfg = with_system(base, gl(gd, gamma_j, omega)?);
        out.push(Curve { name: name.into(), table: evolve(&cfg)? });
    }
    Ok(out)
}

fn fig3(base: &RunConfig, omega: f64) -> Result<Vec<Curve>, CliError> {
    let mut out = Vec::new();
    for (name, gd, gj) in [("zdl", 0.0, 1.0), ("nhh", 1.0, 0.0), ("ll", 1.0, 1.0)] {
        let cfg = with_system(base, gl(gd, gj, omega)?);
        out.push(Curve { name: name.into(), table: evolve(&cfg)? });
    }
    Ok(out)
}

/// Largest distance of the zero-damping Bloch path from the segment joining
/// the initial state to |1⟩.
fn straight_line_summary(base: &RunConfig, zdl: &Table) -> Result<Curve, CliError> {
    let xs = zdl.numbers("x").expect("evolve table");
    let ys = zdl.numbers("y").expect("evolve table");
    let zs = zdl.numbers("z").expect("evolve table");
    let path: Vec<BlochVector> = (0..xs.len()).map(|k| BlochVector::new(xs[k], ys[k], zs[k])).collect();
    let start = bloch(&DensityMatrix::pure(&base.psi0)?)?;
    let end = BlochVector::new(0.0, 0.0, 1.0);
    let residual = collinearity(&path, start, end)?;
    let mut table = Table::new(
        "reproduce",
        base.time_params(),
        &["start_x", "start_y", "start_z", "end_x", "end_y", "end_z", "residual"],
    );
    table.push(vec![
        start.x.into(),
        start.y.into(),
        start.z.into(),
        end.x.into(),
        end.y.into(),
        end.z.into(),
        residual.into(),
    ]);
    Ok(Curve { name: "collinearity".into(), table })
}

fn fig3e(base: &RunConfig) -> Result<Vec<Curve>, CliError> {
    let mut out = Vec::new();
    for (name, gd, gj) in [("ll_master", 1.0, 1.0), ("nhh_master", 1.0, 0.0)] {
        let cfg = with_system(base, gl(gd, gj, 0.0)?);
        out.push(Curve { name: name.into(), table: evolve(&cfg)? });
    }

    let p = DensityMatrix::pure(&base.psi0)?.get(1, 1).re;
    let mut params = vec![("gamma".to_string(), "1".to_string())];
    params.extend(base.time_params());
    let mut analytic = Table::new("reproduce", params, &["t", "p2"]);
    for t in base.times() {
        analytic.push(vec![t.into(), Cell::Num(p2_poly(p, 1.0, t)?)]);
    }
    out.push(Curve { name: "zdl_analytic".into(), table: analytic });

    let mc = RunConfig {
        system: System::Ladder(LadderParams::new(1.0, 1.0, 0.0)?),
        ..base.clone()
    };
    out.push(Curve { name: "zdl_mc".into(), table: trajectories(&mc)? });
    Ok(out)
}

/// Tables for `panel`. `base` supplies the state, grid and trajectory options;
/// its rates are replaced by the panel's.
pub fn panel_curves(panel: &str, base: &RunConfig) -> Result<Vec<Curve>, CliError> {
    let mut curves = match panel {
        "fig2a" => fig2(base, 0.0, 0.24)?,
        "fig2b" => fig2(base, 0.0, 2.0)?,
        "fig2c" => fig2(base, 1.0, 0.24)?,
        "fig2d" => fig2(base, 1.0, 2.0)?,
        "fig3a" => {
            let mut c = fig3(base, 0.0)?;
            let summary = straight_line_summary(base, &c[0].table)?;
            c.push(summary);
            c
        }
        "fig3b" => fig3(base, 0.24)?,
        "fig3c" => fig3(base, 2.0)?,
        "fig3e" => fig3e(base)?,
        other => {
            return Err(CliError::Config(format!("unknown panel '{other}' (expected one of {})", PANELS.join(", "))))
        }
    };
    for c in &mut curves {
        c.table.params.insert(0, ("curve".into(), c.name.clone()));
        c.table.params.insert(0, ("panel".into(), panel.into()));
    }
    Ok(curves)
}

fn plot_stub(panel: &str, files: &[(String, PathBuf)]) -> String {
    let mut s = String::from("# Plot stub; edit freely.\nimport csv\nimport matplotlib.pyplot as plt\n\n\n");
    s.push_str("def load(path):\n    with open(path) as f:\n        rows = [r for r in csv.reader(f) if r and not r[0].startswith('#')]\n");
    s.push_str("    header, data = rows[0], rows[1:]\n");
    s.push_str("    return {h: [float(r[i]) if r[i] else float('nan') for r in data] for i, h in enumerate(header)}\n\n\n");
    s.push_str("fig, ax = plt.subplots()\n");
    for (name, path) in files {
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let y = if panel == "fig3e" {
            if name == "zdl_mc" {
                "p2_mc"
            } else {
                "p2"
            }
        } else {
            "z"
        };
        if name == "collinearity" {
            continue;
        }
        s.push_str(&format!("d = load('{file}')\nax.plot(d['t'], d['{y}'], label='{name}')\n"));
    }
    s.push_str(&format!("ax.set_xlabel('t')\nax.legend()\nfig.savefig('{panel}.png', dpi=150)\n"));
    s
}

/// Writes every curve of `panel` into `dir`; returns the written paths.
pub fn write_panel(panel: &str, base: &RunConfig, dir: &Path, with_plot: bool) -> Result<Vec<PathBuf>, CliError> {
    let curves = panel_curves(panel, base)?;
    std::fs::create_dir_all(dir)?;
    let ext = base.format.extension();
    let mut written = Vec::new();
    for c in &curves {
        let path = dir.join(format!("{panel}_{}.{ext}", c.name));
        std::fs::write(&path, c.table.render(base.format))?;
        written.push((c.name.clone(), path));
    }
    if with_plot {
        if base.format != Format::Csv {
            log::warn!("plot stub reads CSV files; regenerate with --format csv to use it");
        }
        let path = dir.join(format!("{panel}_plot.py"));
        std::fs::write(&path, plot_stub(panel, &written))?;
        written.push(("plot".into(), path));
    }
    Ok(written.into_iter().map(|(_, p)| p).collect())
}
