//! Table builders behind each subcommand.

use gliou::generalized::{build_lg, reduce_ladder, GLParams, LadderParams};
use gliou::observables::{bloch, p2, purity};
use gliou::spectral::{decompose, ep_distance, ep_locus, evolve_normalized, normalize, EPQuery, Propagator};
use gliou::state::DensityMatrix;
use gliou::trajectories::{
    embed_qubit, run_ensemble, run_ensemble_with_workers, survivor_model, TrajectoryConfig,
};
use gliou::Superoperator;

use crate::config::{linspace, parse_range, RunConfig, System};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const SPECTRUM_COLUMNS: [&str; 14] = [
    "gamma_d", "gamma_j", "omega", "re_l0", "im_l0", "re_l1", "im_l1", "re_l2", "im_l2", "re_l3", "im_l3", "defective",
    "min_gap", "coalescence",
];
pub const EVOLVE_COLUMNS: [&str; 8] = ["t", "x", "y", "z", "purity", "trace_unnormalized", "p2", "survivor_model"];
pub const EP_COLUMNS: [&str; 3] = ["gamma_d", "gamma_j", "omega_root"];
pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "p2_mc", "stderr", "survivor_fraction", "survivor_model", "p2_master"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SweepParam {
    GammaD,
    GammaJ,
    Omega,
}

fn parse_sweep(spec: &str) -> Result<(SweepParam, f64, f64), CliError> {
    let (name, range) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("sweep '{spec}' should look like NAME:FROM:TO")))?;
    let param = match name.replace('-', "_").as_str() {
        "gamma_d" => SweepParam::GammaD,
        "gamma_j" => SweepParam::GammaJ,
        "omega" => SweepParam::Omega,
        other => return Err(CliError::Config(format!("cannot sweep '{other}' (use gamma_d, gamma_j or omega)"))),
    };
    let (from, to, _) = parse_range(range, false)?;
    Ok((param, from, to))
}

fn spectrum_row(p: GLParams) -> Result<Vec<Cell>, CliError> {
    let l = build_lg(p);
    let s = decompose(&l)?;
    let (gap, coalescence) = ep_distance(&l)?;
    let mut row: Vec<Cell> = vec![p.gamma_d.into(), p.gamma_j.into(), p.omega.into()];
    for lam in &s.eigenvalues {
        row.push(lam.re.into());
        row.push(lam.im.into());
    }
    row.push(s.defective.into());
    row.push(gap.into());
    row.push(coalescence.into());
    Ok(row)
}

/// One row per parameter point. `min_gap` and `coalescence` refer to the
/// drive-coupled pair λ₁, λ₂ that meets at the exceptional point.
pub fn spectrum(cfg: &RunConfig, sweeps: &[String]) -> Result<Table, CliError> {
    if sweeps.len() > 1 {
        return Err(CliError::Config(format!("conflicting sweeps: {} given, at most one allowed", sweeps.len())));
    }
    let base = cfg.system.generalized();
    let mut params = vec![
        ("gamma_d".to_string(), base.gamma_d.to_string()),
        ("gamma_j".to_string(), base.gamma_j.to_string()),
        ("omega".to_string(), base.omega.to_string()),
    ];
    let points: Vec<GLParams> = match sweeps.first() {
        None => vec![base],
        Some(spec) => {
            let (param, from, to) = parse_sweep(spec)?;
            params.push(("sweep".into(), spec.clone()));
            params.push(("points".into(), cfg.points.to_string()));
            linspace(from, to, cfg.points)
                .into_iter()
                .map(|v| {
                    let mut p = base;
                    match param {
                        SweepParam::GammaD => p.gamma_d = v,
                        SweepParam::GammaJ => p.gamma_j = v,
                        SweepParam::Omega => p.omega = v,
                    }
                    p.validate().map(|_| p)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut table = Table::new("spectrum", params, &SPECTRUM_COLUMNS);
    for p in points {
        table.push(spectrum_row(p)?);
    }
    Ok(table)
}

/// Generator on the qubit block and the global decay rate stripped from it.
fn qubit_generator(system: &System) -> Result<(Superoperator, f64), CliError> {
    Ok(match system {
        System::Generalized(p) => (build_lg(*p), 0.0),
        System::Ladder(p) => {
            let r = reduce_ladder(*p)?;
            (r.generator, r.global_decay)
        }
    })
}

pub fn evolve(cfg: &RunConfig) -> Result<Table, CliError> {
    let (generator, decay) = qubit_generator(&cfg.system)?;
    let ladder = matches!(cfg.system, System::Ladder(_));
    let propagator = Propagator::new(&generator);
    let rho0 = DensityMatrix::pure(&cfg.psi0)?;
    let mut params = cfg.system_params();
    params.extend(cfg.time_params());
    let mut table = Table::new("evolve", params, &EVOLVE_COLUMNS);
    for t in cfg.times() {
        let raw = DensityMatrix::from_matrix(propagator.propagate(rho0.matrix(), t)?)?;
        let weight = (-decay * t).exp() * raw.trace().re;
        let rho = normalize(&raw, t)?;
        let b = bloch(&rho)?;
        table.push(vec![
            t.into(),
            b.x.into(),
            b.y.into(),
            b.z.into(),
            purity(&rho).into(),
            weight.into(),
            p2(&rho).into(),
            if ladder { weight.into() } else { Cell::Empty },
        ]);
    }
    Ok(table)
}

fn axis(range: Option<&str>, single: f64) -> Result<Vec<f64>, CliError> {
    match range {
        None => Ok(vec![single]),
        Some(r) => {
            let (from, to, n) = parse_range(r, true)?;
            Ok(linspace(from, to, n.unwrap_or(1)))
        }
    }
}

/// All exceptional-point drive strengths per (γ_d, γ_J) grid point; a point
/// without roots gets one row with an empty `omega_root`.
pub fn ep_locus_table(cfg: &RunConfig, gamma_d_range: Option<&str>, gamma_j_range: Option<&str>) -> Result<Table, CliError> {
    let base = cfg.system.generalized();
    let gds = axis(gamma_d_range, base.gamma_d)?;
    let gjs = axis(gamma_j_range, base.gamma_j)?;
    if gjs.iter().any(|&g| g.is_nan() || g < 0.0) {
        return Err(CliError::Config("jump rates must be nonnegative".into()));
    }
    let params = vec![
        ("gamma_d".to_string(), gamma_d_range.map_or(base.gamma_d.to_string(), str::to_string)),
        ("gamma_j".to_string(), gamma_j_range.map_or(base.gamma_j.to_string(), str::to_string)),
    ];
    let mut table = Table::new("ep-locus", params, &EP_COLUMNS);
    for &gd in &gds {
        for &gj in &gjs {
            let roots = ep_locus(EPQuery { gamma_d: gd, gamma_j: gj });
            if roots.is_empty() {
                table.push(vec![gd.into(), gj.into(), Cell::Empty]);
            }
            for w in roots {
                table.push(vec![gd.into(), gj.into(), w.into()]);
            }
        }
    }
    Ok(table)
}

pub fn trajectory_config(cfg: &RunConfig) -> Result<TrajectoryConfig, CliError> {
    let System::Ladder(system) = cfg.system else {
        return Err(CliError::Config("trajectories need ladder rates --gamma-1/--gamma-2".into()));
    };
    let mut tc = TrajectoryConfig {
        system,
        psi0: embed_qubit(cfg.psi0),
        t_max: cfg.t_max,
        dt: 1e-3,
        n_traj: cfg.n_traj,
        master_seed: cfg.seed,
        sample_times: cfg.times(),
    };
    tc.dt = cfg.dt.unwrap_or_else(|| tc.max_dt().min(1e-3));
    Ok(tc)
}

/// Monte-Carlo estimates joined with the survivor model and the conditional
/// master equation. The worker count does not enter the output.
pub fn trajectories(cfg: &RunConfig) -> Result<Table, CliError> {
    let tc = trajectory_config(cfg)?;
    let res = match cfg.workers {
        Some(w) => run_ensemble_with_workers(&tc, w)?,
        None => run_ensemble(&tc)?,
    };
    let model = survivor_model(&tc)?;
    let LadderParams { gamma_1, gamma_2, omega } = tc.system;
    let master = build_lg(GLParams::new(gamma_2 - gamma_1, gamma_2, omega)?);
    let rho0 = DensityMatrix::pure(&cfg.psi0)?;

    let mut params = cfg.system_params();
    params.extend(cfg.time_params());
    params.push(("n_traj".into(), tc.n_traj.to_string()));
    params.push(("dt".into(), tc.dt.to_string()));
    params.push(("seed".into(), tc.master_seed.to_string()));
    let mut table = Table::new("trajectories", params, &TRAJECTORY_COLUMNS);
    for (k, &t) in res.times.iter().enumerate() {
        let reference = evolve_normalized(&master, &rho0, t)?;
        table.push(vec![
            t.into(),
            res.p2[k].into(),
            res.stderr_p2[k].into(),
            res.survivor_fraction[k].into(),
            model.eval(t)?.into(),
            p2(&reference).into(),
        ]);
    }
    Ok(table)
}
