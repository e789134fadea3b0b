//! Monte-Carlo wavefunction simulation of the three-level ladder with
//! postselection on the absence of Γ₁ = |0⟩⟨1| jumps.
//!
//! Each trajectory uses first-order jump sampling on a fixed step: with
//! probability `Σ_k γ_k ‖Γ_k ψ‖² dt` a jump occurs (a second uniform variate
//! picks the channel), otherwise the state is advanced by the no-jump
//! propagator `exp(−i H_eff dt)` with `H_eff = H − (i/2) Σ_k γ_k Γ_k†Γ_k` and
//! renormalized. A Γ₁ jump ends the trajectory; it keeps counting in the
//! survivor-fraction denominator.
//!
//! Trajectory `i` draws from its own ChaCha8 stream seeded by a splitmix64
//! hash of `(master_seed, i)`. Ensemble sums are accumulated in fixed chunks
//! of trajectories, in index order, and the chunks are combined in order, so
//! results are bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{expm, CMatrix, C64};
use crate::error::{Error, Result};
use crate::generalized::{reduce_ladder, LadderParams};
use crate::spectral::Propagator;
use crate::state::DensityMatrix;

/// Trajectories per reduction chunk. Fixed so the summation order does not
/// depend on scheduling.
const CHUNK: usize = 64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub system: LadderParams,
    /// Amplitudes on (|0⟩, |1⟩, |2⟩); must be normalized with no |0⟩ weight.
    pub psi0: [C64; 3],
    pub t_max: f64,
    pub dt: f64,
    pub n_traj: usize,
    pub master_seed: u64,
    /// Sorted times in `[0, t_max]`, snapped to the nearest step.
    pub sample_times: Vec<f64>,
}

/// Embeds qubit amplitudes on (|1⟩, |2⟩) into the ladder.
pub fn embed_qubit(psi: [C64; 2]) -> [C64; 3] {
    [ZERO, psi[0], psi[1]]
}

/// `n` evenly spaced times from 0 to `t_max` inclusive.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

impl TrajectoryConfig {
    /// Largest step allowed: `0.001 / max(γ₁, γ₂, Ω)`, unbounded when all
    /// rates vanish.
    pub fn max_dt(&self) -> f64 {
        let s = &self.system;
        let r = s.gamma_1.max(s.gamma_2).max(s.omega);
        if r > 0.0 {
            1e-3 / r
        } else {
            f64::INFINITY
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {}", self.dt)));
        }
        if self.dt > self.max_dt() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "time step {} exceeds 0.001/max(rate) = {}",
                self.dt,
                self.max_dt()
            )));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be finite and nonnegative, got {}", self.t_max)));
        }
        if self.n_traj == 0 {
            return Err(Error::Config("need at least one trajectory".into()));
        }
        let norm: f64 = self.psi0.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("initial state has squared norm {norm}")));
        }
        if self.psi0[0] != ZERO {
            return Err(Error::Config("initial state must have no |0> component".into()));
        }
        if self.sample_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("sample times must be sorted".into()));
        }
        if self.sample_times.iter().any(|&t| !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t)) {
            return Err(Error::Config("sample times must lie in [0, t_max]".into()));
        }
        Ok(())
    }

    /// Number of steps, effective step, and the step index of each sample.
    fn schedule(&self) -> (usize, f64, Vec<usize>) {
        let n_steps = if self.t_max > 0.0 { ((self.t_max / self.dt) - 1e-9).ceil().max(1.0) as usize } else { 0 };
        let dt = if n_steps > 0 { self.t_max / n_steps as f64 } else { self.dt };
        let idx = self
            .sample_times
            .iter()
            .map(|&t| ((t / dt).round() as usize).min(n_steps))
            .collect();
        (n_steps, dt, idx)
    }

    /// Qubit-block initial density matrix.
    pub fn rho0_block(&self) -> DensityMatrix {
        DensityMatrix::pure(&[self.psi0[1], self.psi0[2]]).expect("validated nonzero state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpChannel {
    /// Γ₁ = |0⟩⟨1|, the channel postselected away.
    Gamma1,
    /// Γ₂ = |1⟩⟨2|, the kept quantum jump.
    Gamma2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub channel: JumpChannel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub jumps: Vec<Jump>,
    /// State at each sample time reached before a Γ₁ jump.
    pub samples: Vec<[C64; 3]>,
    /// No Γ₁ jump over `[0, t_max]`.
    pub selected: bool,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Average of |ψ⟩⟨ψ| on {|1⟩, |2⟩} over the selected trajectories,
    /// normalized to unit trace.
    pub rho_tilde: Vec<DensityMatrix>,
    /// Mean upper-level population over the selected trajectories.
    pub p2: Vec<f64>,
    /// Standard error of `p2` from the spread over selected trajectories.
    pub stderr_p2: Vec<f64>,
    pub survivor_fraction: Vec<f64>,
    pub n_selected: Vec<usize>,
    pub n_traj: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent random stream for trajectory `index`.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(index)))
}

struct Stepper {
    no_jump: [[C64; 3]; 3],
    gamma_1: f64,
    gamma_2: f64,
    dt: f64,
}

impl Stepper {
    fn new(p: &LadderParams, dt: f64) -> Result<Self> {
        let mut h_eff = CMatrix::zeros(3, 3);
        h_eff[(1, 2)] = C64::new(p.omega / 2.0, 0.0);
        h_eff[(2, 1)] = C64::new(p.omega / 2.0, 0.0);
        h_eff[(1, 1)] = C64::new(0.0, -0.5 * p.gamma_1);
        h_eff[(2, 2)] = C64::new(0.0, -0.5 * p.gamma_2);
        let u = expm(&h_eff.scale(C64::new(0.0, -1.0)), dt)?;
        let mut no_jump = [[ZERO; 3]; 3];
        for (i, row) in no_jump.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = u[(i, j)];
            }
        }
        Ok(Self { no_jump, gamma_1: p.gamma_1, gamma_2: p.gamma_2, dt })
    }

    /// Runs one trajectory, calling `on_sample(k, ψ)` at each sample step.
    /// Returns `false` once a Γ₁ jump occurs.
    fn run<R: Rng>(
        &self,
        psi0: [C64; 3],
        n_steps: usize,
        sample_steps: &[usize],
        rng: &mut R,
        jumps: &mut Vec<Jump>,
        mut on_sample: impl FnMut(usize, &[C64; 3]),
    ) -> bool {
        let mut psi = psi0;
        let mut next = 0;
        for step in 0..=n_steps {
            while next < sample_steps.len() && sample_steps[next] == step {
                on_sample(next, &psi);
                next += 1;
            }
            if step == n_steps {
                break;
            }
            let p1 = self.gamma_1 * psi[1].norm_sqr() * self.dt;
            let p2 = self.gamma_2 * psi[2].norm_sqr() * self.dt;
            let r_jump: f64 = rng.gen();
            if r_jump < p1 + p2 {
                let r_channel: f64 = rng.gen();
                let time = (step + 1) as f64 * self.dt;
                if r_channel * (p1 + p2) < p1 {
                    jumps.push(Jump { time, channel: JumpChannel::Gamma1 });
                    return false;
                }
                jumps.push(Jump { time, channel: JumpChannel::Gamma2 });
                psi = [ZERO, psi[2] / psi[2].norm(), ZERO];
            } else {
                let u = &self.no_jump;
                let mut next_psi = [ZERO; 3];
                for (i, out) in next_psi.iter_mut().enumerate() {
                    *out = u[i][0] * psi[0] + u[i][1] * psi[1] + u[i][2] * psi[2];
                }
                let norm = next_psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut next_psi {
                    *z /= norm;
                }
                psi = next_psi;
            }
        }
        true
    }
}

pub fn simulate_trajectory(cfg: &TrajectoryConfig, index: u64) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let (n_steps, dt, sample_steps) = cfg.schedule();
    let stepper = Stepper::new(&cfg.system, dt)?;
    let mut rng = stream_rng(cfg.master_seed, index);
    let mut jumps = Vec::new();
    let mut samples = Vec::with_capacity(sample_steps.len());
    let selected = stepper.run(cfg.psi0, n_steps, &sample_steps, &mut rng, &mut jumps, |_, psi| {
        samples.push(*psi)
    });
    Ok(TrajectoryRecord { jumps, samples, selected })
}

#[derive(Clone)]
struct Accumulator {
    alive: Vec<usize>,
    rho11: Vec<f64>,
    rho22: Vec<f64>,
    rho12: Vec<C64>,
    p2_sq: Vec<f64>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self { alive: vec![0; n], rho11: vec![0.0; n], rho22: vec![0.0; n], rho12: vec![ZERO; n], p2_sq: vec![0.0; n] }
    }

    fn add(&mut self, k: usize, psi: &[C64; 3]) {
        let p2 = psi[2].norm_sqr();
        self.alive[k] += 1;
        self.rho11[k] += psi[1].norm_sqr();
        self.rho22[k] += p2;
        self.rho12[k] += psi[1] * psi[2].conj();
        self.p2_sq[k] += p2 * p2;
    }

    fn merge(&mut self, o: &Self) {
        for k in 0..self.alive.len() {
            self.alive[k] += o.alive[k];
            self.rho11[k] += o.rho11[k];
            self.rho22[k] += o.rho22[k];
            self.rho12[k] += o.rho12[k];
            self.p2_sq[k] += o.p2_sq[k];
        }
    }
}

/// Runs the ensemble on the current rayon thread pool.
pub fn run_ensemble(cfg: &TrajectoryConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let (n_steps, dt, sample_steps) = cfg.schedule();
    let stepper = Stepper::new(&cfg.system, dt)?;
    let n_samples = sample_steps.len();
    let n_chunks = cfg.n_traj.div_ceil(CHUNK);

    let chunks: Vec<Accumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::new(n_samples);
            let mut jumps = Vec::new();
            for index in c * CHUNK..((c + 1) * CHUNK).min(cfg.n_traj) {
                let mut rng = stream_rng(cfg.master_seed, index as u64);
                jumps.clear();
                stepper.run(cfg.psi0, n_steps, &sample_steps, &mut rng, &mut jumps, |k, psi| acc.add(k, psi));
            }
            acc
        })
        .collect();

    let mut total = Accumulator::new(n_samples);
    for c in &chunks {
        total.merge(c);
    }

    let n = cfg.n_traj as f64;
    let mut out = EnsembleResult {
        times: cfg.sample_times.clone(),
        rho_tilde: Vec::with_capacity(n_samples),
        p2: Vec::with_capacity(n_samples),
        stderr_p2: Vec::with_capacity(n_samples),
        survivor_fraction: Vec::with_capacity(n_samples),
        n_selected: total.alive.clone(),
        n_traj: cfg.n_traj,
    };
    for k in 0..n_samples {
        let m = total.alive[k];
        if m == 0 {
            return Err(Error::DegeneratePostselection { time: cfg.sample_times[k] });
        }
        let tr = total.rho11[k] + total.rho22[k];
        let r12 = total.rho12[k] / tr;
        let rho = CMatrix::from_rows(&[
            [C64::new(total.rho11[k] / tr, 0.0), r12],
            [r12.conj(), C64::new(total.rho22[k] / tr, 0.0)],
        ]);
        let mf = m as f64;
        let mean = total.rho22[k] / mf;
        let var = if m > 1 { ((total.p2_sq[k] - mf * mean * mean) / (mf - 1.0)).max(0.0) } else { 0.0 };
        out.rho_tilde.push(DensityMatrix::from_matrix(rho)?);
        out.p2.push(total.rho22[k] / tr);
        out.stderr_p2.push((var / mf).sqrt());
        out.survivor_fraction.push(mf / n);
    }
    Ok(out)
}

/// Runs the ensemble on a dedicated pool with `workers` threads.
pub fn run_ensemble_with_workers(cfg: &TrajectoryConfig, workers: usize) -> Result<EnsembleResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_ensemble(cfg))
}

/// Predicted selection probability `Tr[e^{−γ₁t} exp(𝓛_g t) ρ₀]`.
#[derive(Clone, Debug)]
pub struct SurvivorModel {
    global_decay: f64,
    propagator: Propagator,
    rho0: DensityMatrix,
}

impl SurvivorModel {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let rho = self.propagator.propagate(self.rho0.matrix(), t)?;
        Ok((-self.global_decay * t).exp() * rho.trace().re)
    }

    /// Binomial standard deviation of the empirical fraction over `n` trials.
    pub fn binomial_sigma(&self, t: f64, n: usize) -> Result<f64> {
        let p = self.eval(t)?.clamp(0.0, 1.0);
        Ok((p * (1.0 - p) / n as f64).sqrt())
    }
}

pub fn survivor_model(cfg: &TrajectoryConfig) -> Result<SurvivorModel> {
    if cfg.psi0[0] != ZERO {
        return Err(Error::Config("initial state must have no |0> component".into()));
    }
    let reduced = reduce_ladder(cfg.system)?;
    Ok(SurvivorModel {
        global_decay: reduced.global_decay,
        propagator: Propagator::new(&reduced.generator),
        rho0: cfg.rho0_block(),
    })
}
