//! Spectral analysis and time evolution of qubit Liouvillians.
//!
//! When the generator is diagonalizable the propagated state is
//! `ρ(t) = Σ_i e^{λ_i t} Tr(σ_i† ρ(0)) ρ_i` with biorthonormal right (ρ_i) and
//! left (σ_i) eigenmatrices. Near exceptional points that expansion breaks
//! down, and propagation falls back to the Padé matrix exponential.

use crate::algebra::{dot_conj, eig_general, expm, unvec_row, vec_norm, vec_row, CMatrix, EigenResult, C64};
use crate::error::{Error, Result};
use crate::lindblad::Superoperator;
use crate::state::DensityMatrix;

/// Traces below this are treated as an empty postselected ensemble.
pub const TRACE_FLOOR: f64 = 1e-300;

/// Tolerance for the physicality checks on initial states.
pub const STATE_TOL: f64 = 1e-10;

const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

/// Eigenvalues and biorthonormal eigenmatrices of a 4×4 Liouvillian.
///
/// `λ₀…λ₂` are ordered by descending real part (ties by descending imaginary
/// part). When the generator has the decoupled coherence mode
/// `ρ₁₂ + ρ₂₁` of a σₓ-driven qubit, its eigenvalue (−γ_d/2) is placed last
/// as `λ₃`; otherwise all four follow the descending order.
#[derive(Clone, Debug)]
pub struct LiouvillianSpectrum {
    pub eigenvalues: Vec<C64>,
    pub right_matrices: Vec<CMatrix>,
    pub left_matrices: Vec<CMatrix>,
    pub defective: bool,
    pub min_gap: f64,
    pub vector_condition: f64,
}

pub fn decompose(l: &Superoperator) -> Result<LiouvillianSpectrum> {
    if l.dim() != 2 {
        return Err(Error::Dimension(format!("qubit Liouvillian expected, got dimension {}", l.dim())));
    }
    let eig = eig_general(l.matrix())?;
    let mut order: Vec<usize> = (0..4).collect();
    if let Some(k) = decoupled_mode_index(l.matrix(), &eig) {
        order.retain(|&i| i != k);
        order.push(k);
    }
    let right_matrices = order.iter().map(|&i| unvec_row(&eig.right(i))).collect::<Result<Vec<_>>>()?;
    let left_matrices = order.iter().map(|&i| unvec_row(&eig.left(i))).collect::<Result<Vec<_>>>()?;
    Ok(LiouvillianSpectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        right_matrices,
        left_matrices,
        defective: eig.defective,
        min_gap: eig.min_gap,
        vector_condition: eig.vector_condition,
    })
}

/// Index of the eigenpair belonging to the mode (0, 1, 1, 0)/√2, if the
/// generator leaves that mode invariant.
fn decoupled_mode_index(m: &CMatrix, eig: &EigenResult) -> Option<usize> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)];
    let lu = m.matvec(&u);
    let lambda = dot_conj(&u, &lu);
    let residual: Vec<C64> = lu.iter().zip(&u).map(|(a, b)| a - lambda * b).collect();
    let scale = m.norm1().max(1.0);
    if vec_norm(&residual) > 1e-12 * scale {
        return None;
    }
    let tol = 1e-6 * eig.spectral_radius().max(1.0);
    (0..eig.eigenvalues.len())
        .filter(|&i| (eig.eigenvalues[i] - lambda).norm() <= tol)
        .max_by(|&a, &b| {
            let oa = dot_conj(&u, &eig.right(a)).norm();
            let ob = dot_conj(&u, &eig.right(b)).norm();
            oa.total_cmp(&ob)
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagationPath {
    /// Biorthonormal eigen-expansion.
    Spectral,
    /// Padé matrix exponential, used for defective generators.
    Expm,
}

/// Propagator `ρ ↦ exp(L t) ρ` for a fixed generator, choosing the spectral
/// expansion when the generator is safely diagonalizable.
#[derive(Clone, Debug)]
pub struct Propagator {
    generator: Superoperator,
    eig: Option<EigenResult>,
}

impl Propagator {
    pub fn new(l: &Superoperator) -> Self {
        let eig = eig_general(l.matrix()).ok().filter(|e| !e.defective);
        Self { generator: l.clone(), eig }
    }

    /// Always uses the matrix exponential.
    pub fn expm_only(l: &Superoperator) -> Self {
        Self { generator: l.clone(), eig: None }
    }

    pub fn path(&self) -> PropagationPath {
        if self.eig.is_some() {
            PropagationPath::Spectral
        } else {
            PropagationPath::Expm
        }
    }

    pub fn generator(&self) -> &Superoperator {
        &self.generator
    }

    pub fn propagate(&self, rho0: &CMatrix, t: f64) -> Result<CMatrix> {
        let v0 = vec_row(rho0)?;
        if v0.len() != self.generator.matrix().rows() {
            return Err(Error::Dimension("state and generator dimensions differ".into()));
        }
        let v = match &self.eig {
            Some(eig) => {
                let mut acc = vec![C64::new(0.0, 0.0); v0.len()];
                for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
                    let coeff = (lambda * t).exp() * dot_conj(&eig.left(i), &v0);
                    for (a, r) in acc.iter_mut().zip(eig.right(i)) {
                        *a += coeff * r;
                    }
                }
                acc
            }
            None => expm(self.generator.matrix(), t)?.matvec(&v0),
        };
        let out = unvec_row(&v).map_err(|_| Error::Numerical(format!("evolution diverged at t = {t}")))?;
        Ok(out)
    }
}

fn check_initial(rho0: &DensityMatrix, l: &Superoperator) -> Result<()> {
    if rho0.dim() != l.dim() {
        return Err(Error::Dimension(format!(
            "initial state has dimension {}, generator acts on dimension {}",
            rho0.dim(),
            l.dim()
        )));
    }
    rho0.validate_physical(STATE_TOL)
}

/// Unnormalized `exp(L t) ρ₀`.
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_initial(rho0, l)?;
    DensityMatrix::from_matrix(Propagator::new(l).propagate(rho0.matrix(), t)?)
}

/// Unnormalized evolution by the matrix exponential alone.
pub fn evolve_expm(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_initial(rho0, l)?;
    DensityMatrix::from_matrix(Propagator::expm_only(l).propagate(rho0.matrix(), t)?)
}

/// Divides by the trace and removes the anti-Hermitian round-off.
pub fn normalize(rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let tr = rho.trace();
    if tr.re.is_nan() || tr.re.abs() <= TRACE_FLOOR {
        return Err(Error::DegeneratePostselection { time: t });
    }
    DensityMatrix::from_matrix(rho.matrix().scale_real(1.0 / tr.re).hermitian_part())
}

/// `exp(L t) ρ₀ / Tr[exp(L t) ρ₀]`.
pub fn evolve_normalized(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    normalize(&evolve(l, rho0, t)?, t)
}

/// Unnormalized states on a time grid, sharing one decomposition.
pub fn evolve_grid(l: &Superoperator, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    check_initial(rho0, l)?;
    let prop = Propagator::new(l);
    times
        .iter()
        .map(|&t| DensityMatrix::from_matrix(prop.propagate(rho0.matrix(), t)?))
        .collect()
}

pub fn evolve_normalized_grid(l: &Superoperator, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    evolve_grid(l, rho0, times)?
        .iter()
        .zip(times)
        .map(|(rho, &t)| normalize(rho, t))
        .collect()
}

/// Fixed point of the unnormalized flow, present when `λ₀ = 0`.
pub fn steady_state(l: &Superoperator) -> Result<Option<DensityMatrix>> {
    let spec = decompose(l)?;
    if spec.eigenvalues[0].norm() > ZERO_EIGENVALUE_TOL {
        return Ok(None);
    }
    Ok(Some(trace_normalized(&spec.right_matrices[0])?))
}

/// Long-time attractor of the normalized flow: the trace-normalized right
/// eigenmatrix of the slowest-decaying (or fastest-growing) mode.
pub fn dominant_mode(l: &Superoperator) -> Result<DensityMatrix> {
    let spec = decompose(l)?;
    trace_normalized(&spec.right_matrices[0])
}

fn trace_normalized(m: &CMatrix) -> Result<DensityMatrix> {
    let tr = m.trace();
    if tr.norm() < 1e-12 * m.max_abs() {
        return Err(Error::Numerical("dominant mode is traceless".into()));
    }
    DensityMatrix::from_matrix(m.scale(tr.inv()).hermitian_part())
}

/// Rates entering the exceptional-point condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EPQuery {
    pub gamma_d: f64,
    pub gamma_j: f64,
}

/// `108 γ_J² Ω⁴ + (4Ω² − γ_d²)³`; zero on the exceptional-point surface.
pub fn ep_residual(q: EPQuery, omega: f64) -> f64 {
    let w2 = omega * omega;
    let inner = 4.0 * w2 - q.gamma_d * q.gamma_d;
    108.0 * q.gamma_j * q.gamma_j * w2 * w2 + inner * inner * inner
}

/// All Ω ≥ 0 on the exceptional-point surface, ascending.
///
/// Solves `64x³ + (108γ_J² − 48γ_d²)x² + 12γ_d⁴x − γ_d⁶ = 0` for `x = Ω²`
/// through the eigenvalues of the companion matrix. Only even powers of γ_d
/// enter, so the result is bitwise symmetric under γ_d → −γ_d.
pub fn ep_locus(q: EPQuery) -> Vec<f64> {
    let d2 = q.gamma_d * q.gamma_d;
    let d4 = d2 * d2;
    let d6 = d4 * d2;
    let coeffs = [64.0, 108.0 * q.gamma_j * q.gamma_j - 48.0 * d2, 12.0 * d4, -d6];
    let roots = cubic_roots(coeffs);
    let mut out: Vec<f64> = roots
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.norm()))
        .filter(|z| z.re >= -1e-12 * (1.0 + z.norm()))
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    out
}

/// Roots of a cubic with nonzero leading coefficient. Roots that the
/// companion eigensolver splits apart at a multiple root are merged into
/// their mean, which is accurate even where the individual roots are not.
fn cubic_roots(c: [f64; 4]) -> Vec<C64> {
    let (a2, a1, a0) = (c[1] / c[0], c[2] / c[0], c[3] / c[0]);
    let r = |x: f64| C64::new(x, 0.0);
    let z = r(0.0);
    let companion = CMatrix::from_rows(&[[r(-a2), r(-a1), r(-a0)], [r(1.0), z, z], [z, r(1.0), z]]);
    let raw = match eig_general(&companion) {
        Ok(e) => e.eigenvalues,
        Err(_) => return Vec::new(),
    };

    let mut cluster: Vec<usize> = (0..raw.len()).collect();
    for i in 0..raw.len() {
        for j in i + 1..raw.len() {
            let scale = 1.0 + raw[i].norm().max(raw[j].norm());
            if (raw[i] - raw[j]).norm() <= 1e-4 * scale {
                let (from, to) = (cluster[j], cluster[i]);
                for c in cluster.iter_mut() {
                    if *c == from {
                        *c = to;
                    }
                }
            }
        }
    }
    let mut roots = Vec::new();
    for id in 0..raw.len() {
        let members: Vec<C64> = (0..raw.len()).filter(|&k| cluster[k] == id).map(|k| raw[k]).collect();
        if !members.is_empty() {
            roots.push(members.iter().sum::<C64>() / members.len() as f64);
        }
    }
    roots
}

/// Distance of a qubit Liouvillian from an exceptional point of the λ₁, λ₂
/// pair: their eigenvalue gap and the overlap `|⟨ρ̂₁, ρ̂₂⟩|` of their
/// normalized right eigenmatrices (1 at coalescence).
pub fn ep_distance(l: &Superoperator) -> Result<(f64, f64)> {
    let spec = decompose(l)?;
    let gap = (spec.eigenvalues[1] - spec.eigenvalues[2]).norm();
    let r1 = spec.right_matrices[1].as_slice();
    let r2 = spec.right_matrices[2].as_slice();
    let coalescence = dot_conj(r1, r2).norm() / (vec_norm(r1) * vec_norm(r2));
    Ok((gap, coalescence.min(1.0)))
}
