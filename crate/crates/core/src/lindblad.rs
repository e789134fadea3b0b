//! Liouvillian superoperators in the row-major vectorization.
//!
//! With `vec_row(A ρ B) = (A ⊗ Bᵀ) vec_row(ρ)` the Lindblad generator
//!
//! ```text
//! L ρ = −i[H, ρ] + Σ_k γ_k (Γ_k ρ Γ_k† − ½{Γ_k†Γ_k, ρ})
//! ```
//!
//! becomes the matrix
//!
//! ```text
//! −i(H ⊗ I − I ⊗ Hᵀ) + Σ_k γ_k [Γ_k ⊗ Γ_k* − ½(Γ_k†Γ_k ⊗ I + I ⊗ (Γ_k†Γ_k)ᵀ)].
//! ```
//!
//! The anti-Hermitian (damping) and jump parts are also exposed separately so
//! generators with unequal damping and jump rates can be assembled.

use crate::algebra::{kron, unvec_row, vec_row, CMatrix, C64, I};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// One dissipation channel: a rate and its Lindblad operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    rate: f64,
    operator: CMatrix,
}

impl Channel {
    pub fn new(rate: f64, operator: CMatrix) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::Validation(format!("channel rate must be finite and nonnegative, got {rate}")));
        }
        if !operator.is_square() {
            return Err(Error::Dimension("Lindblad operator must be square".into()));
        }
        Ok(Self { rate, operator })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn operator(&self) -> &CMatrix {
        &self.operator
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vectorization {
    RowMajor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
    convention: Vectorization,
}

impl Superoperator {
    /// Wraps an n²×n² matrix acting on row-major vectorized n×n matrices.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("superoperator matrix must be square".into()));
        }
        let dim = (matrix.rows() as f64).sqrt().round() as usize;
        if dim * dim != matrix.rows() {
            return Err(Error::Dimension(format!("superoperator size {} is not a perfect square", matrix.rows())));
        }
        Ok(Self { dim, matrix, convention: Vectorization::RowMajor })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn convention(&self) -> Vectorization {
        self.convention
    }

    /// `dρ/dt = unvec(S · vec(ρ))`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "superoperator on dimension {} applied to a {}x{} matrix",
                self.dim,
                rho.rows(),
                rho.cols()
            )));
        }
        unvec_row(&self.matrix.matvec(&vec_row(rho)?))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Self::from_matrix(self.matrix.try_add(&other.matrix)?)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Self::from_matrix(self.matrix.try_sub(&other.matrix)?)
    }

    /// `S + shift·𝟙`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..m.rows() {
            m[(i, i)] += shift;
        }
        Self { dim: self.dim, matrix: m, convention: self.convention }
    }
}

fn check_dim(op: &CMatrix, n: usize, what: &str) -> Result<()> {
    if op.rows() != n || op.cols() != n {
        return Err(Error::Dimension(format!("{what} is {}x{}, system dimension is {n}", op.rows(), op.cols())));
    }
    Ok(())
}

/// `−i(H ⊗ I − I ⊗ Hᵀ)`.
pub fn hamiltonian_part(h: &CMatrix) -> Result<Superoperator> {
    if !h.is_square() {
        return Err(Error::Dimension("Hamiltonian must be square".into()));
    }
    let herr = h.hermiticity_error();
    if herr > HERMITIAN_TOL {
        return Err(Error::Validation(format!("Hamiltonian is not Hermitian (error {herr:.3e})")));
    }
    let id = CMatrix::identity(h.rows());
    let comm = &kron(h, &id) - &kron(&id, &h.transpose());
    Superoperator::from_matrix(comm.scale(-I))
}

/// `−½ γ (Γ†Γ ⊗ I + I ⊗ (Γ†Γ)ᵀ)`, i.e. `−i{γÂ, ·}` with `Â = −iΓ†Γ/2`.
pub fn damping_part(channel: &Channel, n: usize) -> Result<Superoperator> {
    check_dim(&channel.operator, n, "Lindblad operator")?;
    let id = CMatrix::identity(n);
    let gg = &channel.operator.adjoint() * &channel.operator;
    let anti = &kron(&gg, &id) + &kron(&id, &gg.transpose());
    Superoperator::from_matrix(anti.scale_real(-0.5 * channel.rate))
}

/// `γ Γ ⊗ Γ*`, the quantum-jump term `γ Γ ρ Γ†`.
pub fn jump_part(channel: &Channel, n: usize) -> Result<Superoperator> {
    check_dim(&channel.operator, n, "Lindblad operator")?;
    Superoperator::from_matrix(kron(&channel.operator, &channel.operator.conj()).scale_real(channel.rate))
}

/// Liouvillian with separately specified damping and jump channels:
/// `−i[H, ρ] − i{Σ γ_k Â_k, ρ} + Σ γ_j 𝒥(Γ_j)ρ`.
pub fn build_liouvillian(h: &CMatrix, damping: &[Channel], jumps: &[Channel]) -> Result<Superoperator> {
    let n = h.rows();
    let mut s = hamiltonian_part(h)?;
    for ch in damping {
        s = s.try_add(&damping_part(ch, n)?)?;
    }
    for ch in jumps {
        s = s.try_add(&jump_part(ch, n)?)?;
    }
    Ok(s)
}

/// Lindblad generator: every channel contributes damping and jumps at the
/// same rate.
pub fn build_lindblad(h: &CMatrix, channels: &[Channel]) -> Result<Superoperator> {
    build_liouvillian(h, channels, channels)
}

/// `vec_row(𝟙)† S`; zero for trace-preserving generators.
pub fn trace_functional(s: &Superoperator) -> Vec<C64> {
    let n = s.dim;
    let m = s.matrix();
    (0..m.cols())
        .map(|col| (0..n).map(|k| m[(k * n + k, col)]).sum())
        .collect()
}
