use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::algebra::{eig_general, CMatrix, C64};
use crate::error::{Error, Result};

/// A square complex matrix standing for a (possibly unnormalized) quantum
/// state. Qubit states use the basis order (|1⟩, |2⟩).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("density matrix must be square, got {}x{}", m.rows(), m.cols())));
        }
        if !m.is_finite() {
            return Err(Error::Validation("density matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::Validation("state vector must be nonzero and finite".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(Self(CMatrix::outer(&psi, &psi)))
    }

    /// `|k⟩⟨k|` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        Self(CMatrix::unit(n, k, k))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(CMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// Checks Hermiticity, unit trace and positivity, each within `tol`.
    pub fn validate_physical(&self, tol: f64) -> Result<()> {
        let herr = self.0.hermiticity_error();
        if herr > tol {
            return Err(Error::Validation(format!("state is not Hermitian (error {herr:.3e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > tol {
            return Err(Error::Validation(format!("state trace is {tr}, expected 1")));
        }
        let low = self.min_eigenvalue()?;
        if low < -tol {
            return Err(Error::Validation(format!("state is not positive semidefinite (eigenvalue {low:.3e})")));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let h = self.0.hermitian_part();
        if h.rows() == 2 {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(0, 1)].norm();
            return Ok(0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt());
        }
        Ok(eig_general(&h)?.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
    }

    /// Trace distance `½‖a − b‖₁` between two Hermitian matrices.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let d = self.0.try_sub(&other.0)?.hermitian_part();
        if d.rows() == 2 {
            let a = d[(0, 0)].re;
            let e = d[(1, 1)].re;
            let b = d[(0, 1)].norm();
            let mid = 0.5 * (a + e);
            let rad = (0.25 * (a - e) * (a - e) + b * b).sqrt();
            return Ok(0.5 * ((mid + rad).abs() + (mid - rad).abs()));
        }
        Ok(0.5 * eig_general(&d)?.eigenvalues.iter().map(|z| z.re.abs()).sum::<f64>())
    }
}

/// The default initial state (|1⟩ + e^{i3π/4}|2⟩)/√2 used by the figure
/// scenarios.
pub fn psi0() -> [C64; 2] {
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::from_polar(FRAC_1_SQRT_2, 0.75 * PI)]
}
