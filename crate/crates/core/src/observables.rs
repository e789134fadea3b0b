//! Reported quantities for qubit states and the closed-form references they
//! are checked against.
//!
//! Bloch convention: `x = 2 Re ρ₁₂`, `y = −2 Im ρ₁₂`, `z = ρ₁₁ − ρ₂₂`, so the
//! lower level |1⟩ sits at the north pole. This is the sign choice under which
//! the numerical Lindblad steady state has the negative `y` component of
//! [`ll_steady_bloch`].

use log::warn;

use crate::algebra::{CMatrix, C64};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn sub(&self, o: &Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn distance(&self, o: &Self) -> f64 {
        self.sub(o).norm()
    }
}

fn check_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!("qubit state expected, got dimension {}", rho.dim())));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > TRACE_TOL {
        return Err(Error::Validation(format!("state must have unit trace, got {tr}")));
    }
    Ok(())
}

pub fn bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    check_qubit(rho)?;
    let c = rho.get(0, 1);
    Ok(BlochVector::new(2.0 * c.re, -2.0 * c.im, (rho.get(0, 0) - rho.get(1, 1)).re))
}

/// Population of the upper level |2⟩, clipped to [0, 1].
pub fn p2(rho: &DensityMatrix) -> f64 {
    let p = rho.get(1, 1).re;
    if !(-1e-10..=1.0 + 1e-10).contains(&p) {
        warn!("upper-level population {p} outside [0, 1]; clipping");
    }
    p.clamp(0.0, 1.0)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

/// Zero-damping mixed state `(Pγt|1⟩⟨1| + |ψ₀⟩⟨ψ₀|)/(1 + Pγt)` with
/// `P = |⟨2|ψ₀⟩|²`.
pub fn zdl_state(psi0: [C64; 2], gamma: f64, t: f64) -> Result<DensityMatrix> {
    if !(gamma >= 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("need gamma >= 0 and t >= 0, got gamma = {gamma}, t = {t}")));
    }
    let pure = DensityMatrix::pure(&psi0)?;
    let p = pure.get(1, 1).re;
    let w = p * gamma * t;
    let mut m = pure.into_matrix();
    m[(0, 0)] += w;
    DensityMatrix::from_matrix(m.scale_real(1.0 / (1.0 + w)))
}

/// Polynomial decay `P₂(t) = (γt + 1/P)⁻¹`.
pub fn p2_poly(p: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("initial upper-level probability must lie in (0, 1], got {p}")));
    }
    Ok(1.0 / (gamma * t + 1.0 / p))
}

/// Lindblad steady state `(0, −2γΩ, γ²)/(γ² + 2Ω²)`.
pub fn ll_steady_bloch(gamma_d: f64, omega: f64) -> Result<BlochVector> {
    if gamma_d.is_nan() || gamma_d <= 0.0 {
        return Err(Error::Domain(format!("steady-state formula needs gamma_d > 0, got {gamma_d}")));
    }
    let den = gamma_d * gamma_d + 2.0 * omega * omega;
    Ok(BlochVector::new(0.0, -2.0 * gamma_d * omega / den, gamma_d * gamma_d / den))
}

/// Largest distance from a path point to the segment `[a, b]`.
pub fn collinearity(path: &[BlochVector], a: BlochVector, b: BlochVector) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::Validation("empty path".into()));
    }
    let ab = b.sub(&a);
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return Err(Error::Domain("degenerate segment: endpoints coincide".into()));
    }
    Ok(path
        .iter()
        .map(|p| {
            let s = (p.sub(&a).dot(&ab) / len2).clamp(0.0, 1.0);
            let foot = BlochVector::new(a.x + s * ab.x, a.y + s * ab.y, a.z + s * ab.z);
            p.distance(&foot)
        })
        .fold(0.0, f64::max))
}

/// Density matrix with the given Bloch vector.
pub fn from_bloch(b: BlochVector) -> DensityMatrix {
    let m = CMatrix::from_rows(&[
        [C64::new(0.5 * (1.0 + b.z), 0.0), C64::new(0.5 * b.x, -0.5 * b.y)],
        [C64::new(0.5 * b.x, 0.5 * b.y), C64::new(0.5 * (1.0 - b.z), 0.0)],
    ]);
    DensityMatrix::from_matrix(m).expect("finite 2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::psi0;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bloch_of_reference_states() {
        assert_eq!(bloch(&DensityMatrix::basis(2, 0)).unwrap(), BlochVector::new(0.0, 0.0, 1.0));
        assert_eq!(bloch(&DensityMatrix::maximally_mixed(2)).unwrap(), BlochVector::new(0.0, 0.0, 0.0));
        let b = bloch(&DensityMatrix::pure(&psi0()).unwrap()).unwrap();
        assert!((b.x + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b.y - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(b.z.abs() < 1e-15);
    }

    #[test]
    fn bloch_rejects_unnormalized() {
        let m = CMatrix::identity(2);
        assert!(bloch(&DensityMatrix::from_matrix(m).unwrap()).is_err());
    }

    #[test]
    fn populations() {
        assert_eq!(p2(&DensityMatrix::basis(2, 1)), 1.0);
        assert_eq!(p2(&DensityMatrix::basis(2, 0)), 0.0);
        assert!((p2(&DensityMatrix::pure(&psi0()).unwrap()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn purities() {
        assert!((purity(&DensityMatrix::pure(&psi0()).unwrap()) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zdl_mixture_purity() {
        // P γ t = 1 with P = 1/2: ρ = (|1⟩⟨1| + |Ψ₀⟩⟨Ψ₀|)/2, whose entries are
        // ρ₁₁ = 3/4, ρ₂₂ = 1/4, |ρ₁₂| = 1/4, so Tr ρ² = 9/16 + 1/16 + 2/16.
        let rho = zdl_state(psi0(), 2.0, 1.0).unwrap();
        assert!((purity(&rho) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zdl_state_limits() {
        let rho = zdl_state(psi0(), 1.0, 0.0).unwrap();
        assert!((rho.matrix() - DensityMatrix::pure(&psi0()).unwrap().matrix()).max_abs() < 1e-15);
        let ground = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        for t in [0.0, 1.0, 50.0] {
            assert_eq!(zdl_state(ground, 1.0, t).unwrap(), DensityMatrix::basis(2, 0));
        }
        assert!((p2(&zdl_state(psi0(), 1.0, 2.0).unwrap()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn polynomial_decay() {
        assert_eq!(p2_poly(0.5, 1.7, 0.0).unwrap(), 0.5);
        assert_eq!(p2_poly(0.5, 2.0, 1.0).unwrap(), 0.25);
        assert_eq!(p2_poly(1.0, 3.0, 2.0).unwrap(), 1.0 / 7.0);
        assert!(matches!(p2_poly(0.0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn steady_bloch_formula() {
        assert_eq!(ll_steady_bloch(0.8, 0.0).unwrap(), BlochVector::new(0.0, 0.0, 1.0));
        let b = ll_steady_bloch(1.0, 2.0).unwrap();
        assert!((b.y + 4.0 / 9.0).abs() < 1e-15 && (b.z - 1.0 / 9.0).abs() < 1e-15);
        let b = ll_steady_bloch(1.0, 1.0).unwrap();
        assert!((b.y + 2.0 / 3.0).abs() < 1e-15 && (b.z - 1.0 / 3.0).abs() < 1e-15);
        assert!(ll_steady_bloch(0.0, 1.0).is_err());
        assert!(ll_steady_bloch(-1.0, 1.0).is_err());
    }

    #[test]
    fn collinearity_of_convex_path() {
        let a = BlochVector::new(-0.5, 0.5, 0.0);
        let b = BlochVector::new(0.0, 0.0, 1.0);
        let path: Vec<BlochVector> = (0..=10)
            .map(|k| {
                let s = k as f64 / 10.0;
                BlochVector::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y), a.z + s * (b.z - a.z))
            })
            .collect();
        assert!(collinearity(&path, a, b).unwrap() < 1e-15);
        assert!(collinearity(&path, a, a).is_err());
        assert!(collinearity(&[], a, b).is_err());
    }

    #[test]
    fn bloch_round_trip() {
        let b = BlochVector::new(0.1, -0.3, 0.5);
        let back = bloch(&from_bloch(b)).unwrap();
        assert!(back.distance(&b) < 1e-15);
    }
}
