//! The generalized Liouvillian of a driven qubit whose damping rate `γ_d` and
//! quantum-jump rate `γ_J` are independent, and its derivation by
//! postselecting three-level systems on the absence of one jump channel.
//!
//! In the row-major basis (ρ₁₁, ρ₁₂, ρ₂₁, ρ₂₂) with `H = (Ω/2)σₓ`:
//!
//! ```text
//!        ⎛ 0       iΩ/2    −iΩ/2   γ_J   ⎞
//! 𝓛_g =  ⎜ iΩ/2    −γ_d/2  0       −iΩ/2 ⎟
//!        ⎜ −iΩ/2   0       −γ_d/2  iΩ/2  ⎟
//!        ⎝ 0       −iΩ/2   iΩ/2    −γ_d  ⎠
//! ```

use crate::algebra::{CMatrix, C64};
use crate::error::{Error, Result};
use crate::lindblad::{build_lindblad, jump_part, Channel, Superoperator};

/// Point in the (γ_d, γ_J, Ω) parameter space. `γ_d` may be negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GLParams {
    pub gamma_d: f64,
    pub gamma_j: f64,
    pub omega: f64,
}

impl GLParams {
    pub fn new(gamma_d: f64, gamma_j: f64, omega: f64) -> Result<Self> {
        let p = Self { gamma_d, gamma_j, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_d.is_finite() && self.gamma_j.is_finite() && self.omega.is_finite()) {
            return Err(Error::Validation("parameters must be finite".into()));
        }
        if self.gamma_j < 0.0 {
            return Err(Error::Validation(format!("jump rate must be nonnegative, got {}", self.gamma_j)));
        }
        if self.omega < 0.0 {
            return Err(Error::Validation(format!("drive amplitude must be nonnegative, got {}", self.omega)));
        }
        Ok(())
    }

    /// `γ_d / γ_J`; `None` on the jump-free (non-Hermitian Hamiltonian) plane.
    pub fn alpha(&self) -> Option<f64> {
        alpha(self)
    }
}

/// Ladder system |0⟩ ← |1⟩ ← |2⟩ with Γ₁ = |0⟩⟨1| and Γ₂ = |1⟩⟨2|, driven on
/// the |1⟩ ↔ |2⟩ transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderParams {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub omega: f64,
}

impl LadderParams {
    pub fn new(gamma_1: f64, gamma_2: f64, omega: f64) -> Result<Self> {
        let p = Self { gamma_1, gamma_2, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma_1", self.gamma_1), ("gamma_2", self.gamma_2), ("omega", self.omega)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Parameters of the generator left after postselection.
    pub fn effective(&self) -> GLParams {
        GLParams { gamma_d: self.gamma_2 - self.gamma_1, gamma_j: self.gamma_2, omega: self.omega }
    }
}

/// Qubit dynamics obtained by postselection: `ρ̇ = (−global_decay + 𝓛_g) ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSystem {
    pub global_decay: f64,
    pub generator: Superoperator,
}

pub fn alpha(p: &GLParams) -> Option<f64> {
    if p.gamma_j == 0.0 {
        None
    } else {
        Some(p.gamma_d / p.gamma_j)
    }
}

/// The 4×4 generalized Liouvillian, entry by entry.
pub fn build_lg(p: GLParams) -> Superoperator {
    let h = p.omega / 2.0;
    let ih = C64::new(0.0, h);
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let m = CMatrix::from_rows(&[
        [z, ih, -ih, r(p.gamma_j)],
        [ih, r(-p.gamma_d / 2.0), z, -ih],
        [-ih, z, r(-p.gamma_d / 2.0), ih],
        [z, -ih, ih, r(-p.gamma_d)],
    ]);
    Superoperator::from_matrix(m).expect("4x4 is a qubit superoperator")
}

/// Drive `(Ω/2)(|2⟩⟨1| + |1⟩⟨2|)` on a three-level system.
fn three_level_drive(omega: f64) -> CMatrix {
    let mut h = CMatrix::zeros(3, 3);
    h[(1, 2)] = C64::new(omega / 2.0, 0.0);
    h[(2, 1)] = C64::new(omega / 2.0, 0.0);
    h
}

/// Row-major positions of the components ρ_ij with both i, j in `levels`.
fn block_indices(n: usize, levels: &[usize]) -> Vec<usize> {
    levels.iter().flat_map(|&i| levels.iter().map(move |&j| i * n + j)).collect()
}

/// Whether the components outside `levels` never feed the block, i.e. the
/// rows of the kept block vanish in every discarded column.
pub fn block_is_closed(s: &Superoperator, levels: &[usize]) -> bool {
    let n = s.dim();
    let kept = block_indices(n, levels);
    let m = s.matrix();
    kept.iter()
        .all(|&r| (0..n * n).filter(|c| !kept.contains(c)).all(|c| m[(r, c)] == C64::new(0.0, 0.0)))
}

/// Restriction of a superoperator to the density-matrix block on `levels`.
pub fn project_block(s: &Superoperator, levels: &[usize]) -> Result<Superoperator> {
    let n = s.dim();
    if levels.iter().any(|&l| l >= n) {
        return Err(Error::Dimension(format!("level index out of range for dimension {n}")));
    }
    let kept = block_indices(n, levels);
    let k = kept.len();
    let mut out = CMatrix::zeros(k, k);
    for (a, &r) in kept.iter().enumerate() {
        for (b, &c) in kept.iter().enumerate() {
            out[(a, b)] = s.matrix()[(r, c)];
        }
    }
    Superoperator::from_matrix(out)
}

/// Postselection on "no jump through `discarded`": the jump term of that
/// channel is removed from the full Lindblad generator, the result is
/// restricted to the levels {|1⟩, |2⟩}, and the uniform decay of the lower
/// level is split off as the global decay.
fn postselect(h: &CMatrix, channels: &[Channel], discarded: usize) -> Result<ReducedSystem> {
    let full = build_lindblad(h, channels)?;
    let conditioned = full.try_sub(&jump_part(&channels[discarded], h.rows())?)?;
    let levels = [1, 2];
    if !block_is_closed(&conditioned, &levels) {
        return Err(Error::Numerical("postselected block couples to discarded components".into()));
    }
    let projected = project_block(&conditioned, &levels)?;
    let global_decay = -projected.matrix()[(0, 0)].re;
    Ok(ReducedSystem { global_decay, generator: projected.shifted(global_decay) })
}

/// Ladder reduction. The generator equals `build_lg(γ₂ − γ₁, γ₂, Ω)` and the
/// global decay is γ₁.
pub fn reduce_ladder(p: LadderParams) -> Result<ReducedSystem> {
    p.validate()?;
    let channels = [
        Channel::new(p.gamma_1, CMatrix::unit(3, 0, 1))?,
        Channel::new(p.gamma_2, CMatrix::unit(3, 1, 2))?,
    ];
    postselect(&three_level_drive(p.omega), &channels, 0)
}

/// Λ-type reduction with Γ₁ = |0⟩⟨2| and Γ₂ = |1⟩⟨2|. The upper level loses
/// amplitude through both channels while only Γ₂ jumps are kept, giving
/// `build_lg(γ₁ + γ₂, γ₂, Ω)` with no global decay.
pub fn reduce_lambda(gamma_1: f64, gamma_2: f64, omega: f64) -> Result<ReducedSystem> {
    LadderParams::new(gamma_1, gamma_2, omega)?;
    let channels = [
        Channel::new(gamma_1, CMatrix::unit(3, 0, 2))?,
        Channel::new(gamma_2, CMatrix::unit(3, 1, 2))?,
    ];
    postselect(&three_level_drive(omega), &channels, 0)
}
