//! Open-system dynamics of a driven qubit whose damping rate and quantum-jump
//! rate are tuned independently.
//!
//! The crate is organized bottom-up:
//!
//! * [`algebra`]: dense complex matrices, eigendecomposition, `expm`.
//! * [`lindblad`]: superoperators in the row-major vectorization.
//! * [`generalized`]: the 4×4 generalized Liouvillian and its derivation from
//!   three-level systems by postselection.
//! * [`spectral`]: biorthonormal spectral evolution, steady states and the
//!   exceptional-point locus.
//! * [`trajectories`]: Monte-Carlo wavefunction ensembles with postselection.
//! * [`observables`]: Bloch vectors, populations and closed-form references.

pub mod algebra;
pub mod error;
pub mod generalized;
pub mod lindblad;
pub mod observables;
pub mod spectral;
pub mod state;
pub mod trajectories;

pub use algebra::{CMatrix, C64};
pub use error::{Error, Result};
pub use generalized::{GLParams, LadderParams, ReducedSystem};
pub use lindblad::{Channel, Superoperator};
pub use observables::BlochVector;
pub use state::DensityMatrix;
