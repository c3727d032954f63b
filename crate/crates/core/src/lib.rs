//! Covariant (De Donder-Weyl) Hamiltonian lattice engine for complex
//! Klein-Gordon matter coupled to U(1) and SU(N) gauge fields.
//!
//! The crate evaluates the Hamiltonian densities, applies finite and
//! infinitesimal local gauge transformations, computes the Noether currents
//! they generate, and integrates the gauge-covariant field equations in
//! temporal gauge on a periodic lattice.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod gauge;
pub mod hamiltonian;
pub mod lattice;
pub mod noether;
pub mod smooth;
pub mod snapshot;
pub mod state;
pub mod tensor;

pub use error::{Error, Result};
pub use lattice::{central_diff, LatticeField, LatticeSpec};
pub use state::{GaugeFieldState, ModelParams, SeedTarget};
pub use tensor::{mat_exp_i, ComplexMatrix, ComplexVector, Metric};
