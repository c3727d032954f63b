use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("direction {mu} out of range for a {dim}-dimensional lattice")]
    Direction { mu: usize, dim: usize },
    #[error("stencil along axis {axis} needs at least 3 sites, lattice has {extent}")]
    StencilExtent { axis: usize, extent: usize },
    #[error("plane-wave mode {0:?} outside the Nyquist range")]
    Mode(Vec<i64>),
    #[error("operation requires N = 1, state has N = {0}")]
    RequiresAbelian(usize),
    #[error("coupling q = 0 makes the gauge-potential rule singular for a non-constant gauge function")]
    SingularCoupling,
    #[error("time slice {slice} out of range (time extent {extent})")]
    Slice { slice: usize, extent: usize },
    #[error("net charge on periodic lattice: {0}")]
    NetCharge(String),
    #[error("Gauss solver did not converge after {0} iterations")]
    GaussDivergence(usize),
    #[error("time step {dt} violates the CFL bound dt <= {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("dynamics supports only D = 2 in temporal gauge: {0}")]
    UnsupportedDynamics(String),
    #[error("non-finite value detected at step {step}: {what}")]
    NonFinite { step: usize, what: String },
    #[error("mismatched initialization: {0}")]
    Mismatch(String),
    #[error("bad magic in snapshot header")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("snapshot truncated: {0}")]
    Truncated(String),
    #[error("snapshot checksum failure (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },
    #[error("param mismatch: {0}")]
    ParamMismatch(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
