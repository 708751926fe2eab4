//! Simulation toolkit for the hard edge of general-beta random matrix theory.
//!
//! Three computational routes to the same family of limit laws, plus the
//! machinery to cross-validate them:
//!
//! - **`ensemble`**: the bidiagonal (β, a)-Laguerre matrix model. Samples the
//!   n×n chi-entried bidiagonal factor, extracts the smallest eigenvalues of
//!   the Gram matrix with a Sturm-sequence bisection solver, and exposes the
//!   discrete inverse kernel whose operator norm ties back to n·λ_min exactly.
//! - **`sbo`**: the limiting random diffusion generator (stochastic Bessel
//!   operator) discretized on a truncated domain over a sampled Brownian
//!   environment, with Green's-function and trace diagnostics and a
//!   deterministic Bessel-zero oracle for the zero-noise case.
//! - **`riccati`**: oscillation/explosion counting. Integrates the linear
//!   (ψ, ψ′) system and the Riccati diffusion to count eigenvalues below a
//!   spectral parameter, estimates hitting-law CDFs, runs the soft-edge
//!   q-diffusion, and executes the hard-to-soft transition experiment.
//!
//! Supporting modules: [`rng`] (deterministic splittable streams, chi/gamma
//! variates), [`brownian`] (environment paths with bridge refinement),
//! [`tridiag`] (the shared Sturm eigensolver), [`bessel`] (Bessel functions
//! of the first kind and their zeros), [`stats`] (empirical distributions,
//! Kolmogorov–Smirnov, DKW bands), [`oracle`] (independent dense reference
//! implementations used by the test suite), and [`experiments`] /
//! [`validate`] (batch runners with reproducibility manifests behind the
//! `hardedge` binary).
//!
//! Every stochastic routine draws from a [`rng::RandomStream`] keyed by
//! `(seed, stream_id)`; batch runners assign stream ids by task index, so
//! results are bit-reproducible regardless of worker count.
//!
//! See the `examples/` directory for one runnable demonstration per major
//! capability.

pub mod bessel;
pub mod brownian;
pub mod ensemble;
pub mod experiments;
pub mod oracle;
pub mod rng;
pub mod riccati;
pub mod sbo;
pub mod stats;
pub mod tridiag;
pub mod validate;

pub use brownian::EnvironmentPath;
pub use ensemble::{BidiagonalModel, DiscreteKernel, LowerBidiagonal};
pub use rng::{ChiIndex, RandomStream};
pub use sbo::{GeneratorDiscretization, RightBoundary, SpeedScaleGrid};
pub use stats::EmpiricalDistribution;
pub use tridiag::SymmetricTridiagonal;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("parameter domain: {0}")]
    Domain(String),
    /// A matrix or kernel that must be invertible is singular.
    #[error("singular: {0}")]
    Singular(String),
    /// An iterative method exhausted its iteration budget.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// The integration step cannot resolve the dynamics.
    #[error("step resolution: {0}")]
    StepResolution(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 parameter error, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Io(_) | Error::Serialize(_) => 3,
            _ => 1,
        }
    }
}
