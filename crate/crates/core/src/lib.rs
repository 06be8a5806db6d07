//! RMS error of Hermite partial sums of nearly band-limited functions.
//!
//! Computes Fourier–Hermite partial sums `S_K f`, measures their error on a window
//! `[−T, T]`, and evaluates a closed-form upper bound on that error built from a
//! finite ledger of moments and tails of `f`.
//!
//! Quadrature and the Hermite basis are generic over [`Real`] (`f32`, `f64`); the rest
//! of the crate works in `f64`. The aliases below fix the common choices.
//!
//! ```
//! use hermite_rms::{theorem1_bound, GaussianMixture, QuadratureSpec};
//!
//! let f = GaussianMixture::standard_normal();
//! let b = theorem1_bound(&f, 20, 2.0, &QuadratureSpec::default()).unwrap();
//! assert!(b.total > 0.0);
//! ```

pub mod bandlimit;
pub mod bound;
pub mod hermite;
pub mod quadrature;
pub mod reproduce;
pub mod sansone;
pub mod scalar;
pub mod series;
pub mod test_functions;
pub mod verify;

pub use bandlimit::{band_edge, f_n_eval, BandLimitError, BandLimitParams};
pub use bound::{
    bound_report, coefficient_table, moment_ledger, sansone_upper, theorem1_bound, BoundBreakdown, BoundError,
    BoundReport, CoefficientTable, Functional, MomentLedger,
};
pub use quadrature::{QuadError, QuadratureSpec};
pub use sansone::{direct_sansone, M5Convention, SansoneError, SansoneParams};
pub use scalar::Real;
pub use series::{coefficients, measure_error, ErrorReport, SeriesApprox, SeriesError};
pub use test_functions::{GaussianMixture, MixtureError, TestFunction};

pub type Basis = hermite::HermiteBasis<f64>;
pub type Basis32 = hermite::HermiteBasis<f32>;
pub type Integrator = quadrature::Integrator<f64>;
pub type Integrator32 = quadrature::Integrator<f32>;
pub type Integration = quadrature::IntegrationResult<f64>;
pub type VecIntegration = quadrature::VecIntegrationResult<f64>;
pub type Kernel = hermite::KernelValue<f64>;
