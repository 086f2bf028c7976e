//! Numerical tolerances used across the crate.
//!
//! Kept in one place so property tests and runtime checks agree on the
//! same thresholds.

/// Hermiticity check, entrywise `|rho - rho^dagger|`.
pub const HERMITIAN: f64 = 1e-12;

/// `|Tr(rho) - 1|`.
pub const TRACE: f64 = 1e-12;

/// Smallest eigenvalue accepted as nonnegative.
pub const POSITIVITY: f64 = -1e-10;

/// Singular values of a correlation matrix may exceed one by this much.
pub const SINGULAR_VALUE_SLACK: f64 = 1e-10;

/// Negative eigenvalues of `T^T T` above `-CLAMP` are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Allowed deviation of the Bell-outcome probability sum from one.
pub const OUTCOME_PROBABILITY: f64 = 1e-10;

/// Radius of the switch windows around removable singularities of the
/// closed forms (`p = 1/2`, `p = 1/sqrt(2)`).
pub const SINGULAR_WINDOW: f64 = 1e-8;

/// Closed forms with `(1-p)^2` denominators lose digits near `p = 1`;
/// inside this window the census-weighted sum is used instead.
pub const NEAR_ONE_WINDOW: f64 = 1e-5;

/// Absolute tolerance of the threshold bisection.
pub const BISECTION: f64 = 1e-9;

/// Iteration cap of the threshold bisection.
pub const BISECTION_MAX_ITER: u32 = 200;
