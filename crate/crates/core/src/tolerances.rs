//! Central table of numerical tolerances.
//!
//! Every validation threshold in the crate lives here so that the regression
//! suite has a single place to tune. The values are grouped by the kind of
//! arithmetic that produces the error being absorbed.

/// State vectors must be normalized to this accuracy.
///
/// Constructions are short chains of exact f64 operations, so anything
/// looser than ~1e-12 hides a real bug.
pub const NORM_TOL: f64 = 1e-12;

/// Hermiticity check: max |a_ij - conj(a_ji)| allowed in an operator.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Density matrices must have trace 1 to this accuracy.
pub const TRACE_TOL: f64 = 1e-12;

/// Density matrices may have eigenvalues as low as -PSD_TOL and still count
/// as positive semidefinite; partial traces of pure states accumulate
/// rounding at this scale.
pub const PSD_TOL: f64 = 1e-10;

/// Eigensolver residual: ||A v - lambda v|| for every returned pair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Expectation values of Hermitian observables must be real to this
/// accuracy before the imaginary part is discarded.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// Probability distributions must sum to 1 to this accuracy.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Bell values may exceed the 2^((M+1)/2) ceiling by at most this much
/// before a result is rejected as corrupt.
pub const BELL_CEILING_SLACK: f64 = 1e-6;
