//! Numerical tolerances shared by the engine, its checks and the test suites.

/// Elementwise Hermiticity defect allowed in a density operator.
pub const HERMITIAN: f64 = 1e-12;

/// Trace deviation allowed after trace-preserving operations.
pub const TRACE: f64 = 1e-12;

/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_EIGENVALUE: f64 = -1e-10;

/// Sum of detection-pattern probabilities must equal one to this level.
pub const DETECTION_COMPLETENESS: f64 = 1e-10;

/// Elementwise agreement between the engine and the brute-force oracle.
pub const ORACLE_EQUIVALENCE: f64 = 1e-9;

/// Input ion density matrices must have unit trace to this level.
pub const NORMALIZED_INPUT: f64 = 1e-9;

/// Probabilities below this are treated as impossible events.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-300;

/// Relative tolerance of the adaptive angular quadrature.
pub const QUADRATURE_REL: f64 = 1e-6;

/// Relative step of the pseudopotential Hessian (fraction of ion height).
pub const HESSIAN_STEP: f64 = 1e-3;
