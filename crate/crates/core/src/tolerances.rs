//! Named thresholds shared across modules.

/// Verdict tolerance for predicates on exact-jet surfaces.
pub const EXACT_PREDICATE: f64 = 1e-10;
/// Verdict tolerance for predicates on finite-difference surfaces.
pub const FD_PREDICATE: f64 = 1e-6;
/// Metric factor below this marks a degenerate (branch) point.
pub const DEGENERATE_METRIC: f64 = 1e-12;
/// |f_k|^2 below this terminates a harmonic sequence.
pub const SEQUENCE_DEGENERATE: f64 = 1e-12;
/// Isotropy test threshold on normalized inner products.
pub const ISOTROPY: f64 = 1e-6;
/// Integrability residual above which horizontalization is refused.
pub const NON_INTEGRABLE: f64 = 1e-4;
/// Loop holonomy defect allowed when horizontalizing.
pub const HOLONOMY: f64 = 1e-6;
/// Gauge ODE step as a fraction of the cell size.
pub const GAUGE_STEP_FRACTION: f64 = 1e-3;
/// Exponent sums a_i + a_j closer than this share a group in the scan.
pub const SCAN_CLUSTER: f64 = 1e-9;
/// W entries below this are reported as forced zero.
pub const SCAN_ENTRY: f64 = 1e-8;
/// Relative singular-value floor for numerical rank.
pub const RANK: f64 = 1e-8;
