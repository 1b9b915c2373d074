//! Shared numeric policy.

/// Margin used whenever a strict inequality is decided on floating point
/// data. A quantity counts as strictly above a threshold only when it
/// clears the threshold by at least this much.
pub const EPS: f64 = 1e-9;

/// Default width target for certified brackets.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Default restart count for multi-start heuristics.
pub const DEFAULT_RESTARTS: usize = 32;
