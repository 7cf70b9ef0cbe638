//! Process-wide numerical tolerances.
//!
//! Two levels are used throughout the crate: `exact` for identities that hold
//! up to a handful of rounding errors, and `accumulated` for quantities built
//! from longer chains of arithmetic. Both can be overridden at start-up.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_EXACT: f64 = 1e-10;
pub const DEFAULT_ACCUMULATED: f64 = 1e-9;

static EXACT: AtomicU64 = AtomicU64::new(DEFAULT_EXACT.to_bits());
static ACCUMULATED: AtomicU64 = AtomicU64::new(DEFAULT_ACCUMULATED.to_bits());

pub fn exact() -> f64 {
    f64::from_bits(EXACT.load(Ordering::Relaxed))
}

pub fn accumulated() -> f64 {
    f64::from_bits(ACCUMULATED.load(Ordering::Relaxed))
}

pub fn set_exact(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    EXACT.store(tol.to_bits(), Ordering::Relaxed);
}

pub fn set_accumulated(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    ACCUMULATED.store(tol.to_bits(), Ordering::Relaxed);
}

/// Smallest Gram-matrix eigenvalue accepted before a frame is declared degenerate.
pub const DEGENERACY: f64 = 1e-8;
