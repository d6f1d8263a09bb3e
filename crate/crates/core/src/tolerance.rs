use serde::{Deserialize, Serialize};

/// Numerical thresholds used throughout the crate.
///
/// Every rank, signature and rounding decision goes through one of these
/// values. Values inside the ambiguity band around a threshold (one decade on
/// each side) are reported as [`crate::Error::IllConditioned`] instead of being
/// classified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Absolute max-norm tolerance for structural invariants (symplecticity,
    /// unitarity, symmetry, isotropy, plane equality).
    pub tol_sym: f64,
    /// Relative singular-value threshold for coranks; scaled by
    /// `max(1, largest singular value)`.
    pub tol_rank: f64,
    /// Relative eigenvalue threshold for signatures; scaled by
    /// `max(1, largest |eigenvalue|)`.
    pub tol_sig: f64,
    /// Maximum distance to the nearest integer accepted when rounding an index.
    pub tol_round: f64,
    /// Tolerance on `|det w - e^{i theta}|` for points of the universal cover.
    pub tol_phase: f64,
    /// Largest max-norm change of `w` accepted between consecutive samples
    /// of a path that has a generator; larger steps are bisected even when
    /// the phase step looks small, since a fast stretch can hide a full turn.
    pub max_step: f64,
    /// Maximum bisection depth when refining a generated path.
    pub refine_depth: u32,
    /// Maximum number of samples a single path lift may produce.
    pub max_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sym: 1e-10,
            tol_rank: 1e-8,
            tol_sig: 1e-9,
            tol_round: 1e-6,
            tol_phase: 1e-9,
            max_step: 0.25,
            refine_depth: 40,
            max_samples: 1_000_000,
        }
    }
}

/// Outcome of comparing a magnitude against a threshold with a one-decade
/// ambiguity band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Band {
    Below,
    Above,
    Ambiguous,
}

pub(crate) fn classify(value: f64, threshold: f64) -> Band {
    let v = value.abs();
    if v <= threshold / 10.0 {
        Band::Below
    } else if v >= threshold * 10.0 {
        Band::Above
    } else {
        Band::Ambiguous
    }
}
