//! Vector bundles over `CP^1` glued from the charts `w` and `s = 1/w`, and
//! their pullbacks to `E`.

mod cocycle;
mod sections;
mod total_space;

use num_complex::Complex64;
use thiserror::Error;

use crate::atlas::AtlasError;
use crate::holo::HoloError;
use crate::surface::SurfaceError;

pub use cocycle::{chern_number, Cocycle, LaurentMatrix, LaurentTerm, MatrixFn};
pub use sections::{
    classify_q, section_space_dim, splitting_analysis, splitting_analysis_auto, splitting_type, triviality_check,
    ProfilePoint, SectionSpaceProblem, SolverSettings, SplittingAnalysis, SplittingType, DEFAULT_RANK_TOL,
    DEFAULT_SAMPLES, DEFAULT_TRUNCATION, TRUNCATION_PROBE,
};
pub use total_space::{canonical_divisor_check, pullback_to_e, BundlePoint, CommutingReport, TotalSpaceAtlas};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("matrix is not invertible")]
    SingularMatrix,
    #[error("transition is singular or non-finite on |w| = {radius}")]
    SingularTransition { radius: f64 },
    #[error("transition is not holomorphic at {point} (residual {residual:e})")]
    NotHolomorphic { point: Complex64, residual: f64 },
    #[error("malformed cocycle: {0}")]
    Malformed(String),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("kernel dimension is not stable: {dims:?}")]
    RankUnstable { dims: Vec<usize> },
    #[error("twist range too narrow: {0}")]
    RangeTooNarrow(String),
    #[error("degrees sum to {sum} but det winds {winding} times")]
    SumMismatch { sum: i64, winding: i64 },
    #[error("tuples have different lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sigma has order {sigma_order} along s = 0, the O(-2) section has {section_order}")]
    Mismatch { sigma_order: i64, section_order: i64 },
    #[error(transparent)]
    Holo(#[from] HoloError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}
