//! Error type shared by every module of the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vectors do not span the ambient space (rank {rank} < {n})")]
    RankDeficient { rank: usize, n: usize },

    #[error("frame operator is ill-conditioned (condition number {cond:.3e} exceeds {limit:.1e})")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("p = {0} is outside (0, 1]")]
    InvalidP(f64),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("sampling measure invalid: {0}")]
    MeasureInvalid(String),

    #[error("rows violate the measure-weighted orthonormality condition (max deviation {0:.3e})")]
    OrthogonalityViolated(f64),

    #[error("mask selects no frequencies")]
    EmptyMask,

    #[error("frame is degenerate: {skipped} of {trials} trials had negligible synthesis norm")]
    DegenerateFrame { skipped: usize, trials: usize },

    #[error("parameter out of range: {0}")]
    InvalidRange(String),

    #[error("block size {0} is invalid")]
    InvalidBlockSize(usize),

    #[error("{which} is non-positive ({value:.6e}); leading term {leading:.6e}, subtracted term {subtracted:.6e}")]
    NonPositiveConstant {
        which: &'static str,
        value: f64,
        leading: f64,
        subtracted: f64,
    },

    #[error("problem is infeasible: data residual stagnated at {residual:.6e} > epsilon = {epsilon:.6e}")]
    Infeasible { residual: f64, epsilon: f64 },

    #[error("solver did not converge: gap {gap:.3e} after {iterations} iterations")]
    NotConverged { gap: f64, iterations: usize },

    #[error("iteration did not converge after {0} steps")]
    IterationNotConverged(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
