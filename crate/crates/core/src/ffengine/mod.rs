//! Federer–Fleming deformation of mod-2 polyhedral chains on geometric simplicial
//! complexes.
//!
//! A [`GeoComplex`] carries realized vertices in `ℝ^N` and an affine chart per maximal
//! simplex. A [`PolyChain`] is a list of affine `k`-simplices ("pieces"), each stored in
//! barycentric coordinates of the smallest cell containing it. [`ff_deform`] pushes a chain
//! into the `k`-skeleton one level at a time by radial projection from a chosen center in
//! every cell.

pub mod chain;
pub mod complex;
pub mod deform;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod project;
pub mod samples;
pub mod suite;

pub use chain::{decompose, Decomposition, Piece, PolyChain};
pub use complex::{check_uniform, CellId, Chart, GeoComplex, SimplexMeasure, UniformityReport};
pub use deform::{
    ff_deform, ff_step, vanishing_check, vanishing_threshold, DeformResult, FFConfig, StepRecord,
};
pub use project::{radial_project, select_center, CenterChoice, Projection};
pub use suite::{run_suite, ChainSource, SuiteReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FFError {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid chart on simplex {cell:?}: {reason}")]
    InvalidChart { cell: CellId, reason: String },
    #[error("piece does not lie in its host {host:?} (barycentric coordinate {coord})")]
    PieceOutsideHost { host: CellId, coord: f64 },
    #[error("piece of dimension {got} in a chain of dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no cell with vertices {0:?}")]
    UnknownCell(Vec<usize>),
    #[error("center is within tolerance of a piece")]
    CenterTooClose,
    #[error("no acceptable center in {tries} tries (best ratio {best_ratio:.3e}, target {c_target:.3e})")]
    CenterSelection {
        tries: usize,
        best_ratio: f64,
        c_target: f64,
    },
    #[error("chain dimension {k} must be below the complex dimension {dim}")]
    ChainTooLarge { k: usize, dim: usize },
    #[error("piece hosted in {host:?} is not in the {m}-skeleton")]
    NotInSkeleton { host: CellId, m: usize },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
