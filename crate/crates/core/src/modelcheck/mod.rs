//! Numerical re-derivation of the closed forms inside explicit matrix models.
//!
//! `SL_n(R)` acts on `SL_n(R)/SO(n)` and the hyperboloid realizes `ℍⁿ_ℝ`. Hessians
//! are recovered by finite differences along geodesics `g·exp(tY)·K`, which
//! needs no ODE integration.

pub mod fd;
pub mod frame;
pub mod hyperboloid;
pub mod iwasawa;
pub mod monotonicity;
pub mod quadrature;
pub mod verify;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::hesspec::HessError;
use crate::rootdata::RootDataError;

pub use fd::{fd_hessian, Stencil};
pub use frame::{FrameLabel, TangentFrame};
pub use iwasawa::{cartan_a, iwasawa_decompose, iwasawa_h, IwasawaDecomposition};
pub use verify::{verify_exp_spectrum, verify_iwasawa_spectrum, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not in {group}: defect {defect:e} exceeds {tol:e}")]
    NotInGroup { group: Group, defect: f64, tol: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("step h = {0} outside [1e-5, 1e-2]")]
    InvalidStep(f64),
    #[error("function returned NaN at a stencil point")]
    NotANumber,
    #[error("not a point of the hyperboloid: <x,x> + 1 = {0:e}")]
    OffHyperboloid(f64),
    #[error("boundary vector is not a unit vector: |θ| - 1 = {0:e}")]
    NotUnitBoundary(f64),
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error("n = {0} outside the supported range")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Hess(#[from] HessError),
    #[error(transparent)]
    Root(#[from] RootDataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    SLn,
    SOn1,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::SLn => "SL_n",
            Group::SOn1 => "SO(n,1)",
        })
    }
}

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// A group element in a matrix model, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoint {
    entries: DMatrix<f64>,
    group: Group,
    membership_tol: f64,
}

impl MatrixPoint {
    pub fn sl(entries: DMatrix<f64>) -> Result<Self, ModelError> {
        Self::new(entries, Group::SLn, DEFAULT_MEMBERSHIP_TOL)
    }

    pub fn so_n1(entries: DMatrix<f64>) -> Result<Self, ModelError> {
        Self::new(entries, Group::SOn1, DEFAULT_MEMBERSHIP_TOL)
    }

    pub fn new(
        entries: DMatrix<f64>,
        group: Group,
        membership_tol: f64,
    ) -> Result<Self, ModelError> {
        if !entries.is_square() {
            return Err(ModelError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let defect = match group {
            Group::SLn => (entries.determinant() - 1.0).abs(),
            Group::SOn1 => {
                let j = minkowski(entries.nrows());
                (entries.transpose() * &j * &entries - j).amax()
            }
        };
        if !(defect <= membership_tol) {
            return Err(ModelError::NotInGroup {
                group,
                defect,
                tol: membership_tol,
            });
        }
        Ok(MatrixPoint {
            entries,
            group,
            membership_tol,
        })
    }

    /// Rescales an invertible matrix with positive determinant onto `SL_n`.
    pub fn sl_normalized(m: DMatrix<f64>) -> Result<Self, ModelError> {
        let det = m.determinant();
        if det <= 0.0 || !det.is_finite() {
            return Err(ModelError::Singular);
        }
        let n = m.nrows() as f64;
        Self::sl(m / det.powf(1.0 / n))
    }

    pub fn identity(n: usize, group: Group) -> Self {
        MatrixPoint {
            entries: DMatrix::identity(n, n),
            group,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn membership_tol(&self) -> f64 {
        self.membership_tol
    }
}

/// `diag(−1, 1, …, 1)` of size `n`.
pub fn minkowski(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n, n);
    j[(0, 0)] = -1.0;
    j
}
