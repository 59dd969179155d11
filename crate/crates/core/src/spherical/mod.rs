//! Elementary spherical functions on `SL_n(R)/SO(n)` by Haar sampling, and the
//! Gindikin–Karpelevič `c`-function.

pub mod c_function;
pub mod estimator;
pub mod gamma;
pub mod haar;

pub use c_function::{c_function, c_rank_one, gk_product, rank_one_decay_bound};
pub use estimator::{
    h_norm, logconvexity_check, phi_lambda, phi_real, phi_zero_bound_check, LogConvexityReport,
    PhiEstimate, PhiZeroBoundReport,
};
pub use haar::{haar_orthogonal, haar_orthogonal_with};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modelcheck::ModelError;
use crate::rootdata::{Covector, DatumKey, Family, RootDataError, RootDatum};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum SphericalError {
    #[error(transparent)]
    Root(#[from] RootDataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("spherical functions are sampled on SL_n only, got {0}")]
    NotSl(Family),
    #[error("H has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("H is not in the closed positive chamber")]
    NotDominant,
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("divergent variance: stderr/value = {ratio:.3}")]
    DivergentVariance { ratio: f64, estimate: MCEstimate },
    #[error("Gamma argument {re}+{im}i is within tolerance of a pole")]
    Pole { re: f64, im: f64 },
    #[error("λ must have real or purely imaginary coordinates")]
    MixedParameter,
    #[error("parameter {0} is not finite")]
    NotFinite(f64),
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// `|value − target| ≤ sigmas·stderr`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.stderr
    }

    pub fn relative_stderr(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.stderr / self.value.abs()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// `λ = re + i·im` in simple-root coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCovector {
    pub re: Covector,
    pub im: Covector,
}

impl ComplexCovector {
    pub fn new(re: Covector, im: Covector) -> Result<Self, SphericalError> {
        if re.owner() != im.owner() {
            return Err(RootDataError::OwnerMismatch {
                left: re.owner(),
                right: im.owner(),
            }
            .into());
        }
        Ok(ComplexCovector { re, im })
    }

    pub fn real(re: Covector) -> Self {
        let im = re.scaled(crate::Rational::from_integer(0));
        ComplexCovector { re, im }
    }

    pub fn imaginary(im: Covector) -> Self {
        let re = im.scaled(crate::Rational::from_integer(0));
        ComplexCovector { re, im }
    }

    pub fn owner(&self) -> DatumKey {
        self.re.owner()
    }

    /// `t·ξ` for complex `t`, with the real and imaginary parts of `t` rationalized.
    pub fn from_f64_multiple(xi: &Covector, t: Complex64) -> Result<Self, SphericalError> {
        let q = |x: f64| crate::Rational::approximate_float(x).ok_or(SphericalError::NotFinite(x));
        let (a, b) = (q(t.re)?, q(t.im)?);
        ComplexCovector::new(xi.scaled(a), xi.scaled(b))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }
}

/// Diagonal coefficients of an `SL_n` covector as floats.
pub(crate) fn diagonal_f64(rd: &RootDatum, xi: &Covector) -> Result<Vec<f64>, SphericalError> {
    Ok(rd
        .to_diagonal(xi)?
        .iter()
        .map(|c| c.to_f64_lossy())
        .collect())
}
