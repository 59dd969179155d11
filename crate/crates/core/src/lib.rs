//! Computational toolkit for rank-one and `SL_n(R)/SO(n)` symmetric spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`rootdata`] builds restricted root systems with multiplicities and exact
//!   dual inner products.
//! * [`hesspec`] turns root data into closed-form Hessian spectra and k-trace
//!   functionals.
//! * [`exponents`] evaluates the monotonicity exponent `κ(k)`, the constants
//!   `C_X(d)`, the sets `Ω_d`, dimension gaps `r(X)` and the related tables.
//! * [`modelcheck`] re-derives the closed forms numerically inside explicit
//!   matrix models (Iwasawa/Cartan factorizations, finite differences,
//!   quadrature of monotonicity profiles).
//! * [`spherical`] estimates elementary spherical functions by Haar sampling
//!   and evaluates the Gindikin–Karpelevič `c`-function.
//! * [`ffengine`] implements the Federer–Fleming deformation of mod-2
//!   polyhedral chains on geometrically realized simplicial complexes.
//! * [`suites`] bundles the numerical checks into named pass/fail suites.
//!
//! Spectral code is generic over [`Scalar`]; exact table work runs on
//! [`Rational`] and numerical work on `f64`.

pub mod exponents;
pub mod ffengine;
pub mod hesspec;
pub mod modelcheck;
pub mod rootdata;
pub mod scalar;
pub mod spherical;
pub mod suites;
pub mod tables;

pub use scalar::{RealScalar, Scalar};

/// Exact rational scalar used for all root-data pairings and exponent tables.
pub type Rational = num_rational::Ratio<i64>;

/// Spectrum with exact rational eigenvalues.
pub type ExactSpectrum = hesspec::Spectrum<Rational>;

/// Spectrum with double precision eigenvalues.
pub type Spectrum64 = hesspec::Spectrum<f64>;

/// Spectrum with single precision eigenvalues.
pub type Spectrum32 = hesspec::Spectrum<f32>;

/// Default seed used by every randomized routine when the caller has no preference.
pub const DEFAULT_SEED: u64 = 0xF4_20;
