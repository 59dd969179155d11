//! Closed-form Hessian spectra and k-trace functionals.
//!
//! Linear and exponential Iwasawa spectra are exact (rational); radial
//! spectra in Cartan coordinates involve hyperbolic functions and are
//! evaluated in any [`RealScalar`].

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::rootdata::{Covector, RootDataError, RootDatum, RootLabel};
use crate::scalar::lit;
use crate::{Rational, RealScalar, Scalar};

/// Below this radius the coth terms are replaced by their limits.
pub const SINGULAR_RADIUS: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HessError {
    #[error(transparent)]
    Root(#[from] RootDataError),
    #[error("k = {k} outside 1..={total}")]
    KOutOfRange { k: usize, total: usize },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("radial spectrum requires a rank-one datum, got {0}")]
    NotRankOne(crate::rootdata::Family),
    #[error("profile has u'(0) = {0} != 0, the Hessian is singular at the origin")]
    SingularProfile(f64),
}

/// Multiset of eigenvalues, sorted descending, equal values merged.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    entries: Vec<(T, usize)>,
    total_dim: usize,
}

fn desc<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    b.partial_cmp(a).unwrap_or(Ordering::Equal)
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(entries: impl IntoIterator<Item = (T, usize)>) -> Self {
        let mut raw: Vec<(T, usize)> = entries.into_iter().filter(|(_, m)| *m > 0).collect();
        raw.sort_by(|a, b| desc(&a.0, &b.0));
        let mut merged: Vec<(T, usize)> = Vec::with_capacity(raw.len());
        for (v, m) in raw {
            match merged.last_mut() {
                Some((last, lm)) if *last == v => *lm += m,
                _ => merged.push((v, m)),
            }
        }
        let total_dim = merged.iter().map(|(_, m)| m).sum();
        Spectrum {
            entries: merged,
            total_dim,
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = T>) -> Self {
        Self::new(values.into_iter().map(|v| (v, 1)))
    }

    pub fn entries(&self) -> &[(T, usize)] {
        &self.entries
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// All eigenvalues with repetition, descending.
    pub fn values(&self) -> Vec<T> {
        self.entries
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v.clone(), *m))
            .collect()
    }

    pub fn multiplicity_of(&self, value: &T) -> usize {
        self.entries
            .iter()
            .find(|(v, _)| v == value)
            .map_or(0, |(_, m)| *m)
    }

    fn check_k(&self, k: usize) -> Result<(), HessError> {
        if k == 0 || k > self.total_dim {
            return Err(HessError::KOutOfRange {
                k,
                total: self.total_dim,
            });
        }
        Ok(())
    }

    fn sum_first(entries: impl Iterator<Item = (T, usize)>, mut k: usize) -> T {
        let mut acc = T::zero();
        for (v, m) in entries {
            if k == 0 {
                break;
            }
            let take = m.min(k);
            acc = acc + v.times(take);
            k -= take;
        }
        acc
    }

    /// Sum of the `k` smallest eigenvalues.
    pub fn min_trace(&self, k: usize) -> Result<T, HessError> {
        self.check_k(k)?;
        Ok(Self::sum_first(self.entries.iter().rev().cloned(), k))
    }

    /// Sum of the `k` largest eigenvalues.
    pub fn tau_k(&self, k: usize) -> Result<T, HessError> {
        self.check_k(k)?;
        Ok(Self::sum_first(self.entries.iter().cloned(), k))
    }

    pub fn trace(&self) -> T {
        Self::sum_first(self.entries.iter().cloned(), self.total_dim)
    }

    pub fn max(&self) -> Option<&T> {
        self.entries.first().map(|(v, _)| v)
    }

    pub fn min(&self) -> Option<&T> {
        self.entries.last().map(|(v, _)| v)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Spectrum<U> {
        Spectrum::new(self.entries.iter().map(|(v, m)| (f(v), *m)))
    }

    pub fn scaled(&self, s: &T) -> Spectrum<T> {
        self.map(|v| v.clone() * s.clone())
    }

    /// Adds `mult` copies of `value`.
    pub fn with(&self, value: T, mult: usize) -> Spectrum<T> {
        Spectrum::new(self.entries.iter().cloned().chain([(value, mult)]))
    }

    pub fn to_f64(&self) -> Spectrum<f64> {
        self.map(Scalar::to_f64_lossy)
    }

    /// JSON array of `{eigenvalue, mult}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(
            self.entries
                .iter()
                .map(|(v, m)| SpectrumEntry {
                    eigenvalue: v.to_f64_lossy(),
                    mult: *m,
                })
                .collect::<Vec<_>>(),
        )
        .expect("spectrum serializes")
    }
}

impl Spectrum<Rational> {
    /// Like [`Spectrum::to_json`] but with eigenvalues as exact `"p/q"` strings.
    pub fn to_exact_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|(v, m)| serde_json::json!({ "eigenvalue": v.to_string(), "mult": m }))
                .collect(),
        )
    }
}

#[derive(Serialize)]
struct SpectrumEntry {
    eigenvalue: f64,
    mult: usize,
}

pub fn min_trace<T: Scalar>(spec: &Spectrum<T>, k: usize) -> Result<T, HessError> {
    spec.min_trace(k)
}

pub fn tau_k<T: Scalar>(spec: &Spectrum<T>, k: usize) -> Result<T, HessError> {
    spec.tau_k(k)
}

/// Hessian of `ξ∘H` in an orthonormal Iwasawa frame: `{0 × rank} ∪ {−⟨α,ξ⟩ × m_α}`.
pub fn iwasawa_linear_spectrum(
    rd: &RootDatum,
    xi: &Covector,
) -> Result<Spectrum<Rational>, HessError> {
    let mut entries = vec![(Rational::from_integer(0), rd.rank())];
    for r in rd.positive_roots() {
        entries.push((-rd.pair(&r.root, xi)?, r.mult as usize));
    }
    Ok(Spectrum::new(entries))
}

/// Eigenvalues of `Hess(e^{ξH}) / e^{ξH}`: `{‖ξ‖², 0 × (rank−1)} ∪ {−⟨α,ξ⟩ × m_α}`.
pub fn iwasawa_exp_spectrum(
    rd: &RootDatum,
    xi: &Covector,
) -> Result<Spectrum<Rational>, HessError> {
    let mut entries = vec![
        (rd.norm_sq(xi)?, 1),
        (Rational::from_integer(0), rd.rank() - 1),
    ];
    for r in rd.positive_roots() {
        entries.push((-rd.pair(&r.root, xi)?, r.mult as usize));
    }
    Ok(Spectrum::new(entries))
}

/// A radial function `u` of the distance to the basepoint, with two derivatives.
pub trait RadialProfile<F> {
    fn value(&self, t: F) -> F;
    fn d1(&self, t: F) -> F;
    fn d2(&self, t: F) -> F;
}

/// `u(t) = t²/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfSquare;

impl<F: RealScalar> RadialProfile<F> for HalfSquare {
    fn value(&self, t: F) -> F {
        t * t / lit(2.0)
    }
    fn d1(&self, t: F) -> F {
        t
    }
    fn d2(&self, _t: F) -> F {
        F::one()
    }
}

/// `u(t) = t`, the distance to the basepoint.
#[derive(Clone, Copy, Debug, Default)]
pub struct Distance;

impl<F: RealScalar> RadialProfile<F> for Distance {
    fn value(&self, t: F) -> F {
        t
    }
    fn d1(&self, _t: F) -> F {
        F::one()
    }
    fn d2(&self, _t: F) -> F {
        F::zero()
    }
}

/// The smoothed distance `𝔣(t) = log(2 cosh(2at)) / (2a)` with `a = ‖α‖`.
#[derive(Clone, Copy, Debug)]
pub struct SmoothedDistance<F> {
    pub alpha_norm: F,
}

impl<F: RealScalar> SmoothedDistance<F> {
    pub fn new(alpha_norm: F) -> Self {
        SmoothedDistance { alpha_norm }
    }

    /// Inverse on `[log(2)/(2a), ∞)`.
    pub fn inverse(&self, y: F) -> F {
        let a = self.alpha_norm;
        let two = lit::<F>(2.0);
        ((two * a * y).exp() / two).acosh() / (two * a)
    }
}

impl<F: RealScalar> RadialProfile<F> for SmoothedDistance<F> {
    fn value(&self, t: F) -> F {
        // log(2cosh x) = |x| + log(1 + e^{-2|x|}), stable for large x.
        let a = self.alpha_norm;
        let x = (lit::<F>(2.0) * a * t).abs();
        (x + (-(x + x)).exp().ln_1p()) / (lit::<F>(2.0) * a)
    }
    fn d1(&self, t: F) -> F {
        (lit::<F>(2.0) * self.alpha_norm * t).tanh()
    }
    fn d2(&self, t: F) -> F {
        let a = self.alpha_norm;
        let c = (lit::<F>(2.0) * a * t).cosh();
        lit::<F>(2.0) * a / (c * c)
    }
}

fn rank_one_norm<F: RealScalar>(rd: &RootDatum) -> Result<F, HessError> {
    if !rd.family().is_rank_one() {
        return Err(HessError::NotRankOne(rd.family()));
    }
    let alpha = rd.simple_root(0);
    Ok(lit::<F>(rd.norm_sq(alpha)?.to_f64_lossy()).sqrt())
}

fn check_radius<F: RealScalar>(t: F) -> Result<(), HessError> {
    if t < F::zero() || t.is_nan() {
        return Err(HessError::NegativeRadius(t.to_f64_lossy()));
    }
    Ok(())
}

/// Hessian spectrum of `u(d(o, ·))` at distance `t` from the basepoint of a rank-one space.
///
/// For `t` below [`SINGULAR_RADIUS`] the terms `c·u'(t)coth(ct)` are replaced
/// by their limit `u''(0)`, which requires `u'(0) = 0`.
pub fn cartan_radial_spectrum<F: RealScalar, U: RadialProfile<F>>(
    rd: &RootDatum,
    u: &U,
    t: F,
) -> Result<Spectrum<F>, HessError> {
    check_radius(t)?;
    let a = rank_one_norm::<F>(rd)?;
    let (m_alpha, m_two_alpha) = rd.rank_one_multiplicities()?;
    let singular = t < lit(SINGULAR_RADIUS);
    let u1 = u.d1(t);
    let u2 = u.d2(t);
    let term = |c: F| -> Result<F, HessError> {
        if singular {
            if u1.abs() > lit(1e-6) {
                return Err(HessError::SingularProfile(u1.to_f64_lossy()));
            }
            Ok(u2)
        } else {
            Ok(c * u1 / (c * t).tanh())
        }
    };
    let two = lit::<F>(2.0);
    Ok(Spectrum::new([
        (u2, 1),
        (term(a)?, m_alpha as usize),
        (term(two * a)?, m_two_alpha as usize),
    ]))
}

/// Spectrum of `Hess 𝔣` at distance `t`, using the simplified closed forms
/// `2a·sech²(2at)`, `2a/(1 + tanh²(at))` and `2a`.
pub fn fft_spectrum<F: RealScalar>(rd: &RootDatum, t: F) -> Result<Spectrum<F>, HessError> {
    check_radius(t)?;
    let a = rank_one_norm::<F>(rd)?;
    let (m_alpha, m_two_alpha) = rd.rank_one_multiplicities()?;
    let two = lit::<F>(2.0);
    let th = (a * t).tanh();
    let c2 = (two * a * t).cosh();
    Ok(Spectrum::new([
        (two * a / (c2 * c2), 1),
        (two * a / (F::one() + th * th), m_alpha as usize),
        (two * a, m_two_alpha as usize),
    ]))
}

/// Label-aware view of the linear spectrum: `(label, −⟨α,ξ⟩, m_α)` per positive root.
pub fn root_eigenvalues(
    rd: &RootDatum,
    xi: &Covector,
) -> Result<Vec<(RootLabel, Rational, u32)>, HessError> {
    rd.positive_roots()
        .iter()
        .map(|r| Ok((r.label, -rd.pair(&r.root, xi)?, r.mult)))
        .collect()
}
