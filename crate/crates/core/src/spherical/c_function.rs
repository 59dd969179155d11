//! Gindikin–Karpelevič product for the Harish-Chandra `c`-function.

use num_complex::Complex64;

use crate::rootdata::{Covector, RootDatum};
use crate::Scalar;

use super::gamma::{beta, pole_distance};
use super::{ComplexCovector, SphericalError};

pub const POLE_TOL: f64 = 1e-8;

fn root_multiplicity(rd: &RootDatum, coords: &[crate::Rational]) -> u32 {
    rd.positive_roots()
        .iter()
        .find(|r| r.root.coords() == coords)
        .map_or(0, |r| r.mult)
}

/// `I(ν) = Π_{α ∈ Φ⁺ distinct} B(m_α/2, m_{α/2}/2 + ⟨ν,α⟩/⟨α,α⟩)`.
pub fn gk_product(rd: &RootDatum, nu: &ComplexCovector) -> Result<Complex64, SphericalError> {
    let mut out = Complex64::new(1.0, 0.0);
    let half = crate::Rational::new(1, 2);
    for r in rd.positive_roots() {
        let half_root: Vec<_> = r.root.coords().iter().map(|c| c * half).collect();
        let m_half = root_multiplicity(rd, &half_root) as f64;
        let aa = rd.norm_sq(&r.root)?.to_f64_lossy();
        let pairing = Complex64::new(
            rd.pair(&nu.re, &r.root)?.to_f64_lossy(),
            rd.pair(&nu.im, &r.root)?.to_f64_lossy(),
        ) / aa;
        let a = Complex64::new(r.mult as f64 / 2.0, 0.0);
        let b = Complex64::new(m_half / 2.0, 0.0) + pairing;
        for z in [a, b, a + b] {
            if pole_distance(z) < POLE_TOL {
                return Err(SphericalError::Pole { re: z.re, im: z.im });
            }
        }
        out *= beta(a, b);
    }
    Ok(out)
}

/// `c(λ) = I(λ) / I(ρ)`.
pub fn c_function(rd: &RootDatum, lambda: &ComplexCovector) -> Result<Complex64, SphericalError> {
    let rho = ComplexCovector::real(rd.rho());
    Ok(gk_product(rd, lambda)? / gk_product(rd, &rho)?)
}

/// `e^{(1−m_{2α})α(H)}(1 + ‖H‖)`, the rank-one decay envelope, with `α(H) = ‖H‖` for `‖α‖ = 1`.
pub fn rank_one_decay_bound(rd: &RootDatum, h_norm: f64) -> Result<f64, SphericalError> {
    let (_, m2a) = rd.rank_one_multiplicities()?;
    Ok(((1.0 - m2a as f64) * h_norm).exp() * (1.0 + h_norm))
}

/// Convenience: `c(tα)` for rank-one data with `t` complex.
pub fn c_rank_one(rd: &RootDatum, t: Complex64) -> Result<Complex64, SphericalError> {
    let alpha: &Covector = rd.simple_root(0);
    c_function(rd, &ComplexCovector::from_f64_multiple(alpha, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Family;
    use crate::Rational;

    #[test]
    fn c_of_rho_is_one() {
        for rd in [
            RootDatum::build_rank_one(Family::HnR, 3).unwrap(),
            RootDatum::build_rank_one(Family::H2O, 2).unwrap(),
            RootDatum::build_sln(4).unwrap(),
        ] {
            let c = c_function(&rd, &ComplexCovector::real(rd.rho())).unwrap();
            assert!((c - 1.0).norm() < 1e-14, "{c}");
        }
    }

    #[test]
    fn conjugation_on_the_imaginary_axis() {
        let rd = RootDatum::build_rank_one(Family::HnR, 3).unwrap();
        for t in [0.3, 1.0, 2.7] {
            let c_plus = c_rank_one(&rd, Complex64::new(0.0, t)).unwrap();
            let c_minus = c_rank_one(&rd, Complex64::new(0.0, -t)).unwrap();
            assert!((c_minus - c_plus.conj()).norm() < 1e-12);
            assert!(((c_minus * c_plus).norm() - c_plus.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn real_hyperbolic_three_space_closed_form() {
        // For ℍ³, m_α = 2: c(tα) = B(1, t) / B(1, 1) = 1/t.
        let rd = RootDatum::build_rank_one(Family::HnR, 3).unwrap();
        let c = c_rank_one(&rd, Complex64::new(0.0, 2.0)).unwrap();
        assert!((c - Complex64::new(0.0, -0.5)).norm() < 1e-13);
    }

    #[test]
    fn octonionic_at_two_rho_is_finite() {
        let rd = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        let c = c_function(
            &rd,
            &ComplexCovector::real(rd.rho().scaled(Rational::from_integer(2))),
        )
        .unwrap();
        assert!(c.norm().is_finite() && c.norm() > 0.0 && c.im.abs() < 1e-12);
    }

    #[test]
    fn poles_are_rejected() {
        let rd = RootDatum::build_rank_one(Family::HnR, 3).unwrap();
        assert!(matches!(
            c_rank_one(&rd, Complex64::new(0.0, 0.0)),
            Err(SphericalError::Pole { .. })
        ));
        assert!(c_rank_one(&rd, Complex64::new(-1.0, 1e-10)).is_err());
    }

    #[test]
    fn decay_envelope() {
        let rd = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        assert!((rank_one_decay_bound(&rd, 1.0).unwrap() - 2.0 * (-6f64).exp()).abs() < 1e-15);
        assert!(rank_one_decay_bound(&RootDatum::build_sln(3).unwrap(), 1.0).is_err());
    }
}
