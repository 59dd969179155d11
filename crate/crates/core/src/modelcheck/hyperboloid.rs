//! Hyperboloid model `{x : −x₀² + |x̄|² = −1, x₀ > 0}` of `ℍⁿ_ℝ` (curvature −1).

use nalgebra::{DMatrix, DVector};

use super::{fd::sorted_eigenvalues, Group, MatrixPoint, ModelError};

pub const HYPERBOLOID_TOL: f64 = 1e-9;

pub fn minkowski_dot(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

pub fn basepoint(n: usize) -> DVector<f64> {
    let mut o = DVector::zeros(n + 1);
    o[0] = 1.0;
    o
}

fn check_point(x: &DVector<f64>) -> Result<(), ModelError> {
    let defect = minkowski_dot(x, x) + 1.0;
    if defect.abs() > HYPERBOLOID_TOL * x[0].abs().max(1.0).powi(2) || x[0] <= 0.0 {
        return Err(ModelError::OffHyperboloid(defect));
    }
    Ok(())
}

/// Busemann function `B(x, θ) = log(x₀ − ⟨x̄, θ⟩)` for the boundary point along `(1, θ)`,
/// normalized so that `B(o) = 0`.
pub fn busemann_hyperboloid(x: &DVector<f64>, theta: &DVector<f64>) -> Result<f64, ModelError> {
    check_point(x)?;
    let unit = theta.norm() - 1.0;
    if unit.abs() > 1e-12 || theta.len() + 1 != x.len() {
        return Err(ModelError::NotUnitBoundary(unit));
    }
    Ok((x[0] - x.rows(1, theta.len()).dot(theta)).ln())
}

/// Hyperbolic distance `acosh(−⟨x, y⟩)`.
pub fn distance(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (-minkowski_dot(x, y)).max(1.0).acosh()
}

/// Point at distance `|v|` along the geodesic from `x` with initial velocity `v ⟂ x`.
pub fn exp_map(x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let s = minkowski_dot(v, v).max(0.0).sqrt();
    if s == 0.0 {
        return x.clone();
    }
    x * s.cosh() + v * (s.sinh() / s)
}

/// Boost of rapidity `t` in the `(x₀, x_axis)` plane, an element of `SO(n,1)`.
pub fn boost(n: usize, axis: usize, t: f64) -> MatrixPoint {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(0, 0)] = t.cosh();
    m[(axis, axis)] = t.cosh();
    m[(0, axis)] = t.sinh();
    m[(axis, 0)] = t.sinh();
    MatrixPoint::new(m, Group::SOn1, 1e-9).expect("boost preserves the form")
}

pub fn apply(g: &MatrixPoint, x: &DVector<f64>) -> DVector<f64> {
    g.entries() * x
}

/// Orthonormal tangent basis at `x` (Minkowski Gram–Schmidt of the coordinate axes).
pub fn tangent_basis(x: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = x.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for axis in 1..dim {
        let mut v = DVector::zeros(dim);
        v[axis] = 1.0;
        // Project off x (⟨x,x⟩ = −1) and previous vectors.
        v += x * minkowski_dot(x, &v);
        for b in &basis {
            let p = minkowski_dot(b, &v);
            v -= b * p;
        }
        let nrm = minkowski_dot(&v, &v).sqrt();
        basis.push(v / nrm);
    }
    basis
}

/// Hessian at `x` of `f` in an orthonormal tangent frame, by central differences
/// along geodesics and polarization.
pub fn fd_hessian_hyperboloid(
    f: &dyn Fn(&DVector<f64>) -> f64,
    x: &DVector<f64>,
    h: f64,
) -> Result<DMatrix<f64>, ModelError> {
    super::fd::check_step(h)?;
    check_point(x)?;
    let frame = tangent_basis(x);
    let q = |v: &DVector<f64>| -> Result<f64, ModelError> {
        let plus = f(&exp_map(x, &(v * h)));
        let minus = f(&exp_map(x, &(v * -h)));
        let mid = f(x);
        if plus.is_nan() || minus.is_nan() || mid.is_nan() {
            return Err(ModelError::NotANumber);
        }
        Ok((plus - 2.0 * mid + minus) / (h * h))
    };
    let m = frame.len();
    let mut out = DMatrix::zeros(m, m);
    for a in 0..m {
        out[(a, a)] = q(&frame[a])?;
        for b in 0..a {
            let v = (q(&(&frame[a] + &frame[b]))? - q(&(&frame[a] - &frame[b]))?) / 4.0;
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

/// Eigenvalues (descending) of the finite-difference Hessian.
pub fn fd_spectrum_hyperboloid(
    f: &dyn Fn(&DVector<f64>) -> f64,
    x: &DVector<f64>,
    h: f64,
) -> Result<Vec<f64>, ModelError> {
    Ok(sorted_eigenvalues(&fd_hessian_hyperboloid(f, x, h)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hesspec::{cartan_radial_spectrum, iwasawa_exp_spectrum, Distance};
    use crate::rootdata::{Family, RootDatum};
    use crate::Rational;

    fn theta(n: usize) -> DVector<f64> {
        let mut t = DVector::zeros(n);
        t[0] = 1.0;
        t
    }

    #[test]
    fn busemann_examples() {
        let o = basepoint(3);
        let th = theta(3);
        assert_eq!(busemann_hyperboloid(&o, &th).unwrap(), 0.0);
        for t in [0.5, 2.0, 7.0] {
            let toward = exp_map(&o, &DVector::from_vec(vec![0.0, t, 0.0, 0.0]));
            let away = exp_map(&o, &DVector::from_vec(vec![0.0, -t, 0.0, 0.0]));
            assert!((busemann_hyperboloid(&toward, &th).unwrap() + t).abs() < 1e-10);
            assert!((busemann_hyperboloid(&away, &th).unwrap() - t).abs() < 1e-10);
        }
        let bad = DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]);
        assert!(busemann_hyperboloid(&bad, &th).is_err());
        assert!(busemann_hyperboloid(&o, &(th * 2.0)).is_err());
    }

    #[test]
    fn exp_of_busemann_matches_closed_form() {
        // e^{−sB} is e^{ξH} with ξ = sα; Hess/F = {s², −s × (n − 1)}.
        let n = 4;
        let rd = RootDatum::build_rank_one(Family::HnR, n as u32).unwrap();
        for s in [1i64, 2, 3] {
            let th = theta(n);
            let f = |x: &DVector<f64>| (-(s as f64) * busemann_hyperboloid(x, &th).unwrap()).exp();
            let got = fd_spectrum_hyperboloid(&f, &basepoint(n), 1e-3).unwrap();
            let xi = rd.simple_root(0).scaled(Rational::from_integer(s));
            let want = iwasawa_exp_spectrum(&rd, &xi).unwrap().to_f64().values();
            for (a, b) in got.iter().zip(&want) {
                assert!(
                    (a - b).abs() < 1e-4 * b.abs().max(1.0),
                    "{got:?} vs {want:?}"
                );
            }
        }
    }

    #[test]
    fn distance_hessian_matches_cartan_formula() {
        let n = 3;
        let rd = RootDatum::build_rank_one(Family::HnR, n as u32).unwrap();
        let o = basepoint(n);
        let x = apply(&boost(n, 1, 1.0), &o);
        assert!((distance(&x, &o) - 1.0).abs() < 1e-12);
        let f = |y: &DVector<f64>| distance(y, &o);
        let got = fd_spectrum_hyperboloid(&f, &x, 1e-3).unwrap();
        let want = cartan_radial_spectrum(&rd, &Distance, 1.0)
            .unwrap()
            .values();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-5, "{got:?} vs {want:?}");
        }
        assert!((want[0] - 1.0 / 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn boosts_are_isometries() {
        let g = boost(3, 2, 0.7);
        let a = exp_map(&basepoint(3), &DVector::from_vec(vec![0.0, 0.3, -0.2, 0.5]));
        let b = exp_map(&basepoint(3), &DVector::from_vec(vec![0.0, -0.1, 0.4, 0.0]));
        let before = distance(&a, &b);
        let after = distance(&apply(&g, &a), &apply(&g, &b));
        assert!((before - after).abs() < 1e-12);
        assert!(tangent_basis(&a)
            .iter()
            .all(|v| minkowski_dot(v, &a).abs() < 1e-12));
    }
}
