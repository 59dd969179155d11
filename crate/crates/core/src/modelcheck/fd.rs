//! Second derivatives along geodesics by central differences and polarization.

use nalgebra::{DMatrix, SymmetricEigen};

use super::ModelError;

/// Central difference stencil for `d²/dt²` at `t = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stencil {
    /// `(F(h) − 2F(0) + F(−h)) / h²`, error `O(h²)`.
    #[default]
    ThreePoint,
    /// `(−F(2h) + 16F(h) − 30F(0) + 16F(−h) − F(−2h)) / 12h²`, error `O(h⁴)`.
    FivePoint,
}

impl Stencil {
    pub fn order(self) -> u32 {
        match self {
            Stencil::ThreePoint => 2,
            Stencil::FivePoint => 4,
        }
    }

    fn nodes(self) -> &'static [(f64, f64)] {
        match self {
            Stencil::ThreePoint => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            Stencil::FivePoint => &[
                (-2.0, -1.0 / 12.0),
                (-1.0, 16.0 / 12.0),
                (0.0, -30.0 / 12.0),
                (1.0, 16.0 / 12.0),
                (2.0, -1.0 / 12.0),
            ],
        }
    }
}

/// `exp(tY)` for symmetric `Y`, through one eigendecomposition reused for all `t`.
pub struct SymmetricExp {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SymmetricExp {
    pub fn new(y: &DMatrix<f64>) -> Self {
        SymmetricExp {
            eig: SymmetricEigen::new(y.clone()),
        }
    }

    pub fn at(&self, t: f64) -> DMatrix<f64> {
        let v = &self.eig.eigenvectors;
        let d = DMatrix::from_diagonal(&self.eig.eigenvalues.map(|l| (t * l).exp()));
        v * d * v.transpose()
    }
}

/// `d²/dt² F(g₀·exp(tY))` at `t = 0`.
pub fn second_derivative(
    f: &dyn Fn(&DMatrix<f64>) -> f64,
    g0: &DMatrix<f64>,
    y: &DMatrix<f64>,
    h: f64,
    stencil: Stencil,
) -> Result<f64, ModelError> {
    let e = SymmetricExp::new(y);
    let mut acc = 0.0;
    for &(node, weight) in stencil.nodes() {
        let value = f(&(g0 * e.at(node * h)));
        if value.is_nan() {
            return Err(ModelError::NotANumber);
        }
        acc += weight * value;
    }
    Ok(acc / (h * h))
}

pub fn check_step(h: f64) -> Result<(), ModelError> {
    if !(1e-5..=1e-2).contains(&h) {
        return Err(ModelError::InvalidStep(h));
    }
    Ok(())
}

/// Hessian of `F` at `g₀K` in the frame `{Y_a}`: diagonal entries are second
/// derivatives along `Y_a`, off-diagonal entries come from
/// `(Q(Y_a + Y_b) − Q(Y_a − Y_b)) / 4`.
pub fn fd_hessian(
    f: &dyn Fn(&DMatrix<f64>) -> f64,
    g0: &DMatrix<f64>,
    frame: &[DMatrix<f64>],
    h: f64,
    stencil: Stencil,
) -> Result<DMatrix<f64>, ModelError> {
    check_step(h)?;
    let m = frame.len();
    let mut out = DMatrix::zeros(m, m);
    for a in 0..m {
        out[(a, a)] = second_derivative(f, g0, &frame[a], h, stencil)?;
        for b in 0..a {
            let plus = second_derivative(f, g0, &(&frame[a] + &frame[b]), h, stencil)?;
            let minus = second_derivative(f, g0, &(&frame[a] - &frame[b]), h, stencil)?;
            let v = (plus - minus) / 4.0;
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// First-order central difference `d/dt F(exp(tY))`.
pub fn first_derivative(
    f: &dyn Fn(&DMatrix<f64>) -> f64,
    g0: &DMatrix<f64>,
    y: &DMatrix<f64>,
    h: f64,
) -> f64 {
    let e = SymmetricExp::new(y);
    (f(&(g0 * e.at(h))) - f(&(g0 * e.at(-h)))) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame2() -> Vec<DMatrix<f64>> {
        vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        ]
    }

    #[test]
    fn constant_function_has_zero_hessian() {
        let f = |_: &DMatrix<f64>| 3.5;
        let m = fd_hessian(
            &f,
            &DMatrix::identity(2, 2),
            &frame2(),
            1e-3,
            Stencil::ThreePoint,
        )
        .unwrap();
        assert_eq!(m, DMatrix::zeros(2, 2));
    }

    #[test]
    fn quadratic_function_is_exact() {
        // F(g) = tr(g gᵀ); along exp(tY), F = Σ e^{2tλ}, second derivative 4Σλ².
        let f = |g: &DMatrix<f64>| (g * g.transpose()).trace();
        let y = DMatrix::from_row_slice(2, 2, &[0.3, 0.2, 0.2, -0.3]);
        let lam2 = 0.3f64 * 0.3 + 0.2 * 0.2;
        for stencil in [Stencil::ThreePoint, Stencil::FivePoint] {
            let d2 = second_derivative(&f, &DMatrix::identity(2, 2), &y, 1e-3, stencil).unwrap();
            assert!((d2 - 8.0 * lam2).abs() < 1e-5, "{d2}");
        }
    }

    #[test]
    fn bad_steps_and_nan() {
        let f = |_: &DMatrix<f64>| 0.0;
        let id = DMatrix::identity(2, 2);
        assert!(fd_hessian(&f, &id, &frame2(), 1.0, Stencil::ThreePoint).is_err());
        let nan = |_: &DMatrix<f64>| f64::NAN;
        assert_eq!(
            fd_hessian(&nan, &id, &frame2(), 1e-3, Stencil::ThreePoint),
            Err(ModelError::NotANumber)
        );
    }

    #[test]
    fn symmetric_exp_matches_series() {
        let y = DMatrix::from_row_slice(2, 2, &[0.1, 0.4, 0.4, -0.1]);
        let e = SymmetricExp::new(&y).at(1.0);
        let mut series = DMatrix::identity(2, 2);
        let mut term = DMatrix::identity(2, 2);
        for k in 1..30 {
            term = term * &y / k as f64;
            series += &term;
        }
        assert!((e - series).amax() < 1e-14);
    }
}
