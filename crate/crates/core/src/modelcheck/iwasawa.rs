//! Iwasawa `g = n·e^H·k` and Cartan `g = k₁·e^a·k₂` coordinates on `SL_n(R)`.

use nalgebra::{DMatrix, DVector};

use super::{Group, MatrixPoint, ModelError};

#[derive(Clone, Debug, PartialEq)]
pub struct IwasawaDecomposition {
    /// Upper unipotent.
    pub n: DMatrix<f64>,
    /// Diagonal of `H`; `exp(h[i])` is the `i`-th diagonal entry of `e^H`.
    pub h: DVector<f64>,
    /// Orthogonal with determinant one.
    pub k: DMatrix<f64>,
}

impl IwasawaDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let a = DMatrix::from_diagonal(&self.h.map(f64::exp));
        &self.n * a * &self.k
    }
}

fn reversal(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { 1.0 } else { 0.0 })
}

/// Factorizes any invertible matrix as `n·diag(e^h)·k`.
///
/// With `J` the reversal permutation, `gᵀJ = Q₁R₁` gives `g = (J R₁ᵀ J)(J Q₁ᵀ)`,
/// an upper triangular factor times an orthogonal one. Signs are then moved
/// from the diagonal of the triangular factor into `k`.
pub fn iwasawa_decompose_matrix(g: &DMatrix<f64>) -> Result<IwasawaDecomposition, ModelError> {
    if !g.is_square() {
        return Err(ModelError::NotSquare {
            rows: g.nrows(),
            cols: g.ncols(),
        });
    }
    let dim = g.nrows();
    let j = reversal(dim);
    let qr = (g.transpose() * &j).qr();
    let (q1, r1) = (qr.q(), qr.r());
    let mut r = &j * r1.transpose() * &j;
    let mut k = &j * q1.transpose();
    for i in 0..dim {
        let d = r[(i, i)];
        if d.abs() <= f64::EPSILON * g.amax().max(1.0) {
            return Err(ModelError::Singular);
        }
        if d < 0.0 {
            r.column_mut(i).neg_mut();
            k.row_mut(i).neg_mut();
        }
    }
    let diag = r.diagonal();
    let mut n = r;
    for c in 0..dim {
        let s = diag[c];
        n.column_mut(c).scale_mut(1.0 / s);
    }
    Ok(IwasawaDecomposition {
        n,
        h: diag.map(f64::ln),
        k,
    })
}

pub fn iwasawa_decompose(g: &MatrixPoint) -> Result<IwasawaDecomposition, ModelError> {
    iwasawa_decompose_matrix(g.entries())
}

/// `H(g)` as the vector of diagonal entries of `H`.
pub fn iwasawa_h(g: &MatrixPoint) -> Result<DVector<f64>, ModelError> {
    if g.group() != Group::SLn {
        return Err(ModelError::NotInGroup {
            group: Group::SLn,
            defect: f64::NAN,
            tol: g.membership_tol(),
        });
    }
    Ok(iwasawa_decompose(g)?.h)
}

/// Logarithms of the singular values, sorted descending.
pub fn cartan_a_matrix(g: &DMatrix<f64>) -> DVector<f64> {
    let mut s: Vec<f64> = g
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .map(|v| v.ln())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    DVector::from_vec(s)
}

pub fn cartan_a(g: &MatrixPoint) -> DVector<f64> {
    cartan_a_matrix(g.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical::haar::haar_orthogonal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sl(n: usize, rng: &mut ChaCha8Rng) -> MatrixPoint {
        loop {
            let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let mut m = m;
            if m.determinant() < 0.0 {
                m.row_mut(0).neg_mut();
            }
            if m.determinant().abs() > 1e-2 {
                return MatrixPoint::sl_normalized(m).unwrap();
            }
        }
    }

    #[test]
    fn identity_and_diagonal() {
        let id = MatrixPoint::identity(3, Group::SLn);
        assert!(iwasawa_h(&id).unwrap().amax() < 1e-15);
        let e = std::f64::consts::E;
        let g = MatrixPoint::sl(DMatrix::from_row_slice(2, 2, &[e, 0.0, 0.0, 1.0 / e])).unwrap();
        let h = iwasawa_h(&g).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-14 && (h[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn factors_have_the_right_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=6 {
            for _ in 0..200 {
                let g = random_sl(n, &mut rng);
                let dec = iwasawa_decompose(&g).unwrap();
                assert!((dec.reconstruct() - g.entries()).amax() <= 1e-10);
                let kkt = &dec.k * dec.k.transpose() - DMatrix::identity(n, n);
                assert!(kkt.amax() < 1e-12);
                assert!((dec.k.determinant() - 1.0).abs() < 1e-10);
                for i in 0..n {
                    assert!((dec.n[(i, i)] - 1.0).abs() < 1e-12);
                    for j in 0..i {
                        assert!(dec.n[(i, j)].abs() < 1e-12);
                    }
                }
                assert!(dec.h.sum().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn two_rho_from_leading_minors() {
        // For g = n a k, g gᵀ = n a² nᵀ; the trailing principal minors of g gᵀ are
        // products of the trailing entries of a², which determine e^{2ρ(H)}.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_sl(3, &mut rng);
            let h = iwasawa_h(&g).unwrap();
            let p = g.entries() * g.entries().transpose();
            let m1 = p[(2, 2)];
            let m2 = p.view((1, 1), (2, 2)).determinant();
            let a2 = [1.0 / m2, m2 / m1, m1];
            for i in 0..3 {
                assert!(((2.0 * h[i]).exp() - a2[i]).abs() < 1e-9 * a2[i].max(1.0));
            }
            // 2ρ = (2, 0, −2) on the diagonal.
            let two_rho_h = 2.0 * h[0] - 2.0 * h[2];
            assert!((two_rho_h.exp() - a2[0] / a2[2]).abs() < 1e-8 * (a2[0] / a2[2]));
        }
    }

    #[test]
    fn cartan_projection() {
        let id = MatrixPoint::identity(3, Group::SLn);
        assert!(cartan_a(&id).amax() < 1e-15);
        let g = MatrixPoint::sl(DMatrix::from_diagonal(&DVector::from_vec(vec![
            0.25, 4.0, 1.0,
        ])))
        .unwrap();
        let a = cartan_a(&g);
        let l4 = 4f64.ln();
        assert!((a[0] - l4).abs() < 1e-14 && a[1].abs() < 1e-14 && (a[2] + l4).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for s in 0..20 {
                let g = random_sl(n, &mut rng);
                let k1 = haar_orthogonal(n, s);
                let k2 = haar_orthogonal(n, s + 1000);
                let moved = &k1 * g.entries() * &k2;
                assert!((cartan_a_matrix(&moved) - cartan_a(&g)).amax() < 1e-10);
                let a = cartan_a(&g);
                assert!(a.as_slice().windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn singular_input_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(iwasawa_decompose_matrix(&m), Err(ModelError::Singular));
    }
}
