//! Orthonormal frames of `𝔰 = {symmetric traceless matrices}` ≅ `T_o(SL_n/SO(n))`.

use nalgebra::{DMatrix, DVector};

use crate::rootdata::RootDatum;
use crate::Scalar;

use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameLabel {
    /// An element of the orthonormal basis of `𝔞`.
    Cartan(usize),
    /// `(E_ij + E_ji)` normalized, tangent to the root space of `α_ij` (1-based).
    Root(usize, usize),
}

#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub vectors: Vec<DMatrix<f64>>,
    pub labels: Vec<FrameLabel>,
    /// The metric on `𝔰` is `c·tr(XY)`.
    pub metric_scale: f64,
}

impl TangentFrame {
    /// Frame orthonormal for `c·tr(XY)` where `c` is dual to the datum's Gram scale
    /// (`c = 2n` for the Killing form).
    pub fn for_datum(rd: &RootDatum) -> Result<Self, ModelError> {
        let n = rd.param_n() as usize;
        if rd.family() != crate::rootdata::Family::SLn {
            return Err(ModelError::UnsupportedDimension(n));
        }
        Ok(Self::sl(n, 1.0 / rd.scale().to_f64_lossy()))
    }

    /// Killing-orthonormal frame, metric `2n·tr(XY)`.
    pub fn killing(n: usize) -> Self {
        Self::sl(n, 2.0 * n as f64)
    }

    pub fn sl(n: usize, metric_scale: f64) -> Self {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        // Gram–Schmidt on e_i − e_{i+1} in the diagonal.
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v[i + 1] = -1.0;
            for b in &basis {
                let p = v.dot(b);
                v -= b * p;
            }
            v /= v.norm();
            basis.push(v);
        }
        for (i, b) in basis.iter().enumerate() {
            vectors.push(DMatrix::from_diagonal(&(b / metric_scale.sqrt())));
            labels.push(FrameLabel::Cartan(i));
        }
        let root_norm = 1.0 / (2.0 * metric_scale).sqrt();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut m = DMatrix::zeros(n, n);
                m[(i, j)] = root_norm;
                m[(j, i)] = root_norm;
                vectors.push(m);
                labels.push(FrameLabel::Root(i + 1, j + 1));
            }
        }
        TangentFrame {
            vectors,
            labels,
            metric_scale,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn inner(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        // −B(X, θY) with θY = −Yᵀ, i.e. c·tr(X Yᵀ).
        self.metric_scale * x.component_mul(y).sum()
    }

    /// Largest deviation of the frame's Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, x) in self.vectors.iter().enumerate() {
            for (b, y) in self.vectors.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(x, y) - target).abs());
            }
        }
        worst
    }

    /// Diagonal of the `a`-th Cartan basis vector.
    pub fn cartan_diagonal(&self, a: usize) -> DVector<f64> {
        self.vectors[a].diagonal()
    }
}

/// `tr(ad X ad Y)` computed on `gl_n`; equals the Killing form of `sl_n` on `sl_n`.
pub fn killing_by_ad(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    let ad = |m: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(n * n, n * n);
        for c in 0..n * n {
            let mut e = DMatrix::zeros(n, n);
            e[(c / n, c % n)] = 1.0;
            let img = m * &e - &e * m;
            for r in 0..n * n {
                out[(r, c)] = img[(r / n, r % n)];
            }
        }
        out
    };
    (ad(x) * ad(y)).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Normalization;

    #[test]
    fn frames_are_orthonormal() {
        for n in 2..=6 {
            let f = TangentFrame::killing(n);
            assert_eq!(f.len(), n * (n + 1) / 2 - 1);
            assert!(f.orthonormality_defect() < 1e-10);
            for v in &f.vectors {
                assert!(v.trace().abs() < 1e-14);
                assert!((v - v.transpose()).amax() == 0.0);
            }
        }
        let rd = RootDatum::build_sln_with(4, Normalization::Trace).unwrap();
        let f = TangentFrame::for_datum(&rd).unwrap();
        assert_eq!(f.metric_scale, 1.0);
        assert!(f.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn killing_constant_is_two_n() {
        for n in 2..=3usize {
            let f = TangentFrame::killing(n);
            for x in &f.vectors {
                for y in &f.vectors {
                    let lhs = killing_by_ad(x, y);
                    let rhs = 2.0 * n as f64 * (x * y).trace();
                    assert!((lhs - rhs).abs() < 1e-12, "n={n}: {lhs} vs {rhs}");
                }
            }
        }
    }
}
