//! Simplex volumes, clipping of a simplex by homogeneous halfspaces, and mod-2
//! cancellation of top-dimensional simplicial chains.

use nalgebra::{DMatrix, DVector};

/// Slack on barycentric coordinates for containment.
pub const BARY_TOL: f64 = 1e-9;
/// Pieces whose Gram determinant falls below this are dropped.
pub const DEGENERATE_GRAM: f64 = 1e-18;

const VERTEX_TOL: f64 = 1e-11;

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn gram_det(points: &[DVector<f64>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let e = DMatrix::from_fn(points[0].len(), k, |r, c| points[c + 1][r] - points[0][r]);
    (e.transpose() * &e).determinant().max(0.0)
}

/// `√det(Gram)/k!` for the simplex with `k+1` vertices.
pub fn simplex_volume(points: &[DVector<f64>]) -> f64 {
    gram_det(points).sqrt() / factorial(points.len().saturating_sub(1))
}

/// Dimension of the affine hull of `points`.
pub fn affine_dim(points: &[&DVector<f64>], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let d = DMatrix::from_fn(points[0].len(), points.len() - 1, |r, c| {
        points[c + 1][r] - points[0][r]
    });
    d.svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s > tol)
        .count()
}

/// Distance from `x` to the affine span of `points`, with the affine weights of the nearest point.
pub fn affine_residual(points: &[DVector<f64>], x: &DVector<f64>) -> (f64, Vec<f64>) {
    let k = points.len() - 1;
    if k == 0 {
        return ((x - &points[0]).norm(), vec![1.0]);
    }
    let d = DMatrix::from_fn(x.len(), k, |r, c| points[c + 1][r] - points[0][r]);
    let rhs = x - &points[0];
    let mu = d
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(k));
    let res = (&d * &mu - rhs).norm();
    let mut w = vec![1.0 - mu.sum()];
    w.extend(mu.iter());
    (res, w)
}

fn combinations(n: usize, r: usize, mut visit: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        visit(&idx);
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Vertex {
    point: DVector<f64>,
    tight: Vec<bool>,
}

/// Pulling triangulation of the face spanned by `face` (vertex ids) of dimension `dim`.
fn pull(
    verts: &[Vertex],
    face: &[usize],
    dim: usize,
    out: &mut Vec<Vec<usize>>,
    prefix: &mut Vec<usize>,
) {
    if dim == 0 {
        prefix.push(face[0]);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    let apex = face[0];
    let n_constraints = verts[apex].tight.len();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for c in 0..n_constraints {
        let sub: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&v| verts[v].tight[c])
            .collect();
        if sub.len() == face.len() || sub.len() < dim || sub.contains(&apex) {
            continue;
        }
        let pts: Vec<&DVector<f64>> = sub.iter().map(|&v| &verts[v].point).collect();
        if affine_dim(&pts, 1e-10) != dim - 1 || facets.contains(&sub) {
            continue;
        }
        facets.push(sub);
    }
    prefix.push(apex);
    for f in facets {
        pull(verts, &f, dim - 1, out, prefix);
    }
    prefix.pop();
}

/// Triangulates `{λ ∈ ℝ^{k+1} : Σλ = 1, λ ≥ 0, a·λ ≥ 0 for a in cuts}` into `k`-simplices,
/// each returned as `k+1` parameter points. Lower-dimensional intersections are dropped,
/// except for `k = 0`, where the single point is kept when feasible.
pub fn clip_standard_simplex(k: usize, cuts: &[DVector<f64>]) -> Vec<Vec<DVector<f64>>> {
    let corners: Vec<DVector<f64>> = (0..=k)
        .map(|j| {
            let mut e = DVector::zeros(k + 1);
            e[j] = 1.0;
            e
        })
        .collect();
    let cuts: Vec<DVector<f64>> = cuts
        .iter()
        .filter_map(|a| {
            let s = a.amax();
            (s > 0.0).then(|| a / s)
        })
        .collect();
    // Fast paths: the whole simplex, or nothing.
    if cuts.iter().all(|a| a.iter().all(|v| *v >= -VERTEX_TOL)) {
        return vec![corners];
    }
    if cuts.iter().any(|a| a.iter().all(|v| *v < -VERTEX_TOL)) {
        return Vec::new();
    }
    if k == 0 {
        return if cuts.iter().all(|a| a[0] >= -VERTEX_TOL) {
            vec![corners]
        } else {
            Vec::new()
        };
    }
    let mut rows = corners.clone();
    rows.extend(cuts.iter().cloned());
    let mut verts: Vec<Vertex> = Vec::new();
    combinations(rows.len(), k, |chosen| {
        let mut m = DMatrix::zeros(k + 1, k + 1);
        for (r, &c) in chosen.iter().enumerate() {
            m.row_mut(r).copy_from(&rows[c].transpose());
        }
        m.row_mut(k).fill(1.0);
        if m.determinant().abs() < 1e-12 {
            return;
        }
        let mut rhs = DVector::zeros(k + 1);
        rhs[k] = 1.0;
        let Some(lam) = m.lu().solve(&rhs) else {
            return;
        };
        let vals: Vec<f64> = rows.iter().map(|a| a.dot(&lam)).collect();
        if vals.iter().any(|v| *v < -VERTEX_TOL) {
            return;
        }
        if verts.iter().any(|v| (&v.point - &lam).amax() < 1e-10) {
            return;
        }
        verts.push(Vertex {
            tight: vals.iter().map(|v| v.abs() <= VERTEX_TOL).collect(),
            point: lam,
        });
    });
    let pts: Vec<&DVector<f64>> = verts.iter().map(|v| &v.point).collect();
    if verts.len() < k + 1 || affine_dim(&pts, 1e-10) < k {
        return Vec::new();
    }
    let face: Vec<usize> = (0..verts.len()).collect();
    let mut out = Vec::new();
    pull(&verts, &face, k, &mut out, &mut Vec::new());
    out.into_iter()
        .map(|s| s.into_iter().map(|v| verts[v].point.clone()).collect())
        .collect()
}

/// Generalized cross product: a normal to the hyperplane through `points` in `ℝ^j`.
fn hyperplane(points: &[DVector<f64>]) -> Option<(DVector<f64>, f64)> {
    let j = points[0].len();
    let d = DMatrix::from_fn(j, points.len() - 1, |r, c| points[c + 1][r] - points[0][r]);
    let mut n = DVector::zeros(j);
    for i in 0..j {
        let minor = d.clone().remove_row(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        n[i] = sign
            * if minor.nrows() == 0 {
                1.0
            } else {
                minor.determinant()
            };
    }
    let norm = n.norm();
    if norm < 1e-14 {
        return None;
    }
    n /= norm;
    if let Some(first) = n.iter().find(|v| v.abs() > 1e-9) {
        if *first < 0.0 {
            n = -n;
        }
    }
    let c = n.dot(&points[0]);
    Some((n, c))
}

/// Orthonormal basis of the complement of the unit vector `n`.
fn complement_basis(n: &DVector<f64>) -> Vec<DVector<f64>> {
    let j = n.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut axes: Vec<usize> = (0..j).collect();
    axes.sort_by(|a, b| n[*a].abs().total_cmp(&n[*b].abs()));
    for &a in &axes {
        if basis.len() + 1 == j {
            break;
        }
        let mut v = DVector::zeros(j);
        v[a] = 1.0;
        v -= n * n.dot(&v);
        for b in &basis {
            let p = b.dot(&v);
            v -= b * p;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / nv);
        }
    }
    basis
}

/// Whether the mod-2 sum of the `j`-simplices (each `j+1` points of `ℝ^j`) is zero.
///
/// A compactly supported top-dimensional chain vanishes iff its boundary does, and the
/// boundary splits by supporting hyperplane into top-dimensional chains one dimension down.
pub fn cancels_mod2(simplices: &[Vec<DVector<f64>>], tol: f64) -> bool {
    let live: Vec<&Vec<DVector<f64>>> = simplices
        .iter()
        .filter(|s| gram_det(s) > DEGENERATE_GRAM)
        .collect();
    let Some(first) = live.first() else {
        return true;
    };
    let j = first[0].len();
    if j == 0 {
        return live.len().is_multiple_of(2);
    }
    let mut groups: Vec<(DVector<f64>, f64, Vec<Vec<DVector<f64>>>)> = Vec::new();
    for s in live {
        for omit in 0..s.len() {
            let face: Vec<DVector<f64>> = s
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != omit)
                .map(|(_, p)| p.clone())
                .collect();
            let Some((n, c)) = hyperplane(&face) else {
                continue;
            };
            match groups
                .iter_mut()
                .find(|(m, d, _)| (m - &n).amax() < tol && (d - c).abs() < tol)
            {
                Some(g) => g.2.push(face),
                None => groups.push((n, c, vec![face])),
            }
        }
    }
    groups.into_iter().all(|(n, c, faces)| {
        let basis = complement_basis(&n);
        let lowered: Vec<Vec<DVector<f64>>> = faces
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| {
                        let q = p - &n * c;
                        DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(&q)))
                    })
                    .collect()
            })
            .collect();
        cancels_mod2(&lowered, tol)
    })
}

/// Barycentric coordinates of `x` in the simplex with vertices `points` (same dimension).
pub fn barycentric_in(points: &[DVector<f64>], x: &DVector<f64>) -> Option<Vec<f64>> {
    let (res, w) = affine_residual(points, x);
    (res < 1e-9).then_some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn volumes() {
        assert!(
            (simplex_volume(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]) - 0.5).abs() < 1e-15
        );
        let tet = [
            v(&[0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
        ];
        assert!((simplex_volume(&tet) - 1.0 / 6.0).abs() < 1e-15);
        assert!((simplex_volume(&[v(&[0.0, 0.0, 0.0]), v(&[3.0, 4.0, 0.0])]) - 5.0).abs() < 1e-15);
        assert_eq!(simplex_volume(&[v(&[2.0])]), 1.0);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut seen = Vec::new();
        combinations(5, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut zero = 0;
        combinations(3, 0, |_| zero += 1);
        assert_eq!(zero, 1);
    }

    #[test]
    fn clipping_a_segment() {
        // λ₀ − λ₁ ≥ 0 keeps the first half of the segment.
        let out = clip_standard_simplex(1, &[v(&[1.0, -1.0])]);
        assert_eq!(out.len(), 1);
        let len = (&out[0][0] - &out[0][1]).norm();
        assert!((len - (0.5f64).hypot(0.5)).abs() < 1e-12);
        assert!(clip_standard_simplex(1, &[v(&[-1.0, -1.0])]).is_empty());
        assert_eq!(clip_standard_simplex(1, &[v(&[1.0, 2.0])]).len(), 1);
    }

    #[test]
    fn clipping_a_triangle_to_a_quadrilateral() {
        // λ₁ ≤ 1/2 written homogeneously: (λ₀ + λ₂ − λ₁) ≥ 0.
        let out = clip_standard_simplex(2, &[v(&[1.0, -1.0, 1.0])]);
        assert_eq!(out.len(), 2);
        let area: f64 = out.iter().map(|s| simplex_volume(s)).sum();
        let whole = simplex_volume(&[
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
        ]);
        assert!((area - 0.75 * whole).abs() < 1e-12);
    }

    #[test]
    fn tetrahedron_cut_by_two_planes() {
        let cuts = [v(&[1.0, -1.0, 0.0, 0.0]), v(&[0.0, 1.0, -1.0, 0.0])];
        let out = clip_standard_simplex(3, &cuts);
        let vol: f64 = out.iter().map(|s| simplex_volume(s)).sum();
        let whole = simplex_volume(&[
            v(&[1.0, 0.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0, 0.0]),
            v(&[0.0, 0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 0.0, 1.0]),
        ]);
        // λ₀ ≥ λ₁ ≥ λ₂ is one of six orderings of three symmetric coordinates.
        assert!(
            (vol - whole / 6.0).abs() < 1e-12,
            "{vol} vs {}",
            whole / 6.0
        );
    }

    #[test]
    fn mod2_cancellation() {
        let a = vec![v(&[0.0]), v(&[1.0])];
        let b = vec![v(&[1.0]), v(&[0.0])];
        let half = vec![v(&[0.0]), v(&[0.5])];
        let rest = vec![v(&[0.5]), v(&[1.0])];
        assert!(cancels_mod2(&[a.clone(), b.clone()], 1e-9));
        assert!(!cancels_mod2(std::slice::from_ref(&a), 1e-9));
        assert!(cancels_mod2(&[a.clone(), half.clone(), rest.clone()], 1e-9));
        let t = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let t1 = vec![v(&[0.0, 0.0]), v(&[0.5, 0.0]), v(&[0.0, 1.0])];
        let t2 = vec![v(&[0.5, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(cancels_mod2(&[t.clone(), t1.clone(), t2.clone()], 1e-9));
        assert!(!cancels_mod2(&[t.clone(), t1], 1e-9));
        assert!(cancels_mod2(&[], 1e-9));
    }

    proptest! {
        #[test]
        fn clipped_pieces_tile(a in prop::collection::vec(-1.0f64..1.0, 3), b in prop::collection::vec(-1.0f64..1.0, 3)) {
            // Both halves of a cut add back to the triangle.
            let cut = v(&a);
            let keep: f64 = clip_standard_simplex(2, &[cut.clone(), v(&b)]).iter().map(|s| simplex_volume(s)).sum();
            let other: f64 = clip_standard_simplex(2, &[-cut, v(&b)]).iter().map(|s| simplex_volume(s)).sum();
            let whole: f64 = clip_standard_simplex(2, &[v(&b)]).iter().map(|s| simplex_volume(s)).sum();
            prop_assert!((keep + other - whole).abs() < 1e-9);
        }

        #[test]
        fn subdivisions_cancel(t in 0.05f64..0.95, s in 0.05f64..0.95) {
            // σ + (two pieces splitting σ along a cevian) ≡ 0 mod 2.
            let p = v(&[t, 0.0]);
            let q = v(&[0.0, s]);
            let o = v(&[0.0, 0.0]);
            let x = v(&[1.0, 0.0]);
            let y = v(&[0.0, 1.0]);
            let sigma = vec![o.clone(), x.clone(), y.clone()];
            let pieces = vec![vec![o.clone(), p.clone(), y.clone()], vec![p.clone(), x.clone(), y.clone()]];
            let mut all = pieces.clone();
            all.push(sigma.clone());
            prop_assert!(cancels_mod2(&all, 1e-9));
            let skew = vec![vec![o, p, q], sigma];
            prop_assert!(!cancels_mod2(&skew, 1e-9));
        }
    }
}
