//! Geometric simplicial complexes with affine charts, and the uniformity checker.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::geometry::simplex_volume;
use super::FFError;

const CHART_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub dim: usize,
    pub index: usize,
}

/// Model positions of the vertices of a maximal simplex, in the order of its sorted vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub model: Vec<DVector<f64>>,
}

impl Chart {
    /// Isometric coordinates of the simplex itself (Gram–Schmidt along its edges).
    pub fn intrinsic(points: &[DVector<f64>]) -> Chart {
        let d = points.len() - 1;
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for p in &points[1..] {
            let mut v = p - &points[0];
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
            let n = v.norm();
            basis.push(if n > 0.0 { v / n } else { v });
        }
        let model = points
            .iter()
            .map(|p| {
                let q = p - &points[0];
                DVector::from_iterator(d, basis.iter().map(|b| b.dot(&q)))
            })
            .collect();
        Chart { model }
    }
}

#[derive(Clone, Debug)]
pub struct GeoComplex {
    vertices: Vec<DVector<f64>>,
    /// Sorted vertex tuples per dimension, each list sorted lexicographically.
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    /// Maximal simplices and their charts.
    maximal: Vec<CellId>,
    charts: HashMap<CellId, Chart>,
    /// For each cell, the maximal simplices containing it.
    carriers: HashMap<CellId, Vec<CellId>>,
}

fn subsets(v: &[usize], out: &mut Vec<Vec<usize>>) {
    let n = v.len();
    for mask in 1u64..(1u64 << n) {
        out.push(
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| v[i])
                .collect(),
        );
    }
}

impl GeoComplex {
    /// Builds the face closure of the given simplices. Charts, when supplied, are listed per
    /// input simplex with model points in the input vertex order.
    pub fn new(
        vertices: Vec<DVector<f64>>,
        simplices: Vec<Vec<usize>>,
        charts: Option<Vec<Chart>>,
    ) -> Result<GeoComplex, FFError> {
        if vertices.is_empty() || simplices.is_empty() {
            return Err(FFError::InvalidComplex("empty complex".into()));
        }
        let ambient = vertices[0].len();
        if vertices.iter().any(|v| v.len() != ambient) {
            return Err(FFError::InvalidComplex(
                "vertices have mixed dimensions".into(),
            ));
        }
        if let Some(c) = &charts {
            if c.len() != simplices.len() {
                return Err(FFError::InvalidComplex(format!(
                    "{} charts for {} simplices",
                    c.len(),
                    simplices.len()
                )));
            }
        }
        let mut given: HashMap<Vec<usize>, Chart> = HashMap::new();
        let mut all: Vec<Vec<usize>> = Vec::new();
        for (i, s) in simplices.iter().enumerate() {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() || sorted.len() > 63 {
                return Err(FFError::InvalidComplex(format!("bad simplex {s:?}")));
            }
            if let Some(&bad) = sorted.iter().find(|&&v| v >= vertices.len()) {
                return Err(FFError::InvalidComplex(format!(
                    "vertex {bad} out of range"
                )));
            }
            if let Some(c) = &charts {
                let chart = &c[i];
                if chart.model.len() != s.len() {
                    return Err(FFError::InvalidComplex(format!(
                        "chart {i} has {} points",
                        chart.model.len()
                    )));
                }
                let mut model = Vec::with_capacity(s.len());
                for v in &sorted {
                    let pos = s.iter().position(|w| w == v).expect("same vertex set");
                    model.push(chart.model[pos].clone());
                }
                given.insert(sorted.clone(), Chart { model });
            }
            subsets(&sorted, &mut all);
        }
        let top = all.iter().map(Vec::len).max().unwrap() - 1;
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
        for s in all {
            by_dim[s.len() - 1].push(s);
        }
        for list in &mut by_dim {
            list.sort();
            list.dedup();
        }
        let index: Vec<HashMap<Vec<usize>, usize>> = by_dim
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut cx = GeoComplex {
            vertices,
            simplices: by_dim,
            index,
            maximal: Vec::new(),
            charts: HashMap::new(),
            carriers: HashMap::new(),
        };
        let mut inputs: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        inputs.sort();
        inputs.dedup();
        for s in &inputs {
            let id = cx.cell_id(s).expect("listed");
            let is_face = cx.simplices[id.dim + 1..]
                .iter()
                .flatten()
                .any(|t| s.iter().all(|v| t.binary_search(v).is_ok()));
            if is_face {
                continue;
            }
            let pts: Vec<DVector<f64>> = s.iter().map(|&v| cx.vertices[v].clone()).collect();
            if id.dim > 0 && simplex_volume(&pts) <= 1e-14 {
                return Err(FFError::InvalidComplex(format!("degenerate simplex {s:?}")));
            }
            let chart = given.remove(s).unwrap_or_else(|| Chart::intrinsic(&pts));
            cx.check_chart(id, &chart)?;
            cx.charts.insert(id, chart);
            cx.maximal.push(id);
        }
        for &m in &cx.maximal.clone() {
            let verts = cx.vertices_of(m).to_vec();
            let mut faces = Vec::new();
            subsets(&verts, &mut faces);
            for f in faces {
                let fid = cx.cell_id(&f).expect("face closed");
                cx.carriers.entry(fid).or_default().push(m);
            }
        }
        let defect = cx.chart_consistency_defect();
        if defect > CHART_TOL {
            return Err(FFError::InvalidComplex(format!(
                "charts disagree on shared faces by {defect:.3e}"
            )));
        }
        Ok(cx)
    }

    fn check_chart(&self, id: CellId, chart: &Chart) -> Result<(), FFError> {
        let bad = |reason: String| FFError::InvalidChart { cell: id, reason };
        if chart.model.len() != id.dim + 1 || chart.model.iter().any(|p| p.len() != id.dim) {
            return Err(bad(format!(
                "expected {} points of dimension {}",
                id.dim + 1,
                id.dim
            )));
        }
        if id.dim > 0 && simplex_volume(&chart.model) <= 1e-14 {
            return Err(bad("model simplex is degenerate".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn cells(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells(dim).len()
    }

    pub fn cell_id(&self, verts: &[usize]) -> Option<CellId> {
        let dim = verts.len().checked_sub(1)?;
        self.index
            .get(dim)?
            .get(verts)
            .map(|&index| CellId { dim, index })
    }

    pub fn vertices_of(&self, id: CellId) -> &[usize] {
        &self.simplices[id.dim][id.index]
    }

    pub fn maximal(&self) -> &[CellId] {
        &self.maximal
    }

    pub fn chart(&self, id: CellId) -> Option<&Chart> {
        self.charts.get(&id)
    }

    /// Maximal simplices containing `id`.
    pub fn carriers(&self, id: CellId) -> &[CellId] {
        self.carriers.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Realized vertex positions of a cell.
    pub fn points_of(&self, id: CellId) -> Vec<DVector<f64>> {
        self.vertices_of(id)
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect()
    }

    /// Ambient point with barycentric coordinates `b` in `id`.
    pub fn ambient(&self, id: CellId, b: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        for (w, &v) in b.iter().zip(self.vertices_of(id)) {
            out += &self.vertices[v] * *w;
        }
        out
    }

    pub fn cell_volume(&self, id: CellId) -> f64 {
        simplex_volume(&self.points_of(id))
    }

    /// The face of `id` spanned by the local vertices `keep` (positions in its vertex list).
    pub fn face(&self, id: CellId, keep: &[usize]) -> CellId {
        let verts: Vec<usize> = keep.iter().map(|&i| self.vertices_of(id)[i]).collect();
        self.cell_id(&verts).expect("faces are listed")
    }

    /// Whether `face` is a face of `cell` (possibly equal).
    pub fn is_face(&self, face: CellId, cell: CellId) -> bool {
        let c = self.vertices_of(cell);
        self.vertices_of(face)
            .iter()
            .all(|v| c.binary_search(v).is_ok())
    }

    /// Model positions of the vertices of `id` in the chart of the maximal simplex `m ⊇ id`.
    fn model_of(&self, id: CellId, m: CellId) -> Vec<DVector<f64>> {
        let chart = &self.charts[&m];
        let mv = self.vertices_of(m);
        self.vertices_of(id)
            .iter()
            .map(|v| chart.model[mv.binary_search(v).expect("face")].clone())
            .collect()
    }

    /// Largest disagreement between edge Gram matrices of a face in the charts of its carriers.
    pub fn chart_consistency_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (id, carriers) in &self.carriers {
            if id.dim == 0 || carriers.len() < 2 {
                continue;
            }
            let grams: Vec<DMatrix<f64>> = carriers
                .iter()
                .map(|&m| edge_gram(&self.model_of(*id, m)))
                .collect();
            for g in &grams[1..] {
                worst = worst.max((g - &grams[0]).amax());
            }
        }
        worst
    }

    /// `max(σ_max, 1/σ_min)` for the affine map from the realized face to its model in the chart
    /// of `m`.
    fn distortion_in(&self, id: CellId, m: CellId) -> f64 {
        if id.dim == 0 {
            return 1.0;
        }
        let real = edge_gram(&self.points_of(id));
        let model = edge_gram(&self.model_of(id, m));
        // Singular values squared are the generalized eigenvalues of (model, real).
        let Some(chol) = real.clone().cholesky() else {
            return f64::INFINITY;
        };
        let l_inv = chol.l().try_inverse().expect("positive definite");
        let c = &l_inv * model * l_inv.transpose();
        let eig = c.symmetric_eigen().eigenvalues;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for e in eig.iter() {
            let s = e.max(0.0).sqrt();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        hi.max(1.0 / lo)
    }

    pub fn distortion(&self, id: CellId) -> f64 {
        self.carriers(id)
            .iter()
            .map(|&m| self.distortion_in(id, m))
            .fold(1.0, f64::max)
    }

    pub fn diameter(&self, id: CellId) -> f64 {
        let p = self.points_of(id);
        let mut d = 0.0f64;
        for i in 0..p.len() {
            for j in 0..i {
                d = d.max((&p[i] - &p[j]).norm());
            }
        }
        d
    }

    /// The same complex with every vertex and chart scaled by `s`.
    pub fn scaled(&self, s: f64) -> GeoComplex {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v *= s;
        }
        for c in out.charts.values_mut() {
            for p in &mut c.model {
                *p *= s;
            }
        }
        out
    }

    /// Whether every cell of dimension `k` is a face of some maximal simplex of dimension `> k`.
    pub fn is_pure(&self) -> bool {
        self.maximal.iter().all(|m| m.dim == self.dim())
    }
}

fn edge_gram(points: &[DVector<f64>]) -> DMatrix<f64> {
    let k = points.len() - 1;
    let e = DMatrix::from_fn(points[0].len(), k, |r, c| points[c + 1][r] - points[0][r]);
    e.transpose() * e
}

// ---- builders ----

impl GeoComplex {
    /// `[0,1]²` split along the diagonal from `(0,0)` to `(1,1)`.
    pub fn unit_square() -> GeoComplex {
        let v = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
        GeoComplex::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
            None,
        )
        .expect("valid")
    }

    /// A single equilateral triangle of side 1 with its own chart.
    pub fn equilateral() -> GeoComplex {
        let v = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
        GeoComplex::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.5, 3f64.sqrt() / 2.0)],
            vec![vec![0, 1, 2]],
            None,
        )
        .expect("valid")
    }

    /// The simplex with vertices `0, s·e₁, …, s·e_d` in `ℝ^d`.
    pub fn standard_simplex(d: usize, s: f64) -> GeoComplex {
        let mut verts = vec![DVector::zeros(d)];
        for i in 0..d {
            let mut e = DVector::zeros(d);
            e[i] = s;
            verts.push(e);
        }
        GeoComplex::new(verts, vec![(0..=d).collect()], None).expect("valid")
    }

    /// `n_x × n_y` grid torus, each unit square split along its main diagonal into
    /// `(v₀₀, v₁₀, v₁₁)` and `(v₀₀, v₁₁, v₀₁)`. Vertices sit on the Clifford torus in `ℝ⁴`
    /// with circumferences `n_x, n_y`; charts are the flat grid triangles.
    pub fn flat_torus(nx: usize, ny: usize) -> Result<GeoComplex, FFError> {
        if nx < 3 || ny < 3 {
            return Err(FFError::InvalidComplex(
                "torus grids need at least 3 × 3 squares".into(),
            ));
        }
        let tau = std::f64::consts::TAU;
        let (rx, ry) = (nx as f64 / tau, ny as f64 / tau);
        let id = |i: usize, j: usize| (i % nx) + nx * (j % ny);
        let mut verts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (u, w) = (tau * i as f64 / nx as f64, tau * j as f64 / ny as f64);
                verts.push(DVector::from_vec(vec![
                    rx * u.cos(),
                    rx * u.sin(),
                    ry * w.cos(),
                    ry * w.sin(),
                ]));
            }
        }
        let m = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
        let mut simplices = Vec::new();
        let mut charts = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                simplices.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                charts.push(Chart {
                    model: vec![m(0.0, 0.0), m(1.0, 0.0), m(1.0, 1.0)],
                });
                simplices.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                charts.push(Chart {
                    model: vec![m(0.0, 0.0), m(1.0, 1.0), m(0.0, 1.0)],
                });
            }
        }
        GeoComplex::new(verts, simplices, Some(charts))
    }
}

// ---- uniformity ----

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexMeasure {
    pub cell: CellId,
    pub diameter: f64,
    pub distortion: f64,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub r: f64,
    pub delta: f64,
    pub simplices: Vec<SimplexMeasure>,
    pub worst_diameter: Option<SimplexMeasure>,
    pub worst_distortion: Option<SimplexMeasure>,
    /// Smallest `volume / r^dim`.
    pub worst_volume: Option<SimplexMeasure>,
    pub diameter_ok: bool,
    pub distortion_ok: bool,
    pub volume_ok: bool,
    pub pass: bool,
}

/// Checks `diam σ ≤ r`, chart distortion `≤ 1 + δ` and `ℋ^{dim σ}(σ) ≥ δ r^{dim σ}` for every
/// simplex of positive dimension.
pub fn check_uniform(cx: &GeoComplex, r: f64, delta: f64) -> UniformityReport {
    let mut simplices = Vec::new();
    for dim in 1..=cx.dim() {
        for index in 0..cx.count(dim) {
            let cell = CellId { dim, index };
            simplices.push(SimplexMeasure {
                cell,
                diameter: cx.diameter(cell),
                distortion: cx.distortion(cell),
                volume: cx.cell_volume(cell),
            });
        }
    }
    let pick = |key: &dyn Fn(&SimplexMeasure) -> f64| {
        simplices
            .iter()
            .max_by(|a, b| key(a).total_cmp(&key(b)))
            .cloned()
    };
    let worst_diameter = pick(&|s| s.diameter);
    let worst_distortion = pick(&|s| s.distortion);
    let worst_volume = pick(&|s| -s.volume / r.powi(s.cell.dim as i32));
    let diameter_ok = simplices.iter().all(|s| s.diameter <= r);
    let distortion_ok = simplices.iter().all(|s| s.distortion <= 1.0 + delta);
    let volume_ok = simplices
        .iter()
        .all(|s| s.volume >= delta * r.powi(s.cell.dim as i32));
    UniformityReport {
        r,
        delta,
        simplices,
        worst_diameter,
        worst_distortion,
        worst_volume,
        diameter_ok,
        distortion_ok,
        volume_ok,
        pass: diameter_ok && distortion_ok && volume_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_closure_counts() {
        let sq = GeoComplex::unit_square();
        assert_eq!((sq.count(0), sq.count(1), sq.count(2)), (4, 5, 2));
        let t = GeoComplex::flat_torus(8, 8).unwrap();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (64, 192, 128));
        // Euler characteristic of the torus.
        assert_eq!(t.count(0) as i64 - t.count(1) as i64 + t.count(2) as i64, 0);
        assert!(t.is_pure());
        let edge = t.cell_id(&[0, 1]).unwrap();
        assert_eq!(t.carriers(edge).len(), 2);
    }

    #[test]
    fn square_uniformity_examples() {
        let sq = GeoComplex::unit_square();
        let ok = check_uniform(&sq, 1.5, 0.1);
        assert!(ok.pass, "{ok:?}");
        let tri = ok.simplices.iter().find(|s| s.cell.dim == 2).unwrap();
        assert!((tri.diameter - 2f64.sqrt()).abs() < 1e-15 && (tri.volume - 0.5).abs() < 1e-15);
        let bad = check_uniform(&sq, 1.5, 0.5);
        assert!(!bad.pass && !bad.volume_ok && bad.diameter_ok && bad.distortion_ok);
        assert_eq!(bad.worst_volume.unwrap().cell.dim, 2);
    }

    #[test]
    fn equilateral_is_isometric() {
        let t = GeoComplex::equilateral();
        let top = CellId { dim: 2, index: 0 };
        assert!((t.distortion(top) - 1.0).abs() < 1e-12);
        assert!(check_uniform(&t, 1.0, 0.2).pass);
    }

    #[test]
    fn torus_charts_are_nearly_isometric() {
        let t = GeoComplex::flat_torus(8, 8).unwrap();
        assert!(t.chart_consistency_defect() < 1e-12);
        let rep = check_uniform(&t, 1.5, 0.05);
        let d = rep.worst_distortion.as_ref().unwrap().distortion;
        // Chords of an 8-gon of perimeter 8 are shorter than 1 by sin(π/8)/(π/8).
        let chord = (std::f64::consts::PI / 8.0).sin() / (std::f64::consts::PI / 8.0);
        assert!(d >= 1.0 / chord - 1e-12 && d < 1.05, "{d}");
        assert!(rep.pass);
    }

    #[test]
    fn explicit_chart_disagreement_is_rejected() {
        let v = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
        let verts = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        let charts = vec![
            Chart {
                model: vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0)],
            },
            Chart {
                model: vec![v(0.0, 0.0), v(2.0, 2.0), v(0.0, 1.0)],
            },
        ];
        let err = GeoComplex::new(verts, vec![vec![0, 1, 2], vec![0, 2, 3]], Some(charts));
        assert!(matches!(err, Err(FFError::InvalidComplex(_))));
    }

    #[test]
    fn scaling() {
        let sq = GeoComplex::unit_square().scaled(3.0);
        assert!((sq.cell_volume(CellId { dim: 2, index: 0 }) - 4.5).abs() < 1e-12);
        assert!((sq.distortion(CellId { dim: 2, index: 0 }) - 1.0).abs() < 1e-12);
    }
}
