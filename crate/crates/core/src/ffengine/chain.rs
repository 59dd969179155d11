//! Mod-2 polyhedral chains: pieces in barycentric coordinates of their host cells.

use nalgebra::DVector;
use serde::Serialize;

use super::complex::{CellId, GeoComplex};
use super::geometry::{gram_det, simplex_volume, BARY_TOL, DEGENERATE_GRAM};
use super::FFError;

/// Coordinates this close to zero are snapped when a piece is rehosted.
const SNAP: f64 = 1e-11;

/// An affine simplex inside `host`, vertices given in barycentric coordinates of the host.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub host: CellId,
    pub points: Vec<DVector<f64>>,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.points.len() - 1
    }

    pub fn ambient(&self, cx: &GeoComplex) -> Vec<DVector<f64>> {
        self.points
            .iter()
            .map(|b| cx.ambient(self.host, b))
            .collect()
    }

    pub fn volume(&self, cx: &GeoComplex) -> f64 {
        simplex_volume(&self.ambient(cx))
    }

    pub fn is_degenerate(&self, cx: &GeoComplex) -> bool {
        self.dim() > 0 && gram_det(&self.ambient(cx)) < DEGENERATE_GRAM
    }

    /// Checks `−ε ≤ b ≤ 1 + ε`, the coordinate count and `Σb = 1`.
    pub fn validate(&self, cx: &GeoComplex) -> Result<(), FFError> {
        if self.host.dim > cx.dim() || self.host.index >= cx.count(self.host.dim) {
            return Err(FFError::InvalidComplex(format!("no host {:?}", self.host)));
        }
        for b in &self.points {
            if b.len() != self.host.dim + 1 {
                return Err(FFError::PieceOutsideHost {
                    host: self.host,
                    coord: f64::NAN,
                });
            }
            if let Some(c) = b.iter().find(|c| **c < -BARY_TOL || **c > 1.0 + BARY_TOL) {
                return Err(FFError::PieceOutsideHost {
                    host: self.host,
                    coord: *c,
                });
            }
            if (b.sum() - 1.0).abs() > BARY_TOL {
                return Err(FFError::PieceOutsideHost {
                    host: self.host,
                    coord: b.sum(),
                });
            }
        }
        Ok(())
    }

    /// Moves the piece to the smallest face of its host that contains it.
    pub fn normalized(self, cx: &GeoComplex) -> Piece {
        let d = self.host.dim;
        let keep: Vec<usize> = (0..=d)
            .filter(|&l| self.points.iter().any(|b| b[l] > SNAP))
            .collect();
        let points = |keep: &[usize]| -> Vec<DVector<f64>> {
            self.points
                .iter()
                .map(|b| {
                    let mut v =
                        DVector::from_iterator(keep.len(), keep.iter().map(|&l| b[l].max(0.0)));
                    let s = v.sum();
                    v /= s;
                    v
                })
                .collect()
        };
        if keep.len() == d + 1 {
            return Piece {
                host: self.host,
                points: points(&keep),
            };
        }
        Piece {
            host: cx.face(self.host, &keep),
            points: points(&keep),
        }
    }

    /// The same point set, re-expressed in a cell `target ⊇ host`.
    pub fn lifted(&self, cx: &GeoComplex, target: CellId) -> Piece {
        let tv = cx.vertices_of(target);
        let pos: Vec<usize> = cx
            .vertices_of(self.host)
            .iter()
            .map(|v| tv.binary_search(v).expect("host is a face of target"))
            .collect();
        Piece {
            host: target,
            points: self
                .points
                .iter()
                .map(|b| {
                    let mut out = DVector::zeros(tv.len());
                    for (c, &p) in b.iter().zip(&pos) {
                        out[p] = *c;
                    }
                    out
                })
                .collect(),
        }
    }

    /// Whether the piece is exactly its host cell of the same dimension.
    pub fn is_whole_cell(&self) -> bool {
        if self.dim() != self.host.dim {
            return false;
        }
        let mut hit = vec![false; self.points.len()];
        for b in &self.points {
            match b.iter().position(|c| (c - 1.0).abs() <= BARY_TOL) {
                Some(l) if !hit[l] => hit[l] = true,
                _ => return false,
            }
        }
        true
    }

    /// All vertices lie in faces of dimension below `k` of the host.
    pub fn in_lower_skeleton(&self, k: usize) -> bool {
        self.host.dim < k
    }

    /// Canonical key for exact mod-2 cancellation: host plus sorted rounded vertices.
    fn key(&self) -> (CellId, Vec<Vec<i64>>) {
        let mut pts: Vec<Vec<i64>> = self
            .points
            .iter()
            .map(|b| b.iter().map(|c| (c * 1e9).round() as i64).collect())
            .collect();
        pts.sort();
        (self.host, pts)
    }
}

/// A mod-2 sum of `k`-dimensional pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyChain {
    pub k: usize,
    pub pieces: Vec<Piece>,
}

impl PolyChain {
    pub fn empty(k: usize) -> PolyChain {
        PolyChain {
            k,
            pieces: Vec::new(),
        }
    }

    /// Validates, rehosts and drops degenerate pieces.
    pub fn new(cx: &GeoComplex, k: usize, pieces: Vec<Piece>) -> Result<PolyChain, FFError> {
        let mut out = Vec::with_capacity(pieces.len());
        for p in pieces {
            if p.dim() != k {
                return Err(FFError::DimensionMismatch {
                    expected: k,
                    got: p.dim(),
                });
            }
            p.validate(cx)?;
            let p = p.normalized(cx);
            if !p.is_degenerate(cx) {
                out.push(p);
            }
        }
        Ok(PolyChain { k, pieces: out })
    }

    /// Chain consisting of whole `k`-cells.
    pub fn from_cells(cx: &GeoComplex, k: usize, cells: &[usize]) -> PolyChain {
        let pieces = cells
            .iter()
            .map(|&index| {
                assert!(index < cx.count(k), "no {k}-cell {index}");
                Piece {
                    host: CellId { dim: k, index },
                    points: (0..=k)
                        .map(|l| {
                            let mut e = DVector::zeros(k + 1);
                            e[l] = 1.0;
                            e
                        })
                        .collect(),
                }
            })
            .collect();
        PolyChain { k, pieces }
    }

    /// Total `k`-volume, each piece counted once.
    pub fn volume(&self, cx: &GeoComplex) -> f64 {
        self.pieces.iter().map(|p| p.volume(cx)).sum()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Cancels identical pieces in pairs.
    pub fn reduced(&self) -> PolyChain {
        let mut keyed: Vec<((CellId, Vec<Vec<i64>>), usize)> = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (p.key(), i))
            .collect();
        keyed.sort();
        let mut keep = Vec::new();
        let mut i = 0;
        while i < keyed.len() {
            let mut j = i;
            while j < keyed.len() && keyed[j].0 == keyed[i].0 {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                keep.push(keyed[i].1);
            }
            i = j;
        }
        keep.sort_unstable();
        PolyChain {
            k: self.k,
            pieces: keep.into_iter().map(|i| self.pieces[i].clone()).collect(),
        }
    }

    /// Mod-2 sum.
    pub fn plus(&self, other: &PolyChain) -> PolyChain {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        PolyChain { k: self.k, pieces }.reduced()
    }

    /// Highest dimension of a host cell.
    pub fn support_dim(&self) -> Option<usize> {
        self.pieces.iter().map(|p| p.host.dim).max()
    }

    /// Every piece sits in a cell of dimension `≤ m` with valid coordinates.
    pub fn in_skeleton(&self, cx: &GeoComplex, m: usize) -> bool {
        self.pieces
            .iter()
            .all(|p| p.host.dim <= m && p.validate(cx).is_ok())
    }
}

/// `final = (whole k-cells) ⊎ (pieces inside the (k−1)-skeleton)`, with leftovers listed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub whole_cells: Vec<usize>,
    pub lower: usize,
    pub other: usize,
    pub exhaustive: bool,
}

pub fn decompose(chain: &PolyChain, remainder: &[Piece]) -> Decomposition {
    let k = chain.k;
    let mut whole_cells = Vec::new();
    let (mut lower, mut other) = (0, 0);
    for p in chain.pieces.iter().chain(remainder) {
        if p.host.dim == k && p.is_whole_cell() {
            whole_cells.push(p.host.index);
        } else if p.in_lower_skeleton(k) {
            lower += 1;
        } else {
            other += 1;
        }
    }
    whole_cells.sort_unstable();
    Decomposition {
        whole_cells,
        lower,
        other,
        exhaustive: other == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn kuhn_cube_has_unit_volume() {
        // The six Kuhn simplices of [0,1]³ inside the simplex 0, 3e₁, 3e₂, 3e₃.
        let cx = GeoComplex::standard_simplex(3, 3.0);
        let host = CellId { dim: 3, index: 0 };
        let to_bary = |x: [f64; 3]| {
            b(&[
                1.0 - (x[0] + x[1] + x[2]) / 3.0,
                x[0] / 3.0,
                x[1] / 3.0,
                x[2] / 3.0,
            ])
        };
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let pieces: Vec<Piece> = perms
            .iter()
            .map(|p| {
                let mut x = [0.0; 3];
                let mut pts = vec![to_bary(x)];
                for &axis in p {
                    x[axis] = 1.0;
                    pts.push(to_bary(x));
                }
                Piece { host, points: pts }
            })
            .collect();
        let chain = PolyChain::new(&cx, 3, pieces).unwrap();
        assert!((chain.volume(&cx) - 1.0).abs() < 1e-12);
        assert_eq!(PolyChain::empty(3).volume(&cx), 0.0);
        let doubled = chain.plus(&chain);
        assert!(doubled.is_empty() && doubled.volume(&cx) == 0.0);
    }

    #[test]
    fn normalization_finds_the_smallest_face() {
        let cx = GeoComplex::unit_square();
        let tri = CellId { dim: 2, index: 0 };
        let p = Piece {
            host: tri,
            points: vec![b(&[0.5, 0.5, 0.0]), b(&[0.2, 0.8, 0.0])],
        }
        .normalized(&cx);
        assert_eq!(p.host.dim, 1);
        assert_eq!(cx.vertices_of(p.host), &cx.vertices_of(tri)[..2]);
        let back = p.lifted(&cx, tri);
        assert!((&back.points[1] - b(&[0.2, 0.8, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn degenerate_and_outside_pieces() {
        let cx = GeoComplex::unit_square();
        let tri = CellId { dim: 2, index: 0 };
        let tiny = Piece {
            host: tri,
            points: vec![b(&[0.3, 0.3, 0.4]), b(&[0.3, 0.3, 0.4])],
        };
        assert!(PolyChain::new(&cx, 1, vec![tiny]).unwrap().is_empty());
        let outside = Piece {
            host: tri,
            points: vec![b(&[1.2, -0.2, 0.0]), b(&[0.3, 0.3, 0.4])],
        };
        assert!(matches!(
            PolyChain::new(&cx, 1, vec![outside]),
            Err(FFError::PieceOutsideHost { .. })
        ));
    }

    #[test]
    fn whole_cells_and_decomposition() {
        let cx = GeoComplex::unit_square();
        let chain = PolyChain::from_cells(&cx, 1, &[0, 3]);
        assert!(chain.pieces.iter().all(Piece::is_whole_cell));
        let point = Piece {
            host: CellId { dim: 0, index: 1 },
            points: vec![b(&[1.0]), b(&[1.0])],
        };
        let d = decompose(&chain, &[point]);
        assert_eq!(d.whole_cells, vec![0, 3]);
        assert_eq!((d.lower, d.other), (1, 0));
        assert!(d.exhaustive);
    }
}
