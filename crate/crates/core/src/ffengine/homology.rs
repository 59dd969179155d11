//! Simplicial homology with GF(2) coefficients.

use super::chain::PolyChain;
use super::complex::GeoComplex;
use super::FFError;

/// A GF(2) vector packed in 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            v.flip(i);
        }
        v
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|w| *w != 0)
            .map(|i| 64 * i + self.words[i].trailing_zeros() as usize)
    }
}

/// Incremental Gaussian elimination keyed by the lowest set bit.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: Vec<(usize, BitVec)>,
}

impl Echelon {
    fn reduce(&self, mut v: BitVec) -> BitVec {
        for (p, row) in &self.pivots {
            if v.get(*p) {
                v.xor(row);
            }
        }
        v
    }

    /// Adds a vector; returns whether it was independent.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.lowest() else { return false };
        // Keep the basis fully reduced so a single pass suffices.
        for (_, row) in self.pivots.iter_mut() {
            if row.get(p) {
                row.xor(&v);
            }
        }
        v = self.reduce(v);
        self.pivots.push((p, v));
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Columns of `∂_d : C_d → C_{d−1}`.
pub fn boundary_columns(cx: &GeoComplex, d: usize) -> Vec<BitVec> {
    let rows = if d == 0 { 0 } else { cx.count(d - 1) };
    cx.cells(d)
        .iter()
        .map(|verts| {
            let mut col = BitVec::zeros(rows);
            if d > 0 {
                for omit in 0..verts.len() {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != omit)
                        .map(|(_, v)| *v)
                        .collect();
                    col.flip(cx.cell_id(&face).expect("closed under faces").index);
                }
            }
            col
        })
        .collect()
}

pub fn boundary_rank(cx: &GeoComplex, d: usize) -> usize {
    if d > cx.dim() {
        return 0;
    }
    let mut e = Echelon::default();
    for c in boundary_columns(cx, d) {
        e.insert(c);
    }
    e.rank()
}

pub fn betti(cx: &GeoComplex, d: usize) -> usize {
    cx.count(d) - boundary_rank(cx, d) - boundary_rank(cx, d + 1)
}

pub fn boundary_of(cx: &GeoComplex, d: usize, z: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(if d == 0 { 0 } else { cx.count(d - 1) });
    for (i, col) in boundary_columns(cx, d).iter().enumerate() {
        if z.get(i) {
            out.xor(col);
        }
    }
    out
}

pub fn is_cycle(cx: &GeoComplex, d: usize, z: &BitVec) -> bool {
    boundary_of(cx, d, z).is_zero()
}

/// Whether `z` lies in the image of `∂_{d+1}`.
pub fn is_boundary(cx: &GeoComplex, d: usize, z: &BitVec) -> bool {
    let mut e = Echelon::default();
    if d < cx.dim() {
        for c in boundary_columns(cx, d + 1) {
            e.insert(c);
        }
    }
    e.contains(z)
}

pub fn homologous(cx: &GeoComplex, d: usize, a: &BitVec, b: &BitVec) -> bool {
    let mut s = a.clone();
    s.xor(b);
    is_boundary(cx, d, &s)
}

/// Coordinates of the class of `z` in the span of `basis` (classes assumed independent),
/// found by exhaustive search.
pub fn class_in_basis(
    cx: &GeoComplex,
    d: usize,
    z: &BitVec,
    basis: &[BitVec],
) -> Option<Vec<bool>> {
    let mut e = Echelon::default();
    if d < cx.dim() {
        for c in boundary_columns(cx, d + 1) {
            e.insert(c);
        }
    }
    (0u64..1 << basis.len()).find_map(|mask| {
        let mut s = z.clone();
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.xor(b);
            }
        }
        e.contains(&s)
            .then(|| (0..basis.len()).map(|i| mask >> i & 1 == 1).collect())
    })
}

/// Cellular chain of a chain made of whole `k`-cells (pieces in lower skeleta ignored).
pub fn cell_vector(cx: &GeoComplex, chain: &PolyChain) -> Result<BitVec, FFError> {
    let k = chain.k;
    let mut v = BitVec::zeros(cx.count(k));
    for p in &chain.pieces {
        if p.host.dim < k {
            continue;
        }
        if p.host.dim > k || !p.is_whole_cell() {
            return Err(FFError::NotInSkeleton { host: p.host, m: k });
        }
        v.flip(p.host.index);
    }
    Ok(v)
}

/// Edge cycles of the flat torus: row `j = 0` (horizontal) and column `i = 0` (vertical).
pub fn torus_reference_cycles(cx: &GeoComplex, nx: usize, ny: usize) -> [BitVec; 2] {
    let edge = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        cx.cell_id(&[lo, hi]).expect("torus edge").index
    };
    let mut h = BitVec::zeros(cx.count(1));
    for i in 0..nx {
        h.flip(edge(i, (i + 1) % nx));
    }
    let mut v = BitVec::zeros(cx.count(1));
    for j in 0..ny {
        v.flip(edge(nx * j, nx * ((j + 1) % ny)));
    }
    [h, v]
}
