//! Random closed 1-chains with known homology classes, for testing deformations.

use std::collections::VecDeque;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chain::{Piece, PolyChain};
use super::complex::{CellId, GeoComplex};
use super::homology::BitVec;
use super::project::sample_interior;
use super::FFError;

/// A closed polygonal loop on the grid torus with its winding numbers.
#[derive(Clone, Debug)]
pub struct TorusLoop {
    pub chain: PolyChain,
    pub winding: (i64, i64),
}

impl TorusLoop {
    /// Class in the basis of the row and column reference cycles.
    pub fn parity(&self) -> (bool, bool) {
        (
            self.winding.0.rem_euclid(2) == 1,
            self.winding.1.rem_euclid(2) == 1,
        )
    }
}

/// Piece of the segment `p → q` in grid coordinates; the segment must lie in one triangle.
fn grid_piece(
    cx: &GeoComplex,
    nx: usize,
    ny: usize,
    p: [f64; 2],
    q: [f64; 2],
) -> Result<Piece, FFError> {
    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
    let (ix, jy) = (mid[0].floor(), mid[1].floor());
    let lower = mid[1] - jy <= mid[0] - ix;
    let id = |di: i64, dj: i64| -> usize {
        let i = (ix as i64 + di).rem_euclid(nx as i64) as usize;
        let j = (jy as i64 + dj).rem_euclid(ny as i64) as usize;
        i + nx * j
    };
    let verts = if lower {
        [id(0, 0), id(1, 0), id(1, 1)]
    } else {
        [id(0, 0), id(1, 1), id(0, 1)]
    };
    let bary = |pt: [f64; 2]| -> [f64; 3] {
        let (fx, fy) = ((pt[0] - ix).clamp(0.0, 1.0), (pt[1] - jy).clamp(0.0, 1.0));
        if lower {
            [1.0 - fx, (fx - fy).max(0.0), fy]
        } else {
            [1.0 - fy, fx, (fy - fx).max(0.0)]
        }
    };
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by_key(|&l| verts[l]);
    let mut sorted: Vec<usize> = order.iter().map(|&l| verts[l]).collect();
    sorted.dedup();
    let host = cx
        .cell_id(&sorted)
        .ok_or_else(|| FFError::UnknownCell(sorted.clone()))?;
    let points = [p, q]
        .iter()
        .map(|&pt| {
            let w = bary(pt);
            let mut v = DVector::from_iterator(3, order.iter().map(|&l| w[l]));
            v /= v.sum();
            v
        })
        .collect();
    Ok(Piece { host, points })
}

/// Cuts `p → q` where it crosses `x ∈ ℤ`, `y ∈ ℤ` or `y − x ∈ ℤ`.
fn split_segment(p: [f64; 2], q: [f64; 2]) -> Vec<f64> {
    let mut cuts = vec![0.0, 1.0];
    let mut crossings = |a: f64, b: f64| {
        let (lo, hi) = (a.min(b), a.max(b));
        let mut n = lo.ceil();
        while n <= hi {
            if b != a {
                let s = (n - a) / (b - a);
                if s > 0.0 && s < 1.0 {
                    cuts.push(s);
                }
            }
            n += 1.0;
        }
    };
    crossings(p[0], q[0]);
    crossings(p[1], q[1]);
    crossings(p[1] - p[0], q[1] - q[0]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts
}

/// Fourier loop on the `n_x × n_y` torus with winding `(a, b) ∈ {−1, 0, 1, 2}²`.
pub fn torus_loop(cx: &GeoComplex, nx: usize, ny: usize, seed: u64) -> Result<TorusLoop, FFError> {
    const SAMPLES: usize = 48;
    const HARMONICS: usize = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: i64 = rng.random_range(-1..=2);
    let b: i64 = rng.random_range(-1..=2);
    let base = [
        rng.random::<f64>() * nx as f64,
        rng.random::<f64>() * ny as f64,
    ];
    let radius = if a == 0 && b == 0 {
        rng.random_range(0.8..2.0)
    } else {
        0.0
    };
    let coef: Vec<[f64; 4]> = (1..=HARMONICS)
        .map(|h| {
            let amp = 1.5 / h as f64;
            [
                rng.random_range(-amp..amp),
                rng.random_range(-amp..amp),
                rng.random_range(-amp..amp),
                rng.random_range(-amp..amp),
            ]
        })
        .collect();
    let tau = std::f64::consts::TAU;
    let curve = |t: f64| -> [f64; 2] {
        let mut x = base[0] + a as f64 * nx as f64 * t + radius * (tau * t).cos();
        let mut y = base[1] + b as f64 * ny as f64 * t + radius * (tau * t).sin();
        for (h, c) in coef.iter().enumerate() {
            let w = tau * (h + 1) as f64 * t;
            x += c[0] * w.sin() + c[1] * (w.cos() - 1.0);
            y += c[2] * w.sin() + c[3] * (w.cos() - 1.0);
        }
        [x, y]
    };
    let mut pts: Vec<[f64; 2]> = (0..SAMPLES)
        .map(|i| curve(i as f64 / SAMPLES as f64))
        .collect();
    let first = pts[0];
    pts.push([
        first[0] + (a * nx as i64) as f64,
        first[1] + (b * ny as i64) as f64,
    ]);
    let mut pieces = Vec::new();
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let cuts = split_segment(p, q);
        for c in cuts.windows(2) {
            let at = |s: f64| [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
            pieces.push(grid_piece(cx, nx, ny, at(c[0]), at(c[1]))?);
        }
    }
    Ok(TorusLoop {
        chain: PolyChain::new(cx, 1, pieces)?,
        winding: (a, b),
    })
}

/// A closed walk through top cells, drawn as a polygon through facet crossings, with the
/// homologous edge cycle obtained by sliding each crossing to the lowest vertex of its facet.
#[derive(Clone, Debug)]
pub struct DualCycle {
    pub chain: PolyChain,
    pub oracle: BitVec,
    pub cells: Vec<CellId>,
}

fn facets_of(cx: &GeoComplex, t: CellId) -> Vec<CellId> {
    (0..=t.dim)
        .map(|omit| cx.face(t, &(0..=t.dim).filter(|&l| l != omit).collect::<Vec<_>>()))
        .collect()
}

fn neighbor(cx: &GeoComplex, t: CellId, f: CellId) -> Option<CellId> {
    cx.carriers(f)
        .iter()
        .copied()
        .find(|&c| c != t && c.dim == t.dim)
}

fn mixed_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DVector<f64> {
    let w = sample_interior(m, rng);
    w * 0.8 + DVector::from_element(m + 1, 0.2 / (m + 1) as f64)
}

/// Random closed walk of about `steps` moves. Needs a pure complex of dimension `≥ 2`.
pub fn dual_cycle(cx: &GeoComplex, steps: usize, seed: u64) -> Result<DualCycle, FFError> {
    let n = cx.dim();
    if n < 2 || !cx.is_pure() {
        return Err(FFError::InvalidComplex(
            "dual cycles need a pure complex of dimension ≥ 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tops = cx.count(n);
    let start = CellId {
        dim: n,
        index: rng.random_range(0..tops),
    };
    let mut cells = vec![start];
    let mut crossed = Vec::new();
    for _ in 0..steps.max(1) {
        let here = *cells.last().expect("nonempty");
        let options: Vec<(CellId, CellId)> = facets_of(cx, here)
            .into_iter()
            .filter_map(|f| neighbor(cx, here, f).map(|t| (f, t)))
            .collect();
        if options.is_empty() {
            break;
        }
        let (f, t) = options[rng.random_range(0..options.len())];
        crossed.push(f);
        cells.push(t);
    }
    // Breadth-first return to the start.
    let here = *cells.last().expect("nonempty");
    if here != start {
        let mut prev: Vec<Option<(CellId, CellId)>> = vec![None; tops];
        let mut queue = VecDeque::from([start]);
        let mut seen = vec![false; tops];
        seen[start.index] = true;
        while let Some(c) = queue.pop_front() {
            if c == here {
                break;
            }
            for f in facets_of(cx, c) {
                if let Some(t) = neighbor(cx, c, f) {
                    if !seen[t.index] {
                        seen[t.index] = true;
                        prev[t.index] = Some((c, f));
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut c = here;
        while c != start {
            let (p, f) = prev[c.index]
                .ok_or_else(|| FFError::InvalidComplex("complex is disconnected".into()))?;
            crossed.push(f);
            cells.push(p);
            c = p;
        }
    }
    let len = crossed.len();
    if len == 0 {
        return Ok(DualCycle {
            chain: PolyChain::empty(1),
            oracle: BitVec::zeros(cx.count(1)),
            cells,
        });
    }
    // Crossing `i` leaves `cells[i]` through `crossed[i]` into `cells[i + 1]`.
    let points: Vec<Piece> = crossed
        .iter()
        .map(|&f| Piece {
            host: f,
            points: vec![mixed_point(f.dim, &mut rng)],
        })
        .collect();
    let mut pieces = Vec::new();
    let mut oracle = BitVec::zeros(cx.count(1));
    for i in 0..len {
        let cell = cells[i + 1];
        let (a, b) = (&points[i], &points[(i + 1) % len]);
        let q = mixed_point(n, &mut rng);
        let a_in = a.lifted(cx, cell).points.remove(0);
        let b_in = b.lifted(cx, cell).points.remove(0);
        pieces.push(Piece {
            host: cell,
            points: vec![a_in, q.clone()],
        });
        pieces.push(Piece {
            host: cell,
            points: vec![q, b_in],
        });
        let va = cx.vertices_of(a.host)[0];
        let vb = cx.vertices_of(b.host)[0];
        if va != vb {
            let e = cx
                .cell_id(&[va.min(vb), va.max(vb)])
                .expect("vertices of one cell span an edge");
            oracle.flip(e.index);
        }
    }
    Ok(DualCycle {
        chain: PolyChain::new(cx, 1, pieces)?,
        oracle,
        cells,
    })
}
