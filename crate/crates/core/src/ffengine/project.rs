//! Radial projection of pieces from an interior center onto the boundary of a cell, and
//! randomized center selection.
//!
//! From a center with barycentric coordinates `b` the ray through `y` leaves the simplex
//! through the facet opposite the vertex `i` minimizing `yᵢ/bᵢ`. On each such cone the
//! projection is a projective map, so a piece is clipped cone by cone and each part is
//! mapped vertex by vertex.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::Exp1;

use super::chain::Piece;
use super::complex::{CellId, GeoComplex};
use super::geometry::{affine_residual, clip_standard_simplex, simplex_volume, BARY_TOL};
use super::FFError;

const CENTER_TOL: f64 = 1e-9;

/// Images on `∂σ` with the `(k+1)`-volume of the straight-line homotopy.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub pieces: Vec<Piece>,
    pub track: f64,
}

fn project_point(y: &DVector<f64>, x: &DVector<f64>, exit: usize) -> DVector<f64> {
    let r = y[exit] / x[exit];
    let s = 1.0 / (1.0 - r);
    let mut p = DVector::from_iterator(
        y.len(),
        y.iter().zip(x.iter()).map(|(yl, xl)| (yl - r * xl) * s),
    );
    p[exit] = 0.0;
    p
}

fn too_close(piece: &Piece, x: &DVector<f64>) -> bool {
    let (res, w) = affine_residual(&piece.points, x);
    res <= CENTER_TOL && w.iter().all(|c| *c >= -CENTER_TOL)
}

/// Projection without dropping degenerate images.
pub(crate) fn project_raw(
    cx: &GeoComplex,
    sigma: CellId,
    x: &DVector<f64>,
    piece: &Piece,
) -> Result<Projection, FFError> {
    if piece.host != sigma {
        if cx.is_face(piece.host, sigma) {
            return Ok(Projection {
                pieces: vec![piece.clone()],
                track: 0.0,
            });
        }
        return Err(FFError::NotInSkeleton {
            host: piece.host,
            m: sigma.dim,
        });
    }
    if too_close(piece, x) {
        return Err(FFError::CenterTooClose);
    }
    let m = sigma.dim;
    let k = piece.dim();
    let apex = cx.ambient(sigma, x);
    let mut pieces = Vec::new();
    let mut track = 0.0;
    for exit in 0..=m {
        let cuts: Vec<DVector<f64>> = (0..=m)
            .filter(|&l| l != exit)
            .map(|l| {
                DVector::from_iterator(
                    k + 1,
                    piece.points.iter().map(|p| p[l] * x[exit] - p[exit] * x[l]),
                )
            })
            .collect();
        let parts = clip_standard_simplex(k, &cuts);
        let facet = cx.face(sigma, &(0..=m).filter(|&l| l != exit).collect::<Vec<_>>());
        for lam in &parts {
            let ys: Vec<DVector<f64>> = lam
                .iter()
                .map(|w| {
                    w.iter()
                        .zip(&piece.points)
                        .fold(DVector::zeros(m + 1), |acc, (c, p)| acc + p * *c)
                })
                .collect();
            let images: Vec<DVector<f64>> = ys.iter().map(|y| project_point(y, x, exit)).collect();
            let mut cone_in = vec![apex.clone()];
            cone_in.extend(ys.iter().map(|y| cx.ambient(sigma, y)));
            let mut cone_out = vec![apex.clone()];
            cone_out.extend(images.iter().map(|y| cx.ambient(sigma, y)));
            track += (simplex_volume(&cone_out) - simplex_volume(&cone_in)).max(0.0);
            let on_facet = images
                .iter()
                .map(|p| DVector::from_iterator(m, (0..=m).filter(|&l| l != exit).map(|l| p[l])))
                .collect();
            pieces.push(
                Piece {
                    host: facet,
                    points: on_facet,
                }
                .normalized(cx),
            );
        }
        if k == 0 && !parts.is_empty() {
            break;
        }
    }
    Ok(Projection { pieces, track })
}

/// Central projection of `piece` from `x` (barycentric in `σ`) onto `∂σ`, facet by facet.
/// Pieces already on `∂σ` are returned unchanged.
pub fn radial_project(
    cx: &GeoComplex,
    sigma: CellId,
    x: &DVector<f64>,
    piece: &Piece,
) -> Result<Projection, FFError> {
    let mut p = project_raw(cx, sigma, x, piece)?;
    p.pieces.retain(|q| !q.is_degenerate(cx));
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterChoice {
    pub x: DVector<f64>,
    pub input_volume: f64,
    pub projected_volume: f64,
    pub track: f64,
    pub tries: usize,
    pub c_target: f64,
    pub images: Vec<Piece>,
}

impl CenterChoice {
    pub fn ratio(&self) -> f64 {
        if self.input_volume == 0.0 {
            0.0
        } else {
            self.projected_volume.max(self.track) / self.input_volume
        }
    }
}

/// Uniform point of the open standard simplex.
pub fn sample_interior<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DVector<f64> {
    let mut x = DVector::from_iterator(
        m + 1,
        (0..=m).map(|_| rng.sample::<f64, _>(Exp1).max(1e-12)),
    );
    x /= x.sum();
    x
}

pub fn barycenter(m: usize) -> DVector<f64> {
    DVector::from_element(m + 1, 1.0 / (m + 1) as f64)
}

/// `x` avoids every piece: off the affine span for `k < m`, outside the piece for `k = m`.
fn admissible(sigma: CellId, pieces: &[&Piece], x: &DVector<f64>) -> bool {
    pieces.iter().all(|p| {
        if p.host != sigma {
            return true;
        }
        let (res, w) = affine_residual(&p.points, x);
        if p.dim() < sigma.dim {
            res > CENTER_TOL
        } else {
            w.iter().any(|c| *c < -BARY_TOL)
        }
    })
}

fn evaluate(
    cx: &GeoComplex,
    sigma: CellId,
    pieces: &[&Piece],
    x: &DVector<f64>,
) -> Result<(Vec<Piece>, f64, f64), FFError> {
    let mut images = Vec::new();
    let mut track = 0.0;
    for p in pieces {
        let proj = radial_project(cx, sigma, x, p)?;
        track += proj.track;
        images.extend(proj.pieces);
    }
    let vol = images.iter().map(|p| p.volume(cx)).sum();
    Ok((images, vol, track))
}

fn interior_pieces(sigma: CellId, pieces: &[Piece]) -> Vec<&Piece> {
    pieces.iter().filter(|p| p.host == sigma).collect()
}

/// `4 ×` the median of `max(projected, track)/volume` over random admissible centers.
pub fn auto_c_target<R: Rng + ?Sized>(
    cx: &GeoComplex,
    sigma: CellId,
    pieces: &[Piece],
    probes: usize,
    multiplier: f64,
    rng: &mut R,
) -> Result<f64, FFError> {
    let inside = interior_pieces(sigma, pieces);
    let vol: f64 = inside.iter().map(|p| p.volume(cx)).sum();
    if inside.is_empty() || vol == 0.0 {
        return Ok(multiplier);
    }
    let mut ratios = Vec::with_capacity(probes);
    let mut attempts = 0;
    while ratios.len() < probes && attempts < 8 * probes {
        attempts += 1;
        let x = sample_interior(sigma.dim, rng);
        if !admissible(sigma, &inside, &x) {
            continue;
        }
        let (_, pv, tr) = evaluate(cx, sigma, &inside, &x)?;
        ratios.push(pv.max(tr) / vol);
    }
    if ratios.is_empty() {
        return Ok(f64::INFINITY);
    }
    ratios.sort_by(f64::total_cmp);
    let mid = ratios.len() / 2;
    let median = if ratios.len() % 2 == 1 {
        ratios[mid]
    } else {
        0.5 * (ratios[mid - 1] + ratios[mid])
    };
    Ok(multiplier * median)
}

/// Rejection sampling of a center whose projected volume and track are both at most
/// `c_target` times the volume of the pieces inside `σ`.
pub fn select_center<R: Rng + ?Sized>(
    cx: &GeoComplex,
    sigma: CellId,
    pieces: &[Piece],
    c_target: f64,
    max_tries: usize,
    rng: &mut R,
) -> Result<CenterChoice, FFError> {
    let inside = interior_pieces(sigma, pieces);
    let input_volume: f64 = inside.iter().map(|p| p.volume(cx)).sum();
    if inside.is_empty() {
        return Ok(CenterChoice {
            x: barycenter(sigma.dim),
            input_volume,
            projected_volume: 0.0,
            track: 0.0,
            tries: 0,
            c_target,
            images: Vec::new(),
        });
    }
    let mut best = f64::INFINITY;
    for tries in 1..=max_tries {
        let x = sample_interior(sigma.dim, rng);
        if !admissible(sigma, &inside, &x) {
            continue;
        }
        let (images, projected_volume, track) = match evaluate(cx, sigma, &inside, &x) {
            Ok(v) => v,
            Err(FFError::CenterTooClose) => continue,
            Err(e) => return Err(e),
        };
        let choice = CenterChoice {
            x,
            input_volume,
            projected_volume,
            track,
            tries,
            c_target,
            images,
        };
        let ratio = choice.ratio();
        if projected_volume <= c_target * input_volume && track <= c_target * input_volume {
            return Ok(choice);
        }
        best = best.min(ratio);
    }
    Err(FFError::CenterSelection {
        tries: max_tries,
        best_ratio: best,
        c_target,
    })
}
