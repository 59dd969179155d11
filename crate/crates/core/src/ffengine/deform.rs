//! The level-by-level deformation of a chain into the `k`-skeleton.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chain::{decompose, Decomposition, Piece, PolyChain};
use super::complex::{CellId, GeoComplex};
use super::geometry::{barycentric_in, cancels_mod2, BARY_TOL};
use super::project::{auto_c_target, project_raw, sample_interior, select_center};
use super::FFError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FFConfig {
    /// Fixed acceptance constant; `None` picks one per cell from random probes.
    pub c_target: Option<f64>,
    pub probes: usize,
    pub c_multiplier: f64,
    pub max_tries: usize,
}

impl Default for FFConfig {
    fn default() -> Self {
        FFConfig {
            c_target: None,
            probes: 16,
            c_multiplier: 4.0,
            max_tries: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub m: usize,
    pub cells: usize,
    pub volume_before: f64,
    pub volume_after: f64,
    pub track: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformResult {
    pub k: usize,
    pub input_volume: f64,
    pub final_chain: PolyChain,
    /// Degenerate images from the last level; they sit in the `(k−1)`-skeleton.
    pub remainder: Vec<Piece>,
    pub final_volume: f64,
    pub total_track: f64,
    pub steps: Vec<StepRecord>,
    /// Largest per-cell ratio `max(projected, track)/volume` over all steps.
    pub c_measured: f64,
    /// `max(final volume, track)/input volume`.
    pub c_empirical: f64,
}

impl DeformResult {
    pub fn decomposition(&self) -> Decomposition {
        decompose(&self.final_chain, &self.remainder)
    }

    pub fn whole_cells(&self) -> Vec<usize> {
        self.decomposition().whole_cells
    }
}

fn cell_rng(seed: u64, m: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | index as u64);
    rng
}

struct CellOutcome {
    images: Vec<Piece>,
    remainder: Vec<Piece>,
    track: f64,
    ratio: f64,
}

fn flat(b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(b.len() - 1, b.iter().skip(1).copied())
}

fn corners(k: usize) -> Vec<DVector<f64>> {
    (0..=k)
        .map(|l| {
            let mut e = DVector::zeros(k + 1);
            e[l] = 1.0;
            e
        })
        .collect()
}

/// Toggle points of the mod-2 sum of intervals of `[0, 1]`.
fn xor_intervals(pieces: &[&Piece]) -> Vec<f64> {
    let mut ends: Vec<f64> = pieces
        .iter()
        .flat_map(|p| [p.points[0][1], p.points[1][1]])
        .collect();
    ends.sort_by(f64::total_cmp);
    let mut toggles = Vec::new();
    let mut i = 0;
    while i < ends.len() {
        let mut j = i;
        while j < ends.len() && ends[j] - ends[i] <= BARY_TOL {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            toggles.push(ends[i]);
        }
        i = j;
    }
    toggles
}

/// The last level: each `k`-cell is kept whole, emptied, or its pieces are pushed to its
/// boundary from a point outside them.
fn collapse_cell(
    cx: &GeoComplex,
    sigma: CellId,
    pieces: &[&Piece],
    rng: &mut ChaCha8Rng,
) -> Result<CellOutcome, FFError> {
    let k = sigma.dim;
    let whole = Piece {
        host: sigma,
        points: corners(k),
    };
    let mut flats: Vec<Vec<DVector<f64>>> = pieces
        .iter()
        .map(|p| p.points.iter().map(flat).collect())
        .collect();
    let done = |images: Vec<Piece>| CellOutcome {
        images,
        remainder: Vec::new(),
        track: 0.0,
        ratio: 1.0,
    };
    if cancels_mod2(&flats, 1e-9) {
        return Ok(done(Vec::new()));
    }
    flats.push(whole.points.iter().map(flat).collect());
    if cancels_mod2(&flats, 1e-9) {
        return Ok(done(vec![whole]));
    }
    let (reduced, x): (Vec<Piece>, DVector<f64>) = if k == 1 {
        let t = xor_intervals(pieces);
        // Covered: [t₀, t₁], [t₂, t₃], …
        let mut gaps = vec![(0.0, t[0]), (t[t.len() - 1], 1.0)];
        gaps.extend((1..t.len() - 1).step_by(2).map(|i| (t[i], t[i + 1])));
        let (a, b) = gaps
            .iter()
            .copied()
            .max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0)))
            .expect("nonempty");
        let s = a + (b - a) * rng.random_range(0.25..0.75);
        let ivals = t
            .chunks(2)
            .map(|w| Piece {
                host: sigma,
                points: vec![
                    DVector::from_vec(vec![1.0 - w[0], w[0]]),
                    DVector::from_vec(vec![1.0 - w[1], w[1]]),
                ],
            })
            .collect();
        (ivals, DVector::from_vec(vec![1.0 - s, s]))
    } else {
        let inside = |x: &DVector<f64>| {
            pieces.iter().any(|p| {
                let pts: Vec<DVector<f64>> = p.points.iter().map(flat).collect();
                barycentric_in(&pts, &flat(x)).is_some_and(|w| w.iter().all(|c| *c >= -BARY_TOL))
            })
        };
        let mut found = None;
        for _ in 0..1000 {
            let x = sample_interior(k, rng);
            if !inside(&x) {
                found = Some(x);
                break;
            }
        }
        let x = found.ok_or(FFError::CenterSelection {
            tries: 1000,
            best_ratio: f64::INFINITY,
            c_target: 0.0,
        })?;
        (pieces.iter().map(|p| (*p).clone()).collect(), x)
    };
    let mut remainder = Vec::new();
    for p in &reduced {
        remainder.extend(project_raw(cx, sigma, &x, p)?.pieces);
    }
    Ok(CellOutcome {
        images: Vec::new(),
        remainder,
        track: 0.0,
        ratio: 0.0,
    })
}

fn push_cell(
    cx: &GeoComplex,
    sigma: CellId,
    pieces: &[&Piece],
    config: &FFConfig,
    rng: &mut ChaCha8Rng,
) -> Result<CellOutcome, FFError> {
    let owned: Vec<Piece> = pieces.iter().map(|p| (*p).clone()).collect();
    let c = match config.c_target {
        Some(c) => c,
        None => auto_c_target(cx, sigma, &owned, config.probes, config.c_multiplier, rng)?,
    };
    let choice = select_center(cx, sigma, &owned, c, config.max_tries, rng)?;
    let ratio = choice.ratio();
    Ok(CellOutcome {
        images: choice.images,
        remainder: Vec::new(),
        track: choice.track,
        ratio,
    })
}

/// One level: every piece hosted in an `m`-cell is pushed to that cell's boundary
/// (or, for `m = k`, resolved into whole cells and remainder).
pub fn ff_step(
    cx: &GeoComplex,
    chain: &PolyChain,
    m: usize,
    config: &FFConfig,
    seed: u64,
) -> Result<(PolyChain, Vec<Piece>, StepRecord), FFError> {
    if let Some(p) = chain.pieces.iter().find(|p| p.host.dim > m) {
        return Err(FFError::NotInSkeleton { host: p.host, m });
    }
    if m < chain.k {
        return Err(FFError::DimensionMismatch {
            expected: chain.k,
            got: m,
        });
    }
    let mut by_cell: BTreeMap<usize, Vec<&Piece>> = BTreeMap::new();
    let mut kept = Vec::new();
    for p in &chain.pieces {
        if p.host.dim == m {
            by_cell.entry(p.host.index).or_default().push(p);
        } else {
            kept.push(p.clone());
        }
    }
    let cells: Vec<(usize, Vec<&Piece>)> = by_cell.into_iter().collect();
    let outcomes: Vec<Result<CellOutcome, FFError>> = cells
        .par_iter()
        .map(|(index, pieces)| {
            let sigma = CellId {
                dim: m,
                index: *index,
            };
            let mut rng = cell_rng(seed, m, *index);
            if m == chain.k {
                collapse_cell(cx, sigma, pieces, &mut rng)
            } else {
                push_cell(cx, sigma, pieces, config, &mut rng)
            }
        })
        .collect();
    let mut track = 0.0;
    let mut max_ratio = 0.0f64;
    let mut remainder = Vec::new();
    for o in outcomes {
        let o = o?;
        track += o.track;
        max_ratio = max_ratio.max(o.ratio);
        kept.extend(o.images);
        remainder.extend(o.remainder);
    }
    let out = PolyChain {
        k: chain.k,
        pieces: kept,
    };
    let record = StepRecord {
        m,
        cells: cells.len(),
        volume_before: chain.volume(cx),
        volume_after: out.volume(cx),
        track,
        max_ratio,
    };
    Ok((out, remainder, record))
}

/// Deforms a `k`-chain with `k < dim` into whole `k`-cells plus a remainder in the
/// `(k−1)`-skeleton.
pub fn ff_deform(
    cx: &GeoComplex,
    chain: &PolyChain,
    config: &FFConfig,
    seed: u64,
) -> Result<DeformResult, FFError> {
    let k = chain.k;
    if k >= cx.dim() {
        return Err(FFError::ChainTooLarge { k, dim: cx.dim() });
    }
    let input_volume = chain.volume(cx);
    let mut current = chain.clone();
    let mut steps = Vec::new();
    let mut remainder = Vec::new();
    for m in (k..=cx.dim()).rev() {
        let (next, rem, record) = ff_step(cx, &current, m, config, seed)?;
        current = next;
        remainder.extend(rem);
        steps.push(record);
    }
    let final_chain = current.reduced();
    let final_volume = final_chain.volume(cx);
    let total_track: f64 = steps.iter().map(|s| s.track).sum();
    let c_measured = steps.iter().map(|s| s.max_ratio).fold(0.0, f64::max);
    let c_empirical = if input_volume > 0.0 {
        final_volume.max(total_track) / input_volume
    } else {
        0.0
    };
    Ok(DeformResult {
        k,
        input_volume,
        final_chain,
        remainder,
        final_volume,
        total_track,
        steps,
        c_measured,
        c_empirical,
    })
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `η = min k-cell volume / (max(c, 1) · C(n+1, k+1))`.
pub fn vanishing_threshold(cx: &GeoComplex, k: usize, c: f64) -> f64 {
    let vmin = (0..cx.count(k))
        .map(|index| cx.cell_volume(CellId { dim: k, index }))
        .fold(f64::INFINITY, f64::min);
    vmin / (c.max(1.0) * binomial(cx.dim() + 1, k + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingReport {
    pub eta: f64,
    /// Surviving `k`-cells with `(cell, input mass in its star)` below `η`.
    pub violations: Vec<(usize, f64)>,
    pub pass: bool,
}

/// Every whole cell of the result must carry input mass at least `η` in its closed star.
pub fn vanishing_check(
    cx: &GeoComplex,
    input: &PolyChain,
    result: &DeformResult,
    eta: f64,
) -> VanishingReport {
    let k = result.k;
    let mut violations = Vec::new();
    for index in result.whole_cells() {
        let sigma = CellId { dim: k, index };
        let star = cx.carriers(sigma);
        let mass: f64 = input
            .pieces
            .iter()
            .filter(|p| star.iter().any(|&t| cx.is_face(p.host, t)))
            .map(|p| p.volume(cx))
            .sum();
        if mass < eta {
            violations.push((index, mass));
        }
    }
    VanishingReport {
        eta,
        pass: violations.is_empty(),
        violations,
    }
}
