//! Randomized end-to-end check of the deformation on closed 1-chains.

use serde::Serialize;

use super::chain::PolyChain;
use super::complex::GeoComplex;
use super::deform::{ff_deform, FFConfig};
use super::homology::{class_in_basis, homologous, is_cycle, torus_reference_cycles, BitVec};
use super::samples::{dual_cycle, torus_loop};
use super::FFError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ChainSource {
    /// Fourier loops on the grid torus, classified by winding parity.
    TorusLoops { nx: usize, ny: usize },
    /// Closed walks through top cells, classified by their snapped edge cycle.
    DualCycles { steps: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainOutcome {
    pub seed: u64,
    pub input_volume: f64,
    pub final_volume: f64,
    pub track: f64,
    pub c: f64,
    pub contained: bool,
    pub closed: bool,
    pub homology: bool,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub source: ChainSource,
    pub chains: usize,
    pub seeds: usize,
    pub containment: bool,
    pub closed: bool,
    pub homology: bool,
    pub decomposition: bool,
    /// Per seed, the largest `max(final, track)/input` over its chains.
    pub c_per_seed: Vec<f64>,
    pub c_uniform: f64,
    pub c_spread: f64,
    pub c_stable: bool,
    pub failures: Vec<String>,
    pub outcomes: Vec<ChainOutcome>,
    pub pass: bool,
}

/// Seed of chain `j` in group `s`.
pub fn chain_seed(base: u64, s: usize, j: usize) -> u64 {
    base ^ ((s as u64) << 32 | j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sample(cx: &GeoComplex, source: ChainSource, seed: u64) -> Result<(PolyChain, Oracle), FFError> {
    match source {
        ChainSource::TorusLoops { nx, ny } => {
            let lp = torus_loop(cx, nx, ny, seed)?;
            let (a, b) = lp.parity();
            Ok((lp.chain, Oracle::Parity(vec![a, b])))
        }
        ChainSource::DualCycles { steps } => {
            let d = dual_cycle(cx, steps, seed)?;
            Ok((d.chain, Oracle::Cycle(d.oracle)))
        }
    }
}

enum Oracle {
    Parity(Vec<bool>),
    Cycle(BitVec),
}

/// Runs `seeds × per_seed` chains. Checks containment in the 1-skeleton, closedness,
/// the ℤ/2 class, exhaustive remainder decomposition, and `max C / min C ≤ 2` over seeds.
pub fn run_suite(
    cx: &GeoComplex,
    source: ChainSource,
    seeds: usize,
    per_seed: usize,
    base_seed: u64,
    config: &FFConfig,
) -> Result<SuiteReport, FFError> {
    let reference = match source {
        ChainSource::TorusLoops { nx, ny } => Some(torus_reference_cycles(cx, nx, ny)),
        ChainSource::DualCycles { .. } => None,
    };
    let mut outcomes = Vec::with_capacity(seeds * per_seed);
    let mut failures = Vec::new();
    let mut c_per_seed = Vec::with_capacity(seeds);
    for s in 0..seeds {
        let mut c_seed = 0.0f64;
        for j in 0..per_seed {
            let seed = chain_seed(base_seed, s, j);
            let (chain, oracle) = sample(cx, source, seed)?;
            let r = ff_deform(cx, &chain, config, seed)?;
            let contained =
                r.final_chain.in_skeleton(cx, 1) && r.remainder.iter().all(|p| p.host.dim == 0);
            let d = r.decomposition();
            let cells = BitVec::from_bools(
                &(0..cx.count(1))
                    .map(|e| d.whole_cells.iter().filter(|&&w| w == e).count() % 2 == 1)
                    .collect::<Vec<_>>(),
            );
            let closed = is_cycle(cx, 1, &cells);
            let homology = match (&oracle, &reference) {
                (Oracle::Parity(p), Some([h, v])) => {
                    class_in_basis(cx, 1, &cells, &[h.clone(), v.clone()]).as_deref()
                        == Some(p.as_slice())
                }
                (Oracle::Cycle(z), _) => homologous(cx, 1, &cells, z),
                _ => false,
            };
            let outcome = ChainOutcome {
                seed,
                input_volume: r.input_volume,
                final_volume: r.final_volume,
                track: r.total_track,
                c: r.c_empirical,
                contained,
                closed,
                homology,
                exhaustive: d.exhaustive,
            };
            for (ok, what) in [
                (contained, "containment"),
                (closed, "closed"),
                (homology, "homology"),
                (d.exhaustive, "decomposition"),
            ] {
                if !ok {
                    failures.push(format!("seed {seed:#x}: {what}"));
                }
            }
            c_seed = c_seed.max(outcome.c);
            outcomes.push(outcome);
        }
        c_per_seed.push(c_seed);
    }
    let c_uniform = c_per_seed.iter().copied().fold(0.0, f64::max);
    let c_min = c_per_seed.iter().copied().fold(f64::INFINITY, f64::min);
    let c_spread = if c_min > 0.0 {
        c_uniform / c_min
    } else {
        f64::INFINITY
    };
    let c_stable = c_spread <= 2.0;
    let all = |f: fn(&ChainOutcome) -> bool| outcomes.iter().all(f);
    let (containment, closed, homology, decomposition) = (
        all(|o| o.contained),
        all(|o| o.closed),
        all(|o| o.homology),
        all(|o| o.exhaustive),
    );
    Ok(SuiteReport {
        source,
        chains: outcomes.len(),
        seeds,
        containment,
        closed,
        homology,
        decomposition,
        c_per_seed,
        c_uniform,
        c_spread,
        c_stable,
        pass: containment && closed && homology && decomposition && c_stable,
        failures,
        outcomes,
    })
}
