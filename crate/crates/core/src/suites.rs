//! Named verification suites with machine-readable outcomes, shared by the command line
//! and the acceptance tests.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ffengine::{run_suite, ChainSource, FFConfig, FFError, GeoComplex};
use crate::modelcheck::fd::Stencil;
use crate::modelcheck::monotonicity::{check_monotonicity, default_grid};
use crate::modelcheck::verify::{
    richardson_ratio, verify_exp_spectrum, verify_iwasawa_spectrum, IwasawaFunction,
};
use crate::modelcheck::ModelError;
use crate::rootdata::{RootDataError, RootDatum};
use crate::spherical::{logconvexity_check, phi_real, phi_zero_bound_check, SphericalError};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spherical(#[from] SphericalError),
    #[error(transparent)]
    Root(#[from] RootDataError),
    #[error(transparent)]
    FF(#[from] FFError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteOutcome {
    fn new(suite: &str, checks: Vec<Check>) -> SuiteOutcome {
        SuiteOutcome {
            suite: suite.to_owned(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn check(name: String, pass: bool, detail: impl Serialize) -> Check {
    Check {
        name,
        pass,
        detail: serde_json::to_value(detail).expect("serializable"),
    }
}

/// Finite-difference Hessians of `ξ∘H` and `e^{ξ∘H}` for `ξ ∈ {ρ, α₁}` on each `SL_n`,
/// plus the three-point error ratio when `h` halves (expected in `[3, 5]`).
pub fn hessian_suite(ns: &[u32], h: f64, tol: f64) -> Result<SuiteOutcome, SuiteError> {
    let mut checks = Vec::new();
    for &n in ns {
        let rd = RootDatum::build_sln(n)?;
        let xis = [("rho", rd.rho()), ("alpha1", rd.simple_root(0).clone())];
        for (label, xi) in &xis {
            let lin = verify_iwasawa_spectrum(&rd, xi, h, tol)?;
            checks.push(check(format!("SL{n} linear {label}"), lin.pass, &lin));
            let exp = verify_exp_spectrum(&rd, xi, h, tol)?;
            checks.push(check(format!("SL{n} exp {label}"), exp.pass, &exp));
        }
        for function in [IwasawaFunction::Linear, IwasawaFunction::Exponential] {
            let r = richardson_ratio(&rd, &rd.rho(), function, h, Stencil::ThreePoint)?;
            let pass = (3.0..=5.0).contains(&r.ratio);
            checks.push(check(format!("SL{n} {function:?} halving ratio"), pass, &r));
        }
    }
    Ok(SuiteOutcome::new("hessian", checks))
}

/// Evaluation points `H = diag(h)` for the spherical suite.
pub fn spherical_points(n: u32) -> Vec<Vec<f64>> {
    match n {
        2 => vec![vec![0.25, -0.25], vec![0.5, -0.5], vec![1.0, -1.0]],
        _ => vec![
            vec![0.5, 0.0, -0.5],
            vec![1.0, 0.0, -1.0],
            vec![0.8, 0.2, -1.0],
        ],
    }
}

/// `φ_{−ρ} = 1` within 4σ, the `φ₀` upper bound, and log-convexity of `λ ↦ φ_λ` along the
/// segment from `−ρ` to `ρ` on five points, for `SL_2` and `SL_3`.
pub fn spherical_suite(samples: usize, seed: u64) -> Result<SuiteOutcome, SuiteError> {
    let mut checks = Vec::new();
    for n in [2u32, 3] {
        let rd = RootDatum::build_sln(n)?;
        let minus_rho = -&rd.rho();
        for h in spherical_points(n) {
            let e = phi_real(&rd, &minus_rho, &h, samples, seed)?;
            checks.push(check(
                format!("SL{n} phi(-rho) at {h:?}"),
                e.within(1.0, 4.0),
                json!({"estimate": e, "target": 1.0, "sigmas": 4.0}),
            ));
            let b = phi_zero_bound_check(&rd, &h, samples, seed)?;
            checks.push(check(format!("SL{n} phi0 bound at {h:?}"), b.pass, &b));
            let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
            let c = logconvexity_check(&rd, &h, &minus_rho, &rd.rho(), &grid, samples, seed)?;
            checks.push(check(format!("SL{n} log-convexity at {h:?}"), c.pass, &c));
        }
    }
    Ok(SuiteOutcome::new("spherical", checks))
}

/// `v(r) ≥ e^{(k−1)(r−s)} v(s)` on `0, 0.5, …, 8` for totally geodesic `ℍᵏ ⊂ ℍⁿ`.
pub fn monotonicity_suite(ks: &[usize], n: usize) -> Result<SuiteOutcome, SuiteError> {
    let mut checks = Vec::new();
    for &k in ks {
        if k >= n {
            return Err(SuiteError::Usage(format!(
                "need k < n, got k = {k}, n = {n}"
            )));
        }
        let r = check_monotonicity(k, &default_grid())?;
        checks.push(check(
            format!("H{k} in H{n}"),
            r.pass,
            json!({"k": k, "n": n, "kappa": r.kappa, "min_margin": r.min_margin, "worst_pair": r.worst_pair, "profile": r.profile}),
        ));
    }
    Ok(SuiteOutcome::new("monotonicity", checks))
}

/// Deformation of `chains` random closed 1-chains split over 10 seeds. Without a mesh the
/// 8 × 8 flat torus with Fourier loops is used; with one, closed dual walks.
pub fn ff_suite(
    mesh: Option<&GeoComplex>,
    chains: usize,
    seed: u64,
) -> Result<SuiteOutcome, SuiteError> {
    const SEEDS: usize = 10;
    let per_seed = chains.div_ceil(SEEDS).max(1);
    let torus;
    let (cx, source) = match mesh {
        Some(cx) => (cx, ChainSource::DualCycles { steps: 20 }),
        None => {
            torus = GeoComplex::flat_torus(8, 8)?;
            (&torus, ChainSource::TorusLoops { nx: 8, ny: 8 })
        }
    };
    let r = run_suite(cx, source, SEEDS, per_seed, seed, &FFConfig::default())?;
    let summary = |what: &str| -> Vec<String> {
        r.failures
            .iter()
            .filter(|f| f.ends_with(what))
            .cloned()
            .collect()
    };
    let checks = vec![
        check("containment".into(), r.containment, summary("containment")),
        check("closed".into(), r.closed, summary("closed")),
        check("homology".into(), r.homology, summary("homology")),
        check(
            "decomposition".into(),
            r.decomposition,
            summary("decomposition"),
        ),
        check(
            "constant".into(),
            r.c_stable,
            json!({"c_per_seed": r.c_per_seed, "c_uniform": r.c_uniform, "spread": r.c_spread, "max_spread": 2.0}),
        ),
    ];
    let mut out = SuiteOutcome::new("ff", checks);
    out.checks.push(check(
        "summary".into(),
        true,
        json!({"source": r.source, "chains": r.chains, "seeds": r.seeds}),
    ));
    Ok(out)
}
