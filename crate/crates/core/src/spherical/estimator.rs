//! Monte-Carlo estimates of `φ_λ(e^H) = ∫_K e^{(ρ−λ)(H(k e^H))} dk`.
//!
//! Samples are drawn in fixed-size chunks, chunk `c` from the ChaCha stream `c`
//! of the seed, so the estimate does not depend on the thread count.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::modelcheck::iwasawa::iwasawa_decompose_matrix;
use crate::rootdata::{Covector, Family, RootDatum};
use crate::Scalar;

use super::haar::haar_orthogonal_with;
use super::{diagonal_f64, ComplexCovector, MCEstimate, SphericalError};

const CHUNK: usize = 4096;
const DOMINANCE_TOL: f64 = 1e-12;
const VARIANCE_FLAG: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    fn estimate(&self, seed: u64) -> MCEstimate {
        let var = self.m2 / (self.n - 1) as f64;
        MCEstimate {
            value: self.mean,
            stderr: (var.max(0.0) / self.n as f64).sqrt(),
            samples: self.n,
            seed,
        }
    }
}

/// Real part of `φ_λ` with the imaginary part as a diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub real: MCEstimate,
    pub imag: MCEstimate,
}

fn check_point(rd: &RootDatum, h: &[f64]) -> Result<(), SphericalError> {
    if rd.family() != Family::SLn {
        return Err(SphericalError::NotSl(rd.family()));
    }
    let n = rd.param_n() as usize;
    if h.len() != n {
        return Err(SphericalError::Dimension {
            expected: n,
            got: h.len(),
        });
    }
    let scale = h.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    if h.iter().sum::<f64>().abs() > DOMINANCE_TOL * scale
        || h.windows(2).any(|w| w[0] < w[1] - DOMINANCE_TOL * scale)
    {
        return Err(SphericalError::NotDominant);
    }
    Ok(())
}

/// Per-sample exponents `(ρ−λ)(H(k e^H))` split as real and imaginary linear forms.
struct Integrand {
    n: usize,
    g: DMatrix<f64>,
    at_identity: bool,
    re_form: Vec<f64>,
    im_form: Vec<f64>,
}

impl Integrand {
    fn new(rd: &RootDatum, lambda: &ComplexCovector, h: &[f64]) -> Result<Self, SphericalError> {
        check_point(rd, h)?;
        if !lambda.is_real() && !lambda.is_imaginary() {
            return Err(SphericalError::MixedParameter);
        }
        let rho = diagonal_f64(rd, &rd.rho())?;
        let re = diagonal_f64(rd, &lambda.re)?;
        let im = diagonal_f64(rd, &lambda.im)?;
        let n = h.len();
        Ok(Integrand {
            n,
            g: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                h.iter().map(|x| x.exp()),
            )),
            at_identity: h.iter().all(|x| *x == 0.0),
            re_form: rho.iter().zip(&re).map(|(r, l)| r - l).collect(),
            im_form: im.iter().map(|l| -l).collect(),
        })
    }

    fn chunk(
        &self,
        seed: u64,
        index: usize,
        count: usize,
    ) -> Result<(Moments, Moments), SphericalError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let (mut re, mut im) = (Moments::default(), Moments::default());
        for _ in 0..count {
            let k = haar_orthogonal_with(self.n, &mut rng);
            let (a, b) = if self.at_identity {
                // H(k) = 0 for k ∈ K.
                (0.0, 0.0)
            } else {
                let hk = iwasawa_decompose_matrix(&(k * &self.g))?.h;
                let a: f64 = self.re_form.iter().zip(hk.iter()).map(|(c, x)| c * x).sum();
                let b: f64 = self.im_form.iter().zip(hk.iter()).map(|(c, x)| c * x).sum();
                (a, b)
            };
            let mag = a.exp();
            re.push(if b == 0.0 { mag } else { mag * b.cos() });
            im.push(if b == 0.0 { 0.0 } else { mag * b.sin() });
        }
        Ok((re, im))
    }

    fn run(&self, samples: usize, seed: u64) -> Result<PhiEstimate, SphericalError> {
        if samples < 2 {
            return Err(SphericalError::TooFewSamples(samples));
        }
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<_> = (0..chunks)
            .into_par_iter()
            .map(|c| self.chunk(seed, c, CHUNK.min(samples - c * CHUNK)))
            .collect::<Result<_, _>>()?;
        let (re, im) = parts.into_iter().fold(
            (Moments::default(), Moments::default()),
            |(r, i), (a, b)| (r.merge(a), i.merge(b)),
        );
        Ok(PhiEstimate {
            real: re.estimate(seed),
            imag: im.estimate(seed),
        })
    }
}

/// Estimates `φ_λ(e^H)` for `H = diag(h)` dominant; `λ` real or purely imaginary.
pub fn phi_lambda(
    rd: &RootDatum,
    lambda: &ComplexCovector,
    h: &[f64],
    samples: usize,
    seed: u64,
) -> Result<PhiEstimate, SphericalError> {
    let est = Integrand::new(rd, lambda, h)?.run(samples, seed)?;
    let ratio = est.real.relative_stderr();
    if ratio > VARIANCE_FLAG {
        return Err(SphericalError::DivergentVariance {
            ratio,
            estimate: est.real,
        });
    }
    Ok(est)
}

/// `φ_λ` for real `λ`.
pub fn phi_real(
    rd: &RootDatum,
    lambda: &Covector,
    h: &[f64],
    samples: usize,
    seed: u64,
) -> Result<MCEstimate, SphericalError> {
    Ok(phi_lambda(rd, &ComplexCovector::real(lambda.clone()), h, samples, seed)?.real)
}

/// Norm of `H = diag(h)` in the datum's normalization.
pub fn h_norm(rd: &RootDatum, h: &[f64]) -> f64 {
    (h.iter().map(|x| x * x).sum::<f64>() / rd.scale().to_f64_lossy()).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiZeroBoundReport {
    pub n: u32,
    pub h: Vec<f64>,
    pub estimate: MCEstimate,
    /// `e^{−ρ(H)}(1+‖H‖)^d`.
    pub bound: f64,
    pub d: usize,
    pub pass: bool,
}

/// `φ₀(e^H) ≤ e^{−ρ(H)}(1+‖H‖)^d + 4·stderr`, `d` the number of reduced positive roots.
pub fn phi_zero_bound_check(
    rd: &RootDatum,
    h: &[f64],
    samples: usize,
    seed: u64,
) -> Result<PhiZeroBoundReport, SphericalError> {
    let estimate = phi_real(rd, &rd.zero(), h, samples, seed)?;
    let rho = diagonal_f64(rd, &rd.rho())?;
    let rho_h: f64 = rho.iter().zip(h).map(|(r, x)| r * x).sum();
    let d = rd.positive_roots().len();
    let bound = (-rho_h).exp() * (1.0 + h_norm(rd, h)).powi(d as i32);
    Ok(PhiZeroBoundReport {
        n: rd.param_n(),
        h: h.to_vec(),
        estimate,
        bound,
        d,
        pass: estimate.value <= bound + 4.0 * estimate.stderr,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogConvexityReport {
    pub grid: Vec<f64>,
    pub log_phi: Vec<f64>,
    pub log_stderr: Vec<f64>,
    /// `w₀L₀ + w₂L₂ − L₁` for consecutive triples; nonnegative for a convex function.
    pub gaps: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub estimates: Vec<MCEstimate>,
    pub pass: bool,
}

/// Convexity of `s ↦ log φ_{(1−s)λ₁ + sλ₂}(e^H)` on an increasing grid. All points share
/// the seed, hence the same Haar samples.
pub fn logconvexity_check(
    rd: &RootDatum,
    h: &[f64],
    lambda1: &Covector,
    lambda2: &Covector,
    grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<LogConvexityReport, SphericalError> {
    let mut estimates = Vec::with_capacity(grid.len());
    for &s in grid {
        let q = crate::Rational::approximate_float(s).ok_or(SphericalError::NotFinite(s))?;
        let one = crate::Rational::from_integer(1);
        let lam = &lambda1.scaled(one - q) + &lambda2.scaled(q);
        estimates.push(phi_real(rd, &lam, h, samples, seed)?);
    }
    let log_phi: Vec<f64> = estimates.iter().map(|e| e.value.ln()).collect();
    let log_stderr: Vec<f64> = estimates.iter().map(|e| e.relative_stderr()).collect();
    let mut gaps = Vec::new();
    let mut tolerances = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let (s0, s1, s2) = (grid[i - 1], grid[i], grid[i + 1]);
        let w0 = (s2 - s1) / (s2 - s0);
        let w2 = (s1 - s0) / (s2 - s0);
        gaps.push(w0 * log_phi[i - 1] + w2 * log_phi[i + 1] - log_phi[i]);
        let v = (w0 * log_stderr[i - 1]).powi(2)
            + log_stderr[i].powi(2)
            + (w2 * log_stderr[i + 1]).powi(2);
        tolerances.push(4.0 * v.sqrt());
    }
    let pass = gaps.iter().zip(&tolerances).all(|(g, t)| *g >= -t - 1e-12);
    Ok(LogConvexityReport {
        grid: grid.to_vec(),
        log_phi,
        log_stderr,
        gaps,
        tolerances,
        estimates,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelcheck::quadrature::integrate;
    use crate::Rational;

    /// `φ_{tα}(diag(e^s, e^{−s}))` on `SL_2` as a one-dimensional integral over the angle.
    fn sl2_phi(t: f64, s: f64) -> f64 {
        // The lower-right entry of g gᵀ for g = k_θ e^H is sin²θ e^{2s} + cos²θ e^{−2s} = e^{−α(H(g))}.
        let f = |th: f64| {
            let x = th.sin().powi(2) * (2.0 * s).exp() + th.cos().powi(2) * (-2.0 * s).exp();
            x.powf(-(0.5 - t))
        };
        integrate(&f, 0.0, std::f64::consts::TAU, 1e-13, 2000).unwrap() / std::f64::consts::TAU
    }

    #[test]
    fn lambda_rho_is_exactly_one() {
        let rd = RootDatum::build_sln(3).unwrap();
        let e = phi_real(&rd, &rd.rho(), &[1.0, 0.0, -1.0], 1000, 3).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn identity_point_is_exact() {
        let rd = RootDatum::build_sln(3).unwrap();
        let e = phi_real(&rd, &rd.zero(), &[0.0; 3], 100, 3).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
    }

    #[test]
    fn minus_rho_sl2() {
        let rd = RootDatum::build_sln(2).unwrap();
        let e = phi_real(&rd, &-&rd.rho(), &[1.0, -1.0], 100_000, crate::DEFAULT_SEED).unwrap();
        assert!(e.within(1.0, 4.0), "{e:?}");
    }

    #[test]
    fn sl2_matches_angle_integral() {
        let rd = RootDatum::build_sln(2).unwrap();
        for (t, s) in [(0.0, 2.0), (0.25, 1.0), (-0.3, 0.5)] {
            let lam = rd
                .rho()
                .scaled(Rational::approximate_float(2.0 * t).unwrap());
            let e = phi_real(&rd, &lam, &[s, -s], 50_000, 11).unwrap();
            let want = sl2_phi(t, s);
            assert!(e.within(want, 4.0), "t={t} s={s}: {e:?} vs {want}");
        }
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let rd = RootDatum::build_sln(3).unwrap();
        let h = [0.7, 0.1, -0.8];
        let a = phi_real(&rd, &rd.zero(), &h, 10_000, 42).unwrap();
        let b = phi_real(&rd, &rd.zero(), &h, 10_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| phi_real(&rd, &rd.zero(), &h, 10_000, 42).unwrap());
        assert_eq!(a, c);
        let d = phi_real(&rd, &rd.zero(), &h, 10_000, 43).unwrap();
        assert_ne!(a.value, d.value);
    }

    #[test]
    fn weyl_sign_flip_rank_one() {
        let rd = RootDatum::build_sln(2).unwrap();
        let lam = rd.rho().scaled(Rational::new(1, 3));
        let a = phi_real(&rd, &lam, &[1.5, -1.5], 100_000, 1).unwrap();
        let b = phi_real(&rd, &-&lam, &[1.5, -1.5], 100_000, 2).unwrap();
        let sigma = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.value - b.value).abs() <= 4.0 * sigma, "{a:?} {b:?}");
    }

    #[test]
    fn imaginary_parameter_has_vanishing_imaginary_part() {
        let rd = RootDatum::build_sln(2).unwrap();
        let lam = ComplexCovector::imaginary(rd.rho().scaled(Rational::from_integer(2)));
        let e = phi_lambda(&rd, &lam, &[0.5, -0.5], 40_000, 9).unwrap();
        assert!(e.imag.value.abs() <= 4.0 * e.imag.stderr, "{e:?}");
        let mixed = ComplexCovector::new(rd.rho(), rd.rho()).unwrap();
        assert!(matches!(
            phi_lambda(&rd, &mixed, &[0.5, -0.5], 100, 9),
            Err(SphericalError::MixedParameter)
        ));
    }

    #[test]
    fn phi_zero_positive_and_below_one() {
        let rd = RootDatum::build_sln(3).unwrap();
        let e = phi_real(&rd, &rd.zero(), &[1.0, 0.2, -1.2], 20_000, 5).unwrap();
        assert!(e.value > 0.0 && e.value <= 1.0);
    }

    #[test]
    fn stderr_scales_with_inverse_root_samples() {
        let rd = RootDatum::build_sln(2).unwrap();
        let a = phi_real(&rd, &rd.zero(), &[1.0, -1.0], 10_000, 8).unwrap();
        let b = phi_real(&rd, &rd.zero(), &[1.0, -1.0], 100_000, 8).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn bound_examples() {
        let rd = RootDatum::build_sln(2).unwrap();
        let r = phi_zero_bound_check(&rd, &[2.0, -2.0], 50_000, 1).unwrap();
        assert!(r.pass);
        assert!(r.estimate.within(sl2_phi(0.0, 2.0), 4.0));
        let z = phi_zero_bound_check(&rd, &[0.0, 0.0], 100, 1).unwrap();
        assert!(z.pass && z.bound == 1.0 && z.estimate.value == 1.0);
    }

    #[test]
    fn rejects_bad_points() {
        let rd = RootDatum::build_sln(3).unwrap();
        assert!(matches!(
            phi_real(&rd, &rd.zero(), &[-1.0, 0.0, 1.0], 10, 0),
            Err(SphericalError::NotDominant)
        ));
        assert!(matches!(
            phi_real(&rd, &rd.zero(), &[1.0, -1.0], 10, 0),
            Err(SphericalError::Dimension { .. })
        ));
        assert!(phi_real(&rd, &rd.zero(), &[0.0; 3], 1, 0).is_err());
        let h = RootDatum::build_rank_one(Family::HnR, 3).unwrap();
        assert!(matches!(
            phi_real(&h, &h.zero(), &[0.0], 10, 0),
            Err(SphericalError::NotSl(_))
        ));
    }

    #[test]
    fn convexity_examples() {
        let rd = RootDatum::build_sln(2).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let h = [1.0, -1.0];
        let r = logconvexity_check(&rd, &h, &rd.zero(), &rd.rho(), &grid, 20_000, 4).unwrap();
        assert!(r.pass);
        let flat = logconvexity_check(&rd, &h, &rd.rho(), &rd.rho(), &grid, 2_000, 4).unwrap();
        assert!(flat.gaps.iter().all(|g| g.abs() < 1e-12));
        let sym = logconvexity_check(&rd, &h, &-&rd.rho(), &rd.rho(), &grid, 50_000, 4).unwrap();
        assert!(sym.pass);
        let ends = [&sym.estimates[0], &sym.estimates[4]];
        assert!(ends.iter().all(|e| e.within(1.0, 4.0)));
        assert!(sym.estimates[1..4]
            .iter()
            .all(|e| e.value <= 1.0 + 4.0 * e.stderr));
    }
}
