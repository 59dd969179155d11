//! Mass profiles `v(r)` of a totally geodesic `ℍᵏ ⊂ ℍⁿ` against the smoothed distance `𝔣`.

use serde::Serialize;

use crate::hesspec::{RadialProfile, SmoothedDistance};
use crate::spherical::gamma::ln_gamma_real as ln_gamma;

use super::quadrature::integrate;
use super::ModelError;

/// Cutoff `χ(u) = 1 − (6u⁵ − 15u⁴ + 10u³)` on `[0, 1]`, `1` below and `0` above.
pub fn chi(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

pub fn chi_prime(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        -30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Area of the unit `(k−1)`-sphere, `2π^{k/2} / Γ(k/2)`.
pub fn sphere_area(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)).exp()
}

/// `ω_{k−1} ∫₀^ρ sinh^{k−1}(t) dt`, the volume of a ball of radius `ρ` in `ℍᵏ`.
pub fn sharp_ball_volume(k: usize, rho: f64) -> Result<f64, ModelError> {
    let f = |t: f64| t.sinh().powi(k as i32 - 1);
    Ok(sphere_area(k) * integrate(&f, 0.0, rho, 1e-13, 4000)?)
}

/// Closed forms of [`sharp_ball_volume`] for `k = 2, 3`.
pub fn sharp_ball_volume_closed(k: usize, rho: f64) -> Option<f64> {
    match k {
        2 => Some(2.0 * std::f64::consts::PI * (rho.cosh() - 1.0)),
        3 => Some(4.0 * std::f64::consts::PI * (rho.sinh() * rho.cosh() - rho) / 2.0),
        _ => None,
    }
}

/// `v(r) = ω_{k−1} ∫₀^∞ χ(𝔣(t) − r) sinh^{k−1}(t) dt` with `‖α‖ = 1`.
pub fn mass(k: usize, r: f64) -> Result<f64, ModelError> {
    let ff = SmoothedDistance::new(1.0f64);
    let floor = ff.value(0.0);
    let t_lo = if r > floor { ff.inverse(r) } else { 0.0 };
    let t_hi = ff.inverse(r + 1.0);
    let sh = move |t: f64| t.sinh().powi(k as i32 - 1);
    let inner = integrate(&sh, 0.0, t_lo, 1e-14, 4000)?;
    let ramp = move |t: f64| chi(ff.value(t) - r) * sh(t);
    let outer = integrate(&ramp, t_lo, t_hi, 1e-14, 4000)?;
    Ok(sphere_area(k) * (inner + outer))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub k: usize,
    pub kappa: f64,
    pub profile: Vec<(f64, f64)>,
    /// `min over s < r of log v(r) − log v(s) − κ(r − s)`.
    pub min_margin: f64,
    pub worst_pair: (f64, f64),
    pub pass: bool,
}

/// `(r, v(r))` over the grid.
pub fn monotonicity_profile(k: usize, r_grid: &[f64]) -> Result<Vec<(f64, f64)>, ModelError> {
    if k < 2 {
        return Err(ModelError::UnsupportedDimension(k));
    }
    r_grid.iter().map(|&r| Ok((r, mass(k, r)?))).collect()
}

/// Checks `v(r) >= e^{(k−1)(r−s)} v(s)` for all grid pairs `s < r`.
pub fn check_monotonicity(k: usize, r_grid: &[f64]) -> Result<MonotonicityReport, ModelError> {
    let profile = monotonicity_profile(k, r_grid)?;
    let kappa = (k - 1) as f64;
    let mut min_margin = f64::INFINITY;
    let mut worst_pair = (f64::NAN, f64::NAN);
    for (a, &(s, vs)) in profile.iter().enumerate() {
        for &(r, vr) in &profile[a + 1..] {
            if r <= s {
                continue;
            }
            let margin = vr.ln() - vs.ln() - kappa * (r - s);
            if margin < min_margin {
                min_margin = margin;
                worst_pair = (s, r);
            }
        }
    }
    Ok(MonotonicityReport {
        k,
        kappa,
        profile,
        min_margin,
        worst_pair,
        pass: min_margin >= 0.0,
    })
}

/// `0, 0.5, …, 8`.
pub fn default_grid() -> Vec<f64> {
    (0..=16).map(|i| i as f64 * 0.5).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_properties() {
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert!((chi(0.5) - 0.5).abs() < 1e-15);
        let min_slope = (0..=1000)
            .map(|i| chi_prime(i as f64 / 1000.0))
            .fold(0.0, f64::min);
        assert!((min_slope + 15.0 / 8.0).abs() < 1e-6 && min_slope >= -2.0);
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let fd = (chi(u + 1e-6) - chi(u - 1e-6)) / 2e-6;
            assert!((fd - chi_prime(u)).abs() < 1e-6);
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn sharp_volume_closed_forms() {
        for k in [2, 3] {
            for rho in [0.5, 3.0, 9.0] {
                let a = sharp_ball_volume(k, rho).unwrap();
                let b = sharp_ball_volume_closed(k, rho).unwrap();
                assert!((a - b).abs() < 1e-11 * b, "k={k} ρ={rho}");
            }
        }
    }

    #[test]
    fn smoothed_mass_is_bracketed_by_sharp_balls() {
        let ff = SmoothedDistance::new(1.0f64);
        for k in [2, 3] {
            for r in [1.0, 2.5, 6.0] {
                let v = mass(k, r).unwrap();
                let lo = sharp_ball_volume_closed(k, ff.inverse(r)).unwrap();
                let hi = sharp_ball_volume_closed(k, ff.inverse(r + 1.0)).unwrap();
                assert!(lo < v && v < hi, "k={k} r={r}: {lo} < {v} < {hi}");
            }
        }
    }

    #[test]
    fn unit_steps_grow_by_at_least_e_to_kappa() {
        let grid: Vec<f64> = (0..=6).map(f64::from).collect();
        let p = monotonicity_profile(2, &grid).unwrap();
        for w in p.windows(2) {
            assert!(w[1].1.ln() - w[0].1.ln() >= 1.0);
        }
        let r = check_monotonicity(2, &[3.0, 3.0]).unwrap();
        assert!(r.min_margin.is_infinite());
    }

    #[test]
    fn growth_exponent_k3() {
        let a = mass(3, 7.5).unwrap();
        let b = mass(3, 8.0).unwrap();
        let rate = (b.ln() - a.ln()) / 0.5;
        assert!((rate - 2.0).abs() < 0.1, "{rate}");
    }

    #[test]
    fn rejects_k_below_two() {
        assert!(monotonicity_profile(1, &[0.0]).is_err());
    }
}
