//! Complex log-gamma (Lanczos, g = 7) with reflection, and the Beta function.

use num_complex::Complex64;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` on some branch; only `exp` of it is meaningful away from the real axis.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        return Complex64::new(pi.ln(), 0.0)
            - (z * pi).sin().ln()
            - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + G + 0.5;
    Complex64::new(0.5 * (2.0 * pi).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// Distance from `z` to the nearest pole `0, −1, −2, …` of `Γ`.
pub fn pole_distance(z: Complex64) -> f64 {
    let nearest = z.re.round().min(0.0);
    (z - nearest).norm()
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta(a: Complex64, b: Complex64) -> Complex64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_half_integers() {
        let mut fact = 1.0;
        for n in 1..20 {
            let g = gamma(Complex64::new(n as f64, 0.0));
            assert!((g.re - fact).abs() < 1e-12 * fact, "Γ({n})");
            fact *= n as f64;
        }
        let half = gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let neg = gamma(Complex64::new(-0.5, 0.0));
        assert!((neg.re + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_statrs() {
        for i in 1..200 {
            let x = i as f64 * 0.173;
            let a = ln_gamma_real(x);
            let b = statrs::function::gamma::ln_gamma(x);
            assert!(
                (a - b).abs() < 1e-10 * b.abs().max(1.0),
                "x = {x}: {a} vs {b}"
            );
        }
        for i in 1..40 {
            let (a, b) = (i as f64 * 0.37, 1.0 + i as f64 * 0.11);
            let ours = beta(Complex64::new(a, 0.0), Complex64::new(b, 0.0)).re;
            let theirs = statrs::function::beta::beta(a, b);
            assert!((ours - theirs).abs() < 1e-10 * theirs, "B({a},{b})");
        }
    }

    #[test]
    fn conjugate_symmetry_and_recurrence() {
        for (re, im) in [(0.3, 1.2), (2.5, -3.0), (-1.7, 0.4), (10.0, 5.0)] {
            let z = Complex64::new(re, im);
            let a = gamma(z.conj());
            let b = gamma(z).conj();
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn pole_distances() {
        assert_eq!(pole_distance(Complex64::new(-2.0, 0.0)), 0.0);
        assert!((pole_distance(Complex64::new(0.25, 0.0)) - 0.25).abs() < 1e-15);
        assert!((pole_distance(Complex64::new(3.0, 0.0)) - 3.0).abs() < 1e-15);
        assert!((pole_distance(Complex64::new(-1.0, 0.5)) - 0.5).abs() < 1e-15);
    }
}
