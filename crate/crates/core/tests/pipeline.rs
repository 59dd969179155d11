use proptest::prelude::*;
use symspace::exponents::{kappa, omega_contains, r_lower_bound};
use symspace::hesspec::{iwasawa_exp_spectrum, iwasawa_linear_spectrum};
use symspace::modelcheck::{verify_exp_spectrum, verify_iwasawa_spectrum};
use symspace::rootdata::{Family, RootDatum};
use symspace::spherical::phi_real;
use symspace::suites::{ff_suite, hessian_suite, monotonicity_suite};
use symspace::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn json_roundtrip_keeps_every_exponent() {
    for (f, n) in [
        (Family::HnR, 4),
        (Family::HnC, 3),
        (Family::HnH, 2),
        (Family::H2O, 2),
    ] {
        let rd = RootDatum::build_rank_one(f, n).unwrap();
        let back = RootDatum::from_json(&rd.to_json()).unwrap();
        for k in 1..rd.dim_x() {
            assert_eq!(kappa(&rd, k).unwrap(), kappa(&back, k).unwrap());
        }
    }
    let sl = RootDatum::build_sln(9).unwrap();
    let back = RootDatum::from_json(&sl.to_json()).unwrap();
    assert_eq!(r_lower_bound(&sl).unwrap(), r_lower_bound(&back).unwrap());
}

#[test]
fn finite_differences_match_closed_spectra_off_the_special_directions() {
    let rd = RootDatum::build_sln(3).unwrap();
    for coords in [[q(1, 3), q(2, 1)], [q(-1, 2), q(3, 4)], [q(5, 4), q(-1, 1)]] {
        let xi = rd.covector(coords.to_vec()).unwrap();
        let lin = verify_iwasawa_spectrum(&rd, &xi, 1e-3, 1e-3).unwrap();
        assert!(lin.pass, "{lin:?}");
        let exp = verify_exp_spectrum(&rd, &xi, 1e-3, 1e-3).unwrap();
        assert!(exp.pass, "{exp:?}");
    }
}

#[test]
fn exp_spectrum_adds_the_gradient_square() {
    // Hess e^f / e^f = Hess f + df ⊗ df; df has norm ‖ξ‖ along 𝔞.
    let rd = RootDatum::build_sln(4).unwrap();
    let xi = rd.rho();
    let lin = iwasawa_linear_spectrum(&rd, &xi).unwrap();
    let exp = iwasawa_exp_spectrum(&rd, &xi).unwrap();
    assert_eq!(exp.trace() - lin.trace(), rd.norm_sq(&xi).unwrap());
}

#[test]
fn spherical_estimates_are_reproducible() {
    let rd = RootDatum::build_sln(3).unwrap();
    let h = [0.6, -0.1, -0.5];
    let a = phi_real(&rd, &rd.zero(), &h, 5000, 11).unwrap();
    let b = phi_real(&rd, &rd.zero(), &h, 5000, 11).unwrap();
    assert_eq!(a, b);
    assert!(a.value > 0.0 && a.value < 1.0);
    // The trivial character integrates to one sample by sample.
    let rho = phi_real(&rd, &rd.rho(), &h, 500, 3).unwrap();
    assert!((rho.value - 1.0).abs() < 1e-12);
}

#[test]
fn suites_pass_at_reduced_size() {
    assert!(hessian_suite(&[2], 1e-3, 1e-3).unwrap().pass);
    assert!(monotonicity_suite(&[2], 3).unwrap().pass);
    assert!(monotonicity_suite(&[3], 3).is_err());
    let ff = ff_suite(None, 100, 5).unwrap();
    assert!(ff.pass, "{:?}", ff.failed().collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_is_convex_on_sl(
        n in 3u32..6,
        sa in 1i64..8,
        sb in 1i64..8,
        a in prop::collection::vec(-4i64..4, 6),
        b in prop::collection::vec(-4i64..4, 6),
        t in 1i64..8,
        d in 0usize..3,
    ) {
        // Points near the segment (0, 2ρ), where Ω_0 ∋ tρ for 0 < t < 2.
        let rd = RootDatum::build_sln(n).unwrap();
        let r = rd.rank();
        let near = |s: i64, p: &[i64]| {
            let bump = rd.covector(p[..r].iter().map(|c| q(*c, 16)).collect()).unwrap();
            &rd.rho().scaled(q(s, 4)) + &bump
        };
        let (xa, xb) = (near(sa, &a), near(sb, &b));
        prop_assume!(omega_contains(&rd, &xa, d).unwrap() && omega_contains(&rd, &xb, d).unwrap());
        let s = q(t, 8);
        let mix = &xa.scaled(s) + &xb.scaled(Rational::from_integer(1) - s);
        prop_assert!(omega_contains(&rd, &mix, d).unwrap());
    }

    #[test]
    fn exact_and_float_traces_agree(s in -50i64..50, k in 1usize..16) {
        let rd = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        let spec = iwasawa_exp_spectrum(&rd, &rd.simple_root(0).scaled(q(s, 3))).unwrap();
        let exact = spec.tau_k(k).unwrap();
        let float = spec.to_f64().tau_k(k).unwrap();
        prop_assert!((float - *exact.numer() as f64 / *exact.denom() as f64).abs() < 1e-9);
    }
}
