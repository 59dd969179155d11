//! Monotonicity and plurisuperharmonicity exponents of rank-one spaces and `SL_n`.
//!
//! Everything here is exact. Rank-one quantities use `‖α‖ = 1`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::hesspec::{iwasawa_exp_spectrum, HessError, Spectrum};
use crate::rootdata::{Covector, Family, RootDataError, RootDatum};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error(transparent)]
    Hess(#[from] HessError),
    #[error(transparent)]
    Root(#[from] RootDataError),
    #[error("{0} is not a rank-one family")]
    NotRankOne(Family),
    #[error("{name} = {value} outside {lo}..={hi}")]
    OutOfRange {
        name: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("no dimension-gap theorem is available for {family} with n = {n}")]
    NoGapTheorem { family: Family, n: u32 },
}

/// How a tabulated value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Provenance {
    /// Evaluated from the piecewise formula printed in the table.
    ClosedForm,
    /// Computed from the eigenvalue multiset.
    Enumerated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub family: Family,
    pub n: u32,
    pub k_or_d: i64,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub feasibility: Option<bool>,
    pub provenance: Provenance,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

fn rank_one(rd: &RootDatum) -> Result<(u32, u32), ExponentError> {
    rd.rank_one_multiplicities()
        .map_err(|_| ExponentError::NotRankOne(rd.family()))
}

fn range_check(
    name: &'static str,
    value: usize,
    lo: usize,
    hi: usize,
) -> Result<(), ExponentError> {
    if value < lo || value > hi {
        return Err(ExponentError::OutOfRange {
            name,
            value: value as i64,
            lo: lo as i64,
            hi: hi as i64,
        });
    }
    Ok(())
}

/// `{0} ∪ {1 × m_α} ∪ {2 × m_{2α}}`, the scaled lower envelope of the `Hess 𝔣` eigenvalues.
pub fn kappa_multiset(rd: &RootDatum) -> Result<Spectrum<Rational>, ExponentError> {
    let (ma, m2a) = rank_one(rd)?;
    Ok(Spectrum::new([
        (int(0), 1),
        (int(1), ma as usize),
        (int(2), m2a as usize),
    ]))
}

/// Monotonicity exponent `κ(k)`, `1 <= k <= dim X − 1`.
pub fn kappa(rd: &RootDatum, k: usize) -> Result<Rational, ExponentError> {
    let multiset = kappa_multiset(rd)?;
    range_check("k", k, 1, rd.dim_x() - 1)?;
    Ok(multiset.min_trace(k)?)
}

/// `κ(k)` from the piecewise table formulas, independent of the multiset.
pub fn kappa_closed_form(family: Family, n: u32, k: usize) -> Option<Rational> {
    let (n, k) = (n as i64, k as i64);
    let v = match family {
        Family::HnR => k - 1,
        Family::HnC => k - 1,
        Family::HnH if k <= 4 * n - 3 => k - 1,
        Family::HnH => 4 * n - 4 + 2 * (k - (4 * n - 3)),
        Family::H2O if k <= 9 => k - 1,
        Family::H2O => 8 + 2 * (k - 9),
        Family::SLn => return None,
    };
    Some(int(v))
}

/// `C_X(d)`: the largest `δ` with `τ_{dim X − d}{δ, −1 × m_α, −2 × m_{2α}} <= 0`.
///
/// With `k = dim X − d`, the constraint is `δ <= −τ_{k−1}` of the negative part,
/// i.e. the sum of the `k − 1` smallest values among `{1 × m_α, 2 × m_{2α}}`.
pub fn cx(rd: &RootDatum, d: usize) -> Result<Rational, ExponentError> {
    let (ma, m2a) = rank_one(rd)?;
    let dim = rd.dim_x();
    range_check("d", d, 0, dim)?;
    let k = dim - d;
    if k <= 1 {
        return Ok(int(0));
    }
    let negatives = Spectrum::new([(int(-1), ma as usize), (int(-2), m2a as usize)]);
    Ok(-negatives.tau_k(k - 1)?)
}

/// `C_X(d)` from the table rows.
pub fn cx_closed_form(family: Family, n: u32, d: usize) -> Option<Rational> {
    let (n, d) = (n as i64, d as i64);
    let v = match family {
        Family::HnR if d < n => n - 1 - d,
        Family::HnR => 0,
        Family::HnC if d <= 1 => 2 * n - 2 * d,
        Family::HnC if d < 2 * n => 2 * n - 1 - d,
        Family::HnC => 0,
        Family::HnH if d <= 3 => 4 * n + 2 - 2 * d,
        Family::HnH if d < 4 * n => 4 * n - 1 - d,
        Family::HnH => 0,
        Family::H2O if d <= 7 => 22 - 2 * d,
        Family::H2O if d <= 15 => 15 - d,
        Family::H2O => 0,
        Family::SLn => return None,
    };
    Some(int(v))
}

/// `ξ ∈ Ω_d ⇔ τ_{dim X − d}(Hess e^{ξH} / e^{ξH}) < 0`.
pub fn omega_contains(rd: &RootDatum, xi: &Covector, d: usize) -> Result<bool, ExponentError> {
    range_check("d", d, 0, rd.dim_x() - 1)?;
    let spec = iwasawa_exp_spectrum(rd, xi)?;
    Ok(spec.tau_k(rd.dim_x() - d)? < int(0))
}

/// Bound on critical exponents of infinite covolume subgroups where one is known.
pub fn corlette_threshold(family: Family, n: u32) -> Option<Rational> {
    match family {
        Family::HnH => Some(int(4 * n as i64)),
        Family::H2O => Some(int(16)),
        _ => None,
    }
}

/// Per-`d` evidence behind [`r_lower_bound`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub family: Family,
    pub n: u32,
    /// The functional `ξ` whose exponential is tested, in simple-root coordinates.
    pub xi: Vec<String>,
    /// `(d, τ_{dim X − d})` for every `d` in `0..dim X`.
    pub taus: Vec<(usize, String)>,
    pub r: usize,
    /// `⌊n/8⌋ − 1` for `SL_n`; `2` for the octonionic plane.
    pub closed_form_bound: i64,
}

/// The functional used for the gap bound: `16α` for `ℍ²_𝕆`, `2ρ − Θ` for `SL_n`.
pub fn gap_functional(rd: &RootDatum) -> Result<Covector, ExponentError> {
    let none = || ExponentError::NoGapTheorem {
        family: rd.family(),
        n: rd.param_n(),
    };
    match rd.family() {
        Family::H2O => {
            let s = corlette_threshold(Family::H2O, 2).ok_or_else(none)?;
            Ok(rd.simple_root(0).scaled(s))
        }
        Family::SLn if rd.param_n() >= 3 => Ok(&rd.rho().scaled(int(2)) - &rd.theta_so()?),
        _ => Err(none()),
    }
}

/// Lower bound for the dimension gap `r(X)`: the largest `d` with the gap
/// functional in `Ω_d`, or `0` if there is none.
pub fn r_lower_bound(rd: &RootDatum) -> Result<usize, ExponentError> {
    Ok(gap_report(rd)?.r)
}

pub fn gap_report(rd: &RootDatum) -> Result<GapReport, ExponentError> {
    let xi = gap_functional(rd)?;
    let spec = iwasawa_exp_spectrum(rd, &xi)?;
    let dim = rd.dim_x();
    let mut taus = Vec::with_capacity(dim);
    let mut r = 0;
    for d in 0..dim {
        let tau = spec.tau_k(dim - d)?;
        if tau < int(0) {
            r = r.max(d);
        }
        taus.push((d, tau.to_string()));
    }
    let closed_form_bound = match rd.family() {
        Family::SLn => rd.param_n() as i64 / 8 - 1,
        _ => 2,
    };
    Ok(GapReport {
        family: rd.family(),
        n: rd.param_n(),
        xi: xi.coords().iter().map(ToString::to_string).collect(),
        taus,
        r,
        closed_form_bound,
    })
}

/// Full trace of `Hess e^{ξH}/e^{ξH}` at `ξ = 2ρ − Θ` by direct enumeration.
pub fn sl_full_trace(rd: &RootDatum) -> Result<Rational, ExponentError> {
    let xi = gap_functional(rd)?;
    Ok(iwasawa_exp_spectrum(rd, &xi)?.trace())
}

/// The intermediate evaluation of the `SL_{2m}` trace, term by term:
/// `(m/2 + 2m(m−1) + 4(m−1)m(2m−1)/3) − (2m(2m−1)(2m+1)/3 − m²)`, trace-form units.
pub fn sl_trace_intermediate(m: i64) -> Rational {
    let m = int(m);
    let one = int(1);
    let two = int(2);
    let norm = m / two + two * m * (m - one) + int(4) * (m - one) * m * (two * m - one) / int(3);
    let pairing_sum = two * m * (two * m - one) * (two * m + one) / int(3) - m * m;
    norm - pairing_sum
}

/// The collected closed form printed for the same trace, `−m² + 11m/6`.
pub fn sl_trace_printed(m: i64) -> Rational {
    let m = int(m);
    -m * m + Rational::new(11, 6) * m
}

/// `{k : κ(k) > dim X}`, the codimensions where the stationary-varifold estimate bites.
pub fn stationary_codims(rd: &RootDatum) -> Result<BTreeSet<usize>, ExponentError> {
    rank_one(rd)?;
    let dim = int(rd.dim_x() as i64);
    let mut out = BTreeSet::new();
    for k in 1..rd.dim_x() {
        if kappa(rd, k)? > dim {
            out.insert(k);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthExponents {
    #[serde(serialize_with = "ser_rational")]
    pub volume_exponent: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub budget: (Rational, Rational),
    pub feasible: bool,
}

fn ser_pair<S: serde::Serializer>(v: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&v.0.to_string())?;
    t.serialize_element(&v.1.to_string())?;
    t.end()
}

/// Ball volume exponent `m_α + 2m_{2α}` and the pair
/// `(κ(k) − m_α − 2m_{2α}, 1 − m_{2α})` whose comparison decides feasibility.
///
/// `k = dim X` is accepted here, with `κ(dim X)` the full trace.
pub fn growth_exponents(rd: &RootDatum, k: usize) -> Result<GrowthExponents, ExponentError> {
    let (ma, m2a) = rank_one(rd)?;
    range_check("k", k, 1, rd.dim_x())?;
    let kap = kappa_multiset(rd)?.min_trace(k)?;
    let volume = int(ma as i64 + 2 * m2a as i64);
    let budget = (kap - volume, int(1 - m2a as i64));
    Ok(GrowthExponents {
        volume_exponent: volume,
        feasible: budget.0 > budget.1,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Normalization;
    use proptest::prelude::*;

    fn rank_one_data() -> Vec<RootDatum> {
        let mut v = Vec::new();
        for f in [Family::HnR, Family::HnC, Family::HnH] {
            for n in 2..=6 {
                v.push(RootDatum::build_rank_one(f, n).unwrap());
            }
        }
        v.push(RootDatum::build_rank_one(Family::H2O, 2).unwrap());
        v
    }

    /// κ by brute force: the minimum over all k-subsets of the eigenvalue list.
    fn kappa_brute(ma: u32, m2a: u32, k: usize) -> i64 {
        let mut vals = vec![0i64];
        vals.extend(std::iter::repeat_n(1, ma as usize));
        vals.extend(std::iter::repeat_n(2, m2a as usize));
        let n = vals.len();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| vals[i]).sum())
            .min()
            .unwrap()
    }

    #[test]
    fn kappa_examples() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        assert_eq!(kappa(&h2o, 14).unwrap(), int(18));
        assert_eq!(kappa(&h2o, 15).unwrap(), int(20));
        assert_eq!(kappa(&h2o, 1).unwrap(), int(0));
        assert!(kappa(&h2o, 16).is_err());
        assert!(kappa(&h2o, 0).is_err());
        for n in 2..=6 {
            let rd = RootDatum::build_rank_one(Family::HnR, n).unwrap();
            for k in 1..rd.dim_x() {
                assert_eq!(kappa(&rd, k).unwrap(), int(k as i64 - 1));
            }
        }
        assert!(kappa(&RootDatum::build_sln(3).unwrap(), 1).is_err());
    }

    #[test]
    fn kappa_matches_brute_force_and_table() {
        for rd in rank_one_data() {
            let (ma, m2a) = rd.rank_one_multiplicities().unwrap();
            for k in 1..rd.dim_x() {
                let v = kappa(&rd, k).unwrap();
                if rd.dim_x() <= 16 {
                    assert_eq!(v, int(kappa_brute(ma, m2a, k)));
                }
                assert_eq!(Some(v), kappa_closed_form(rd.family(), rd.param_n(), k));
            }
        }
    }

    #[test]
    fn hnc_top_table_cell_is_the_full_trace() {
        // The table's κ(2n) = 2n for ℍⁿ_ℂ sits at k = dim X.
        for n in 2..=6 {
            let rd = RootDatum::build_rank_one(Family::HnC, n).unwrap();
            let full = kappa_multiset(&rd).unwrap().min_trace(rd.dim_x()).unwrap();
            assert_eq!(full, int(2 * n as i64));
            assert_eq!(
                kappa(&rd, 2 * n as usize - 1).unwrap(),
                int(2 * n as i64 - 2)
            );
        }
    }

    #[test]
    fn cx_examples() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        assert_eq!(cx(&h2o, 2).unwrap(), int(18));
        assert_eq!(cx(&h2o, 10).unwrap(), int(5));
        assert_eq!(cx(&h2o, 16).unwrap(), int(0));
        assert!(cx(&h2o, 17).is_err());
        let h5 = RootDatum::build_rank_one(Family::HnR, 5).unwrap();
        assert_eq!(cx(&h5, 1).unwrap(), int(3));
    }

    #[test]
    fn cx_is_the_supremal_delta() {
        // Oracle: scan δ over half-integers and keep the last one with τ <= 0.
        for rd in rank_one_data() {
            let (ma, m2a) = rd.rank_one_multiplicities().unwrap();
            for d in 0..=rd.dim_x() {
                let k = rd.dim_x() - d;
                let mut best = int(0);
                for twice in 0..=200 {
                    let delta = Rational::new(twice, 2);
                    let spec = Spectrum::new([
                        (delta, 1),
                        (int(-1), ma as usize),
                        (int(-2), m2a as usize),
                    ]);
                    if k == 0 || spec.tau_k(k).unwrap() <= int(0) {
                        best = delta;
                    }
                }
                let got = cx(&rd, d).unwrap();
                if k >= 1 {
                    assert_eq!(got, best, "{:?} n={} d={d}", rd.family(), rd.param_n());
                }
                assert_eq!(Some(got), cx_closed_form(rd.family(), rd.param_n(), d));
            }
        }
    }

    #[test]
    fn omega_examples() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        let xi = h2o.simple_root(0).scaled(int(16));
        assert!(omega_contains(&h2o, &xi, 2).unwrap());
        assert!(!omega_contains(&h2o, &xi, 3).unwrap());
        for d in 0..16 {
            assert!(!omega_contains(&h2o, &h2o.zero(), d).unwrap());
        }
        let sl16 = RootDatum::build_sln(16).unwrap();
        let xi = gap_functional(&sl16).unwrap();
        assert!(omega_contains(&sl16, &xi, 1).unwrap());
    }

    #[test]
    fn gap_bounds() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        assert_eq!(r_lower_bound(&h2o).unwrap(), 2);
        assert_eq!(r_lower_bound(&RootDatum::build_sln(3).unwrap()).unwrap(), 0);
        assert!(r_lower_bound(&RootDatum::build_sln(16).unwrap()).unwrap() >= 1);
        assert!(r_lower_bound(&RootDatum::build_sln(2).unwrap()).is_err());
        assert!(r_lower_bound(&RootDatum::build_rank_one(Family::HnH, 3).unwrap()).is_err());
    }

    #[test]
    fn omega_is_normalization_invariant() {
        for n in 3..=9 {
            let a = RootDatum::build_sln_with(n, Normalization::Killing).unwrap();
            let b = RootDatum::build_sln_with(n, Normalization::Trace).unwrap();
            assert_eq!(r_lower_bound(&a).unwrap(), r_lower_bound(&b).unwrap());
        }
    }

    #[test]
    fn sl_trace_against_intermediate_line() {
        let sl4 = RootDatum::build_sln_with(4, Normalization::Trace).unwrap();
        assert_eq!(sl_full_trace(&sl4).unwrap(), int(-3));
        assert_eq!(sl_trace_intermediate(2), int(-3));
        assert_ne!(sl_trace_printed(2), int(-3));
        for m in 2..=10 {
            let rd = RootDatum::build_sln_with(2 * m as u32, Normalization::Trace).unwrap();
            let enumerated = sl_full_trace(&rd).unwrap();
            assert_eq!(enumerated, sl_trace_intermediate(m));
            assert_eq!(enumerated, -int(m * m) + Rational::new(m, 2));
        }
    }

    #[test]
    fn sl_pairings_follow_the_indicator_rule() {
        // ⟨α_ij, 2ρ − Θ⟩ = 2(j − i) − [i <= ⌊n/2⌋ < j] in trace units.
        for n in 3..=12u32 {
            let rd = RootDatum::build_sln_with(n, Normalization::Trace).unwrap();
            let xi = gap_functional(&rd).unwrap();
            let h = (n / 2) as usize;
            for r in rd.positive_roots() {
                let crate::rootdata::RootLabel::Sl { i, j } = r.label else {
                    unreachable!()
                };
                let ind = if n % 2 == 0 {
                    int((i <= h && j > h) as i64)
                } else {
                    // Θ has diagonal entries 1/2, 0, −1/2 above, at and below the middle.
                    let theta = |l: usize| Rational::new((l <= h) as i64 - (l > h + 1) as i64, 2);
                    theta(i) - theta(j)
                };
                let expected = int(2 * (j as i64 - i as i64)) - ind;
                assert_eq!(rd.pair(&r.root, &xi).unwrap(), expected, "n={n} ({i},{j})");
            }
        }
    }

    #[test]
    fn stationary_sets() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        assert_eq!(stationary_codims(&h2o).unwrap(), BTreeSet::from([14, 15]));
        for f in [Family::HnR, Family::HnC, Family::HnH] {
            for n in 2..=8 {
                let rd = RootDatum::build_rank_one(f, n).unwrap();
                assert!(stationary_codims(&rd).unwrap().is_empty(), "{f} n={n}");
            }
        }
        let hh = RootDatum::build_rank_one(Family::HnH, 3).unwrap();
        assert_eq!(kappa(&hh, 11).unwrap(), int(12));
    }

    #[test]
    fn growth_examples() {
        let h2o = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
        let g = growth_exponents(&h2o, 14).unwrap();
        assert_eq!(g.volume_exponent, int(22));
        assert_eq!(g.budget, (int(-4), int(-6)));
        assert!(g.feasible);
        let h4 = RootDatum::build_rank_one(Family::HnR, 4).unwrap();
        let g = growth_exponents(&h4, 3).unwrap();
        assert_eq!(
            (g.volume_exponent, g.budget, g.feasible),
            (int(3), (int(-1), int(1)), false)
        );
        let hc = RootDatum::build_rank_one(Family::HnC, 2).unwrap();
        assert_eq!(growth_exponents(&hc, 4).unwrap().volume_exponent, int(4));
        for rd in rank_one_data() {
            for k in 1..rd.dim_x() {
                let g = growth_exponents(&rd, k).unwrap();
                assert_eq!(g.feasible, kappa(&rd, k).unwrap() > int(rd.dim_x() as i64));
            }
        }
    }

    #[test]
    fn corlette_thresholds() {
        assert_eq!(corlette_threshold(Family::HnH, 3), Some(int(12)));
        assert_eq!(corlette_threshold(Family::H2O, 2), Some(int(16)));
        assert_eq!(corlette_threshold(Family::HnC, 3), None);
    }

    proptest! {
        #[test]
        fn kappa_steps_are_small(idx in 0usize..16) {
            let data = rank_one_data();
            let rd = &data[idx % data.len()];
            for k in 1..rd.dim_x() - 1 {
                let step = kappa(rd, k + 1).unwrap() - kappa(rd, k).unwrap();
                prop_assert!(step == int(0) || step == int(1) || step == int(2));
            }
        }

        #[test]
        fn omega_is_star_shaped(n in 3u32..8, coords in prop::collection::vec(0i64..6, 7), t_num in 1i64..=10, d in 0usize..4) {
            let rd = RootDatum::build_sln(n).unwrap();
            let xi = rd.covector(coords[..rd.rank()].iter().map(|c| int(*c)).collect()).unwrap();
            prop_assume!(d < rd.dim_x());
            if omega_contains(&rd, &xi, d).unwrap() {
                let t = Rational::new(t_num, 10);
                prop_assert!(omega_contains(&rd, &xi.scaled(t), d).unwrap());
            }
        }

        #[test]
        fn omega_is_nested(s in 1i64..40, d in 0usize..14) {
            let rd = RootDatum::build_rank_one(Family::H2O, 2).unwrap();
            let xi = rd.simple_root(0).scaled(int(s));
            if omega_contains(&rd, &xi, d + 1).unwrap() {
                prop_assert!(omega_contains(&rd, &xi, d).unwrap());
            }
        }
    }
}
