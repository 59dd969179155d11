//! Finite-difference Hessians of `ξ∘H` and `e^{ξ∘H}` compared with the closed forms.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::hesspec::{iwasawa_exp_spectrum, iwasawa_linear_spectrum};
use crate::rootdata::{Covector, Family, RootDatum};
use crate::Scalar;

use super::fd::{fd_hessian, sorted_eigenvalues, Stencil};
use super::frame::{FrameLabel, TangentFrame};
use super::iwasawa::iwasawa_decompose_matrix;
use super::ModelError;

/// Machine-readable outcome of a numerical check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: serde_json::Value,
    pub max_abs_err: f64,
    /// `max_abs_err / max |expected|` (or `max_abs_err` when everything expected is zero).
    pub rel_err: f64,
    pub pass: bool,
    /// Human-readable location of the worst entry.
    pub worst: String,
}

/// Which function of `H` is differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IwasawaFunction {
    Linear,
    Exponential,
}

/// Expected Hessian entries per frame element.
///
/// `cartan` is the `𝔞` block; `roots[(i, j)]` the diagonal entry on the root vector of `α_ij`.
#[derive(Clone, Debug)]
pub struct HessianOracle {
    pub cartan: DMatrix<f64>,
    pub roots: Vec<((usize, usize), f64)>,
}

impl HessianOracle {
    /// The closed form: `−⟨α,ξ⟩` on root vectors and `0` (linear) or `ξ(H_a)ξ(H_b)` (exponential) on `𝔞`.
    pub fn closed_form(
        rd: &RootDatum,
        frame: &TangentFrame,
        xi: &Covector,
        function: IwasawaFunction,
    ) -> Result<Self, ModelError> {
        let rank = rd.rank();
        let diag: Vec<f64> = rd
            .to_diagonal(xi)?
            .iter()
            .map(Scalar::to_f64_lossy)
            .collect();
        let diag = DVector::from_vec(diag);
        let xi_h: Vec<f64> = (0..rank)
            .map(|a| diag.dot(&frame.cartan_diagonal(a)))
            .collect();
        let cartan = match function {
            IwasawaFunction::Linear => DMatrix::zeros(rank, rank),
            IwasawaFunction::Exponential => DMatrix::from_fn(rank, rank, |a, b| xi_h[a] * xi_h[b]),
        };
        let mut roots = Vec::new();
        for r in rd.positive_roots() {
            let crate::rootdata::RootLabel::Sl { i, j } = r.label else {
                continue;
            };
            roots.push(((i, j), -rd.pair(&r.root, xi)?.to_f64_lossy()));
        }
        Ok(HessianOracle { cartan, roots })
    }

    /// Same oracle with root entries negated, for testing failure detection.
    pub fn wrong_sign(mut self) -> Self {
        for r in &mut self.roots {
            r.1 = -r.1;
        }
        self
    }

    fn matrix(&self, frame: &TangentFrame) -> DMatrix<f64> {
        let m = frame.len();
        let mut out = DMatrix::zeros(m, m);
        for (a, la) in frame.labels.iter().enumerate() {
            match *la {
                FrameLabel::Cartan(i) => {
                    for (b, lb) in frame.labels.iter().enumerate() {
                        if let FrameLabel::Cartan(j) = *lb {
                            out[(a, b)] = self.cartan[(i, j)];
                        }
                    }
                }
                FrameLabel::Root(i, j) => {
                    out[(a, a)] = self
                        .roots
                        .iter()
                        .find(|(ij, _)| *ij == (i, j))
                        .map_or(0.0, |(_, v)| *v);
                }
            }
        }
        out
    }
}

/// Finite-difference Hessian of `ξ∘H` or `e^{ξ∘H}` at the basepoint in the datum's frame.
pub fn fd_iwasawa_hessian(
    rd: &RootDatum,
    xi: &Covector,
    function: IwasawaFunction,
    h: f64,
    stencil: Stencil,
) -> Result<(DMatrix<f64>, TangentFrame), ModelError> {
    let n = rd.param_n() as usize;
    let frame = TangentFrame::for_datum(rd)?;
    let diag: Vec<f64> = rd
        .to_diagonal(xi)?
        .iter()
        .map(Scalar::to_f64_lossy)
        .collect();
    let f = move |g: &DMatrix<f64>| -> f64 {
        match iwasawa_decompose_matrix(g) {
            Ok(dec) => {
                let v: f64 = dec.h.iter().zip(&diag).map(|(a, b)| a * b).sum();
                match function {
                    IwasawaFunction::Linear => v,
                    IwasawaFunction::Exponential => v.exp(),
                }
            }
            Err(_) => f64::NAN,
        }
    };
    let m = fd_hessian(&f, &DMatrix::identity(n, n), &frame.vectors, h, stencil)?;
    Ok((m, frame))
}

fn entrywise_report(
    check: &str,
    params: serde_json::Value,
    fd: &DMatrix<f64>,
    expected: &DMatrix<f64>,
    frame: &TangentFrame,
    tol: f64,
) -> VerificationReport {
    let mut max_abs_err = 0.0;
    let mut worst = String::from("none");
    for a in 0..fd.nrows() {
        for b in 0..fd.ncols() {
            let e = (fd[(a, b)] - expected[(a, b)]).abs();
            if e > max_abs_err {
                max_abs_err = e;
                worst = format!(
                    "{:?}/{:?}: fd {:.6e} vs expected {:.6e}",
                    frame.labels[a],
                    frame.labels[b],
                    fd[(a, b)],
                    expected[(a, b)]
                );
            }
        }
    }
    let scale = expected.amax();
    let rel_err = if scale > 0.0 {
        max_abs_err / scale
    } else {
        max_abs_err
    };
    VerificationReport {
        check: check.to_string(),
        params,
        max_abs_err,
        rel_err,
        pass: rel_err <= tol,
        worst,
    }
}

fn check_n(n: u32) -> Result<(), ModelError> {
    if !(2..=6).contains(&n) {
        return Err(ModelError::UnsupportedDimension(n as usize));
    }
    Ok(())
}

/// Entrywise comparison of the finite-difference Hessian of `ξ∘H` with `oracle`,
/// covering both the eigenvalues and the vanishing of the mixed `𝔞`/root entries.
pub fn verify_against(
    rd: &RootDatum,
    xi: &Covector,
    function: IwasawaFunction,
    oracle: &HessianOracle,
    h: f64,
    tol: f64,
) -> Result<VerificationReport, ModelError> {
    check_n(rd.param_n())?;
    if rd.family() != Family::SLn {
        return Err(ModelError::UnsupportedDimension(rd.param_n() as usize));
    }
    let (fd, frame) = fd_iwasawa_hessian(rd, xi, function, h, Stencil::ThreePoint)?;
    let expected = oracle.matrix(&frame);
    let params = serde_json::json!({
        "n": rd.param_n(),
        "xi": xi.coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "h": h,
        "tol": tol,
        "normalization": rd.normalization().to_string(),
    });
    let name = match function {
        IwasawaFunction::Linear => "iwasawa_linear_hessian",
        IwasawaFunction::Exponential => "iwasawa_exp_hessian",
    };
    let mut report = entrywise_report(name, params, &fd, &expected, &frame, tol);

    // Sorted eigenvalues must match the spectrum as well.
    let spectrum = match function {
        IwasawaFunction::Linear => iwasawa_linear_spectrum(rd, xi)?,
        IwasawaFunction::Exponential => iwasawa_exp_spectrum(rd, xi)?,
    };
    let want: Vec<f64> = spectrum.to_f64().values();
    let got = sorted_eigenvalues(&fd);
    let spec_err = want
        .iter()
        .zip(&got)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spec_rel = if scale > 0.0 {
        spec_err / scale
    } else {
        spec_err
    };
    if spec_rel > report.rel_err {
        report.rel_err = spec_rel;
        report.max_abs_err = report.max_abs_err.max(spec_err);
        report.worst = format!("sorted eigenvalues differ by {spec_err:.6e}");
    }
    report.pass = report.rel_err <= tol;
    Ok(report)
}

/// Hessian of `ξ∘H` at the basepoint against the linear spectrum.
pub fn verify_iwasawa_spectrum(
    rd: &RootDatum,
    xi: &Covector,
    h: f64,
    tol: f64,
) -> Result<VerificationReport, ModelError> {
    let frame = TangentFrame::for_datum(rd)?;
    let oracle = HessianOracle::closed_form(rd, &frame, xi, IwasawaFunction::Linear)?;
    verify_against(rd, xi, IwasawaFunction::Linear, &oracle, h, tol)
}

/// Hessian of `e^{ξ∘H}` at the basepoint against the exponential spectrum.
pub fn verify_exp_spectrum(
    rd: &RootDatum,
    xi: &Covector,
    h: f64,
    tol: f64,
) -> Result<VerificationReport, ModelError> {
    let frame = TangentFrame::for_datum(rd)?;
    let oracle = HessianOracle::closed_form(rd, &frame, xi, IwasawaFunction::Exponential)?;
    verify_against(rd, xi, IwasawaFunction::Exponential, &oracle, h, tol)
}

/// Spectrum error at `h` and `h/2` and their ratio; about `2^order` in the asymptotic range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichardsonReport {
    pub h: f64,
    pub err_h: f64,
    pub err_half: f64,
    pub ratio: f64,
}

pub fn richardson_ratio(
    rd: &RootDatum,
    xi: &Covector,
    function: IwasawaFunction,
    h: f64,
    stencil: Stencil,
) -> Result<RichardsonReport, ModelError> {
    let spectrum = match function {
        IwasawaFunction::Linear => iwasawa_linear_spectrum(rd, xi)?,
        IwasawaFunction::Exponential => iwasawa_exp_spectrum(rd, xi)?,
    };
    let want = spectrum.to_f64().values();
    let err = |step: f64| -> Result<f64, ModelError> {
        let (fd, _) = fd_iwasawa_hessian(rd, xi, function, step, stencil)?;
        let got = sorted_eigenvalues(&fd);
        Ok(want
            .iter()
            .zip(&got)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    };
    let err_h = err(h)?;
    let err_half = err(h / 2.0)?;
    Ok(RichardsonReport {
        h,
        err_h,
        err_half,
        ratio: err_h / err_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn sl2_linear_eigenvalues() {
        let rd = RootDatum::build_sln(2).unwrap();
        let (m, _) = fd_iwasawa_hessian(
            &rd,
            rd.simple_root(0),
            IwasawaFunction::Linear,
            1e-3,
            Stencil::ThreePoint,
        )
        .unwrap();
        let ev = sorted_eigenvalues(&m);
        assert!(ev[0].abs() < 1e-4 && (ev[1] + 0.5).abs() < 1e-4, "{ev:?}");
    }

    #[test]
    fn passes_at_default_step() {
        let sl2 = RootDatum::build_sln(2).unwrap();
        assert!(
            verify_iwasawa_spectrum(&sl2, sl2.simple_root(0), 1e-3, 1e-3)
                .unwrap()
                .pass
        );
        let sl3 = RootDatum::build_sln(3).unwrap();
        let two_rho = sl3.rho().scaled(int(2));
        let r = verify_iwasawa_spectrum(&sl3, &two_rho, 1e-3, 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_exp_spectrum(&sl3, &sl3.rho(), 1e-3, 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn wrong_sign_oracle_fails_with_gap() {
        let rd = RootDatum::build_sln(3).unwrap();
        let xi = rd.sl_root(1, 2).unwrap();
        let frame = TangentFrame::for_datum(&rd).unwrap();
        let oracle = HessianOracle::closed_form(&rd, &frame, &xi, IwasawaFunction::Linear)
            .unwrap()
            .wrong_sign();
        let r = verify_against(&rd, &xi, IwasawaFunction::Linear, &oracle, 1e-3, 1e-3).unwrap();
        assert!(!r.pass);
        let gap = 2.0 * rd.norm_sq(&xi).unwrap().to_f64_lossy();
        assert!(
            (r.max_abs_err - gap).abs() < 1e-3,
            "{} vs {gap}",
            r.max_abs_err
        );
    }

    #[test]
    fn richardson_orders() {
        let rd = RootDatum::build_sln(3).unwrap();
        let xi = rd.rho();
        let r =
            richardson_ratio(&rd, &xi, IwasawaFunction::Linear, 1e-2, Stencil::ThreePoint).unwrap();
        assert!((3.0..=5.0).contains(&r.ratio), "{r:?}");
        let three = r.err_h;
        let r =
            richardson_ratio(&rd, &xi, IwasawaFunction::Linear, 1e-2, Stencil::FivePoint).unwrap();
        assert!(r.err_h < 1e-3 * three, "{r:?}");
    }

    #[test]
    fn rejects_out_of_range() {
        let rd = RootDatum::build_sln(7).unwrap();
        assert!(verify_iwasawa_spectrum(&rd, &rd.rho(), 1e-3, 1e-3).is_err());
    }
}
