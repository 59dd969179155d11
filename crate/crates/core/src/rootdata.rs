//! Restricted root data for the rank-one families and for `SL_n(R)/SO(n)`.
//!
//! Covectors in `a*` are stored in the basis of simple roots with exact
//! rational coordinates. The inner product on `a*` is encoded by the Gram
//! matrix of the simple roots, scaled according to a [`Normalization`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

/// The five families of symmetric spaces whose root data are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Real hyperbolic space, `SO(n,1)`.
    HnR,
    /// Complex hyperbolic space, `SU(n,1)`.
    HnC,
    /// Quaternionic hyperbolic space, `Sp(n,1)`.
    HnH,
    /// Octonionic hyperbolic plane, `F4(-20)`.
    H2O,
    /// `SL_n(R)/SO(n)`.
    SLn,
}

impl Family {
    pub const RANK_ONE: [Family; 4] = [Family::HnR, Family::HnC, Family::HnH, Family::H2O];

    pub fn is_rank_one(self) -> bool {
        !matches!(self, Family::SLn)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::HnR => "HnR",
            Family::HnC => "HnC",
            Family::HnH => "HnH",
            Family::H2O => "H2O",
            Family::SLn => "SLn",
        }
    }

    /// Accepts the canonical names plus a few common spellings (`SL`, `HnO`).
    pub fn parse(s: &str) -> Option<Family> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hnr" | "real" | "hr" => Some(Family::HnR),
            "hnc" | "complex" | "hc" => Some(Family::HnC),
            "hnh" | "quaternionic" | "hh" => Some(Family::HnH),
            "h2o" | "hno" | "octonionic" | "ho" => Some(Family::H2O),
            "sln" | "sl" => Some(Family::SLn),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scale of the inner product on `a*`.
///
/// `Trace` is the form dual to `tr(XY)` on diagonal matrices, so that
/// `<e_i - e_j, e_i - e_j> = 2` for `SL_n`. `Killing` is dual to
/// `B(X,Y) = 2n tr(XY)`. `SimpleRootUnit` rescales so every simple root has
/// unit length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    Killing,
    Trace,
    SimpleRootUnit,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Normalization::Killing => "Killing",
            Normalization::Trace => "Trace",
            Normalization::SimpleRootUnit => "SimpleRootUnit",
        };
        f.write_str(s)
    }
}

/// Identity of a root datum; covectors remember which datum owns them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DatumKey {
    pub family: Family,
    pub n: u32,
    pub normalization: Normalization,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootDataError {
    #[error("invalid parameter for {family}: n = {n} ({reason})")]
    InvalidParameter {
        family: Family,
        n: u32,
        reason: &'static str,
    },
    #[error("covector owned by {left:?} paired with covector owned by {right:?}")]
    OwnerMismatch { left: DatumKey, right: DatumKey },
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateLength { expected: usize, got: usize },
    #[error("{operation} is not available for {family}")]
    Unsupported {
        family: Family,
        operation: &'static str,
    },
    #[error("{normalization} normalization is not housed for {family}")]
    UnhousedNormalization {
        family: Family,
        normalization: Normalization,
    },
    #[error("root data document: {0}")]
    Document(String),
}

/// Element of `a*` in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Covector {
    coords: Vec<Rational>,
    owner: DatumKey,
}

impl Covector {
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn owner(&self) -> DatumKey {
        self.owner
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn zip_with(&self, other: &Covector, f: impl Fn(Rational, Rational) -> Rational) -> Covector {
        assert_eq!(
            self.owner, other.owner,
            "covector arithmetic across different root data"
        );
        Covector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            owner: self.owner,
        }
    }

    pub fn scaled(&self, s: Rational) -> Covector {
        Covector {
            coords: self.coords.iter().map(|c| c * s).collect(),
            owner: self.owner,
        }
    }
}

impl Add for &Covector {
    type Output = Covector;
    fn add(self, rhs: &Covector) -> Covector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Covector {
    type Output = Covector;
    fn sub(self, rhs: &Covector) -> Covector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Covector {
    type Output = Covector;
    fn neg(self) -> Covector {
        self.scaled(-Rational::one())
    }
}

impl Mul<&Covector> for Rational {
    type Output = Covector;
    fn mul(self, rhs: &Covector) -> Covector {
        rhs.scaled(self)
    }
}

/// Which root a positive root is, in family-specific terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootLabel {
    Alpha,
    TwoAlpha,
    /// `α_{i,j}` with `1 <= i < j <= n`, evaluating to `e_i - e_j` on the diagonal.
    Sl {
        i: usize,
        j: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveRoot {
    pub root: Covector,
    pub mult: u32,
    pub label: RootLabel,
}

/// A restricted root system with multiplicities and a dual inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct RootDatum {
    key: DatumKey,
    rank: usize,
    positive_roots: Vec<PositiveRoot>,
    simple_roots: Vec<Covector>,
    dual_gram: Vec<Vec<Rational>>,
    dim_x: usize,
    scale: Rational,
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

impl RootDatum {
    /// Root datum of `ℍⁿ_ℝ`, `ℍⁿ_ℂ`, `ℍⁿ_ℍ` or `ℍ²_𝕆` with `‖α‖ = 1`.
    pub fn build_rank_one(family: Family, n: u32) -> Result<RootDatum, RootDataError> {
        let bad = |reason| RootDataError::InvalidParameter { family, n, reason };
        let (m_alpha, m_two_alpha) = match family {
            Family::HnR if n >= 2 => (n - 1, 0),
            Family::HnC if n >= 2 => (2 * n - 2, 1),
            Family::HnH if n >= 2 => (4 * n - 4, 3),
            Family::H2O if n == 2 => (8, 7),
            Family::H2O => return Err(bad("the octonionic family exists only for n = 2")),
            Family::SLn => return Err(bad("use build_sln for SL_n")),
            _ => return Err(bad("n must be at least 2")),
        };
        let key = DatumKey {
            family,
            n,
            normalization: Normalization::SimpleRootUnit,
        };
        let alpha = Covector {
            coords: vec![int(1)],
            owner: key,
        };
        let mut positive_roots = vec![PositiveRoot {
            root: alpha.clone(),
            mult: m_alpha,
            label: RootLabel::Alpha,
        }];
        if m_two_alpha > 0 {
            positive_roots.push(PositiveRoot {
                root: alpha.scaled(int(2)),
                mult: m_two_alpha,
                label: RootLabel::TwoAlpha,
            });
        }
        let dim_x = 1 + (m_alpha + m_two_alpha) as usize;
        Ok(RootDatum {
            key,
            rank: 1,
            positive_roots,
            simple_roots: vec![alpha],
            dual_gram: vec![vec![int(1)]],
            dim_x,
            scale: int(1),
        })
    }

    /// Root datum of `SL_n(R)/SO(n)` with the Killing normalization.
    pub fn build_sln(n: u32) -> Result<RootDatum, RootDataError> {
        Self::build_sln_with(n, Normalization::Killing)
    }

    pub fn build_sln_with(
        n: u32,
        normalization: Normalization,
    ) -> Result<RootDatum, RootDataError> {
        if n < 2 {
            return Err(RootDataError::InvalidParameter {
                family: Family::SLn,
                n,
                reason: "n must be at least 2",
            });
        }
        let key = DatumKey {
            family: Family::SLn,
            n,
            normalization,
        };
        let rank = (n - 1) as usize;
        let scale = match normalization {
            Normalization::Trace => int(1),
            Normalization::Killing => Rational::new(1, 2 * n as i64),
            Normalization::SimpleRootUnit => Rational::new(1, 2),
        };
        let simple_roots: Vec<Covector> = (0..rank)
            .map(|i| {
                let mut coords = vec![int(0); rank];
                coords[i] = int(1);
                Covector { coords, owner: key }
            })
            .collect();
        let n = n as usize;
        let mut positive_roots = Vec::with_capacity(n * (n - 1) / 2);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let coords = (1..=rank)
                    .map(|l| if l >= i && l < j { int(1) } else { int(0) })
                    .collect();
                positive_roots.push(PositiveRoot {
                    root: Covector { coords, owner: key },
                    mult: 1,
                    label: RootLabel::Sl { i, j },
                });
            }
        }
        let dual_gram = (0..rank)
            .map(|a| {
                (0..rank)
                    .map(|b| {
                        let trace_form = if a == b {
                            2
                        } else if a.abs_diff(b) == 1 {
                            -1
                        } else {
                            0
                        };
                        int(trace_form) * scale
                    })
                    .collect()
            })
            .collect();
        Ok(RootDatum {
            key,
            rank,
            positive_roots,
            simple_roots,
            dual_gram,
            dim_x: n * (n + 1) / 2 - 1,
            scale,
        })
    }

    /// Same root system with a different inner product scale.
    pub fn with_normalization(
        &self,
        normalization: Normalization,
    ) -> Result<RootDatum, RootDataError> {
        match self.key.family {
            Family::SLn => Self::build_sln_with(self.key.n, normalization),
            family if normalization == Normalization::SimpleRootUnit => {
                Self::build_rank_one(family, self.key.n)
            }
            family => Err(RootDataError::UnhousedNormalization {
                family,
                normalization,
            }),
        }
    }

    pub fn key(&self) -> DatumKey {
        self.key
    }

    pub fn family(&self) -> Family {
        self.key.family
    }

    pub fn param_n(&self) -> u32 {
        self.key.n
    }

    pub fn normalization(&self) -> Normalization {
        self.key.normalization
    }

    /// Factor relative to the trace form (`1` for rank-one data).
    pub fn scale(&self) -> Rational {
        self.scale
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    pub fn simple_roots(&self) -> &[Covector] {
        &self.simple_roots
    }

    pub fn dual_gram(&self) -> &[Vec<Rational>] {
        &self.dual_gram
    }

    /// Multiplicity of `α` and `2α` for rank-one data.
    pub fn rank_one_multiplicities(&self) -> Result<(u32, u32), RootDataError> {
        if !self.key.family.is_rank_one() {
            return Err(RootDataError::Unsupported {
                family: self.key.family,
                operation: "rank-one multiplicities",
            });
        }
        let m = |label| {
            self.positive_roots
                .iter()
                .find(|r| r.label == label)
                .map_or(0, |r| r.mult)
        };
        Ok((m(RootLabel::Alpha), m(RootLabel::TwoAlpha)))
    }

    pub fn covector(&self, coords: Vec<Rational>) -> Result<Covector, RootDataError> {
        if coords.len() != self.rank {
            return Err(RootDataError::CoordinateLength {
                expected: self.rank,
                got: coords.len(),
            });
        }
        Ok(Covector {
            coords,
            owner: self.key,
        })
    }

    pub fn zero(&self) -> Covector {
        Covector {
            coords: vec![int(0); self.rank],
            owner: self.key,
        }
    }

    /// The simple root `α` of a rank-one datum or `α_{i,i+1}` (0-based `i`) for `SL_n`.
    pub fn simple_root(&self, i: usize) -> &Covector {
        &self.simple_roots[i]
    }

    /// `ρ = ½ Σ m_α α`.
    pub fn rho(&self) -> Covector {
        let half = Rational::new(1, 2);
        self.positive_roots.iter().fold(self.zero(), |acc, r| {
            &acc + &r.root.scaled(int(r.mult as i64) * half)
        })
    }

    /// The roots `α_{i, n+1-i}`, `i = 1..⌊n/2⌋`, a maximal strongly orthogonal subset.
    pub fn strongly_orthogonal_set(&self) -> Result<Vec<Covector>, RootDataError> {
        if self.key.family != Family::SLn || self.key.n < 3 {
            return Err(RootDataError::Unsupported {
                family: self.key.family,
                operation: "Θ (requires SL_n with n >= 3)",
            });
        }
        let n = self.key.n as usize;
        Ok((1..=n / 2)
            .map(|i| self.sl_root(i, n + 1 - i).expect("valid indices"))
            .collect())
    }

    /// Half-sum over [`Self::strongly_orthogonal_set`].
    pub fn theta_so(&self) -> Result<Covector, RootDataError> {
        let set = self.strongly_orthogonal_set()?;
        debug_assert!(self.is_strongly_orthogonal(&set));
        let sum = set.iter().fold(self.zero(), |acc, r| &acc + r);
        Ok(sum.scaled(Rational::new(1, 2)))
    }

    /// `α_{i,j}` (1-based) for `SL_n`.
    pub fn sl_root(&self, i: usize, j: usize) -> Option<Covector> {
        self.positive_roots
            .iter()
            .find(|r| r.label == RootLabel::Sl { i, j })
            .map(|r| r.root.clone())
    }

    /// True if `coords` is a root, positive or negative.
    pub fn is_root(&self, coords: &[Rational]) -> bool {
        self.positive_roots.iter().any(|r| {
            r.root.coords == coords || r.root.coords.iter().zip(coords).all(|(a, b)| *a == -*b)
        })
    }

    /// No two members `v, w` of `set` have `v + w` or `v - w` in `Φ`.
    pub fn is_strongly_orthogonal(&self, set: &[Covector]) -> bool {
        for (a, v) in set.iter().enumerate() {
            for w in &set[a + 1..] {
                if self.is_root((v + w).coords()) || self.is_root((v - w).coords()) {
                    return false;
                }
            }
        }
        true
    }

    fn check_owner(&self, xi: &Covector) -> Result<(), RootDataError> {
        if xi.owner != self.key {
            return Err(RootDataError::OwnerMismatch {
                left: self.key,
                right: xi.owner,
            });
        }
        Ok(())
    }

    /// `⟨ξ, η⟩` through the dual Gram matrix.
    pub fn pair(&self, xi: &Covector, eta: &Covector) -> Result<Rational, RootDataError> {
        self.check_owner(xi)?;
        self.check_owner(eta)?;
        let mut acc = int(0);
        for (a, xa) in xi.coords.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, eb) in eta.coords.iter().enumerate() {
                acc += xa * self.dual_gram[a][b] * eb;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self, xi: &Covector) -> Result<Rational, RootDataError> {
        self.pair(xi, xi)
    }

    /// Coefficients of `e_1..e_n` for an `SL_n` covector, i.e. its values on `diag(e_1..e_n)`.
    pub fn to_diagonal(&self, xi: &Covector) -> Result<Vec<Rational>, RootDataError> {
        self.check_owner(xi)?;
        if self.key.family != Family::SLn {
            return Err(RootDataError::Unsupported {
                family: self.key.family,
                operation: "diagonal coordinates",
            });
        }
        let n = self.key.n as usize;
        Ok((0..n)
            .map(|l| {
                let cur = if l < self.rank { xi.coords[l] } else { int(0) };
                let prev = if l > 0 { xi.coords[l - 1] } else { int(0) };
                cur - prev
            })
            .collect())
    }

    /// Inverse of [`Self::to_diagonal`]; the input must sum to zero.
    pub fn from_diagonal(&self, x: &[Rational]) -> Result<Covector, RootDataError> {
        if self.key.family != Family::SLn {
            return Err(RootDataError::Unsupported {
                family: self.key.family,
                operation: "diagonal coordinates",
            });
        }
        let n = self.key.n as usize;
        if x.len() != n {
            return Err(RootDataError::CoordinateLength {
                expected: n,
                got: x.len(),
            });
        }
        if !x.iter().fold(int(0), |a, b| a + b).is_zero() {
            return Err(RootDataError::Document(
                "diagonal coordinates of an SL_n covector must sum to zero".into(),
            ));
        }
        let mut partial = int(0);
        let coords = x[..self.rank]
            .iter()
            .map(|v| {
                partial += v;
                partial
            })
            .collect();
        self.covector(coords)
    }

    /// Checks every structural invariant; used by tests and document ingestion.
    pub fn validate(&self) -> Result<(), String> {
        let mult_sum: usize = self.positive_roots.iter().map(|r| r.mult as usize).sum();
        if self.dim_x != self.rank + mult_sum {
            return Err(format!(
                "dim_X {} != rank + Σ m_α {}",
                self.dim_x,
                self.rank + mult_sum
            ));
        }
        for r in &self.positive_roots {
            if r.root.coords.len() != self.rank {
                return Err("root coordinate length".into());
            }
            if r.root.coords.iter().any(|c| !c.is_integer() || *c < int(0)) {
                return Err(format!(
                    "{:?} is not a nonnegative integer combination",
                    r.label
                ));
            }
        }
        for a in 0..self.rank {
            for b in 0..self.rank {
                if self.dual_gram[a][b] != self.dual_gram[b][a] {
                    return Err("dual Gram matrix is not symmetric".into());
                }
            }
        }
        // Sylvester: all leading principal minors positive.
        for size in 1..=self.rank {
            let minor: Vec<Vec<Rational>> = self.dual_gram[..size]
                .iter()
                .map(|row| row[..size].to_vec())
                .collect();
            if determinant(minor) <= int(0) {
                return Err(format!("leading minor of size {size} is not positive"));
            }
        }
        Ok(())
    }

    pub fn to_document(&self) -> RootDatumDocument {
        RootDatumDocument {
            family: self.key.family,
            n: self.key.n,
            rank: self.rank,
            dim_x: self.dim_x,
            roots: self
                .positive_roots
                .iter()
                .map(|r| RootEntry {
                    coords: r.root.coords.iter().map(ToString::to_string).collect(),
                    mult: r.mult,
                })
                .collect(),
            gram: self
                .dual_gram
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
            normalization: self.key.normalization,
            scale: self.scale.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    /// Rebuilds a datum from its document and checks the stored roots and Gram matrix.
    pub fn from_document(doc: &RootDatumDocument) -> Result<RootDatum, RootDataError> {
        let rd = match doc.family {
            Family::SLn => Self::build_sln_with(doc.n, doc.normalization)?,
            family => Self::build_rank_one(family, doc.n)?.with_normalization(doc.normalization)?,
        };
        if rd.to_document() != *doc {
            return Err(RootDataError::Document(
                "stored roots or Gram matrix disagree with the family".into(),
            ));
        }
        Ok(rd)
    }

    pub fn from_json(text: &str) -> Result<RootDatum, RootDataError> {
        let doc: RootDatumDocument =
            serde_json::from_str(text).map_err(|e| RootDataError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// JSON layout of a root datum. Rationals are encoded as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDatumDocument {
    pub family: Family,
    pub n: u32,
    pub rank: usize,
    pub dim_x: usize,
    pub roots: Vec<RootEntry>,
    pub gram: Vec<Vec<String>>,
    pub normalization: Normalization,
    pub scale: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub coords: Vec<String>,
    pub mult: u32,
}

/// Exact determinant by fraction-preserving Gaussian elimination.
pub(crate) fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = int(1);
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return int(0);
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for r in (col + 1)..n {
            let factor = m[r][col] / p;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= factor * v;
            }
        }
    }
    det
}
