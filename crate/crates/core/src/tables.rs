//! The three rank-one tables (multiplicities, `κ(k)`, `C_X(d)`), their
//! CSV/JSON emission and comparison against embedded golden values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exponents::{cx, cx_closed_form, kappa, kappa_closed_form, ExponentError, Provenance};
use crate::rootdata::{Family, RootDatum};
use crate::Rational;

/// Golden values typed in from the printed tables (see `data/gen_golden.py`).
pub const GOLDEN_CSV: &str = include_str!("../data/golden_tables.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// `k_or_d = 1` for `m_α`, `2` for `m_{2α}`.
    Multiplicities,
    Kappa,
    Cx,
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::Multiplicities => "multiplicities",
            TableKind::Kappa => "kappa",
            TableKind::Cx => "cx",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub table: TableKind,
    pub family: Family,
    pub n: u32,
    pub k_or_d: i64,
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub value: Rational,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
struct GoldenRecord {
    table: TableKind,
    family: Family,
    n: u32,
    k_or_d: i64,
    value: i64,
}

/// `n` values to tabulate for a family; the octonionic plane only has `n = 2`.
pub fn family_ns(family: Family, ns: &[u32]) -> Vec<u32> {
    match family {
        Family::H2O => vec![2],
        _ => ns.iter().copied().filter(|n| *n >= 2).collect(),
    }
}

/// Every row computed from root data and eigenvalue multisets.
pub fn enumerated_rows(families: &[Family], ns: &[u32]) -> Result<Vec<TableRow>, ExponentError> {
    let mut rows = Vec::new();
    for table in [TableKind::Multiplicities, TableKind::Kappa, TableKind::Cx] {
        for &family in families {
            for n in family_ns(family, ns) {
                let rd = RootDatum::build_rank_one(family, n)?;
                let mut push = |k_or_d: usize, value: Rational| {
                    rows.push(TableRow {
                        table,
                        family,
                        n,
                        k_or_d: k_or_d as i64,
                        value,
                        provenance: Provenance::Enumerated,
                    })
                };
                match table {
                    TableKind::Multiplicities => {
                        let (ma, m2a) = rd.rank_one_multiplicities()?;
                        push(1, Rational::from_integer(ma as i64));
                        push(2, Rational::from_integer(m2a as i64));
                    }
                    TableKind::Kappa => {
                        for k in 1..rd.dim_x() {
                            push(k, kappa(&rd, k)?);
                        }
                    }
                    TableKind::Cx => {
                        for d in 0..=rd.dim_x() {
                            push(d, cx(&rd, d)?);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// The same row evaluated from the piecewise table formula.
pub fn closed_form(row: &TableRow) -> Option<Rational> {
    let k = usize::try_from(row.k_or_d).ok()?;
    match row.table {
        TableKind::Multiplicities => None,
        TableKind::Kappa => kappa_closed_form(row.family, row.n, k),
        TableKind::Cx => cx_closed_form(row.family, row.n, k),
    }
}

fn golden_records() -> Vec<GoldenRecord> {
    let mut reader = csv::Reader::from_reader(GOLDEN_CSV.as_bytes());
    reader
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("embedded golden table parses")
}

pub fn golden_value(table: TableKind, family: Family, n: u32, k_or_d: i64) -> Option<Rational> {
    golden_records()
        .into_iter()
        .find(|g| g.table == table && g.family == family && g.n == n && g.k_or_d == k_or_d)
        .map(|g| Rational::from_integer(g.value))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub table: TableKind,
    pub family: Family,
    pub n: u32,
    pub k_or_d: i64,
    pub computed: String,
    pub expected: String,
    pub source: &'static str,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} n={} k_or_d={}: computed {} but {} says {}",
            self.table, self.family, self.n, self.k_or_d, self.computed, self.source, self.expected
        )
    }
}

/// Compares computed rows with the golden file and with the closed forms.
/// Rows outside the golden coverage are checked against the closed forms only.
pub fn check_rows(rows: &[TableRow]) -> Vec<Mismatch> {
    let golden = golden_records();
    let mut out = Vec::new();
    for row in rows {
        let mut report = |expected: Rational, source| {
            if expected != row.value {
                out.push(Mismatch {
                    table: row.table,
                    family: row.family,
                    n: row.n,
                    k_or_d: row.k_or_d,
                    computed: row.value.to_string(),
                    expected: expected.to_string(),
                    source,
                });
            }
        };
        if let Some(g) = golden.iter().find(|g| {
            g.table == row.table && g.family == row.family && g.n == row.n && g.k_or_d == row.k_or_d
        }) {
            report(Rational::from_integer(g.value), "golden table");
        }
        if let Some(c) = closed_form(row) {
            report(c, "closed form");
        }
    }
    out
}

/// Number of golden rows covered by `rows`; used to confirm nothing was skipped.
pub fn golden_coverage(rows: &[TableRow]) -> (usize, usize) {
    let golden = golden_records();
    let covered = golden
        .iter()
        .filter(|g| {
            rows.iter().any(|r| {
                g.table == r.table && g.family == r.family && g.n == r.n && g.k_or_d == r.k_or_d
            })
        })
        .count();
    (covered, golden.len())
}

pub fn to_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "family", "n", "k_or_d", "value", "provenance"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.table.to_string(),
            r.family.to_string(),
            r.n.to_string(),
            r.k_or_d.to_string(),
            r.value.to_string(),
            format!("{:?}", r.provenance),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn to_json(rows: &[TableRow]) -> serde_json::Value {
    serde_json::to_value(rows).expect("rows serialize")
}
