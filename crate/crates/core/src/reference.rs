//! Embedded reference tables: the published solution tables and theorem
//! lists, stored as CSV under `data/`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{fmt_rational, frac, int, parse_rational, Rational};
use crate::orbits::negate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReferenceError {
    #[error("unknown table id `{0}`")]
    UnknownTable(String),
    #[error("malformed table {table}: {reason}")]
    Malformed { table: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
    ThmF1,
    ThmFD3,
    ThmF2,
    ThmF3,
    ThmG1,
    ThmG2,
    ThmG3,
    ThmH1,
    ThmH2,
    ThmH3,
    ThmH5,
    ThmH6,
}

impl TableId {
    pub const ALL: [TableId; 18] = [
        TableId::Table1,
        TableId::Table2,
        TableId::Table3,
        TableId::Table4,
        TableId::Table5,
        TableId::Table6,
        TableId::ThmF1,
        TableId::ThmFD3,
        TableId::ThmF2,
        TableId::ThmF3,
        TableId::ThmG1,
        TableId::ThmG2,
        TableId::ThmG3,
        TableId::ThmH1,
        TableId::ThmH2,
        TableId::ThmH3,
        TableId::ThmH5,
        TableId::ThmH6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
            TableId::Table4 => "table4",
            TableId::Table5 => "table5",
            TableId::Table6 => "table6",
            TableId::ThmF1 => "thm-f1",
            TableId::ThmFD3 => "thm-fd3",
            TableId::ThmF2 => "thm-f2",
            TableId::ThmF3 => "thm-f3",
            TableId::ThmG1 => "thm-g1",
            TableId::ThmG2 => "thm-g2",
            TableId::ThmG3 => "thm-g3",
            TableId::ThmH1 => "thm-h1",
            TableId::ThmH2 => "thm-h2",
            TableId::ThmH3 => "thm-h3",
            TableId::ThmH5 => "thm-h5",
            TableId::ThmH6 => "thm-h6",
        }
    }

    fn source(self) -> &'static str {
        match self {
            TableId::Table1 => include_str!("../data/table1_lambda_mu_nu.csv"),
            TableId::Table2 => include_str!("../data/table2_gauss.csv"),
            TableId::Table3 => include_str!("../data/table3_f4.csv"),
            TableId::Table4 => include_str!("../data/table4_fc.csv"),
            TableId::Table5 => include_str!("../data/table5_h4.csv"),
            TableId::Table6 => include_str!("../data/table6_h7.csv"),
            TableId::ThmF1 => include_str!("../data/thm_f1.csv"),
            TableId::ThmFD3 => include_str!("../data/thm_fd3.csv"),
            TableId::ThmF2 => include_str!("../data/thm_f2.csv"),
            TableId::ThmF3 => include_str!("../data/thm_f3.csv"),
            TableId::ThmG1 => include_str!("../data/thm_g1.csv"),
            TableId::ThmG2 => include_str!("../data/thm_g2.csv"),
            TableId::ThmG3 => include_str!("../data/thm_g3.csv"),
            TableId::ThmH1 => include_str!("../data/thm_h1.csv"),
            TableId::ThmH2 => include_str!("../data/thm_h2.csv"),
            TableId::ThmH3 => include_str!("../data/thm_h3.csv"),
            TableId::ThmH5 => include_str!("../data/thm_h5.csv"),
            TableId::ThmH6 => include_str!("../data/thm_h6.csv"),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = ReferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        TableId::ALL.into_iter().find(|t| t.name() == key).ok_or_else(|| ReferenceError::UnknownTable(s.to_string()))
    }
}

/// An affine expression `slope * r + offset` in one free parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineTerm {
    pub slope: i64,
    pub offset: Rational,
}

impl AffineTerm {
    pub fn constant(c: Rational) -> Self {
        Self { slope: 0, offset: c }
    }

    pub fn at(&self, r: &Rational) -> Rational {
        frac(&(r * int(self.slope) + &self.offset))
    }

    /// Parses tokens such as `r`, `-2r`, `r+1/2`, `1/3`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty term".into());
        }
        let mut slope = 0i64;
        let mut offset = Rational::zero();
        let mut start = 0usize;
        let bytes = s.as_bytes();
        let mut parts: Vec<&str> = Vec::new();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' {
                parts.push(&s[start..i]);
                start = i;
            }
        }
        parts.push(&s[start..]);
        for part in parts {
            let (sign, body) = match part.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, part.strip_prefix('+').unwrap_or(part)),
            };
            if let Some(coef) = body.strip_suffix('r').or_else(|| body.strip_suffix('s')) {
                let c: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| format!("bad coefficient in `{text}`"))? };
                slope += sign * c;
            } else {
                let v = parse_rational(body).map_err(|e| e.to_string())?;
                offset += if sign < 0 { -v } else { v };
            }
        }
        Ok(Self { slope, offset })
    }
}

impl fmt::Display for AffineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = match self.slope {
            0 => String::new(),
            1 => "r".to_string(),
            -1 => "-r".to_string(),
            k => format!("{k}r"),
        };
        if self.offset.is_zero() && !lin.is_empty() {
            return f.write_str(&lin);
        }
        if lin.is_empty() {
            return f.write_str(&fmt_rational(&self.offset));
        }
        if self.offset < Rational::zero() {
            write!(f, "{lin}-{}", fmt_rational(&-self.offset.clone()))
        } else {
            write!(f, "{lin}+{}", fmt_rational(&self.offset))
        }
    }
}

/// A one-parameter family of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineFamily(pub Vec<AffineTerm>);

impl AffineFamily {
    pub fn parse(cells: &[&str]) -> Result<Self, String> {
        cells.iter().map(|c| AffineTerm::parse(c)).collect::<Result<Vec<_>, _>>().map(AffineFamily)
    }

    pub fn at(&self, r: &Rational) -> Vec<Rational> {
        self.0.iter().map(|t| t.at(r)).collect()
    }

    pub fn tokens(&self) -> Vec<String> {
        self.0.iter().map(|t| t.to_string()).collect()
    }

    /// Whether every coordinate is constant.
    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|t| t.slope == 0)
    }
}

impl fmt::Display for AffineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.tokens().join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    /// A single tuple.
    Sporadic,
    /// The tuple together with its negative.
    PlusMinus,
    /// A solution missing from the printed list, independently certified.
    Erratum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRow {
    pub kind: RowKind,
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTable {
    pub id: TableId,
    pub columns: Vec<String>,
    pub families: Vec<AffineFamily>,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    /// The listed tuples, with `PlusMinus` rows expanded to both signs.
    pub fn tuples(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for row in &self.rows {
            out.push(row.values.clone());
            if row.kind == RowKind::PlusMinus {
                out.push(negate(&row.values));
            }
        }
        out
    }

    /// The tuples exactly as printed (one per row).
    pub fn printed(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    /// Rows added to the printed list.
    pub fn errata(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().filter(|r| r.kind == RowKind::Erratum).map(|r| r.values.clone()).collect()
    }
}

pub fn load(id: TableId) -> Result<ReferenceTable, ReferenceError> {
    let bad = |reason: String| ReferenceError::Malformed { table: id.name().to_string(), reason };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(id.source().as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.get(0) != Some("kind") {
        return Err(bad("first column must be `kind`".into()));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut families = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let cells: Vec<&str> = record.iter().skip(1).collect();
        if cells.len() != columns.len() {
            return Err(bad(format!("row {} has {} values", line + 1, cells.len())));
        }
        let kind = match record.get(0) {
            Some("family") => {
                families.push(AffineFamily::parse(&cells).map_err(bad)?);
                continue;
            }
            Some("sporadic") => RowKind::Sporadic,
            Some("pm") => RowKind::PlusMinus,
            Some("erratum") => RowKind::Erratum,
            other => return Err(bad(format!("unknown row kind {other:?}"))),
        };
        let values = cells.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>, _>>().map_err(|e| bad(e.to_string()))?;
        rows.push(ReferenceRow { kind, values });
    }
    Ok(ReferenceTable { id, columns, families, rows })
}

/// Same as [`load`], for tables known to be well formed.
pub fn table(id: TableId) -> ReferenceTable {
    load(id).expect("embedded table parses")
}

/// `r` values in `(0, 1)` with denominator at most `max_den`.
pub fn sample_r(max_den: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 2..=max_den as i64 {
        for p in 1..q {
            if num_integer::Integer::gcd(&p, &q) == 1 {
                out.push(Rational::new(p.into(), q.into()));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn all_tables_parse() {
        for id in TableId::ALL {
            let t = load(id).unwrap();
            assert!(!t.rows.is_empty(), "{id}");
            assert_eq!(id.name().parse::<TableId>().unwrap(), id);
        }
    }

    #[test]
    fn row_counts() {
        let count = |id| {
            let t = table(id);
            (t.families.len(), t.rows.len())
        };
        assert_eq!(count(TableId::Table1), (1, 14));
        assert_eq!(count(TableId::Table2), (3, 40));
        assert_eq!(count(TableId::Table3), (3, 44));
        assert_eq!(count(TableId::Table4), (3, 25));
        assert_eq!(count(TableId::Table5), (3, 66));
        assert_eq!(count(TableId::Table6), (3, 48));
        assert_eq!(table(TableId::ThmF1).tuples().len(), 10);
    }

    #[test]
    fn affine_terms() {
        let t = AffineTerm::parse("r+1/2").unwrap();
        assert_eq!(t.at(&rat(3, 4)), rat(1, 4));
        assert_eq!(t.to_string(), "r+1/2");
        assert_eq!(AffineTerm::parse("-2r").unwrap().at(&rat(1, 3)), rat(1, 3));
        assert_eq!(AffineTerm::parse("1/2").unwrap().to_string(), "1/2");
        assert_eq!(AffineTerm::parse("-r").unwrap().to_string(), "-r");
        assert!(AffineTerm::parse("x").is_err());
    }
}
