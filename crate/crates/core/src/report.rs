use std::fmt::{self, Write as _};

use serde::Serialize;

/// How a computed value is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `value ≤ bound`.
    AtMost,
    /// `value ≥ bound`.
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        })
    }
}

/// One checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    /// Relative margin, positive when the inequality holds.
    pub margin: f64,
    pub pass: bool,
    /// Where the compared value comes from.
    pub oracle: String,
}

impl Certificate {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        relation: Relation,
        bound: f64,
        oracle: impl Into<String>,
    ) -> Self {
        let diff = match relation {
            Relation::AtMost => bound - value,
            Relation::AtLeast => value - bound,
        };
        let scale = bound.abs().max(f64::MIN_POSITIVE);
        let pass = diff >= 0.0 && value.is_finite();
        Self {
            name: name.into(),
            value,
            bound,
            relation,
            margin: diff / scale,
            pass,
            oracle: oracle.into(),
        }
    }

    /// A check that could not be carried out; always fails.
    pub fn inapplicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            bound: f64::NAN,
            relation: Relation::AtMost,
            margin: f64::NAN,
            pass: false,
            oracle: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CertificateReport {
    pub entries: Vec<Certificate>,
}

impl CertificateReport {
    pub fn push(&mut self, c: Certificate) {
        self.entries.push(c);
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.entries.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Certificate> {
        self.entries.iter().find(|c| c.name == name)
    }

    /// One line per certificate: status, name, value, relation, bound, margin.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.entries {
            let _ = writeln!(
                out,
                "{} {} value={:.6e} {} bound={:.6e} margin={:.3e} [{}]",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.relation,
                c.bound,
                c.margin,
                c.oracle
            );
        }
        out
    }
}
