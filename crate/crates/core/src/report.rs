//! Structured pass/fail records shared by the bound checks and the
//! construction certifier.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proved,
    Refuted,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Proved
        } else {
            Verdict::Refuted
        }
    }
}

/// The big-integer comparison behind a verdict: both sides were raised to
/// `power` and compared as integers of the given bit lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub power: u64,
    pub lhs_bits: u64,
    pub rhs_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportItem {
    pub id: String,
    pub statement: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub items: Vec<ReportItem>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, item: ReportItem) {
        self.items.push(item);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.items.extend(other.items);
    }

    pub fn all_proved(&self) -> bool {
        self.items.iter().all(|i| i.verdict == Verdict::Proved)
    }

    pub fn refuted(&self) -> impl Iterator<Item = &ReportItem> {
        self.items.iter().filter(|i| i.verdict == Verdict::Refuted)
    }

    pub fn item(&self, id: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.id == id)
    }

    /// Plain-text table: id, verdict, witness sizes, statement.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.title).unwrap();
        let idw = self.items.iter().map(|i| i.id.len()).max().unwrap_or(2).max(2);
        writeln!(out, "{:<idw$}  {:<7}  {:<22}  statement", "id", "verdict", "witness").unwrap();
        for it in &self.items {
            let verdict = match it.verdict {
                Verdict::Proved => "proved",
                Verdict::Refuted => "REFUTED",
            };
            let witness = match &it.comparison {
                Some(c) => format!("^{} {}b vs {}b", c.power, c.lhs_bits, c.rhs_bits),
                None => "-".to_string(),
            };
            write!(out, "{:<idw$}  {:<7}  {:<22}  {}", it.id, verdict, witness, it.statement).unwrap();
            if !it.note.is_empty() {
                write!(out, "  [{}]", it.note).unwrap();
            }
            out.push('\n');
        }
        let bad = self.refuted().count();
        writeln!(out, "{} items, {} refuted", self.items.len(), bad).unwrap();
        out
    }
}
