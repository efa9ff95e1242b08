//! Precision, recall and F-score of reports against ground truth, in exact
//! rational arithmetic.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::detect::MisuseReport;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub file: String,
    pub line: u32,
    pub class: String,
}

pub type LabelSet = BTreeSet<Label>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    pub reported: usize,
    pub known: usize,
    pub correct: usize,
    pub precision: Option<Ratio<u64>>,
    pub recall: Option<Ratio<u64>>,
    pub fscore: Option<Ratio<u64>>,
}

pub fn labels_of(reports: &[MisuseReport]) -> LabelSet {
    reports.iter().map(|r| Label { file: r.file.clone(), line: r.line, class: r.class.clone() }).collect()
}

pub fn evaluate(reported: &LabelSet, truth: &LabelSet) -> Metrics {
    let correct = reported.intersection(truth).count();
    let ratio = |n: usize, d: usize| (d > 0).then(|| Ratio::new(n as u64, d as u64));
    let precision = ratio(correct, reported.len());
    let recall = ratio(correct, truth.len());
    let fscore = match (precision, recall) {
        (Some(p), Some(r)) if p + r > Ratio::from_integer(0) => Some(Ratio::from_integer(2) * p * r / (p + r)),
        (Some(_), Some(_)) => Some(Ratio::from_integer(0)),
        _ => None,
    };
    Metrics { reported: reported.len(), known: truth.len(), correct, precision, recall, fscore }
}

fn pct(r: &Option<Ratio<u64>>) -> String {
    match r {
        None => "-".to_string(),
        Some(r) => format!("{:.2}% ({}/{})", *r.numer() as f64 * 100.0 / *r.denom() as f64, r.numer(), r.denom()),
    }
}

impl Metrics {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "reported      {}", self.reported);
        let _ = writeln!(s, "known         {}", self.known);
        let _ = writeln!(s, "correct       {}", self.correct);
        let _ = writeln!(s, "precision     {}", pct(&self.precision));
        let _ = writeln!(s, "recall        {}", pct(&self.recall));
        let _ = writeln!(s, "f-score       {}", pct(&self.fscore));
        s
    }

    pub fn to_json(&self) -> Value {
        let r = |x: &Option<Ratio<u64>>| match x {
            None => Value::Null,
            Some(x) => json!(format!("{}/{}", x.numer(), x.denom())),
        };
        json!({
            "reported": self.reported,
            "known": self.known,
            "correct": self.correct,
            "precision": r(&self.precision),
            "recall": r(&self.recall),
            "fscore": r(&self.fscore),
        })
    }
}

/// Ground truth: a JSON array of `{file, line, class}`.
pub fn parse_truth(text: &str) -> Result<LabelSet, serde_json::Error> {
    let items: Vec<Label> = serde_json::from_str(text)?;
    Ok(items.into_iter().collect())
}

/// Report file: JSON lines as written by the scanner. Only the site key of
/// each record is read.
pub fn parse_reports(text: &str) -> Result<LabelSet, serde_json::Error> {
    let mut out = LabelSet::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        out.insert(serde_json::from_str::<Label>(line)?);
    }
    Ok(out)
}
