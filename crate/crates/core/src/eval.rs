//! Gold-standard evaluation and threshold sweeps.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::MaximalAssignment;
use crate::store::Ontology;

/// Declared cross-ontology equivalences, at most one per entity on each side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldStandard {
    pairs: Vec<(String, String)>,
    forward: HashMap<String, String>,
}

impl GoldStandard {
    pub fn new<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut gold = GoldStandard::default();
        let mut seconds = HashSet::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            if gold.forward.contains_key(&a) {
                return Err(Error::Gold(format!("`{a}` appears twice")));
            }
            if !seconds.insert(b.clone()) {
                return Err(Error::Gold(format!("`{b}` appears twice")));
            }
            gold.forward.insert(a.clone(), b.clone());
            gold.pairs.push((a, b));
        }
        Ok(gold)
    }

    /// TSV `entity1 TAB entity2`; blank lines and `#` comments are skipped.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                    pairs.push((a.to_string(), b.to_string()))
                }
                _ => return Err(Error::parse(i + 1, "expected `entity1<TAB>entity2`")),
            }
        }
        Self::new(pairs)
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (a, b) in &self.pairs {
            writeln!(w, "{a}\t{b}")?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn partner(&self, first: &str) -> Option<&str> {
        self.forward.get(first).map(String::as_str)
    }

    pub fn contains(&self, first: &str, second: &str) -> bool {
        self.partner(first) == Some(second)
    }

    /// Gold pairs with at least one side unknown to its ontology.
    pub fn unknown_pairs(&self, o1: &Ontology, o2: &Ontology) -> usize {
        self.pairs
            .iter()
            .filter(|(a, b)| o1.lookup_iri(a).is_none() || o2.lookup_iri(b).is_none())
            .count()
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
    /// `None` when nothing was predicted.
    pub precision: Option<f64>,
    /// `None` for an empty gold standard.
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
}

impl Metrics {
    pub fn from_counts(true_positives: usize, predicted: usize, gold: usize) -> Self {
        let precision = ratio(true_positives, predicted);
        let recall = ratio(true_positives, gold);
        let f_measure = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        Metrics {
            true_positives,
            predicted,
            gold,
            precision,
            recall,
            f_measure,
        }
    }
}

fn percent(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{:.2}%", 100.0 * v))
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "precision\t{}", percent(self.precision))?;
        writeln!(f, "recall\t{}", percent(self.recall))?;
        writeln!(f, "f_measure\t{}", percent(self.f_measure))?;
        writeln!(f, "true_positives\t{}", self.true_positives)?;
        writeln!(f, "predicted\t{}", self.predicted)?;
        write!(f, "gold\t{}", self.gold)
    }
}

/// Scores predicted `(entity1, entity2)` pairs, one per entity1.
pub fn evaluate_pairs<'a, I>(predicted: I, gold: &GoldStandard) -> Metrics
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut total = 0;
    let mut correct = 0;
    for (a, b) in predicted {
        total += 1;
        correct += gold.contains(a, b) as usize;
    }
    Metrics::from_counts(correct, total, gold.len())
}

/// Scores a maximal assignment, naming entities as the output files do.
pub fn evaluate(
    assignment: &MaximalAssignment,
    o1: &Ontology,
    o2: &Ontology,
    gold: &GoldStandard,
) -> Metrics {
    let named: Vec<(String, String)> = assignment
        .iter()
        .map(|(x, y, _)| (o1.term(x).to_string(), o2.term(y).to_string()))
        .collect();
    evaluate_pairs(named.iter().map(|(a, b)| (a.as_str(), b.as_str())), gold)
}

/// One scored row of an output table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRow {
    pub first: String,
    pub second: String,
    pub score: f64,
}

/// Reads any output table: first column, second-to-last column, score last.
pub fn read_scored_tsv<R: BufRead>(reader: R) -> Result<Vec<ScoredRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::parse(
                i + 1,
                "expected at least three tab-separated columns",
            ));
        }
        let score: f64 = cols[cols.len() - 1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, "score is not a number"))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::parse(i + 1, format!("score {score} outside [0, 1]")));
        }
        rows.push(ScoredRow {
            first: cols[0].to_string(),
            second: cols[cols.len() - 2].to_string(),
            score,
        });
    }
    Ok(rows)
}

/// The highest-scoring row per first entity; the earliest row wins ties.
pub fn top_per_first(rows: &[ScoredRow]) -> Vec<&ScoredRow> {
    let mut best: HashMap<&str, usize> = HashMap::new();
    let mut order = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match best.get(row.first.as_str()) {
            Some(&j) if rows[j].score >= row.score => {}
            Some(_) => {
                best.insert(&row.first, i);
            }
            None => {
                best.insert(&row.first, i);
                order.push(row.first.as_str());
            }
        }
    }
    order.into_iter().map(|k| &rows[best[k]]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    /// Rows scoring at least `threshold`.
    pub retained: usize,
    /// Distinct first entities among the retained rows.
    pub covered: usize,
    /// Among retained rows, the labeled-correct fraction.
    pub precision: Option<f64>,
}

/// Thresholds must be finite and nondecreasing. Labels, when given, are
/// aligned with `rows`.
pub fn threshold_sweep(
    rows: &[ScoredRow],
    labels: Option<&[bool]>,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>> {
    if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config(
            "thresholds must be finite and ascending".into(),
        ));
    }
    if let Some(l) = labels {
        if l.len() != rows.len() {
            return Err(Error::Config("one label per row required".into()));
        }
    }
    Ok(thresholds
        .iter()
        .map(|&t| {
            let kept: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].score >= t).collect();
            let covered: HashSet<&str> = kept.iter().map(|&i| rows[i].first.as_str()).collect();
            let precision =
                labels.and_then(|l| ratio(kept.iter().filter(|&&i| l[i]).count(), kept.len()));
            SweepRow {
                threshold: t,
                retained: kept.len(),
                covered: covered.len(),
                precision,
            }
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "threshold,retained,covered,precision")?;
    for r in rows {
        let p = r.precision.map(|p| p.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.threshold, r.retained, r.covered, p)?;
    }
    Ok(())
}
