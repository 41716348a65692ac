//! Global (inverse) functionality of relations.
//!
//! The default estimator is the harmonic mean of local functionalities,
//! which reduces to distinct subjects over statements. The other
//! estimators are kept for comparison only; the pipeline never picks them
//! unless asked to.

use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::store::{EntityId, Ontology, RelationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalityStrategy {
    /// `#x ∃y r(x,y) / #(x,y) r(x,y)`.
    #[default]
    Harmonic,
    /// `#(x,y) / #(x,y,y')` with `r(x,y) ∧ r(x,y')`.
    PairRatio,
    /// `#x ∃y r(x,y) / #y ∃x r(x,y)`, capped at 1.
    ArgRatio,
    /// Arithmetic mean of local functionalities over subjects.
    ArithmeticMean,
}

impl FromStr for FunctionalityStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(Self::Harmonic),
            "pair-ratio" => Ok(Self::PairRatio),
            "arg-ratio" => Ok(Self::ArgRatio),
            "arithmetic-mean" => Ok(Self::ArithmeticMean),
            other => Err(Error::Config(format!(
                "unknown functionality strategy `{other}`"
            ))),
        }
    }
}

/// `1 / #{y : r(x, y)}`, or `None` when `x` has no object under `r`.
pub fn local_functionality(ontology: &Ontology, r: RelationId, x: EntityId) -> Option<f64> {
    match ontology.facts_with(x, r).len() {
        0 => None,
        n => Some(1.0 / n as f64),
    }
}

/// Aggregates over the subjects of one relation polarity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SubjectCounts {
    pub statements: usize,
    pub subjects: usize,
    pub objects: usize,
    /// `Σ_x k_x²` where `k_x` is the number of objects of subject `x`.
    pub sum_sq: usize,
    /// `Σ_x 1/k_x`.
    pub sum_local: f64,
}

impl SubjectCounts {
    fn estimate(&self, strategy: FunctionalityStrategy) -> Result<f64> {
        if self.statements == 0 {
            return Err(Error::EmptyRelation);
        }
        Ok(match strategy {
            FunctionalityStrategy::Harmonic => self.subjects as f64 / self.statements as f64,
            FunctionalityStrategy::PairRatio => self.statements as f64 / self.sum_sq as f64,
            FunctionalityStrategy::ArgRatio => {
                (self.subjects as f64 / self.objects as f64).min(1.0)
            }
            FunctionalityStrategy::ArithmeticMean => self.sum_local / self.subjects as f64,
        })
    }
}

fn subject_counts(ontology: &Ontology, r: RelationId) -> SubjectCounts {
    let mut c = SubjectCounts::default();
    let stats = ontology.relation_stats(r.base());
    c.objects = if r.is_inverse() {
        stats.subjects
    } else {
        stats.objects
    };
    for st in ontology.statements_of(r.base()) {
        let owner = if r.is_inverse() {
            st.object
        } else {
            st.subject
        };
        // count each subject once, at its first statement in index order
        let facts = ontology.facts_with(owner, r);
        let first = facts[0].other
            == if r.is_inverse() {
                st.subject
            } else {
                st.object
            };
        if first {
            let k = facts.len();
            c.subjects += 1;
            c.statements += k;
            c.sum_sq += k * k;
            c.sum_local += 1.0 / k as f64;
        }
    }
    c
}

/// Global functionality of `r` (either polarity) under `strategy`.
pub fn global_functionality(
    ontology: &Ontology,
    r: RelationId,
    strategy: FunctionalityStrategy,
) -> Result<f64> {
    if r.base() as usize >= ontology.relation_count() {
        return Err(Error::EmptyRelation);
    }
    subject_counts(ontology, r).estimate(strategy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationFunctionality {
    pub forward: f64,
    pub inverse: f64,
    pub statements: usize,
    pub subjects: usize,
    pub objects: usize,
}

/// Functionalities of every non-empty relation, both polarities, computed once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalityTable {
    strategy: FunctionalityStrategy,
    entries: Vec<Option<RelationFunctionality>>,
}

impl FunctionalityTable {
    pub fn compute(ontology: &Ontology, strategy: FunctionalityStrategy) -> Self {
        let entries = ontology
            .relations()
            .map(|r| {
                let fwd = subject_counts(ontology, r);
                let inv = subject_counts(ontology, r.inverse());
                Some(RelationFunctionality {
                    forward: fwd.estimate(strategy).ok()?,
                    inverse: inv.estimate(strategy).ok()?,
                    statements: fwd.statements,
                    subjects: fwd.subjects,
                    objects: inv.subjects,
                })
            })
            .collect();
        FunctionalityTable { strategy, entries }
    }

    pub fn strategy(&self) -> FunctionalityStrategy {
        self.strategy
    }

    pub fn entry(&self, base: u32) -> Option<&RelationFunctionality> {
        self.entries.get(base as usize).and_then(Option::as_ref)
    }

    /// `fun(r)`; 0 for relations without statements.
    #[inline]
    pub fn fun(&self, r: RelationId) -> f64 {
        match self.entry(r.base()) {
            Some(e) if r.is_inverse() => e.inverse,
            Some(e) => e.forward,
            None => 0.0,
        }
    }

    /// `fun⁻¹(r) = fun(r⁻¹)`.
    #[inline]
    pub fn inverse_fun(&self, r: RelationId) -> f64 {
        self.fun(r.inverse())
    }

    pub fn len(&self) -> usize {
        self.entries.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// CSV of `relation,fun,inverse_fun,statements`.
    pub fn write_csv<W: Write>(&self, mut w: W, ontology: &Ontology) -> io::Result<()> {
        writeln!(w, "relation,fun,inverse_fun,statements")?;
        for r in ontology.relations() {
            if let Some(e) = self.entry(r.base()) {
                let name = ontology.relation_name(r);
                let name = if name.contains([',', '"']) {
                    format!("\"{}\"", name.replace('"', "\"\""))
                } else {
                    name.to_string()
                };
                writeln!(w, "{},{},{},{}", name, e.forward, e.inverse, e.statements)?;
            }
        }
        Ok(())
    }
}
