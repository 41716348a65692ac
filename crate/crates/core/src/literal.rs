//! Equality probabilities between literals, fixed before iteration starts.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::EqualityTable;
use crate::store::{EntityKind, Literal, Ontology, Term};

/// A pure, symmetric similarity between two literals, in `[0, 1]`.
pub trait LiteralSimilarity: Send + Sync {
    fn name(&self) -> &str;

    fn similarity(&self, a: &Literal, b: &Literal) -> f64;

    /// Optional blocking key. When every pair with a positive score shares a
    /// key, the clamp computation joins on it instead of scanning all pairs.
    fn blocking_key(&self, _literal: &Literal) -> Option<String> {
        None
    }
}

/// 1 for identical lexical forms once datatype and language tags are dropped.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEquality;

impl LiteralSimilarity for ExactEquality {
    fn name(&self) -> &str {
        "exact"
    }

    fn similarity(&self, a: &Literal, b: &Literal) -> f64 {
        if a.lexical == b.lexical {
            1.0
        } else {
            0.0
        }
    }

    fn blocking_key(&self, literal: &Literal) -> Option<String> {
        Some(literal.lexical.clone())
    }
}

/// Lowercased alphanumeric characters only.
pub fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// 1 when the normalized forms (see [`normalize`]) are identical.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalizedEquality;

impl LiteralSimilarity for NormalizedEquality {
    fn name(&self) -> &str {
        "normalized"
    }

    fn similarity(&self, a: &Literal, b: &Literal) -> f64 {
        if normalize(&a.lexical) == normalize(&b.lexical) {
            1.0
        } else {
            0.0
        }
    }

    fn blocking_key(&self, literal: &Literal) -> Option<String> {
        Some(normalize(&literal.lexical))
    }
}

/// `1 - levenshtein / max(len)` over characters, clamped to 0 below `cutoff`.
#[derive(Debug, Clone, Copy)]
pub struct EditSimilarity {
    pub cutoff: f64,
}

impl LiteralSimilarity for EditSimilarity {
    fn name(&self) -> &str {
        "edit"
    }

    fn similarity(&self, a: &Literal, b: &Literal) -> f64 {
        let s = strsim::normalized_levenshtein(&a.lexical, &b.lexical);
        if s < self.cutoff {
            0.0
        } else {
            s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteralSimKind {
    #[default]
    Exact,
    Normalized,
    Edit,
}

impl FromStr for LiteralSimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "normalized" => Ok(Self::Normalized),
            "edit" => Ok(Self::Edit),
            other => Err(Error::Config(format!(
                "unknown literal similarity `{other}`"
            ))),
        }
    }
}

impl LiteralSimKind {
    pub fn build(self, cutoff: f64) -> Arc<dyn LiteralSimilarity> {
        match self {
            LiteralSimKind::Exact => Arc::new(ExactEquality),
            LiteralSimKind::Normalized => Arc::new(NormalizedEquality),
            LiteralSimKind::Edit => Arc::new(EditSimilarity { cutoff }),
        }
    }
}

/// Clamped literal equalities between the two ontologies, pruned below `theta`.
///
/// Similarity functions without a blocking key are evaluated on all pairs.
pub fn literal_clamps(
    o1: &Ontology,
    o2: &Ontology,
    sim: &dyn LiteralSimilarity,
    theta: f64,
) -> EqualityTable {
    let mut table = EqualityTable::new();
    let lit = |o: &Ontology, e| match o.term(e) {
        Term::Literal(l) => l.clone(),
        Term::Iri(_) => unreachable!("literal partition holds a resource"),
    };
    let right: Vec<_> = o2.literals().iter().map(|&e| (e, lit(o2, e))).collect();
    let keyed = right
        .first()
        .is_none_or(|(_, l)| sim.blocking_key(l).is_some());
    if keyed {
        let mut blocks: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, (_, l)) in right.iter().enumerate() {
            if let Some(k) = sim.blocking_key(l) {
                blocks.entry(k).or_default().push(i);
            }
        }
        for &x in o1.literals() {
            let l = lit(o1, x);
            let Some(key) = sim.blocking_key(&l) else {
                continue;
            };
            for &i in blocks.get(&key).into_iter().flatten() {
                let (y, ref other) = right[i];
                let s = sim.similarity(&l, other);
                if s >= theta && s > 0.0 {
                    table.insert(x, y, s);
                }
            }
        }
    } else {
        for &x in o1.literals() {
            let l = lit(o1, x);
            for (y, other) in &right {
                let s = sim.similarity(&l, other);
                if s >= theta && s > 0.0 {
                    table.insert(x, *y, s);
                }
            }
        }
    }
    debug_assert!(table
        .iter()
        .all(|(x, y, _)| o1.kind(x) == EntityKind::Literal && o2.kind(y) == EntityKind::Literal));
    table
}
