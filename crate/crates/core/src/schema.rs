//! Sub-relation and subclass scores derived from instance equalities.
//!
//! For a relation `r` of one ontology and `r'` of the other:
//!
//! ```text
//!              Σ_{r(x,y)} 1 - Π_{r'(x',y')} (1 - Pr(x≡x')·Pr(y≡y'))
//! Pr(r⊆r') = ---------------------------------------------------------
//!              Σ_{r(x,y)} 1 - Π_{x',y'}      (1 - Pr(x≡x')·Pr(y≡y'))
//! ```
//!
//! and for classes `Pr(c⊆c') = E[#c∩c'] / #c`. Both are computed in each
//! direction independently.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instances::EqualityTable;
use crate::par;
use crate::prob::NoisyOr;
use crate::store::{EntityId, Ontology, RelationId};

/// Which statements or instances are kept when a relation or class exceeds
/// the pair limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    /// The first `pair_limit` in store order.
    #[default]
    First,
    /// A seeded uniform sample, kept in store order.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemaOptions {
    pub theta: f64,
    pub pair_limit: usize,
    pub truncation: Truncation,
}

impl Default for SchemaOptions {
    fn default() -> Self {
        SchemaOptions {
            theta: 0.1,
            pair_limit: 10_000,
            truncation: Truncation::First,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Element of the first ontology included in one of the second.
    FirstInSecond,
    /// Element of the second ontology included in one of the first.
    SecondInFirst,
}

impl Direction {
    /// `sub` for `a ⊆ b`, `super` for `b ⊆ a`, where `a` is always the
    /// first-ontology element.
    pub fn label(self) -> &'static str {
        match self {
            Direction::FirstInSecond => "sub",
            Direction::SecondInFirst => "super",
        }
    }
}

/// Directed inclusion scores between relations of the two ontologies.
///
/// Keys are canonical: the including side is flipped so that the contained
/// relation has forward polarity, since `Pr(r⁻¹⊆r'⁻¹) = Pr(r⊆r')`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubrelationTable {
    bootstrap: Option<f64>,
    first_in_second: HashMap<(RelationId, RelationId), f64>,
    second_in_first: HashMap<(RelationId, RelationId), f64>,
}

fn canonical(a: RelationId, b: RelationId) -> (RelationId, RelationId) {
    if a.is_inverse() {
        (a.inverse(), b.inverse())
    } else {
        (a, b)
    }
}

impl SubrelationTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every cross-ontology pair reports `theta` in both directions.
    pub fn bootstrap(theta: f64) -> Self {
        SubrelationTable {
            bootstrap: Some(theta),
            ..Default::default()
        }
    }

    pub fn is_bootstrap(&self) -> bool {
        self.bootstrap.is_some()
    }

    /// Sets `Pr(r ⊆ r2)` for `r` of the first ontology and `r2` of the second.
    pub fn insert_first_in_second(&mut self, r: RelationId, r2: RelationId, p: f64) {
        self.first_in_second.insert(canonical(r, r2), p);
    }

    /// Sets `Pr(r2 ⊆ r)` for `r2` of the second ontology and `r` of the first.
    pub fn insert_second_in_first(&mut self, r2: RelationId, r: RelationId, p: f64) {
        self.second_in_first.insert(canonical(r2, r), p);
    }

    /// `Pr(r ⊆ r2)`, 0 when not stored.
    pub fn first_in_second(&self, r: RelationId, r2: RelationId) -> f64 {
        if let Some(theta) = self.bootstrap {
            return theta;
        }
        self.first_in_second
            .get(&canonical(r, r2))
            .copied()
            .unwrap_or(0.0)
    }

    /// `Pr(r2 ⊆ r)`, 0 when not stored.
    pub fn second_in_first(&self, r2: RelationId, r: RelationId) -> f64 {
        if let Some(theta) = self.bootstrap {
            return theta;
        }
        self.second_in_first
            .get(&canonical(r2, r))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.first_in_second.len() + self.second_in_first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(direction, first-ontology relation, second-ontology relation, score)`,
    /// sorted by descending score then keys.
    pub fn entries(&self) -> Vec<(Direction, RelationId, RelationId, f64)> {
        let mut out: Vec<_> = self
            .first_in_second
            .iter()
            .map(|(&(r, r2), &p)| (Direction::FirstInSecond, r, r2, p))
            .chain(
                self.second_in_first
                    .iter()
                    .map(|(&(r2, r), &p)| (Direction::SecondInFirst, r, r2, p)),
            )
            .collect();
        out.sort_by(|a, b| {
            b.3.total_cmp(&a.3)
                .then((a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)))
        });
        out
    }

    /// TSV `r TAB direction TAB r' TAB score`, descending by score.
    pub fn write_tsv<W: Write>(&self, mut w: W, o1: &Ontology, o2: &Ontology) -> io::Result<()> {
        for (dir, r, r2, p) in self.entries() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                o1.relation_label(r),
                dir.label(),
                o2.relation_label(r2),
                p
            )?;
        }
        Ok(())
    }
}

/// Directed inclusion scores between classes of the two ontologies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubclassTable {
    /// `(c of O₁, c' of O₂) → Pr(c ⊆ c')`
    pub first_in_second: BTreeMap<(EntityId, EntityId), f64>,
    /// `(c' of O₂, c of O₁) → Pr(c' ⊆ c)`
    pub second_in_first: BTreeMap<(EntityId, EntityId), f64>,
}

impl SubclassTable {
    pub fn len(&self) -> usize {
        self.first_in_second.len() + self.second_in_first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(direction, class of O₁, class of O₂, score)`, descending by score.
    pub fn entries(&self) -> Vec<(Direction, EntityId, EntityId, f64)> {
        let mut out: Vec<_> = self
            .first_in_second
            .iter()
            .map(|(&(c, c2), &p)| (Direction::FirstInSecond, c, c2, p))
            .chain(
                self.second_in_first
                    .iter()
                    .map(|(&(c2, c), &p)| (Direction::SecondInFirst, c, c2, p)),
            )
            .collect();
        out.sort_by(|a, b| {
            b.3.total_cmp(&a.3)
                .then((a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)))
        });
        out
    }

    pub fn write_tsv<W: Write>(&self, mut w: W, o1: &Ontology, o2: &Ontology) -> io::Result<()> {
        for (dir, c, c2, p) in self.entries() {
            writeln!(w, "{}\t{}\t{}\t{}", o1.term(c), dir.label(), o2.term(c2), p)?;
        }
        Ok(())
    }
}

fn truncate<T: Copy>(items: &[T], limit: usize, truncation: Truncation, salt: u64) -> Vec<T> {
    if items.len() <= limit {
        return items.to_vec();
    }
    match truncation {
        Truncation::First => items[..limit].to_vec(),
        Truncation::Seeded(seed) => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut picked = index::sample(&mut rng, items.len(), limit).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| items[i]).collect()
        }
    }
}

/// Scores both directions. `equalities` is keyed by first-ontology entity.
pub fn subrelation_scores(
    o1: &Ontology,
    o2: &Ontology,
    equalities: &EqualityTable,
    opts: &SchemaOptions,
) -> SubrelationTable {
    let reversed = equalities.reversed();
    let mut table = SubrelationTable::new();
    for (r, r2, p) in directed_subrelations(o1, o2, equalities, opts) {
        table.insert_first_in_second(r, r2, p);
    }
    for (r2, r, p) in directed_subrelations(o2, o1, &reversed, opts) {
        table.insert_second_in_first(r2, r, p);
    }
    table
}

/// `(r of src, forward; r' of dst, either polarity; Pr(r ⊆ r'))` above `theta`.
pub fn directed_subrelations(
    src: &Ontology,
    dst: &Ontology,
    equalities: &EqualityTable,
    opts: &SchemaOptions,
) -> Vec<(RelationId, RelationId, f64)> {
    let relations: Vec<RelationId> = src.relations().collect();
    let per_relation = par::map_collect(&relations, |&r| {
        let statements = truncate(
            src.statements_of(r.base()),
            opts.pair_limit,
            opts.truncation,
            r.base() as u64,
        );
        let mut numerators: HashMap<RelationId, f64> = HashMap::new();
        let mut denominator = 0.0;
        let mut per_statement: HashMap<RelationId, f64> = HashMap::new();
        for st in &statements {
            let xs = equalities.partners(st.subject);
            let ys = equalities.partners(st.object);
            if xs.is_empty() || ys.is_empty() {
                continue;
            }
            let mut any = NoisyOr::new();
            for &(_, px) in xs {
                for &(_, py) in ys {
                    any.absorb(px * py);
                }
            }
            denominator += any.value();

            per_statement.clear();
            for &(x2, px) in xs {
                for g in dst.facts(x2) {
                    if let Ok(i) = ys.binary_search_by_key(&g.other, |e| e.0) {
                        *per_statement.entry(g.relation).or_insert(1.0) *= 1.0 - px * ys[i].1;
                    }
                }
            }
            for (&r2, &c) in &per_statement {
                *numerators.entry(r2).or_insert(0.0) += 1.0 - c;
            }
        }
        let mut out: Vec<(RelationId, RelationId, f64)> = Vec::new();
        if denominator > 0.0 {
            for (r2, n) in numerators {
                let score = (n / denominator).min(1.0);
                if score >= opts.theta && score > 0.0 {
                    out.push((r, r2, score));
                }
            }
        }
        out.sort_by_key(|e| e.1);
        out
    });
    per_relation.into_iter().flatten().collect()
}

/// Scores both directions. `equalities` is keyed by first-ontology entity.
pub fn subclass_scores(
    o1: &Ontology,
    o2: &Ontology,
    equalities: &EqualityTable,
    opts: &SchemaOptions,
) -> SubclassTable {
    let reversed = equalities.reversed();
    SubclassTable {
        first_in_second: directed_subclasses(o1, o2, equalities, opts)
            .into_iter()
            .map(|(c, c2, p)| ((c, c2), p))
            .collect(),
        second_in_first: directed_subclasses(o2, o1, &reversed, opts)
            .into_iter()
            .map(|(c2, c, p)| ((c2, c), p))
            .collect(),
    }
}

/// `(c of src, c' of dst, Pr(c ⊆ c'))` above `theta`.
pub fn directed_subclasses(
    src: &Ontology,
    dst: &Ontology,
    equalities: &EqualityTable,
    opts: &SchemaOptions,
) -> Vec<(EntityId, EntityId, f64)> {
    let (Some(src_type), Some(dst_type)) = (src.type_relation(), dst.type_relation()) else {
        return Vec::new();
    };
    let per_class = par::map_collect(src.classes(), |&c| {
        let members: Vec<EntityId> = src.subjects_with(src_type, c).collect();
        if members.is_empty() {
            return Vec::new();
        }
        let members = truncate(&members, opts.pair_limit, opts.truncation, c.0 as u64);
        let mut expected: HashMap<EntityId, f64> = HashMap::new();
        let mut per_member: HashMap<EntityId, f64> = HashMap::new();
        for &x in &members {
            per_member.clear();
            for &(x2, p) in equalities.partners(x) {
                for c2 in dst.objects_of(x2, dst_type) {
                    *per_member.entry(c2).or_insert(1.0) *= 1.0 - p;
                }
            }
            for (&c2, &comp) in &per_member {
                *expected.entry(c2).or_insert(0.0) += 1.0 - comp;
            }
        }
        let size = members.len() as f64;
        let mut out: Vec<_> = expected
            .into_iter()
            .filter_map(|(c2, e)| {
                let score = (e / size).min(1.0);
                (score >= opts.theta && score > 0.0).then_some((c, c2, score))
            })
            .collect();
        out.sort_by_key(|e| e.1);
        out
    });
    per_class.into_iter().flatten().collect()
}
