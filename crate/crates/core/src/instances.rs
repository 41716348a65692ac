//! Cross-ontology instance equivalence.
//!
//! [`score_all`] evaluates, for every instance `x` of the first ontology and
//! every instance `x'` of the second,
//!
//! ```text
//! 1 - Π_{r(x,y), r'(x',y')} (1 - Pr(r'⊆r)·fun⁻¹(r)·Pr(y≡y')) · (1 - Pr(r⊆r')·fun⁻¹(r')·Pr(y≡y'))
//! ```
//!
//! without enumerating all pairs: it walks `x → y → y' → x'` through the
//! known equalities of the previous round, so only pairs with at least one
//! non-trivial factor are ever touched.

use std::collections::HashMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::functionality::FunctionalityTable;
use crate::par;
use crate::schema::SubrelationTable;
use crate::store::{EntityId, EntityKind, Ontology, RelationId};

/// Sparse map `(x of O₁, x' of O₂) → probability`. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EqualityTable {
    rows: Vec<Vec<(EntityId, f64)>>,
    len: usize,
    iteration: usize,
}

impl EqualityTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces; rows stay sorted by partner id.
    pub fn insert(&mut self, x: EntityId, y: EntityId, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p));
        if self.rows.len() <= x.index() {
            self.rows.resize_with(x.index() + 1, Vec::new);
        }
        let row = &mut self.rows[x.index()];
        match row.binary_search_by_key(&y, |e| e.0) {
            Ok(i) => row[i].1 = p,
            Err(i) => {
                row.insert(i, (y, p));
                self.len += 1;
            }
        }
    }

    fn set_row(&mut self, x: EntityId, row: Vec<(EntityId, f64)>) {
        if row.is_empty() {
            return;
        }
        if self.rows.len() <= x.index() {
            self.rows.resize_with(x.index() + 1, Vec::new);
        }
        self.len += row.len();
        self.len -= self.rows[x.index()].len();
        self.rows[x.index()] = row;
    }

    /// Stored probability, 0 when absent.
    pub fn get(&self, x: EntityId, y: EntityId) -> f64 {
        let row = self.partners(x);
        match row.binary_search_by_key(&y, |e| e.0) {
            Ok(i) => row[i].1,
            Err(_) => 0.0,
        }
    }

    #[inline]
    pub fn partners(&self, x: EntityId) -> &[(EntityId, f64)] {
        self.rows.get(x.index()).map_or(&[], Vec::as_slice)
    }

    /// `(x, x', p)` in `(x, x')` order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, EntityId, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(y, p)| (EntityId(i as u32), y, p)))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn set_iteration(&mut self, iteration: usize) {
        self.iteration = iteration;
    }

    /// Drops every entry below `theta`.
    pub fn prune(&mut self, theta: f64) {
        for row in &mut self.rows {
            row.retain(|e| e.1 >= theta);
        }
        self.len = self.rows.iter().map(Vec::len).sum();
    }

    /// Entries of `other` are added; on collision `other` wins.
    pub fn merge(&mut self, other: &EqualityTable) {
        for (x, y, p) in other.iter() {
            self.insert(x, y, p);
        }
    }

    /// The same pairs keyed by the second entity.
    pub fn reversed(&self) -> EqualityTable {
        let mut rows: Vec<Vec<(EntityId, f64)>> = Vec::new();
        for (x, y, p) in self.iter() {
            if rows.len() <= y.index() {
                rows.resize_with(y.index() + 1, Vec::new);
            }
            // x ascends, so rows stay sorted
            rows[y.index()].push((x, p));
        }
        EqualityTable {
            rows,
            len: self.len,
            iteration: self.iteration,
        }
    }

    /// TSV `entity1 TAB entity2 TAB probability`, sorted by entity1 then
    /// descending probability (ties by partner id).
    pub fn write_tsv<W: Write>(&self, mut w: W, o1: &Ontology, o2: &Ontology) -> io::Result<()> {
        let mut firsts: Vec<(String, EntityId)> = (0..self.rows.len())
            .filter(|&i| !self.rows[i].is_empty())
            .map(|i| (o1.term(EntityId(i as u32)).to_string(), EntityId(i as u32)))
            .collect();
        firsts.sort();
        for (label, x) in firsts {
            let mut row = self.partners(x).to_vec();
            row.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            for (y, p) in row {
                writeln!(w, "{}\t{}\t{}", label, o2.term(y), p)?;
            }
        }
        Ok(())
    }
}

/// The single best partner of each first-ontology entity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaximalAssignment {
    best: Vec<Option<(EntityId, f64)>>,
    len: usize,
}

impl MaximalAssignment {
    /// Highest score wins; ties go to the smallest partner id.
    pub fn from_table(table: &EqualityTable) -> Self {
        let mut best = Vec::with_capacity(table.rows.len());
        let mut len = 0;
        for row in &table.rows {
            let mut top: Option<(EntityId, f64)> = None;
            for &(y, p) in row {
                if top.is_none_or(|(_, q)| p > q) {
                    top = Some((y, p));
                }
            }
            len += top.is_some() as usize;
            best.push(top);
        }
        MaximalAssignment { best, len }
    }

    pub fn get(&self, x: EntityId) -> Option<(EntityId, f64)> {
        self.best.get(x.index()).copied().flatten()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, EntityId, f64)> + '_ {
        self.best
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|(y, p)| (EntityId(i as u32), y, p)))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn to_table(&self) -> EqualityTable {
        let mut t = EqualityTable::new();
        for (x, y, p) in self.iter() {
            t.insert(x, y, p);
        }
        t
    }
}

/// How the inner products of the negative-evidence factor are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeReading {
    /// `Π_{r'(x',y')} (1 - Pr(y≡y'))`, matching the shared-relation form.
    #[default]
    ObjectEquality,
    /// `Π_{r'(x',y')} (1 - Pr(x≡x'))` with the previous pair score.
    PairEquality,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringOptions {
    pub theta: f64,
    pub negative_evidence: bool,
    pub negative_reading: NegativeReading,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        ScoringOptions {
            theta: 0.1,
            negative_evidence: false,
            negative_reading: NegativeReading::ObjectEquality,
        }
    }
}

/// Everything one scoring round reads. All of it is an immutable snapshot.
#[derive(Clone, Copy)]
pub struct ScoringInputs<'a> {
    pub o1: &'a Ontology,
    pub o2: &'a Ontology,
    pub funs1: &'a FunctionalityTable,
    pub funs2: &'a FunctionalityTable,
    pub subrelations: &'a SubrelationTable,
    /// Equalities of the previous round (literal clamps included), keyed by O₁ entity.
    pub previous: &'a EqualityTable,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairWeight {
    /// `Pr(r'⊆r)·fun⁻¹(r)`
    toward_first: f64,
    /// `Pr(r⊆r')·fun⁻¹(r')`
    toward_second: f64,
}

/// Dense per-(r, r') products, indexed by polarity slots.
struct RelationWeights {
    width: usize,
    weights: Vec<PairWeight>,
    /// For each O₁ slot, the O₂ relations with a non-zero inclusion either way:
    /// `(r', Pr(r'⊆r), Pr(r⊆r'))`.
    linked: Vec<Vec<(RelationId, f64, f64)>>,
}

impl RelationWeights {
    fn new(inputs: &ScoringInputs<'_>) -> Self {
        let rel1: Vec<RelationId> = polarities(inputs.o1, inputs.funs1);
        let rel2: Vec<RelationId> = polarities(inputs.o2, inputs.funs2);
        let width = inputs.o2.relation_count() * 2;
        let height = inputs.o1.relation_count() * 2;
        let mut weights = vec![PairWeight::default(); width * height];
        let mut linked = vec![Vec::new(); height];
        for &r in &rel1 {
            for &r2 in &rel2 {
                let second_in_first = inputs.subrelations.second_in_first(r2, r);
                let first_in_second = inputs.subrelations.first_in_second(r, r2);
                if second_in_first == 0.0 && first_in_second == 0.0 {
                    continue;
                }
                weights[r.slot() * width + r2.slot()] = PairWeight {
                    toward_first: second_in_first * inputs.funs1.inverse_fun(r),
                    toward_second: first_in_second * inputs.funs2.inverse_fun(r2),
                };
                linked[r.slot()].push((r2, second_in_first, first_in_second));
            }
        }
        RelationWeights {
            width,
            weights,
            linked,
        }
    }

    #[inline]
    fn row(&self, r: RelationId) -> &[PairWeight] {
        let start = r.slot() * self.width;
        &self.weights[start..start + self.width]
    }
}

fn polarities(o: &Ontology, funs: &FunctionalityTable) -> Vec<RelationId> {
    o.relations()
        .filter(|r| funs.entry(r.base()).is_some())
        .flat_map(|r| [r, r.inverse()])
        .collect()
}

/// Scores every instance pair with positive evidence and prunes below `theta`.
///
/// Reads only `inputs`; results do not depend on evaluation order.
pub fn score_all(inputs: &ScoringInputs<'_>, opts: &ScoringOptions) -> EqualityTable {
    let weights = RelationWeights::new(inputs);
    let rows = par::map_collect(inputs.o1.instances(), |&x| {
        (x, score_instance(inputs, &weights, opts, x))
    });
    let mut table = EqualityTable::new();
    for (x, row) in rows {
        table.set_row(x, row);
    }
    table
}

fn score_instance(
    inputs: &ScoringInputs<'_>,
    weights: &RelationWeights,
    opts: &ScoringOptions,
    x: EntityId,
) -> Vec<(EntityId, f64)> {
    let (o1, o2) = (inputs.o1, inputs.o2);
    let mut complements: HashMap<EntityId, f64> = HashMap::new();
    for fact in o1.facts(x) {
        let row = weights.row(fact.relation);
        for &(y2, p) in inputs.previous.partners(fact.other) {
            for g in o2.facts(y2) {
                // g is r'⁻¹(y', x'), i.e. r'(x', y')
                let x2 = g.other;
                if o2.kind(x2) != EntityKind::Instance {
                    continue;
                }
                let w = row[g.relation.inverse().slot()];
                if w.toward_first == 0.0 && w.toward_second == 0.0 {
                    continue;
                }
                let factor = (1.0 - w.toward_first * p) * (1.0 - w.toward_second * p);
                *complements.entry(x2).or_insert(1.0) *= factor;
            }
        }
    }
    let mut row: Vec<(EntityId, f64)> = complements
        .into_iter()
        .filter_map(|(x2, c)| {
            let mut score = 1.0 - c;
            if opts.negative_evidence && score > 0.0 {
                score *= negative_factor(inputs, weights, opts.negative_reading, x, x2);
            }
            (score >= opts.theta && score > 0.0).then_some((x2, score))
        })
        .collect();
    row.sort_unstable_by_key(|e| e.0);
    row
}

/// Penalty for relations of `x` that `x'` does not realize with an equal value.
fn negative_factor(
    inputs: &ScoringInputs<'_>,
    weights: &RelationWeights,
    reading: NegativeReading,
    x: EntityId,
    x2: EntityId,
) -> f64 {
    let (o1, o2) = (inputs.o1, inputs.o2);
    let pair = inputs.previous.get(x, x2);
    let mut factor = 1.0;
    for fact in o1.facts(x) {
        let r = fact.relation;
        let fun_r = inputs.funs1.fun(r);
        for &(r2, second_in_first, first_in_second) in &weights.linked[r.slot()] {
            let partners = o2.facts_with(x2, r2);
            let inner = match reading {
                NegativeReading::ObjectEquality => partners
                    .iter()
                    .map(|g| 1.0 - inputs.previous.get(fact.other, g.other))
                    .product::<f64>(),
                NegativeReading::PairEquality => (1.0 - pair).powi(partners.len() as i32),
            };
            factor *= (1.0 - fun_r * second_in_first * inner)
                * (1.0 - inputs.funs2.fun(r2) * first_in_second * inner);
        }
    }
    factor
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceMode {
    /// Shared-relation positive evidence only.
    Positive,
    /// Positive evidence times the penalty for unmatched functional values.
    Combined,
}

/// Equivalence of `x` and `x'` when both ontologies use the same relation
/// names. Functionalities are those of the first ontology.
pub fn score_pair_shared(
    o1: &Ontology,
    o2: &Ontology,
    x: EntityId,
    x2: EntityId,
    previous: &EqualityTable,
    funs1: &FunctionalityTable,
    mode: EvidenceMode,
) -> f64 {
    let mut positive = 1.0;
    let mut negative = 1.0;
    for fact in o1.facts(x) {
        let r = fact.relation;
        let shared =
            o2.relation(o1.relation_name(r))
                .map(|s| if r.is_inverse() { s.inverse() } else { s });
        let partners = shared.map_or(&[][..], |s| o2.facts_with(x2, s));
        let inv_fun = funs1.inverse_fun(r);
        let mut unmatched = 1.0;
        for g in partners {
            let p = previous.get(fact.other, g.other);
            positive *= 1.0 - inv_fun * p;
            unmatched *= 1.0 - p;
        }
        negative *= 1.0 - funs1.fun(r) * unmatched;
    }
    match mode {
        EvidenceMode::Positive => 1.0 - positive,
        EvidenceMode::Combined => (1.0 - positive) * negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionality::FunctionalityStrategy;
    use crate::store::{RawTriple, StoreConfig, Term, Vocabulary};

    fn ont(triples: &[(&str, &str, &str)]) -> Ontology {
        let raw = triples.iter().map(|&(s, p, o)| {
            match o.strip_prefix('"').and_then(|l| l.strip_suffix('"')) {
                Some(l) => RawTriple::new(s, p, Term::literal(l)),
                None => RawTriple::new(s, p, Term::iri(o)),
            }
        });
        Ontology::finalize(raw, &StoreConfig::with_vocabulary(Vocabulary::short()))
    }

    fn funs(o: &Ontology) -> FunctionalityTable {
        FunctionalityTable::compute(o, FunctionalityStrategy::Harmonic)
    }

    fn lit_eq(o1: &Ontology, o2: &Ontology, pairs: &[(&str, &str, f64)]) -> EqualityTable {
        let mut t = EqualityTable::new();
        for &(a, b, p) in pairs {
            t.insert(
                o1.lookup(&Term::literal(a)).unwrap(),
                o2.lookup(&Term::literal(b)).unwrap(),
                p,
            );
        }
        t
    }

    #[test]
    fn table_basics() {
        let mut t = EqualityTable::new();
        t.insert(EntityId(3), EntityId(5), 0.5);
        t.insert(EntityId(3), EntityId(1), 0.7);
        t.insert(EntityId(3), EntityId(5), 0.6);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(EntityId(3), EntityId(5)), 0.6);
        assert_eq!(t.get(EntityId(4), EntityId(5)), 0.0);
        assert_eq!(t.partners(EntityId(3))[0].0, EntityId(1));
        let r = t.reversed();
        assert_eq!(r.get(EntityId(1), EntityId(3)), 0.7);
        t.prune(0.65);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn maximal_assignment_rules() {
        let mut t = EqualityTable::new();
        t.insert(EntityId(0), EntityId(1), 0.9);
        t.insert(EntityId(0), EntityId(2), 0.4);
        t.insert(EntityId(1), EntityId(7), 0.7);
        t.insert(EntityId(1), EntityId(4), 0.7);
        let m = MaximalAssignment::from_table(&t);
        assert_eq!(m.get(EntityId(0)), Some((EntityId(1), 0.9)));
        assert_eq!(m.get(EntityId(1)), Some((EntityId(4), 0.7)));
        assert_eq!(m.len(), 2);
        assert!(MaximalAssignment::from_table(&EqualityTable::new()).is_empty());
    }

    #[test]
    fn shared_inverse_functional_value_gives_certainty() {
        let o1 = ont(&[("x", "email", "\"a@b\"")]);
        let o2 = ont(&[("x2", "email", "\"a@b\"")]);
        let prev = lit_eq(&o1, &o2, &[("a@b", "a@b", 1.0)]);
        let (x, x2) = (o1.lookup_iri("x").unwrap(), o2.lookup_iri("x2").unwrap());
        let s = score_pair_shared(&o1, &o2, x, x2, &prev, &funs(&o1), EvidenceMode::Positive);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn functional_mismatch_kills_combined_score() {
        let o1 = ont(&[("x", "born", "\"1950\""), ("x", "email", "\"e\"")]);
        let o2 = ont(&[("x2", "born", "\"1960\""), ("x2", "email", "\"e\"")]);
        let prev = lit_eq(&o1, &o2, &[("e", "e", 1.0)]);
        let (x, x2) = (o1.lookup_iri("x").unwrap(), o2.lookup_iri("x2").unwrap());
        let f = funs(&o1);
        assert_eq!(
            score_pair_shared(&o1, &o2, x, x2, &prev, &f, EvidenceMode::Positive),
            1.0
        );
        assert_eq!(
            score_pair_shared(&o1, &o2, x, x2, &prev, &f, EvidenceMode::Combined),
            0.0
        );
    }

    #[test]
    fn two_half_inverse_functional_values() {
        // fun⁻¹(r) = 0.5: each value is shared by two subjects
        let o1 = ont(&[
            ("x", "r", "\"u\""),
            ("x", "r", "\"v\""),
            ("p", "r", "\"u\""),
            ("q", "r", "\"v\""),
        ]);
        let o2 = ont(&[("x2", "r", "\"u\""), ("x2", "r", "\"v\"")]);
        let f = funs(&o1);
        assert_eq!(f.inverse_fun(o1.relation("r").unwrap()), 0.5);
        let prev = lit_eq(&o1, &o2, &[("u", "u", 1.0), ("v", "v", 1.0)]);
        let (x, x2) = (o1.lookup_iri("x").unwrap(), o2.lookup_iri("x2").unwrap());
        assert_eq!(
            score_pair_shared(&o1, &o2, x, x2, &prev, &f, EvidenceMode::Positive),
            0.75
        );
    }

    #[test]
    fn single_factor_cross_vocabulary() {
        let o1 = ont(&[("x", "r", "\"y\"")]);
        let o2 = ont(&[("x2", "s", "\"y\"")]);
        let (f1, f2) = (funs(&o1), funs(&o2));
        let prev = lit_eq(&o1, &o2, &[("y", "y", 1.0)]);
        let mut sub = SubrelationTable::new();
        let (r, s) = (o1.relation("r").unwrap(), o2.relation("s").unwrap());
        sub.insert_second_in_first(s, r, 1.0);
        let inputs = ScoringInputs {
            o1: &o1,
            o2: &o2,
            funs1: &f1,
            funs2: &f2,
            subrelations: &sub,
            previous: &prev,
        };
        let t = score_all(&inputs, &ScoringOptions::default());
        let (x, x2) = (o1.lookup_iri("x").unwrap(), o2.lookup_iri("x2").unwrap());
        assert_eq!(t.get(x, x2), 1.0);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn no_evidence_no_entries() {
        let o1 = ont(&[("x", "r", "\"y\"")]);
        let o2 = ont(&[("x2", "s", "\"z\"")]);
        let (f1, f2) = (funs(&o1), funs(&o2));
        let prev = EqualityTable::new();
        let sub = SubrelationTable::bootstrap(0.1);
        let inputs = ScoringInputs {
            o1: &o1,
            o2: &o2,
            funs1: &f1,
            funs2: &f2,
            subrelations: &sub,
            previous: &prev,
        };
        assert!(score_all(&inputs, &ScoringOptions::default()).is_empty());
    }

    #[test]
    fn negative_evidence_penalizes_missing_relation() {
        let o1 = ont(&[("x", "key", "\"k\""), ("x", "born", "\"1950\"")]);
        let o2 = ont(&[("x2", "key", "\"k\""), ("x2", "born", "\"1960\"")]);
        let (f1, f2) = (funs(&o1), funs(&o2));
        let prev = lit_eq(&o1, &o2, &[("k", "k", 1.0)]);
        let mut sub = SubrelationTable::new();
        for name in ["key", "born"] {
            let (a, b) = (o1.relation(name).unwrap(), o2.relation(name).unwrap());
            sub.insert_first_in_second(a, b, 1.0);
            sub.insert_second_in_first(b, a, 1.0);
        }
        let inputs = ScoringInputs {
            o1: &o1,
            o2: &o2,
            funs1: &f1,
            funs2: &f2,
            subrelations: &sub,
            previous: &prev,
        };
        let (x, x2) = (o1.lookup_iri("x").unwrap(), o2.lookup_iri("x2").unwrap());
        let pos = score_all(&inputs, &ScoringOptions::default());
        assert_eq!(pos.get(x, x2), 1.0);
        let neg = score_all(
            &inputs,
            &ScoringOptions {
                negative_evidence: true,
                ..Default::default()
            },
        );
        // born is functional and the years differ
        assert_eq!(neg.get(x, x2), 0.0);
    }
}
