//! Interned, deduplicated, doubly indexed statement store for one ontology.
//!
//! Each statement is kept once. Its subject gets an adjacency entry under the
//! forward relation and its object gets one under the inverse relation, so
//! `objects_of(y, r⁻¹)` answers `subjects_with(r, y)` from the same index.

mod parse;
mod term;
mod write;

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::Serialize;

pub use parse::{
    load_path, open_input, parse, parse_ntriples, parse_str, parse_tsv, Format, LoadOptions,
    LoadReport,
};
pub use term::{EntityId, EntityKind, Fact, Literal, RawTriple, RelationId, Statement, Term};
pub use write::{write_ntriples, write_stats_csv, write_triples, write_tsv};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";

/// IRIs of the schema relations the store interprets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub type_iri: String,
    pub subclass_iri: String,
    pub subproperty_iri: String,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            type_iri: RDF_TYPE.into(),
            subclass_iri: RDFS_SUBCLASS_OF.into(),
            subproperty_iri: RDFS_SUBPROPERTY_OF.into(),
        }
    }
}

impl Vocabulary {
    /// `type`, `subclassOf`, `subpropertyOf`; handy for fixtures.
    pub fn short() -> Self {
        Vocabulary {
            type_iri: "type".into(),
            subclass_iri: "subclassOf".into(),
            subproperty_iri: "subpropertyOf".into(),
        }
    }

    pub fn is_schema_relation(&self, iri: &str) -> bool {
        iri == self.type_iri || iri == self.subclass_iri || iri == self.subproperty_iri
    }
}

#[derive(Debug, Clone)]
pub struct StoreConfig {
    pub vocabulary: Vocabulary,
    /// Materialize subclass and subproperty consequences. When off the input
    /// is trusted to be closed already.
    pub closure: bool,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            vocabulary: Vocabulary::default(),
            closure: true,
        }
    }
}

impl StoreConfig {
    pub fn with_vocabulary(vocabulary: Vocabulary) -> Self {
        StoreConfig {
            vocabulary,
            closure: true,
        }
    }
}

/// Per-relation counts, forward polarity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RelationStats {
    pub statements: usize,
    pub subjects: usize,
    pub objects: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OntologyStats {
    pub entities: usize,
    pub instances: usize,
    pub classes: usize,
    pub literals: usize,
    pub statements: usize,
    pub relations: usize,
    pub class_instance_conflicts: usize,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    vocabulary: Vocabulary,
    terms: Vec<Term>,
    term_ids: HashMap<Term, EntityId>,
    kinds: Vec<EntityKind>,
    relation_names: Vec<String>,
    relation_ids: HashMap<String, u32>,
    /// Sorted by (relation, subject, object).
    statements: Vec<Statement>,
    relation_ranges: Vec<Range<usize>>,
    relation_stats: Vec<RelationStats>,
    fact_offsets: Vec<usize>,
    facts: Vec<Fact>,
    instances: Vec<EntityId>,
    classes: Vec<EntityId>,
    literals: Vec<EntityId>,
    class_instance_conflicts: usize,
}

struct Interner {
    terms: Vec<Term>,
    term_ids: HashMap<Term, EntityId>,
    relation_names: Vec<String>,
    relation_ids: HashMap<String, u32>,
}

impl Interner {
    fn entity(&mut self, term: Term) -> EntityId {
        if let Some(&id) = self.term_ids.get(&term) {
            return id;
        }
        let id = EntityId(self.terms.len() as u32);
        self.terms.push(term.clone());
        self.term_ids.insert(term, id);
        id
    }

    fn relation(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.relation_ids.get(name) {
            return id;
        }
        let id = self.relation_names.len() as u32;
        self.relation_names.push(name.to_string());
        self.relation_ids.insert(name.to_string(), id);
        id
    }
}

/// Transitive ancestors of every node in `edges` (child → parents).
fn ancestors<T: Copy + Eq + std::hash::Hash + Ord>(
    edges: &HashMap<T, Vec<T>>,
) -> HashMap<T, Vec<T>> {
    let mut out = HashMap::with_capacity(edges.len());
    for &start in edges.keys() {
        let mut seen = HashSet::new();
        let mut stack: Vec<T> = edges[&start].clone();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                if let Some(parents) = edges.get(&n) {
                    stack.extend(parents.iter().copied());
                }
            }
        }
        let mut all: Vec<T> = seen.into_iter().collect();
        all.sort_unstable();
        out.insert(start, all);
    }
    out
}

impl Ontology {
    /// Interns, closes (when configured), deduplicates, partitions and indexes.
    pub fn finalize<I>(raw: I, config: &StoreConfig) -> Ontology
    where
        I: IntoIterator<Item = RawTriple>,
    {
        let mut interner = Interner {
            terms: Vec::new(),
            term_ids: HashMap::new(),
            relation_names: Vec::new(),
            relation_ids: HashMap::new(),
        };
        let mut triples: Vec<(u32, EntityId, EntityId)> = raw
            .into_iter()
            .map(|t| {
                let s = interner.entity(Term::Iri(t.subject));
                let r = interner.relation(&t.predicate);
                let o = interner.entity(t.object);
                (r, s, o)
            })
            .collect();

        let vocab = &config.vocabulary;
        if config.closure {
            close(&mut triples, &mut interner, vocab);
        }

        triples.sort_unstable();
        triples.dedup();
        let statements: Vec<Statement> = triples
            .into_iter()
            .map(|(r, s, o)| Statement {
                relation: RelationId::forward(r),
                subject: s,
                object: o,
            })
            .collect();

        let Interner {
            terms,
            term_ids,
            relation_names,
            relation_ids,
        } = interner;
        let n_entities = terms.len();
        let n_relations = relation_names.len();

        let mut relation_ranges = vec![0..0; n_relations];
        let mut start = 0;
        while start < statements.len() {
            let r = statements[start].relation.base();
            let end = start + statements[start..].partition_point(|s| s.relation.base() == r);
            relation_ranges[r as usize] = start..end;
            start = end;
        }

        let type_rel = relation_ids.get(&vocab.type_iri).copied();
        let subclass_rel = relation_ids.get(&vocab.subclass_iri).copied();
        let mut is_class = vec![false; n_entities];
        let mut typed_subject = vec![false; n_entities];
        for st in &statements {
            let r = Some(st.relation.base());
            if r == type_rel {
                is_class[st.object.index()] = true;
                typed_subject[st.subject.index()] = true;
            } else if r == subclass_rel {
                is_class[st.subject.index()] = true;
                is_class[st.object.index()] = true;
            }
        }
        let mut kinds = Vec::with_capacity(n_entities);
        let (mut instances, mut classes, mut literals) = (Vec::new(), Vec::new(), Vec::new());
        let mut conflicts = 0;
        for (i, term) in terms.iter().enumerate() {
            let id = EntityId(i as u32);
            let kind = if term.is_literal() {
                literals.push(id);
                EntityKind::Literal
            } else if is_class[i] {
                if typed_subject[i] {
                    conflicts += 1;
                }
                classes.push(id);
                EntityKind::Class
            } else {
                instances.push(id);
                EntityKind::Instance
            };
            kinds.push(kind);
        }

        // CSR adjacency: forward entry on the subject, inverse entry on the object.
        let mut degree = vec![0usize; n_entities + 1];
        for st in &statements {
            degree[st.subject.index()] += 1;
            degree[st.object.index()] += 1;
        }
        let mut fact_offsets = Vec::with_capacity(n_entities + 1);
        let mut acc = 0;
        for d in degree.iter().take(n_entities) {
            fact_offsets.push(acc);
            acc += d;
        }
        fact_offsets.push(acc);
        let mut cursor = fact_offsets.clone();
        let mut facts = vec![
            Fact {
                relation: RelationId::forward(0),
                other: EntityId(0)
            };
            acc
        ];
        for st in &statements {
            let s = st.subject.index();
            facts[cursor[s]] = Fact {
                relation: st.relation,
                other: st.object,
            };
            cursor[s] += 1;
            let o = st.object.index();
            facts[cursor[o]] = Fact {
                relation: st.relation.inverse(),
                other: st.subject,
            };
            cursor[o] += 1;
        }
        for e in 0..n_entities {
            facts[fact_offsets[e]..fact_offsets[e + 1]].sort_unstable();
        }

        let mut relation_stats = vec![RelationStats::default(); n_relations];
        for e in 0..n_entities {
            let slice = &facts[fact_offsets[e]..fact_offsets[e + 1]];
            let mut i = 0;
            while i < slice.len() {
                let r = slice[i].relation;
                let run = slice[i..].partition_point(|f| f.relation == r);
                let stats = &mut relation_stats[r.base() as usize];
                if r.is_inverse() {
                    stats.objects += 1;
                } else {
                    stats.subjects += 1;
                    stats.statements += run;
                }
                i += run;
            }
        }

        Ontology {
            vocabulary: vocab.clone(),
            terms,
            term_ids,
            kinds,
            relation_names,
            relation_ids,
            statements,
            relation_ranges,
            relation_stats,
            fact_offsets,
            facts,
            instances,
            classes,
            literals,
            class_instance_conflicts: conflicts,
        }
    }

    /// An ontology with no statements.
    pub fn empty(config: &StoreConfig) -> Ontology {
        Ontology::finalize(std::iter::empty(), config)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn entity_count(&self) -> usize {
        self.terms.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_names.len()
    }

    pub fn statement_count(&self) -> usize {
        self.statements.len()
    }

    pub fn term(&self, e: EntityId) -> &Term {
        &self.terms[e.index()]
    }

    pub fn kind(&self, e: EntityId) -> EntityKind {
        self.kinds[e.index()]
    }

    pub fn lookup(&self, term: &Term) -> Option<EntityId> {
        self.term_ids.get(term).copied()
    }

    pub fn lookup_iri(&self, iri: &str) -> Option<EntityId> {
        self.lookup(&Term::Iri(iri.to_string()))
    }

    pub fn relation(&self, name: &str) -> Option<RelationId> {
        self.relation_ids.get(name).map(|&b| RelationId::forward(b))
    }

    pub fn relation_name(&self, r: RelationId) -> &str {
        &self.relation_names[r.base() as usize]
    }

    /// Relation name with a `^-1` suffix for inverse polarity.
    pub fn relation_label(&self, r: RelationId) -> String {
        let name = self.relation_name(r);
        if r.is_inverse() {
            format!("{name}^-1")
        } else {
            name.to_string()
        }
    }

    /// Every forward relation, by base id.
    pub fn relations(&self) -> impl Iterator<Item = RelationId> + '_ {
        (0..self.relation_names.len() as u32).map(RelationId::forward)
    }

    pub fn relation_stats(&self, base: u32) -> RelationStats {
        self.relation_stats[base as usize]
    }

    pub fn type_relation(&self) -> Option<RelationId> {
        self.relation(&self.vocabulary.type_iri)
    }

    pub fn is_schema_relation(&self, r: RelationId) -> bool {
        self.vocabulary.is_schema_relation(self.relation_name(r))
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    /// Statements of one forward relation, in deterministic order.
    pub fn statements_of(&self, base: u32) -> &[Statement] {
        match self.relation_ranges.get(base as usize) {
            Some(range) => &self.statements[range.clone()],
            None => &[],
        }
    }

    /// All adjacency entries of `x`, both polarities, sorted by (relation, other).
    pub fn facts(&self, x: EntityId) -> &[Fact] {
        let i = x.index();
        if i >= self.terms.len() {
            return &[];
        }
        &self.facts[self.fact_offsets[i]..self.fact_offsets[i + 1]]
    }

    /// Adjacency entries of `x` under exactly `r`.
    pub fn facts_with(&self, x: EntityId, r: RelationId) -> &[Fact] {
        let all = self.facts(x);
        let start = all.partition_point(|f| f.relation < r);
        let len = all[start..].partition_point(|f| f.relation == r);
        &all[start..start + len]
    }

    /// `{y : r(x, y)}`; empty for unknown ids.
    pub fn objects_of(&self, x: EntityId, r: RelationId) -> impl Iterator<Item = EntityId> + '_ {
        self.facts_with(x, r).iter().map(|f| f.other)
    }

    /// `{x : r(x, y)}`, answered through the inverse view.
    pub fn subjects_with(&self, r: RelationId, y: EntityId) -> impl Iterator<Item = EntityId> + '_ {
        self.objects_of(y, r.inverse())
    }

    pub fn instances(&self) -> &[EntityId] {
        &self.instances
    }

    pub fn classes(&self) -> &[EntityId] {
        &self.classes
    }

    pub fn literals(&self) -> &[EntityId] {
        &self.literals
    }

    pub fn class_instance_conflicts(&self) -> usize {
        self.class_instance_conflicts
    }

    pub fn stats(&self) -> OntologyStats {
        OntologyStats {
            entities: self.entity_count(),
            instances: self.instances.len(),
            classes: self.classes.len(),
            literals: self.literals.len(),
            statements: self.statements.len(),
            relations: self
                .relation_stats
                .iter()
                .filter(|s| s.statements > 0)
                .count(),
            class_instance_conflicts: self.class_instance_conflicts,
        }
    }

    /// Statements back in raw form, in store order.
    pub fn to_raw_triples(&self) -> Vec<RawTriple> {
        self.statements
            .iter()
            .map(|st| {
                let subject = match self.term(st.subject) {
                    Term::Iri(s) => s.clone(),
                    Term::Literal(l) => l.to_string(),
                };
                RawTriple {
                    subject,
                    predicate: self.relation_name(st.relation).to_string(),
                    object: self.term(st.object).clone(),
                }
            })
            .collect()
    }
}

/// Adds subproperty then subclass consequences to `triples`, both transitive.
fn close(
    triples: &mut Vec<(u32, EntityId, EntityId)>,
    interner: &mut Interner,
    vocab: &Vocabulary,
) {
    if let Some(&subprop) = interner.relation_ids.get(&vocab.subproperty_iri) {
        let mut edges: HashMap<u32, Vec<u32>> = HashMap::new();
        let decl: Vec<(EntityId, EntityId)> = triples
            .iter()
            .filter(|t| t.0 == subprop)
            .map(|t| (t.1, t.2))
            .collect();
        for (child, parent) in decl {
            let (Term::Iri(c), Term::Iri(p)) = (
                interner.terms[child.index()].clone(),
                interner.terms[parent.index()].clone(),
            ) else {
                continue;
            };
            let c = interner.relation(&c);
            let p = interner.relation(&p);
            edges.entry(c).or_default().push(p);
        }
        let supers = ancestors(&edges);
        let mut added = Vec::new();
        for (&r, parents) in &supers {
            let child = interner.entity(Term::Iri(interner.relation_names[r as usize].clone()));
            for &p in parents {
                let parent =
                    interner.entity(Term::Iri(interner.relation_names[p as usize].clone()));
                added.push((subprop, child, parent));
            }
        }
        for &(r, s, o) in triples.iter() {
            if let Some(parents) = supers.get(&r) {
                added.extend(parents.iter().map(|&p| (p, s, o)));
            }
        }
        triples.extend(added);
    }

    let subclass = interner.relation_ids.get(&vocab.subclass_iri).copied();
    let type_rel = interner.relation_ids.get(&vocab.type_iri).copied();
    if let Some(subclass) = subclass {
        let mut edges: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
        for t in triples.iter().filter(|t| t.0 == subclass) {
            edges.entry(t.1).or_default().push(t.2);
        }
        let supers = ancestors(&edges);
        let mut added = Vec::new();
        for (&c, parents) in &supers {
            added.extend(parents.iter().map(|&d| (subclass, c, d)));
        }
        if let Some(type_rel) = type_rel {
            for t in triples.iter().filter(|t| t.0 == type_rel) {
                if let Some(parents) = supers.get(&t.2) {
                    added.extend(parents.iter().map(|&d| (type_rel, t.1, d)));
                }
            }
        }
        triples.extend(added);
    }
}
