//! Random fixtures and brute-force reference implementations.
#![allow(dead_code)]

pub mod props;

use std::collections::{HashMap, HashSet};

use ontalign::instances::EqualityTable;
use ontalign::schema::SubrelationTable;
use ontalign::store::{
    EntityId, EntityKind, Ontology, RawTriple, RelationId, StoreConfig, Term, Vocabulary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_instances: usize,
    pub max_relations: usize,
    pub max_facts: usize,
}

impl Shape {
    pub const ORACLE: Shape = Shape {
        max_instances: 200,
        max_relations: 8,
        max_facts: 5,
    };
    pub const SMALL: Shape = Shape {
        max_instances: 25,
        max_relations: 4,
        max_facts: 4,
    };
}

pub struct Fixture {
    pub o1: Ontology,
    pub o2: Ontology,
    /// Random equalities over instances and literals, keyed by O₁ entity.
    pub previous: EqualityTable,
    pub subrelations: SubrelationTable,
}

fn random_triples(
    rng: &mut ChaCha8Rng,
    shape: Shape,
    tag: &str,
    literals: usize,
) -> Vec<RawTriple> {
    let n = rng.random_range(1..=shape.max_instances);
    let k = rng.random_range(1..=shape.max_relations);
    let mut out = Vec::new();
    for i in 0..n {
        let s = format!("{tag}i{i}");
        for _ in 0..rng.random_range(0..=shape.max_facts) {
            let p = format!("{tag}r{}", rng.random_range(0..k));
            let o = if rng.random_bool(0.5) {
                Term::iri(format!("{tag}i{}", rng.random_range(0..n)))
            } else {
                Term::literal(format!("v{}", rng.random_range(0..literals)))
            };
            out.push(RawTriple::new(s.clone(), p, o));
        }
        if rng.random_bool(0.4) {
            out.push(RawTriple::new(
                s.clone(),
                "type",
                Term::iri(format!("{tag}C{}", rng.random_range(0..3))),
            ));
        }
    }
    out
}

pub fn store_config() -> StoreConfig {
    StoreConfig::with_vocabulary(Vocabulary::short())
}

/// Two random ontologies drawing literals from one pool, with random prior
/// equalities and random inclusion scores.
pub fn fixture(seed: u64, shape: Shape) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let literals = rng.random_range(1..=shape.max_instances.max(2));
    let o1 = Ontology::finalize(
        random_triples(&mut rng, shape, "a:", literals),
        &store_config(),
    );
    let o2 = Ontology::finalize(
        random_triples(&mut rng, shape, "b:", literals),
        &store_config(),
    );

    let mut previous = EqualityTable::new();
    let inst2 = o2.instances().to_vec();
    let lit2 = o2.literals().to_vec();
    for x in o1.instances().iter().chain(o1.literals()) {
        if !rng.random_bool(0.6) {
            continue;
        }
        let pool = if o1.kind(*x) == EntityKind::Literal {
            &lit2
        } else {
            &inst2
        };
        if pool.is_empty() {
            continue;
        }
        for _ in 0..rng.random_range(1..=3) {
            let y = pool[rng.random_range(0..pool.len())];
            let p = if rng.random_bool(0.3) {
                1.0
            } else {
                rng.random_range(0.01..1.0)
            };
            previous.insert(*x, y, p);
        }
    }

    let mut subrelations = SubrelationTable::new();
    for r in o1.relations() {
        for r2 in o2.relations().flat_map(|r| [r, r.inverse()]) {
            if rng.random_bool(0.7) {
                subrelations.insert_first_in_second(r, r2, rng.random_range(0.0..=1.0));
            }
            if rng.random_bool(0.7) {
                subrelations.insert_second_in_first(r2, r, rng.random_range(0.0..=1.0));
            }
        }
    }
    Fixture {
        o1,
        o2,
        previous,
        subrelations,
    }
}

/// `(relation, other)` for every statement touching `x`, from the flat
/// statement list.
pub fn naive_facts(o: &Ontology) -> HashMap<EntityId, Vec<(RelationId, EntityId)>> {
    let mut out: HashMap<EntityId, Vec<(RelationId, EntityId)>> = HashMap::new();
    for st in o.statements() {
        out.entry(st.subject)
            .or_default()
            .push((st.relation, st.object));
        out.entry(st.object)
            .or_default()
            .push((st.relation.inverse(), st.subject));
    }
    out
}

/// Distinct first arguments over statements, counted from scratch.
pub fn naive_fun(o: &Ontology, r: RelationId) -> f64 {
    let mut subjects = HashSet::new();
    let mut n = 0usize;
    for st in o
        .statements()
        .iter()
        .filter(|s| s.relation.base() == r.base())
    {
        n += 1;
        subjects.insert(if r.is_inverse() {
            st.object
        } else {
            st.subject
        });
    }
    if n == 0 {
        0.0
    } else {
        subjects.len() as f64 / n as f64
    }
}

pub fn naive_inverse_fun(o: &Ontology, r: RelationId) -> f64 {
    naive_fun(o, r.inverse())
}

/// Every pair's full-formula score, by enumeration of all instance pairs and
/// all their statement pairs.
pub fn naive_instance_scores(f: &Fixture, negative: bool) -> HashMap<(EntityId, EntityId), f64> {
    let facts1 = naive_facts(&f.o1);
    let facts2 = naive_facts(&f.o2);
    let rels2: Vec<RelationId> = f.o2.relations().flat_map(|r| [r, r.inverse()]).collect();
    let mut inv1 = HashMap::new();
    let mut inv2 = HashMap::new();
    let empty = Vec::new();
    let mut out = HashMap::new();
    for &x in f.o1.instances() {
        let fx = facts1.get(&x).unwrap_or(&empty);
        for &x2 in f.o2.instances() {
            let fx2 = facts2.get(&x2).unwrap_or(&empty);
            let mut complement = 1.0;
            for &(r, y) in fx {
                let i1 = *inv1.entry(r).or_insert_with(|| naive_inverse_fun(&f.o1, r));
                for &(r2, y2) in fx2 {
                    let p = f.previous.get(y, y2);
                    let i2 = *inv2
                        .entry(r2)
                        .or_insert_with(|| naive_inverse_fun(&f.o2, r2));
                    complement *= (1.0 - f.subrelations.second_in_first(r2, r) * i1 * p)
                        * (1.0 - f.subrelations.first_in_second(r, r2) * i2 * p);
                }
            }
            let mut score = 1.0 - complement;
            if negative && score > 0.0 {
                for &(r, y) in fx {
                    for &r2 in &rels2 {
                        let inner: f64 = fx2
                            .iter()
                            .filter(|(g, _)| *g == r2)
                            .map(|&(_, y2)| 1.0 - f.previous.get(y, y2))
                            .product();
                        score *= (1.0
                            - naive_fun(&f.o1, r) * f.subrelations.second_in_first(r2, r) * inner)
                            * (1.0
                                - naive_fun(&f.o2, r2)
                                    * f.subrelations.first_in_second(r, r2)
                                    * inner);
                    }
                }
            }
            if score > 0.0 {
                out.insert((x, x2), score);
            }
        }
    }
    out
}

/// Compares an optimized table against reference scores. Entries within
/// `tol` of `theta` may be kept or pruned.
pub fn compare_scores(
    got: &EqualityTable,
    expected: &HashMap<(EntityId, EntityId), f64>,
    theta: f64,
    tol: f64,
) -> Result<(), String> {
    for (&(x, y), &want) in expected {
        let have = got.get(x, y);
        if want >= theta + tol {
            if (have - want).abs() > tol {
                return Err(format!("{x:?},{y:?}: optimized {have} vs reference {want}"));
            }
        } else if want < theta - tol && have != 0.0 {
            return Err(format!(
                "{x:?},{y:?}: kept {have} below threshold (reference {want})"
            ));
        }
    }
    for (x, y, p) in got.iter() {
        if !expected.contains_key(&(x, y)) {
            return Err(format!("{x:?},{y:?}: spurious entry {p}"));
        }
    }
    Ok(())
}

/// Crisp set ratio: statements of `r` realized by `r2` under the mapping,
/// over statements whose both ends are mapped.
pub fn crisp_subrelation(
    src: &Ontology,
    dst: &Ontology,
    mapping: &HashMap<EntityId, Vec<EntityId>>,
    r: RelationId,
    r2: RelationId,
) -> Option<f64> {
    let dst_pairs: HashSet<(EntityId, EntityId)> = dst
        .statements()
        .iter()
        .filter(|s| s.relation.base() == r2.base())
        .map(|s| {
            if r2.is_inverse() {
                (s.object, s.subject)
            } else {
                (s.subject, s.object)
            }
        })
        .collect();
    let (mut mapped, mut realized) = (0usize, 0usize);
    for st in src
        .statements()
        .iter()
        .filter(|s| s.relation.base() == r.base())
    {
        let (Some(xs), Some(ys)) = (mapping.get(&st.subject), mapping.get(&st.object)) else {
            continue;
        };
        mapped += 1;
        if xs
            .iter()
            .any(|a| ys.iter().any(|b| dst_pairs.contains(&(*a, *b))))
        {
            realized += 1;
        }
    }
    (mapped > 0 && realized > 0).then(|| realized as f64 / mapped as f64)
}

/// Crisp member ratio: members of `c` with a partner typed `c2`, over members.
pub fn crisp_subclass(
    src: &Ontology,
    dst: &Ontology,
    mapping: &HashMap<EntityId, Vec<EntityId>>,
    c: EntityId,
    c2: EntityId,
) -> Option<f64> {
    let t1 = src.type_relation()?;
    let t2 = dst.type_relation()?;
    let typed2: HashSet<EntityId> = dst
        .statements()
        .iter()
        .filter(|s| s.relation == t2 && s.object == c2)
        .map(|s| s.subject)
        .collect();
    let members: Vec<EntityId> = src
        .statements()
        .iter()
        .filter(|s| s.relation == t1 && s.object == c)
        .map(|s| s.subject)
        .collect();
    if members.is_empty() {
        return None;
    }
    let hit = members
        .iter()
        .filter(|m| {
            mapping
                .get(m)
                .is_some_and(|ps| ps.iter().any(|p| typed2.contains(p)))
        })
        .count();
    (hit > 0).then(|| hit as f64 / members.len() as f64)
}

/// The fixture's equalities with every probability set to 1.
pub fn crisp(f: &Fixture) -> (EqualityTable, HashMap<EntityId, Vec<EntityId>>) {
    let mut table = EqualityTable::new();
    let mut mapping: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    for (x, y, _) in f.previous.iter() {
        table.insert(x, y, 1.0);
        mapping.entry(x).or_default().push(y);
    }
    (table, mapping)
}

/// Reverses a first-to-second mapping.
pub fn invert(mapping: &HashMap<EntityId, Vec<EntityId>>) -> HashMap<EntityId, Vec<EntityId>> {
    let mut out: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    for (x, ys) in mapping {
        for y in ys {
            out.entry(*y).or_default().push(*x);
        }
    }
    out
}
