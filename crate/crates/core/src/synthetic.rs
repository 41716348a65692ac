//! Synthetic ontologies with known alignments.
//!
//! [`twin`] clones an ontology under fresh identifiers, [`people`] builds a
//! base ontology with relations of varied functionality, and
//! [`restaurants`] builds a pair whose attribute values differ only in
//! formatting.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::eval::GoldStandard;
use crate::store::{Literal, Ontology, RawTriple, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct TwinSpec {
    /// Probability of dropping each fact statement.
    pub drop_rate: f64,
    /// Probability of altering each literal occurrence.
    pub perturb_rate: f64,
    pub seed: u64,
    /// Namespace of the new identifiers.
    pub prefix: String,
}

impl Default for TwinSpec {
    fn default() -> Self {
        TwinSpec {
            drop_rate: 0.0,
            perturb_rate: 0.0,
            seed: 0,
            prefix: "http://twin.example.org/".into(),
        }
    }
}

/// A renamed clone and its implied alignments.
#[derive(Debug, Clone)]
pub struct Twin {
    pub triples: Vec<RawTriple>,
    /// Instances that survived the dropout.
    pub instances: GoldStandard,
    pub relations: GoldStandard,
    pub classes: GoldStandard,
}

fn perturb(rng: &mut ChaCha8Rng, s: &str) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return "~".into();
    }
    let i = rng.random_range(0..chars.len());
    let c = chars[i];
    chars[i] = if c == 'q' { 'z' } else { 'q' };
    chars.into_iter().collect()
}

/// Renames every entity and relation except the schema vocabulary, in an
/// order unrelated to the original one.
pub fn twin(source: &Ontology, spec: &TwinSpec) -> Result<Twin> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab = source.vocabulary().clone();

    let mut resources: Vec<String> = Vec::new();
    for i in 0..source.entity_count() {
        if let Term::Iri(iri) = source.term(crate::store::EntityId(i as u32)) {
            resources.push(iri.clone());
        }
    }
    let mut relations: Vec<String> = source
        .relations()
        .map(|r| source.relation_name(r).to_string())
        .filter(|n| !vocab.is_schema_relation(n))
        .collect();
    resources.shuffle(&mut rng);
    relations.shuffle(&mut rng);

    let mut rename: HashMap<String, String> = HashMap::new();
    for (n, iri) in resources.iter().enumerate() {
        if !vocab.is_schema_relation(iri) {
            rename.insert(iri.clone(), format!("{}e{n}", spec.prefix));
        }
    }
    for (n, name) in relations.iter().enumerate() {
        rename.insert(name.clone(), format!("{}r{n}", spec.prefix));
    }
    let renamed = |s: &str| rename.get(s).cloned().unwrap_or_else(|| s.to_string());

    let mut triples = Vec::new();
    let mut present: HashSet<String> = HashSet::new();
    for t in source.to_raw_triples() {
        let structural = t.predicate == vocab.subclass_iri || t.predicate == vocab.subproperty_iri;
        if !structural && rng.random_bool(spec.drop_rate) {
            continue;
        }
        let object = match t.object {
            Term::Iri(o) => {
                present.insert(o.clone());
                Term::Iri(renamed(&o))
            }
            Term::Literal(l) if rng.random_bool(spec.perturb_rate) => Term::Literal(Literal {
                lexical: perturb(&mut rng, &l.lexical),
                tag: l.tag,
            }),
            lit => lit,
        };
        present.insert(t.subject.clone());
        triples.push(RawTriple {
            subject: renamed(&t.subject),
            predicate: renamed(&t.predicate),
            object,
        });
    }

    let gold = |ids: &[crate::store::EntityId]| -> Result<GoldStandard> {
        let mut names: Vec<&String> = ids
            .iter()
            .filter_map(|&e| match source.term(e) {
                Term::Iri(i) if present.contains(i) => Some(i),
                _ => None,
            })
            .collect();
        names.sort();
        GoldStandard::new(names.into_iter().map(|n| (n.clone(), renamed(n))))
    };
    let mut relation_names: Vec<&String> = relations.iter().collect();
    relation_names.sort();
    Ok(Twin {
        instances: gold(source.instances())?,
        classes: gold(source.classes())?,
        relations: GoldStandard::new(relation_names.into_iter().map(|n| (n.clone(), renamed(n))))?,
        triples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeopleSpec {
    pub persons: usize,
    pub cities: usize,
    pub organizations: usize,
    pub seed: u64,
    pub namespace: String,
}

impl Default for PeopleSpec {
    fn default() -> Self {
        PeopleSpec {
            persons: 800,
            cities: 100,
            organizations: 100,
            seed: 1,
            namespace: "http://people.example.org/".into(),
        }
    }
}

const FIRST: &[&str] = &[
    "Ada", "Ben", "Cleo", "Dev", "Eli", "Fay", "Gus", "Hana", "Ivo", "Jun", "Kai", "Lena", "Milo",
    "Nia", "Omar", "Pia", "Quin", "Rosa", "Sami", "Tara",
];
const LAST: &[&str] = &[
    "Abbott", "Berg", "Costa", "Dahl", "Eze", "Frey", "Gallo", "Holm", "Ito", "Jensen", "Kovac",
    "Lund", "Moreau", "Novak", "Okafor", "Park", "Quist", "Rossi", "Sato", "Toth", "Udeh", "Vance",
    "Weber", "Young", "Zhou",
];

/// Persons, cities and organizations with ten relations:
/// `key`, `email`, `name`, `birthYear`, `gender`, `livesIn`, `worksFor`,
/// `knows`, `label` and `population`, plus a small class hierarchy.
pub fn people(spec: &PeopleSpec) -> Vec<RawTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ns = &spec.namespace;
    let vocab = crate::store::Vocabulary::default();
    let iri = |local: String| format!("{ns}{local}");
    let mut out = Vec::new();
    let mut fact = |s: String, p: &str, o: Term| out.push(RawTriple::new(s, iri(p.to_string()), o));

    let class = |c: &str| Term::Iri(iri(c.to_string()));
    let mut schema = Vec::new();
    for (sub, sup) in [
        ("Person", "Agent"),
        ("Organization", "Agent"),
        ("City", "Place"),
    ] {
        schema.push(RawTriple::new(
            iri(sub.into()),
            vocab.subclass_iri.clone(),
            class(sup),
        ));
    }

    let cities: Vec<String> = (0..spec.cities).map(|i| iri(format!("city{i}"))).collect();
    let orgs: Vec<String> = (0..spec.organizations)
        .map(|i| iri(format!("org{i}")))
        .collect();
    let persons: Vec<String> = (0..spec.persons)
        .map(|i| iri(format!("person{i}")))
        .collect();

    for (i, c) in cities.iter().enumerate() {
        fact(c.clone(), "label", Term::literal(format!("City {i}")));
        fact(
            c.clone(),
            "population",
            Term::literal(format!("{}", 10_000 + rng.random_range(0..2_000_000u32))),
        );
    }
    for (i, o) in orgs.iter().enumerate() {
        fact(o.clone(), "label", Term::literal(format!("Org {i} Ltd")));
    }
    for (i, p) in persons.iter().enumerate() {
        fact(p.clone(), "key", Term::literal(format!("K-{i:06}")));
        fact(
            p.clone(),
            "email",
            Term::literal(format!("user{i}@mail.example")),
        );
        if rng.random_bool(0.3) {
            fact(
                p.clone(),
                "email",
                Term::literal(format!("alt{i}@work.example")),
            );
        }
        let name = format!(
            "{} {}",
            FIRST[rng.random_range(0..FIRST.len())],
            LAST[rng.random_range(0..LAST.len())]
        );
        fact(p.clone(), "name", Term::literal(name));
        fact(
            p.clone(),
            "birthYear",
            Term::literal(format!("{}", rng.random_range(1940..2005))),
        );
        let gender = if rng.random_bool(0.5) {
            "female"
        } else {
            "male"
        };
        fact(p.clone(), "gender", Term::literal(gender));
        if !cities.is_empty() {
            fact(
                p.clone(),
                "livesIn",
                Term::Iri(cities[rng.random_range(0..cities.len())].clone()),
            );
        }
        if !orgs.is_empty() && rng.random_bool(0.8) {
            fact(
                p.clone(),
                "worksFor",
                Term::Iri(orgs[rng.random_range(0..orgs.len())].clone()),
            );
        }
        let mut known = BTreeSet::new();
        for _ in 0..rng.random_range(0..4) {
            let j = rng.random_range(0..persons.len());
            if j != i {
                known.insert(j);
            }
        }
        for j in known {
            fact(p.clone(), "knows", Term::Iri(persons[j].clone()));
        }
    }

    let typed = [
        ("City", &cities),
        ("Organization", &orgs),
        ("Person", &persons),
    ];
    for (c, members) in typed {
        for m in members.iter() {
            out.push(RawTriple::new(m.clone(), vocab.type_iri.clone(), class(c)));
        }
    }
    out.extend(schema);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestaurantSpec {
    /// Restaurants present in both ontologies.
    pub shared: usize,
    /// Restaurants only in the second ontology.
    pub extra: usize,
    /// Fraction of shared restaurants with formatting noise on one attribute.
    pub noisy_rate: f64,
    /// Fraction of shared restaurants with formatting noise on every attribute.
    pub fully_noisy_rate: f64,
    pub seed: u64,
}

impl Default for RestaurantSpec {
    fn default() -> Self {
        RestaurantSpec {
            shared: 112,
            extra: 40,
            noisy_rate: 0.3,
            fully_noisy_rate: 0.25,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RestaurantPair {
    pub first: Vec<RawTriple>,
    pub second: Vec<RawTriple>,
    pub gold: GoldStandard,
}

const WORDS: &[&str] = &[
    "Golden", "Dragon", "Bistro", "Garden", "Blue", "Olive", "Harbor", "Saffron", "Corner",
    "Lotus", "Copper", "Maple", "Royal", "Little", "Silver", "Spice", "Rustic", "Urban", "Cedar",
    "Velvet",
];
const KINDS: &[&str] = &[
    "Cafe",
    "Grill",
    "Kitchen",
    "Diner",
    "House",
    "Tavern",
    "Trattoria",
    "Cantina",
];
const STREETS: &[&str] = &[
    "La Cienega",
    "Sunset",
    "Melrose",
    "Wilshire",
    "Pico",
    "Olympic",
    "Fairfax",
    "Vermont",
];
const SUFFIXES: &[(&str, &str)] = &[("Blvd.", "Blvd"), ("Ave.", "Ave"), ("St.", "St")];

struct Restaurant {
    name: String,
    phone: (u32, u32, u32),
    number: u32,
    street: usize,
    suffix: usize,
}

/// Values of the first ontology and their reformatted counterparts; the
/// two differ only in case and punctuation.
fn render(r: &Restaurant, noisy: [bool; 3]) -> ([String; 3], [String; 3]) {
    let (a, b, c) = r.phone;
    let (suffix_dotted, suffix_plain) = SUFFIXES[r.suffix];
    let clean = [
        r.name.clone(),
        format!("{a}/{b}-{c:04}"),
        format!("{} S. {} {}", r.number, STREETS[r.street], suffix_dotted),
    ];
    let noisy_form = [
        r.name.to_lowercase().replace('\'', ""),
        format!("{a}-{b}-{c:04}"),
        format!("{} S {} {}", r.number, STREETS[r.street], suffix_plain),
    ];
    let second = std::array::from_fn(|i| {
        if noisy[i] {
            noisy_form[i].clone()
        } else {
            clean[i].clone()
        }
    });
    (clean, second)
}

/// Two restaurant listings with differently named relations and classes.
/// Every attribute value is unique after normalization.
pub fn restaurants(spec: &RestaurantSpec) -> Result<RestaurantPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab = crate::store::Vocabulary::default();
    let total = spec.shared + spec.extra;
    let mut seen_names = HashSet::new();
    let mut seen_phones = HashSet::new();
    let mut seen_streets = HashSet::new();
    let mut listing = Vec::with_capacity(total);
    while listing.len() < total {
        let r = Restaurant {
            name: format!(
                "{} {}'s {}",
                WORDS[rng.random_range(0..WORDS.len())],
                WORDS[rng.random_range(0..WORDS.len())],
                KINDS[rng.random_range(0..KINDS.len())]
            ),
            phone: (
                [213, 310, 323, 818][rng.random_range(0..4)],
                rng.random_range(200..1000),
                rng.random_range(0..10_000),
            ),
            number: rng.random_range(1..20_000),
            street: rng.random_range(0..STREETS.len()),
            suffix: rng.random_range(0..SUFFIXES.len()),
        };
        let street_key = (r.number, r.street);
        if seen_names.contains(&crate::literal::normalize(&r.name))
            || seen_phones.contains(&r.phone)
            || seen_streets.contains(&street_key)
        {
            continue;
        }
        seen_names.insert(crate::literal::normalize(&r.name));
        seen_phones.insert(r.phone);
        seen_streets.insert(street_key);
        listing.push(r);
    }

    let ns1 = "http://fodors.example.org/";
    let ns2 = "http://zagat.example.org/";
    let rel1 = ["name", "phone", "street"];
    let rel2 = ["title", "telephone", "address"];
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut gold = Vec::new();
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    for (i, r) in listing.iter().enumerate() {
        let noisy = if i >= spec.shared {
            [false; 3]
        } else if rng.random_bool(spec.fully_noisy_rate) {
            [true; 3]
        } else if rng.random_bool(spec.noisy_rate) {
            let mut n = [false; 3];
            n[rng.random_range(0..3)] = true;
            n
        } else {
            [false; 3]
        };
        let (a, b) = render(r, noisy);
        let s2 = format!("{ns2}place{}", order[i]);
        for k in 0..3 {
            second.push(RawTriple::new(
                s2.clone(),
                format!("{ns2}{}", rel2[k]),
                Term::literal(b[k].clone()),
            ));
        }
        second.push(RawTriple::new(
            s2.clone(),
            vocab.type_iri.clone(),
            Term::iri(format!("{ns2}Eatery")),
        ));
        if i < spec.shared {
            let s1 = format!("{ns1}restaurant{i}");
            for k in 0..3 {
                first.push(RawTriple::new(
                    s1.clone(),
                    format!("{ns1}{}", rel1[k]),
                    Term::literal(a[k].clone()),
                ));
            }
            first.push(RawTriple::new(
                s1.clone(),
                vocab.type_iri.clone(),
                Term::iri(format!("{ns1}Restaurant")),
            ));
            gold.push((s1, s2));
        }
    }
    Ok(RestaurantPair {
        first,
        second,
        gold: GoldStandard::new(gold)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::normalize;
    use crate::store::StoreConfig;

    #[test]
    fn people_shape() {
        let o = Ontology::finalize(people(&PeopleSpec::default()), &StoreConfig::default());
        assert_eq!(o.instances().len(), 1000);
        // ten fact relations plus the three schema relations
        assert_eq!(o.relation_count(), 12);
        assert_eq!(o.classes().len(), 5);
    }

    #[test]
    fn twin_without_noise_is_isomorphic() {
        let o = Ontology::finalize(
            people(&PeopleSpec {
                persons: 50,
                cities: 5,
                organizations: 5,
                ..Default::default()
            }),
            &StoreConfig::default(),
        );
        let t = twin(&o, &TwinSpec::default()).unwrap();
        let o2 = Ontology::finalize(t.triples.clone(), &StoreConfig::default());
        assert_eq!(o.stats().statements, o2.stats().statements);
        assert_eq!(t.instances.len(), 60);
        assert_eq!(t.relations.len(), 10);
        assert_eq!(t.classes.len(), 5);
        for (a, b) in t.instances.pairs() {
            assert_ne!(a, b);
            assert!(o2.lookup_iri(b).is_some());
        }
    }

    #[test]
    fn twin_is_seeded() {
        let o = Ontology::finalize(
            people(&PeopleSpec {
                persons: 30,
                ..Default::default()
            }),
            &StoreConfig::default(),
        );
        let spec = TwinSpec {
            drop_rate: 0.2,
            perturb_rate: 0.2,
            seed: 9,
            ..Default::default()
        };
        let a = twin(&o, &spec).unwrap();
        let b = twin(&o, &spec).unwrap();
        assert_eq!(a.triples, b.triples);
        assert!(a.triples.len() < o.statement_count());
    }

    #[test]
    fn restaurant_values_differ_only_in_format() {
        let pair = restaurants(&RestaurantSpec::default()).unwrap();
        assert_eq!(pair.gold.len(), 112);
        let lits = |ts: &[RawTriple]| -> Vec<String> {
            ts.iter()
                .filter_map(|t| match &t.object {
                    Term::Literal(l) => Some(normalize(&l.lexical)),
                    _ => None,
                })
                .collect()
        };
        let (a, b) = (lits(&pair.first), lits(&pair.second));
        let b_set: HashSet<&String> = b.iter().collect();
        assert!(a.iter().all(|v| b_set.contains(v)));
        assert_eq!(b_set.len(), b.len(), "normalized values are unique");
        assert!(
            render(
                &Restaurant {
                    name: "X".into(),
                    phone: (213, 467, 1108),
                    number: 1,
                    street: 0,
                    suffix: 0
                },
                [true; 3]
            )
            .1[1]
                == "213-467-1108"
        );
    }
}
