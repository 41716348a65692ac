//! Property checks shared by the proptest suite and the acceptance runner.

use ontalign::align::{align, Config};
use ontalign::functionality::{
    global_functionality, local_functionality, FunctionalityStrategy, FunctionalityTable,
};
use ontalign::instances::{
    score_all, EqualityTable, MaximalAssignment, ScoringInputs, ScoringOptions,
};
use ontalign::prob::{expected_count, p_exists, p_forall, NoisyOr, Probability};
use ontalign::schema::{subclass_scores, subrelation_scores, SchemaOptions, SubrelationTable};
use ontalign::store::{EntityId, Ontology};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fixture, Fixture, Shape};

pub type Outcome = Result<(), TestCaseError>;

pub fn probabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64], 0..24)
}

fn probs(values: &[f64]) -> Vec<Probability> {
    values
        .iter()
        .map(|&v| Probability::new(v).unwrap())
        .collect()
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn scores(
    f: &Fixture,
    subrelations: &SubrelationTable,
    previous: &EqualityTable,
    theta: f64,
) -> EqualityTable {
    let funs1 = FunctionalityTable::compute(&f.o1, FunctionalityStrategy::Harmonic);
    let funs2 = FunctionalityTable::compute(&f.o2, FunctionalityStrategy::Harmonic);
    let inputs = ScoringInputs {
        o1: &f.o1,
        o2: &f.o2,
        funs1: &funs1,
        funs2: &funs2,
        subrelations,
        previous,
    };
    score_all(
        &inputs,
        &ScoringOptions {
            theta,
            ..Default::default()
        },
    )
}

fn schema_opts() -> SchemaOptions {
    SchemaOptions {
        theta: 1e-9,
        pair_limit: usize::MAX,
        ..Default::default()
    }
}

/// Every combinator and every stored score stays in `[0, 1]`.
pub fn probability_range(values: &[f64], seed: u64) -> Outcome {
    let ps = probs(values);
    prop_assert!(in_unit(p_exists(ps.iter().copied()).value()));
    prop_assert!(in_unit(p_forall(ps.iter().copied()).value()));
    let mut acc = NoisyOr::new();
    for &v in values {
        acc.absorb(v);
        prop_assert!(in_unit(acc.value()));
    }
    let count = expected_count(ps.iter().copied());
    prop_assert!(count >= 0.0 && count <= values.len() as f64 + 1e-9);

    let f = fixture(seed, Shape::SMALL);
    let theta = 0.05;
    let eq = scores(&f, &f.subrelations, &f.previous, theta);
    for (_, _, p) in eq.iter() {
        prop_assert!(p >= theta && p <= 1.0, "instance score {}", p);
    }
    let sub = subrelation_scores(&f.o1, &f.o2, &f.previous, &schema_opts());
    for (_, _, _, p) in sub.entries() {
        prop_assert!(p > 0.0 && p <= 1.0, "relation score {}", p);
    }
    let cls = subclass_scores(&f.o1, &f.o2, &f.previous, &schema_opts());
    for (_, _, _, p) in cls.entries() {
        prop_assert!(p > 0.0 && p <= 1.0, "class score {}", p);
    }
    Ok(())
}

/// Empty existentials are false, empty universals true, and neutral
/// elements change nothing.
pub fn empty_products(values: &[f64], seed: u64) -> Outcome {
    prop_assert_eq!(p_exists(std::iter::empty()).value(), 0.0);
    prop_assert_eq!(p_forall(std::iter::empty()).value(), 1.0);
    prop_assert_eq!(expected_count(std::iter::empty()), 0.0);
    prop_assert_eq!(NoisyOr::new().value(), 0.0);

    let ps = probs(values);
    let with_zero = ps.iter().copied().chain([Probability::ZERO]);
    prop_assert_eq!(
        p_exists(with_zero).value(),
        p_exists(ps.iter().copied()).value()
    );
    let with_one = ps.iter().copied().chain([Probability::ONE]);
    prop_assert_eq!(
        p_forall(with_one).value(),
        p_forall(ps.iter().copied()).value()
    );

    let f = fixture(seed, Shape::SMALL);
    let eq = scores(&f, &f.subrelations, &f.previous, 0.01);
    for &x in f.o1.instances() {
        if f.o1.facts(x).is_empty() {
            prop_assert!(eq.partners(x).is_empty());
        }
    }
    Ok(())
}

/// `fun(r)·N = S` for both polarities of every relation.
pub fn harmonic_identity(seed: u64) -> Outcome {
    let f = fixture(seed, Shape::SMALL);
    for o in [&f.o1, &f.o2] {
        let table = FunctionalityTable::compute(o, FunctionalityStrategy::Harmonic);
        for r in o.relations() {
            let stats = o.relation_stats(r.base());
            let n = stats.statements as f64;
            let fwd = table.fun(r) * n;
            let inv = table.fun(r.inverse()) * n;
            prop_assert!((fwd - stats.subjects as f64).abs() <= 1e-9 * n.max(1.0));
            prop_assert!((inv - stats.objects as f64).abs() <= 1e-9 * n.max(1.0));
        }
    }
    Ok(())
}

fn subjects(o: &Ontology, r: ontalign::store::RelationId) -> Vec<EntityId> {
    let mut out: Vec<EntityId> = o
        .statements_of(r.base())
        .iter()
        .map(|s| if r.is_inverse() { s.object } else { s.subject })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The subjects-over-statements estimator equals the harmonic mean of the
/// local functionalities, computed directly.
pub fn harmonic_mean_equivalence(seed: u64) -> Outcome {
    let f = fixture(seed, Shape::SMALL);
    for o in [&f.o1, &f.o2] {
        for r in o.relations().flat_map(|r| [r, r.inverse()]) {
            let locals: Vec<f64> = subjects(o, r)
                .into_iter()
                .map(|x| local_functionality(o, r, x).expect("subject has an object"))
                .collect();
            let harmonic = locals.len() as f64 / locals.iter().map(|l| 1.0 / l).sum::<f64>();
            let global = global_functionality(o, r, FunctionalityStrategy::Harmonic).unwrap();
            prop_assert!(
                (harmonic - global).abs() <= 1e-12,
                "{} vs {}",
                harmonic,
                global
            );
        }
    }
    Ok(())
}

/// Explicit zero entries behave exactly like missing ones.
pub fn unknown_as_zero(seed: u64) -> Outcome {
    let f = fixture(seed, Shape::SMALL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut previous = f.previous.clone();
    let o1_all: Vec<EntityId> =
        f.o1.instances()
            .iter()
            .chain(f.o1.literals())
            .copied()
            .collect();
    let o2_all: Vec<EntityId> =
        f.o2.instances()
            .iter()
            .chain(f.o2.literals())
            .copied()
            .collect();
    let draws = if o1_all.is_empty() || o2_all.is_empty() {
        0
    } else {
        20
    };
    for _ in 0..draws {
        let x = o1_all[rng.random_range(0..o1_all.len())];
        let y = o2_all[rng.random_range(0..o2_all.len())];
        if f.previous.get(x, y) == 0.0 {
            previous.insert(x, y, 0.0);
        }
    }
    let mut subrelations = f.subrelations.clone();
    for r in f.o1.relations() {
        for r2 in f.o2.relations().flat_map(|r| [r, r.inverse()]) {
            if f.subrelations.first_in_second(r, r2) == 0.0 {
                subrelations.insert_first_in_second(r, r2, 0.0);
            }
            if f.subrelations.second_in_first(r2, r) == 0.0 {
                subrelations.insert_second_in_first(r2, r, 0.0);
            }
        }
    }
    prop_assert_eq!(
        scores(&f, &f.subrelations, &f.previous, 0.01),
        scores(&f, &subrelations, &previous, 0.01)
    );
    let opts = schema_opts();
    prop_assert_eq!(
        subrelation_scores(&f.o1, &f.o2, &f.previous, &opts).entries(),
        subrelation_scores(&f.o1, &f.o2, &previous, &opts).entries()
    );
    prop_assert_eq!(
        subclass_scores(&f.o1, &f.o2, &f.previous, &opts),
        subclass_scores(&f.o1, &f.o2, &previous, &opts)
    );
    Ok(())
}

/// The maximal assignment ignores insertion order and breaks ties toward
/// the smallest partner id.
pub fn tie_determinism(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for x in 0..rng.random_range(1..30u32) {
        for y in 0..rng.random_range(0..8u32) {
            if rng.random_bool(0.6) {
                entries.push((
                    EntityId(x),
                    EntityId(y),
                    [0.25, 0.5, 1.0][rng.random_range(0..3)],
                ));
            }
        }
    }
    let build = |entries: &[(EntityId, EntityId, f64)]| {
        let mut t = EqualityTable::new();
        for &(x, y, p) in entries {
            t.insert(x, y, p);
        }
        MaximalAssignment::from_table(&t)
    };
    let first = build(&entries);
    entries.shuffle(&mut rng);
    let second = build(&entries);
    prop_assert_eq!(&first, &second);
    for (x, y, p) in first.iter() {
        let best = entries
            .iter()
            .filter(|e| e.0 == x)
            .map(|e| e.2)
            .fold(0.0f64, f64::max);
        let smallest = entries
            .iter()
            .filter(|e| e.0 == x && e.2 == best)
            .map(|e| e.1)
            .min()
            .unwrap();
        prop_assert_eq!((y, p), (smallest, best));
    }
    Ok(())
}

/// Bit-identical results for 1, 2 and 4 workers.
pub fn worker_determinism(seed: u64) -> Outcome {
    let f = fixture(seed, Shape::SMALL);
    let run = |threads| {
        let cfg = Config {
            theta: 0.05,
            threads: Some(threads),
            ..Config::default()
        };
        align(&f.o1, &f.o2, &cfg).unwrap()
    };
    let base = run(1);
    for threads in [2, 4] {
        let other = run(threads);
        prop_assert_eq!(&base.equalities, &other.equalities);
        prop_assert_eq!(&base.assignment, &other.assignment);
        let bits = |t: &ontalign::SubrelationTable| {
            t.entries()
                .into_iter()
                .map(|e| (e.0, e.1, e.2, e.3.to_bits()))
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(bits(&base.subrelations), bits(&other.subrelations));
        prop_assert_eq!(&base.subclasses, &other.subclasses);
        prop_assert_eq!(base.diagnostics.len(), other.diagnostics.len());
    }
    Ok(())
}
