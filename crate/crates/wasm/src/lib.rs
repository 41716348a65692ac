//! Browser bindings. Every export takes plain values and returns a JSON
//! string; the `*_json` functions behind them are ordinary Rust and are
//! what the tests call.

use ontalign::eval::evaluate;
use ontalign::functionality::{FunctionalityStrategy, FunctionalityTable};
use ontalign::literal::{EditSimilarity, ExactEquality, LiteralSimilarity, NormalizedEquality};
use ontalign::store::{parse_str, write_triples, Format, Literal, RawTriple, StoreConfig};
use ontalign::synthetic::{restaurants, RestaurantSpec};
use ontalign::{Aligner, AlignmentResult, Config, Metrics, Ontology};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Match {
    first: String,
    second: String,
    score: f64,
}

#[derive(Serialize)]
struct Inclusion {
    first: String,
    direction: &'static str,
    second: String,
    score: f64,
}

#[derive(Serialize)]
struct Iteration {
    iteration: usize,
    changed_fraction: f64,
    assigned: usize,
}

#[derive(Serialize)]
struct AlignmentView {
    converged: bool,
    iterations: Vec<Iteration>,
    matches: Vec<Match>,
    relations: Vec<Inclusion>,
    classes: Vec<Inclusion>,
}

impl AlignmentView {
    fn new(result: &AlignmentResult, o1: &Ontology, o2: &Ontology) -> Self {
        let matches = result
            .assignment
            .iter()
            .map(|(x, y, score)| Match {
                first: o1.term(x).to_string(),
                second: o2.term(y).to_string(),
                score,
            })
            .collect();
        let relations = result
            .subrelations
            .entries()
            .into_iter()
            .map(|(dir, r, r2, score)| Inclusion {
                first: o1.relation_label(r),
                direction: dir.label(),
                second: o2.relation_label(r2),
                score,
            })
            .collect();
        let classes = result
            .subclasses
            .entries()
            .into_iter()
            .map(|(dir, c, c2, score)| Inclusion {
                first: o1.term(c).to_string(),
                direction: dir.label(),
                second: o2.term(c2).to_string(),
                score,
            })
            .collect();
        let iterations = result
            .diagnostics
            .iter()
            .map(|d| Iteration {
                iteration: d.iteration,
                changed_fraction: d.changed_fraction,
                assigned: d.assigned,
            })
            .collect();
        AlignmentView {
            converged: result.converged,
            iterations,
            matches,
            relations,
            classes,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn load(text: &str, format: &str) -> Result<Ontology, String> {
    let format: Format = format.parse().map_err(|e: ontalign::Error| e.to_string())?;
    let raw = parse_str(text, format).map_err(|e| e.to_string())?;
    Ok(Ontology::finalize(raw, &StoreConfig::default()))
}

fn config(theta: f64, literal_sim: &str, negative_evidence: bool) -> Result<Config, String> {
    let config = Config {
        theta,
        literal_sim: literal_sim
            .parse()
            .map_err(|e: ontalign::Error| e.to_string())?,
        negative_evidence,
        ..Config::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

pub fn align_json(
    first: &str,
    second: &str,
    format: &str,
    theta: f64,
    literal_sim: &str,
    negative_evidence: bool,
) -> Result<String, String> {
    let config = config(theta, literal_sim, negative_evidence)?;
    let o1 = load(first, format)?;
    let o2 = load(second, format)?;
    let result = Aligner::new(config)
        .run(&o1, &o2)
        .map_err(|e| e.to_string())?;
    to_json(&AlignmentView::new(&result, &o1, &o2))
}

#[derive(Serialize)]
struct RestaurantView {
    first: String,
    second: String,
    metrics: Metrics,
    alignment: AlignmentView,
    wrong: Vec<Match>,
}

fn tsv(triples: &[RawTriple]) -> Result<String, String> {
    let mut buf = Vec::new();
    write_triples(&mut buf, triples, Format::Tsv).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

pub fn restaurant_json(
    noisy_rate: f64,
    fully_noisy_rate: f64,
    seed: u64,
    theta: f64,
    literal_sim: &str,
    negative_evidence: bool,
) -> Result<String, String> {
    for rate in [noisy_rate, fully_noisy_rate] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(format!("noise rates must lie in [0, 1], got {rate}"));
        }
    }
    let config = config(theta, literal_sim, negative_evidence)?;
    let pair = restaurants(&RestaurantSpec {
        noisy_rate,
        fully_noisy_rate,
        seed,
        ..RestaurantSpec::default()
    })
    .map_err(|e| e.to_string())?;
    let first = tsv(&pair.first)?;
    let second = tsv(&pair.second)?;
    let o1 = Ontology::finalize(pair.first, &StoreConfig::default());
    let o2 = Ontology::finalize(pair.second, &StoreConfig::default());
    let result = Aligner::new(config)
        .run(&o1, &o2)
        .map_err(|e| e.to_string())?;
    let metrics = evaluate(&result.assignment, &o1, &o2, &pair.gold);
    let alignment = AlignmentView::new(&result, &o1, &o2);
    let wrong = alignment
        .matches
        .iter()
        .filter(|m| !pair.gold.contains(&m.first, &m.second))
        .map(|m| Match {
            first: m.first.clone(),
            second: m.second.clone(),
            score: m.score,
        })
        .collect();
    to_json(&RestaurantView {
        first,
        second,
        metrics,
        alignment,
        wrong,
    })
}

#[derive(Serialize)]
struct LiteralScores {
    exact: f64,
    normalized: f64,
    edit: f64,
}

pub fn compare_json(a: &str, b: &str, edit_cutoff: f64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&edit_cutoff) {
        return Err(format!("cutoff must lie in [0, 1], got {edit_cutoff}"));
    }
    let (a, b) = (Literal::plain(a), Literal::plain(b));
    to_json(&LiteralScores {
        exact: ExactEquality.similarity(&a, &b),
        normalized: NormalizedEquality.similarity(&a, &b),
        edit: EditSimilarity {
            cutoff: edit_cutoff,
        }
        .similarity(&a, &b),
    })
}

#[derive(Serialize)]
struct FunctionalityRow {
    relation: String,
    fun: f64,
    inverse_fun: f64,
    statements: usize,
}

pub fn functionality_json(text: &str, format: &str, strategy: &str) -> Result<String, String> {
    let strategy: FunctionalityStrategy = strategy
        .parse()
        .map_err(|e: ontalign::Error| e.to_string())?;
    let o = load(text, format)?;
    let table = FunctionalityTable::compute(&o, strategy);
    let rows: Vec<FunctionalityRow> = o
        .relations()
        .filter_map(|r| {
            table.entry(r.base()).map(|e| FunctionalityRow {
                relation: o.relation_name(r).to_string(),
                fun: e.forward,
                inverse_fun: e.inverse,
                statements: e.statements,
            })
        })
        .collect();
    to_json(&rows)
}

#[wasm_bindgen]
pub fn align(
    first: &str,
    second: &str,
    format: &str,
    theta: f64,
    literal_sim: &str,
    negative_evidence: bool,
) -> Result<String, JsError> {
    align_json(first, second, format, theta, literal_sim, negative_evidence)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn restaurant_demo(
    noisy_rate: f64,
    fully_noisy_rate: f64,
    seed: u32,
    theta: f64,
    literal_sim: &str,
    negative_evidence: bool,
) -> Result<String, JsError> {
    restaurant_json(
        noisy_rate,
        fully_noisy_rate,
        u64::from(seed),
        theta,
        literal_sim,
        negative_evidence,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare_literals(a: &str, b: &str, edit_cutoff: f64) -> Result<String, JsError> {
    compare_json(a, b, edit_cutoff).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn functionality(text: &str, format: &str, strategy: &str) -> Result<String, JsError> {
    functionality_json(text, format, strategy).map_err(|e| JsError::new(&e))
}
