//! The alternating fixpoint: instance equalities, then sub-relation scores,
//! until the maximal assignment stops moving. Subclass scores are computed
//! once at the end.

use std::io::{self, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::functionality::{FunctionalityStrategy, FunctionalityTable};
use crate::instances::{
    score_all, EqualityTable, MaximalAssignment, NegativeReading, ScoringInputs, ScoringOptions,
};
use crate::literal::{literal_clamps, LiteralSimKind, LiteralSimilarity};
use crate::schema::{
    subclass_scores, subrelation_scores, SchemaOptions, SubclassTable, SubrelationTable, Truncation,
};
use crate::store::Ontology;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    /// Pruning threshold, and the iteration-1 inclusion constant unless
    /// `bootstrap_theta` is set.
    pub theta: f64,
    pub bootstrap_theta: Option<f64>,
    /// Statements per relation (instances per class) considered by the schema
    /// pass.
    pub pair_limit: usize,
    pub max_iterations: usize,
    pub negative_evidence: bool,
    pub negative_reading: NegativeReading,
    pub literal_sim: LiteralSimKind,
    /// Minimum edit similarity; defaults to `theta`.
    pub edit_cutoff: Option<f64>,
    pub functionality_strategy: FunctionalityStrategy,
    pub convergence_fraction: f64,
    /// Score against every stored equality of the previous round instead of
    /// its maximal assignment.
    pub use_full_equalities: bool,
    /// Decay rate `d`: iteration `k` moves scores by `d^(k-1)` of the way
    /// from the previous value to the new one.
    pub dampening: Option<f64>,
    pub truncation: Truncation,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            theta: 0.1,
            bootstrap_theta: None,
            pair_limit: 10_000,
            max_iterations: 10,
            negative_evidence: false,
            negative_reading: NegativeReading::ObjectEquality,
            literal_sim: LiteralSimKind::Exact,
            edit_cutoff: None,
            functionality_strategy: FunctionalityStrategy::Harmonic,
            convergence_fraction: 0.01,
            use_full_equalities: false,
            dampening: None,
            truncation: Truncation::First,
            threads: None,
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        open_unit("theta", self.theta)?;
        if let Some(b) = self.bootstrap_theta {
            open_unit("bootstrap_theta", b)?;
        }
        open_unit("convergence_fraction", self.convergence_fraction)?;
        if self.pair_limit == 0 {
            return Err(Error::Config("pair_limit must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if let Some(c) = self.edit_cutoff {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Config(format!(
                    "edit_cutoff must lie in [0, 1], got {c}"
                )));
            }
        }
        if let Some(d) = self.dampening {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Config(format!(
                    "dampening must lie in (0, 1], got {d}"
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    fn scoring(&self) -> ScoringOptions {
        ScoringOptions {
            theta: self.theta,
            negative_evidence: self.negative_evidence,
            negative_reading: self.negative_reading,
        }
    }

    fn schema(&self) -> SchemaOptions {
        SchemaOptions {
            theta: self.theta,
            pair_limit: self.pair_limit,
            truncation: self.truncation,
        }
    }
}

/// One line of the JSON-lines diagnostics log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationDiagnostics {
    pub iteration: usize,
    pub changed_fraction: f64,
    pub eq_entries: usize,
    pub assigned: usize,
    pub subrel_entries: usize,
    pub seconds: f64,
}

pub fn write_diagnostics_jsonl<W: Write>(
    mut w: W,
    diagnostics: &[IterationDiagnostics],
) -> io::Result<()> {
    for d in diagnostics {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// Instance equalities of the last iteration.
    pub equalities: EqualityTable,
    pub literal_equalities: EqualityTable,
    pub assignment: MaximalAssignment,
    pub subrelations: SubrelationTable,
    pub subclasses: SubclassTable,
    pub diagnostics: Vec<IterationDiagnostics>,
    pub converged: bool,
}

/// State at the end of one iteration, handed to observers.
pub struct IterationSnapshot<'a> {
    pub diagnostics: &'a IterationDiagnostics,
    pub equalities: &'a EqualityTable,
    pub assignment: &'a MaximalAssignment,
    pub subrelations: &'a SubrelationTable,
}

/// Entities whose partner differs, gained or lost, over entities assigned in
/// either. 0 when both are empty.
pub fn changed_fraction(prev: &MaximalAssignment, next: &MaximalAssignment) -> f64 {
    let mut changed = 0usize;
    let mut union = 0usize;
    let mut count = |a: Option<(_, f64)>, b: Option<(_, f64)>| {
        let (a, b) = (
            a.map(|e: (crate::store::EntityId, f64)| e.0),
            b.map(|e| e.0),
        );
        if a.is_some() || b.is_some() {
            union += 1;
            changed += (a != b) as usize;
        }
    };
    for (x, y, p) in prev.iter() {
        count(Some((y, p)), next.get(x));
    }
    for (x, y, p) in next.iter() {
        if prev.get(x).is_none() {
            count(None, Some((y, p)));
        }
    }
    if union == 0 {
        0.0
    } else {
        changed as f64 / union as f64
    }
}

pub fn has_converged(prev: &MaximalAssignment, next: &MaximalAssignment, fraction: f64) -> bool {
    (prev.is_empty() && next.is_empty()) || changed_fraction(prev, next) < fraction
}

fn dampen(
    previous: &EqualityTable,
    next: &EqualityTable,
    weight: f64,
    theta: f64,
) -> EqualityTable {
    let mut out = EqualityTable::new();
    for (x, y, p) in next.iter() {
        let old = previous.get(x, y);
        out.insert(x, y, old + weight * (p - old));
    }
    for (x, y, old) in previous.iter() {
        if next.get(x, y) == 0.0 {
            out.insert(x, y, old * (1.0 - weight));
        }
    }
    out.prune(theta);
    out
}

type Observer<'a> = Box<dyn FnMut(&IterationSnapshot<'_>) + Send + 'a>;

/// Configurable entry point. [`align`] covers the common case.
pub struct Aligner<'a> {
    config: Config,
    similarity: Option<Arc<dyn LiteralSimilarity>>,
    observer: Option<Observer<'a>>,
}

impl<'a> Aligner<'a> {
    pub fn new(config: Config) -> Self {
        Aligner {
            config,
            similarity: None,
            observer: None,
        }
    }

    /// Replaces the similarity selected by `config.literal_sim`.
    pub fn with_similarity(mut self, sim: Arc<dyn LiteralSimilarity>) -> Self {
        self.similarity = Some(sim);
        self
    }

    pub fn on_iteration(mut self, f: impl FnMut(&IterationSnapshot<'_>) + Send + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run(mut self, o1: &Ontology, o2: &Ontology) -> Result<AlignmentResult> {
        self.config.validate()?;
        match self.config.threads {
            #[cfg(feature = "parallel")]
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?;
                pool.install(|| self.iterate(o1, o2))
            }
            _ => self.iterate(o1, o2),
        }
    }

    fn iterate(&mut self, o1: &Ontology, o2: &Ontology) -> Result<AlignmentResult> {
        let cfg = &self.config;
        let sim = self
            .similarity
            .clone()
            .unwrap_or_else(|| cfg.literal_sim.build(cfg.edit_cutoff.unwrap_or(cfg.theta)));
        let funs1 = FunctionalityTable::compute(o1, cfg.functionality_strategy);
        let funs2 = FunctionalityTable::compute(o2, cfg.functionality_strategy);
        let literals = literal_clamps(o1, o2, sim.as_ref(), cfg.theta);
        let literal_view = if cfg.use_full_equalities {
            literals.clone()
        } else {
            MaximalAssignment::from_table(&literals).to_table()
        };

        let mut subrelations =
            SubrelationTable::bootstrap(cfg.bootstrap_theta.unwrap_or(cfg.theta));
        let mut equalities = EqualityTable::new();
        let mut assignment = MaximalAssignment::default();
        let mut view = literal_view.clone();
        let mut diagnostics = Vec::new();
        let mut converged = false;

        for iteration in 1..=cfg.max_iterations {
            let clock = Stopwatch::start();
            let inputs = ScoringInputs {
                o1,
                o2,
                funs1: &funs1,
                funs2: &funs2,
                subrelations: &subrelations,
                previous: &view,
            };
            let mut next = score_all(&inputs, &cfg.scoring());
            if let (Some(d), true) = (cfg.dampening, iteration > 1) {
                next = dampen(&equalities, &next, d.powi(iteration as i32 - 1), cfg.theta);
            }
            next.set_iteration(iteration);
            let next_assignment = MaximalAssignment::from_table(&next);
            let changed = changed_fraction(&assignment, &next_assignment);
            converged = has_converged(&assignment, &next_assignment, cfg.convergence_fraction);

            view = if cfg.use_full_equalities {
                next.clone()
            } else {
                next_assignment.to_table()
            };
            view.merge(&literal_view);
            subrelations = subrelation_scores(o1, o2, &view, &cfg.schema());
            equalities = next;
            assignment = next_assignment;

            let d = IterationDiagnostics {
                iteration,
                changed_fraction: changed,
                eq_entries: equalities.len(),
                assigned: assignment.len(),
                subrel_entries: subrelations.len(),
                seconds: clock.seconds(),
            };
            if let Some(observer) = self.observer.as_mut() {
                observer(&IterationSnapshot {
                    diagnostics: &d,
                    equalities: &equalities,
                    assignment: &assignment,
                    subrelations: &subrelations,
                });
            }
            diagnostics.push(d);
            if converged {
                break;
            }
        }

        let subclasses = subclass_scores(o1, o2, &view, &cfg.schema());
        Ok(AlignmentResult {
            equalities,
            literal_equalities: literals,
            assignment,
            subrelations,
            subclasses,
            diagnostics,
            converged,
        })
    }
}

/// Runs the full pipeline with the similarity named in `config`.
pub fn align(o1: &Ontology, o2: &Ontology, config: &Config) -> Result<AlignmentResult> {
    Aligner::new(config.clone()).run(o1, o2)
}
