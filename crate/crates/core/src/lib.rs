//! Probabilistic alignment of two ontologies: instance equivalences,
//! sub-relations and subclasses, computed jointly by fixpoint iteration.
//!
//! ```
//! use ontalign::{align, Config, Ontology, StoreConfig, parse_str, Format};
//!
//! let a = "<a> <name> \"Ada\" .\n<a> <born> \"1815\" .\n";
//! let b = "<x> <label> \"Ada\" .\n<x> <year> \"1815\" .\n";
//! let cfg = StoreConfig::default();
//! let o1 = Ontology::finalize(parse_str(a, Format::NTriples)?, &cfg);
//! let o2 = Ontology::finalize(parse_str(b, Format::NTriples)?, &cfg);
//! let result = align(&o1, &o2, &Config::default())?;
//! let (partner, _) = result.assignment.get(o1.lookup_iri("a").unwrap()).unwrap();
//! assert_eq!(o2.term(partner).to_string(), "x");
//! # Ok::<(), ontalign::Error>(())
//! ```

pub mod align;
mod clock;
pub mod error;
pub mod eval;
pub mod functionality;
pub mod instances;
pub mod literal;
mod par;
pub mod prob;
pub mod schema;
pub mod store;
pub mod synthetic;

pub use align::{align, Aligner, AlignmentResult, Config, IterationDiagnostics};
pub use error::{Error, Result};
pub use eval::{evaluate, GoldStandard, Metrics};
pub use functionality::{FunctionalityStrategy, FunctionalityTable};
pub use instances::{EqualityTable, MaximalAssignment};
pub use literal::{LiteralSimKind, LiteralSimilarity};
pub use prob::Probability;
pub use schema::{SubclassTable, SubrelationTable};
pub use store::{parse_str, Format, Ontology, StoreConfig};
