use std::fmt;

use serde::Serialize;

/// Dense handle for a resource or literal within one ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EntityId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Instance,
    Class,
    Literal,
}

/// A relation of one ontology together with its polarity.
///
/// `inverted` selects the inverse view `r⁻¹`; statements are stored once and
/// the inverse is answered from the second index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationId {
    base: u32,
    inverted: bool,
}

impl RelationId {
    #[inline]
    pub const fn forward(base: u32) -> Self {
        RelationId {
            base,
            inverted: false,
        }
    }

    #[inline]
    pub const fn new(base: u32, inverted: bool) -> Self {
        RelationId { base, inverted }
    }

    #[inline]
    pub fn base(self) -> u32 {
        self.base
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.inverted
    }

    #[inline]
    pub fn inverse(self) -> Self {
        RelationId {
            base: self.base,
            inverted: !self.inverted,
        }
    }

    /// Position in a polarity-interleaved dense array (`2·base + inverted`).
    #[inline]
    pub fn slot(self) -> usize {
        self.base as usize * 2 + self.inverted as usize
    }
}

/// Literal value: lexical form plus optional datatype IRI or `@lang` tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub tag: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            tag: None,
        }
    }

    pub fn tagged(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            tag: Some(tag.into()),
        }
    }
}

impl fmt::Display for Literal {
    /// N-Triples literal syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")?;
        match &self.tag {
            Some(tag) if tag.starts_with('@') => f.write_str(tag),
            Some(tag) => write!(f, "^^<{tag}>"),
            None => Ok(()),
        }
    }
}

/// Surface form of an entity: an IRI (blank nodes included verbatim) or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(s))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl fmt::Display for Term {
    /// Bare IRI text for resources, N-Triples syntax for literals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => f.write_str(s),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

/// A parsed but not yet interned triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawTriple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

impl RawTriple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        RawTriple {
            subject: subject.into(),
            predicate: predicate.into(),
            object,
        }
    }
}

/// `relation(subject, object)` with a forward relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement {
    pub relation: RelationId,
    pub subject: EntityId,
    pub object: EntityId,
}

/// One adjacency entry: `relation(owner, other)` from the owner's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub relation: RelationId,
    pub other: EntityId,
}
