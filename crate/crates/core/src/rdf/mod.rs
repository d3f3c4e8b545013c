//! RDF terms, triples and graphs.
//!
//! The model has no blank nodes: every resource is named by an IRI, and
//! unknown entities are represented by skolem IRIs instead.

mod turtle;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab;

pub use turtle::serialize_turtle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("IRI is empty")]
    Empty,
    #[error("IRI `{0}` has no scheme")]
    MissingScheme(String),
    #[error("IRI `{iri}` contains forbidden character {ch:?}")]
    ForbiddenChar { iri: String, ch: char },
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, IriError> {
        let value = value.into();
        if value.is_empty() {
            return Err(IriError::Empty);
        }
        if let Some(ch) = value.chars().find(|&c| is_forbidden_iri_char(c)) {
            return Err(IriError::ForbiddenChar { iri: value, ch });
        }
        let colon = value.find(':');
        let slash = value.find('/');
        match (colon, slash) {
            (Some(0), _) | (None, _) => return Err(IriError::MissingScheme(value)),
            (Some(c), Some(s)) if s < c => return Err(IriError::MissingScheme(value)),
            _ => {}
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn is_exvar(&self) -> bool {
        vocab::is_exvar(&self.0)
    }

    /// Concatenates `suffix` onto this IRI, re-validating the result.
    pub fn join(&self, suffix: &str) -> Result<Iri, IriError> {
        Iri::new(format!("{}{}", self.0, suffix))
    }
}

/// Characters excluded from the Turtle `IRIREF` production.
fn is_forbidden_iri_char(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Iri {
    type Error = IriError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl TryFrom<&str> for Iri {
    type Error = IriError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

/// A literal value. Language tag and datatype are mutually exclusive; a
/// tagged literal implicitly has datatype `rdf:langString`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    lexical: String,
    language: Option<String>,
    datatype: Option<Iri>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            language: None,
            datatype: None,
        }
    }

    pub fn with_language(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            language: Some(language.into()),
            datatype: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            language: None,
            datatype: Some(datatype),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// The explicitly stored datatype, if any.
    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    /// The datatype as defined by RDF 1.1: `rdf:langString` for tagged
    /// literals, `xsd:string` for plain ones.
    pub fn effective_datatype(&self) -> &str {
        match (&self.language, &self.datatype) {
            (Some(_), _) => vocab::RDF_LANG_STRING,
            (None, Some(dt)) => dt.as_str(),
            (None, None) => "http://www.w3.org/2001/XMLSchema#string",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }

    /// Iterates over every IRI mentioned by the triple, including a
    /// literal's datatype.
    pub fn iris(&self) -> impl Iterator<Item = &Iri> {
        let object = match &self.object {
            Term::Iri(iri) => Some(iri),
            Term::Literal(lit) => lit.datatype(),
        };
        [&self.subject, &self.predicate].into_iter().chain(object)
    }
}

/// A set of triples together with the base IRI and prefix bindings used
/// when serializing it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdfGraph {
    base: Option<Iri>,
    prefixes: Vec<(String, Iri)>,
    triples: BTreeSet<Triple>,
}

impl RdfGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_base(base: Iri) -> Self {
        RdfGraph {
            base: Some(base),
            ..Self::default()
        }
    }

    pub fn base(&self) -> Option<&Iri> {
        self.base.as_ref()
    }

    pub fn set_base(&mut self, base: Option<Iri>) {
        self.base = base;
    }

    /// Prefix bindings in binding order.
    pub fn prefixes(&self) -> &[(String, Iri)] {
        &self.prefixes
    }

    /// Binds `label` to `namespace`. Rebinding an existing label replaces its
    /// namespace but keeps the label's original position.
    pub fn bind_prefix(&mut self, label: impl Into<String>, namespace: Iri) {
        let label = label.into();
        match self.prefixes.iter_mut().find(|(l, _)| *l == label) {
            Some(slot) => slot.1 = namespace,
            None => self.prefixes.push((label, namespace)),
        }
    }

    pub fn prefix(&self, label: &str) -> Option<&Iri> {
        self.prefixes
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, ns)| ns)
    }

    /// Inserts a triple. Returns `true` if the graph grew.
    pub fn add_triple(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    /// Consuming variant of [`RdfGraph::add_triple`].
    pub fn with_triple(mut self, triple: Triple) -> Self {
        self.add_triple(triple);
        self
    }

    pub fn remove_triple(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    /// Triples in canonical (subject, predicate, object) order.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Distinct subjects in sorted order.
    pub fn subjects(&self) -> BTreeSet<&Iri> {
        self.triples.iter().map(|t| &t.subject).collect()
    }

    /// Adds every triple of `other`, and every prefix of `other` whose label
    /// is not yet bound here.
    pub fn extend_from(&mut self, other: RdfGraph) {
        for (label, ns) in other.prefixes {
            if self.prefix(&label).is_none() {
                self.prefixes.push((label, ns));
            }
        }
        self.triples.extend(other.triples);
    }

    /// Rewrites every IRI through `map`, in subject, predicate, object and
    /// literal datatype position.
    pub fn map_iris(&mut self, mut map: impl FnMut(&Iri) -> Option<Iri>) {
        let mut rewrite = |iri: Iri| map(&iri).unwrap_or(iri);
        let old = std::mem::take(&mut self.triples);
        self.triples = old
            .into_iter()
            .map(|t| {
                let object = match t.object {
                    Term::Iri(iri) => Term::Iri(rewrite(iri)),
                    Term::Literal(Literal {
                        lexical,
                        language,
                        datatype,
                    }) => Term::Literal(Literal {
                        lexical,
                        language,
                        datatype: datatype.map(&mut rewrite),
                    }),
                };
                Triple {
                    subject: rewrite(t.subject),
                    predicate: rewrite(t.predicate),
                    object,
                }
            })
            .collect();
    }

    pub fn to_turtle(&self) -> String {
        serialize_turtle(self)
    }
}

impl Extend<Triple> for RdfGraph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter);
    }
}

/// Triple-set equality. Base and prefixes do not take part; without blank
/// nodes no isomorphism search is needed.
pub fn graph_equal(a: &RdfGraph, b: &RdfGraph) -> bool {
    a.triples == b.triples
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn asd2() -> (Triple, Triple) {
        (
            Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri(vocab::RDF_TYPE),
                iri("http://xmlns.com/foaf/0.1/Person"),
            ),
            Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri("http://xmlns.com/foaf/0.1/name"),
                Literal::plain("Roman Laas"),
            ),
        )
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://x/").is_ok());
        assert!(Iri::new("urn:uuid:1234").is_ok());
        assert_eq!(Iri::new(""), Err(IriError::Empty));
        assert!(matches!(Iri::new("Roman"), Err(IriError::MissingScheme(_))));
        assert!(matches!(Iri::new("a/b:c"), Err(IriError::MissingScheme(_))));
        assert!(matches!(Iri::new(":x"), Err(IriError::MissingScheme(_))));
        assert!(matches!(Iri::new("http://x/a b"), Err(IriError::ForbiddenChar { ch: ' ', .. })));
        assert!(matches!(Iri::new("http://x/<a>"), Err(IriError::ForbiddenChar { ch: '<', .. })));
    }

    #[test]
    fn iri_serde_validates() {
        let ok: Iri = serde_json::from_str("\"http://x/a\"").unwrap();
        assert_eq!(ok.as_str(), "http://x/a");
        assert!(serde_json::from_str::<Iri>("\"nope\"").is_err());
    }

    #[test]
    fn add_triple_to_empty_graph() {
        let (t, _) = asd2();
        let mut g = RdfGraph::new();
        assert!(g.add_triple(t.clone()));
        assert_eq!(g.len(), 1);
        assert!(g.contains(&t));
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let (t, u) = asd2();
        let mut g = RdfGraph::new().with_triple(t.clone()).with_triple(u);
        let before = g.clone();
        assert!(!g.add_triple(t));
        assert_eq!(g, before);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let (t, u) = asd2();
        let a = RdfGraph::new().with_triple(t.clone()).with_triple(u.clone());
        let b = RdfGraph::new().with_triple(u).with_triple(t);
        assert!(graph_equal(&a, &b));
        assert_eq!(a.to_turtle(), b.to_turtle());
    }

    #[test]
    fn graph_equal_ignores_prefixes_but_not_triples() {
        let (t, u) = asd2();
        let full = RdfGraph::new().with_triple(t.clone()).with_triple(u);
        let mut prefixed = full.clone();
        prefixed.bind_prefix("foaf", iri("http://xmlns.com/foaf/0.1/"));
        prefixed.set_base(Some(iri("http://fokus.fraunhofer.de/")));
        assert!(graph_equal(&full, &full));
        assert!(graph_equal(&full, &prefixed));
        let partial = RdfGraph::new().with_triple(t);
        assert!(!graph_equal(&full, &partial));
    }

    #[test]
    fn rebinding_a_prefix_replaces_in_place() {
        let mut g = RdfGraph::new();
        g.bind_prefix("ex", iri("http://a/"));
        g.bind_prefix("foaf", iri("http://xmlns.com/foaf/0.1/"));
        g.bind_prefix("ex", iri("http://b/"));
        assert_eq!(g.prefixes().len(), 2);
        assert_eq!(g.prefixes()[0], ("ex".to_string(), iri("http://b/")));
    }

    #[test]
    fn map_iris_rewrites_all_positions() {
        let (t, _) = asd2();
        let mut g = RdfGraph::new().with_triple(t);
        g.map_iris(|i| (i.as_str() == "http://fokus.fraunhofer.de/Roman").then(|| iri("http://x/R")));
        let subj: Vec<_> = g.subjects().into_iter().cloned().collect();
        assert_eq!(subj, vec![iri("http://x/R")]);
    }
}
