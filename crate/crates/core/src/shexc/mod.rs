//! The ShExC subset used as template language.
//!
//! Supported: `BASE` and `PREFIX` directives, comments, shape declarations in
//! braced and single-constraint shorthand form, value sets, node kind,
//! datatype and facet constraints, nested anonymous shapes, shape references
//! (`@`), labeled triple expressions (`$label ( ... )`) and their references
//! (`&`), inverse constraints and cardinalities. `IMPORT` is rejected.
//!
//! Lines of the form `#in: exVar:a, exVar:b` and `#out: ...` directly inside a
//! top-level shape's braces declare the shape's input and output variables.
//! They are comments to any other ShEx processor.

mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{Iri, Term};
use crate::vocab;

pub use parser::parse_schema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Direction of an IO variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Shape,
    TripleExpression,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelKind::Shape => "shape",
            LabelKind::TripleExpression => "triple expression",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShexError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{pos}: unsupported directive {directive}")]
    UnsupportedDirective { pos: Position, directive: String },
    #[error("{pos}: unknown prefix `{prefix}:`")]
    UnknownPrefix { pos: Position, prefix: String },
    #[error("{pos}: relative IRI <{iri}> but no BASE is declared")]
    NoBase { pos: Position, iri: String },
    #[error("{pos}: duplicate {kind} label <{label}>")]
    DuplicateLabel {
        pos: Position,
        kind: LabelKind,
        label: Iri,
    },
    #[error("{pos}: unresolved {kind} reference <{label}>")]
    UnresolvedReference {
        pos: Position,
        kind: LabelKind,
        label: Iri,
    },
    #[error("{pos}: triple expression <{label}> references itself")]
    CyclicReference { pos: Position, label: Iri },
    #[error("{pos}: second #{direction}: annotation in one shape")]
    DuplicateAnnotation { pos: Position, direction: Direction },
}

impl ShexError {
    pub fn position(&self) -> Position {
        match self {
            ShexError::Syntax { pos, .. }
            | ShexError::UnsupportedDirective { pos, .. }
            | ShexError::UnknownPrefix { pos, .. }
            | ShexError::NoBase { pos, .. }
            | ShexError::DuplicateLabel { pos, .. }
            | ShexError::UnresolvedReference { pos, .. }
            | ShexError::CyclicReference { pos, .. }
            | ShexError::DuplicateAnnotation { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShexSchema {
    pub base: Option<Iri>,
    /// Prefix bindings in declaration order.
    pub prefixes: Vec<(String, Iri)>,
    pub shapes: Vec<ShapeDecl>,
    pub triple_expr_labels: BTreeMap<Iri, TripleExprGroup>,
    /// The text the schema was parsed from.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeDecl {
    pub label: ShapeLabel,
    pub inputs: Vec<Iri>,
    pub outputs: Vec<Iri>,
    pub body: TripleExprGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeLabel {
    Named(Iri),
    /// Nested shape without a label, numbered in pre-order across the schema.
    Anonymous(u32),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleExprGroup {
    pub items: Vec<TripleExprItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleExprItem {
    Constraint(TripleConstraintDecl),
    /// `&label`
    ExprRef(Iri),
    /// `$label ( ... )`
    Labeled(Iri, TripleExprGroup),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleConstraintDecl {
    pub inverse: bool,
    pub predicate: Iri,
    pub value_expr: ValueExpr,
    pub cardinality: Cardinality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueExpr {
    Node(NodeConstraintDecl),
    Nested(Box<ShapeDecl>),
    ShapeRef(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cardinality {
    pub min: u32,
    /// `None` is unbounded.
    pub max: Option<u32>,
}

impl Cardinality {
    pub const ONE: Cardinality = Cardinality { min: 1, max: Some(1) };

    /// `{0}`: the constraint forbids matching triples.
    pub fn is_negative(&self) -> bool {
        self.max == Some(0)
    }
}

impl Default for Cardinality {
    fn default() -> Self {
        Cardinality::ONE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeConstraintDecl {
    ValueSet(Vec<ValueSetValue>),
    NodeKind { kind: NodeKind, facets: Vec<Facet> },
    Datatype { datatype: Iri, facets: Vec<Facet> },
    Facets(Vec<Facet>),
    /// `.`
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSetValue {
    Term(Term),
    ExVar(Iri),
    /// A language-tag value such as `@en`; restricts literal languages and
    /// never generates a triple.
    Language(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Iri,
    BNode,
    Literal,
    NonLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Facet {
    String(StringFacet),
    Numeric(NumericFacet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StringFacet {
    Length(u64),
    MinLength(u64),
    MaxLength(u64),
    Pattern { pattern: String, flags: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericFacet {
    pub kind: NumericFacetKind,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericFacetKind {
    MinInclusive,
    MinExclusive,
    MaxInclusive,
    MaxExclusive,
    TotalDigits,
    FractionDigits,
}

impl ShexSchema {
    /// The first top-level shape; the one whose annotations define a
    /// template's IO variables.
    pub fn primary_shape(&self) -> Option<&ShapeDecl> {
        self.shapes.first()
    }

    pub fn prefix(&self, label: &str) -> Option<&Iri> {
        self.prefixes
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, ns)| ns)
    }

    /// Resolves `<iri>` (absolute, or relative against `BASE` by
    /// concatenation) or `label:local` against this schema's directives.
    pub fn resolve_term(&self, token: &str) -> Result<Iri, ShexError> {
        parser::resolve_token(self, token.trim())
    }

    /// Shortest readable form of `iri` under this schema's prefixes.
    pub fn compact_iri(&self, iri: &Iri) -> String {
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.as_str().len());
        match best {
            Some((label, ns)) => {
                let local = &iri.as_str()[ns.as_str().len()..];
                if local.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-')) {
                    return format!("{label}:{local}");
                }
                format!("<{iri}>")
            }
            None => format!("<{iri}>"),
        }
    }

    /// Number of anonymous shapes, i.e. one past the largest ordinal.
    pub fn anonymous_shape_count(&self) -> u32 {
        fn walk(group: &TripleExprGroup, max: &mut Option<u32>) {
            for item in &group.items {
                match item {
                    TripleExprItem::Constraint(tc) => {
                        if let ValueExpr::Nested(shape) = &tc.value_expr {
                            if let ShapeLabel::Anonymous(n) = shape.label {
                                *max = Some(max.map_or(n, |m: u32| m.max(n)));
                            }
                            walk(&shape.body, max);
                        }
                    }
                    TripleExprItem::Labeled(_, inner) => walk(inner, max),
                    TripleExprItem::ExprRef(_) => {}
                }
            }
        }
        let mut max = None;
        for shape in &self.shapes {
            walk(&shape.body, &mut max);
        }
        max.map_or(0, |m| m + 1)
    }
}

/// Every exVar IRI used as a shape label, value-set member, shape reference
/// target or IO annotation, each once, in order of first occurrence when
/// walking shapes in declaration order (label, inputs, outputs, body).
pub fn collect_exvars(schema: &ShexSchema) -> Vec<Iri> {
    struct Collector {
        seen: Vec<Iri>,
    }
    impl Collector {
        fn add(&mut self, iri: &Iri) {
            if iri.is_exvar() && !self.seen.contains(iri) {
                self.seen.push(iri.clone());
            }
        }
        fn shape(&mut self, shape: &ShapeDecl) {
            if let ShapeLabel::Named(label) = &shape.label {
                self.add(label);
            }
            for iri in shape.inputs.iter().chain(&shape.outputs) {
                self.add(iri);
            }
            self.group(&shape.body);
        }
        fn group(&mut self, group: &TripleExprGroup) {
            for item in &group.items {
                match item {
                    TripleExprItem::Constraint(tc) => match &tc.value_expr {
                        ValueExpr::Node(NodeConstraintDecl::ValueSet(values)) => {
                            for value in values {
                                if let ValueSetValue::ExVar(iri) = value {
                                    self.add(iri);
                                }
                            }
                        }
                        ValueExpr::Node(_) => {}
                        ValueExpr::Nested(shape) => self.shape(shape),
                        ValueExpr::ShapeRef(iri) => self.add(iri),
                    },
                    TripleExprItem::Labeled(_, inner) => self.group(inner),
                    TripleExprItem::ExprRef(_) => {}
                }
            }
        }
    }
    let mut collector = Collector { seen: Vec::new() };
    for shape in &schema.shapes {
        collector.shape(shape);
    }
    debug_assert!(collector.seen.iter().all(|i| vocab::is_exvar(i.as_str())));
    collector.seen
}
