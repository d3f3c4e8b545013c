use super::{anon_key, EngineError, GenerationOptions, SkolemMap};
use crate::rdf::{Iri, RdfGraph, Term, Triple};
use crate::shexc::{
    NodeConstraintDecl, ShapeDecl, ShapeLabel, ShexSchema, TripleExprGroup, TripleExprItem,
    ValueExpr, ValueSetValue,
};

/// Generates the triples a template describes.
///
/// Only value sets, nested shapes and shape references produce triples.
/// Inverse constraints, `{0}` cardinalities and node-kind, datatype or facet
/// constraints are skipped.
pub fn process_template(
    schema: &ShexSchema,
    skolem_map: &SkolemMap,
    opts: &GenerationOptions,
) -> Result<RdfGraph, EngineError> {
    let mut graph = RdfGraph::with_base(opts.base().clone());
    for (label, ns) in &schema.prefixes {
        if !ns.is_exvar() {
            graph.bind_prefix(label.clone(), ns.clone());
        }
    }
    let mut gen = Generator {
        schema,
        skolem_map,
        graph,
        active: Vec::new(),
    };
    for shape in &schema.shapes {
        let subject = gen.shape_subject(shape)?;
        gen.group(&subject, &shape.body)?;
    }
    Ok(gen.graph)
}

struct Generator<'a> {
    schema: &'a ShexSchema,
    skolem_map: &'a SkolemMap,
    graph: RdfGraph,
    /// Labeled expressions being inlined, to stop on cycles.
    active: Vec<&'a Iri>,
}

impl<'a> Generator<'a> {
    fn skolem(&self, key: &Iri) -> Result<Iri, EngineError> {
        self.skolem_map
            .get(key)
            .cloned()
            .ok_or_else(|| EngineError::MissingSkolem(key.clone()))
    }

    fn node(&self, iri: &Iri) -> Result<Iri, EngineError> {
        if iri.is_exvar() {
            self.skolem(iri)
        } else {
            Ok(iri.clone())
        }
    }

    fn shape_subject(&self, shape: &ShapeDecl) -> Result<Iri, EngineError> {
        match &shape.label {
            ShapeLabel::Named(iri) => self.node(iri),
            ShapeLabel::Anonymous(n) => self.skolem(&anon_key(*n)),
        }
    }

    fn group(&mut self, subject: &Iri, group: &'a TripleExprGroup) -> Result<(), EngineError> {
        for item in &group.items {
            match item {
                TripleExprItem::Constraint(tc) => {
                    if tc.inverse || tc.cardinality.is_negative() {
                        continue;
                    }
                    match &tc.value_expr {
                        ValueExpr::Node(NodeConstraintDecl::ValueSet(values)) => {
                            for value in values {
                                let object = match value {
                                    ValueSetValue::Term(Term::Iri(iri)) => Term::Iri(self.node(iri)?),
                                    ValueSetValue::Term(lit) => lit.clone(),
                                    ValueSetValue::ExVar(iri) => Term::Iri(self.skolem(iri)?),
                                    ValueSetValue::Language(_) => continue,
                                };
                                self.emit(subject, &tc.predicate, object);
                            }
                        }
                        ValueExpr::Node(_) => {}
                        ValueExpr::Nested(shape) => {
                            let nested = self.shape_subject(shape)?;
                            self.emit(subject, &tc.predicate, Term::Iri(nested.clone()));
                            self.group(&nested, &shape.body)?;
                        }
                        ValueExpr::ShapeRef(label) => {
                            let target = self.node(label)?;
                            self.emit(subject, &tc.predicate, Term::Iri(target));
                        }
                    }
                }
                TripleExprItem::ExprRef(label) => {
                    if self.active.contains(&label) {
                        continue;
                    }
                    let inner = self
                        .schema
                        .triple_expr_labels
                        .get(label)
                        .ok_or_else(|| EngineError::UnresolvedExpression(label.clone()))?;
                    self.active.push(label);
                    self.group(subject, inner)?;
                    self.active.pop();
                }
                TripleExprItem::Labeled(label, inner) => {
                    self.active.push(label);
                    self.group(subject, inner)?;
                    self.active.pop();
                }
            }
        }
        Ok(())
    }

    fn emit(&mut self, subject: &Iri, predicate: &Iri, object: Term) {
        self.graph
            .add_triple(Triple::new(subject.clone(), predicate.clone(), object));
    }
}
