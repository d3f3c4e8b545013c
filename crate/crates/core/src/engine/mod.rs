//! Template instantiation and graph generation.
//!
//! An instance of a template gets one skolem IRI per exVar and per anonymous
//! shape. [`process_template`] then turns the template's value sets into
//! triples, and [`assemble_chain`] unions several instances and links wired
//! variables with `owl:sameAs`.

mod chain;
mod generate;
mod skolem;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::Iri;
use crate::shexc::{collect_exvars, Direction, ShexSchema};
use crate::vocab;

pub use chain::assemble_chain;
pub use generate::process_template;
pub use skolem::{
    anon_key, generate_skolem_iri, is_skolem_iri, skolem_iri_from, RandomUuids, SeededUuids,
    SkolemMap, UuidSource,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("template has no shapes")]
    EmptySchema,
    #[error("no skolem IRI for <{0}>")]
    MissingSkolem(Iri),
    #[error("triple expression <{0}> is not defined")]
    UnresolvedExpression(Iri),
    #[error("edge endpoint <{0}> belongs to none of the instances")]
    UnknownEndpoint(Iri),
    #[error("base IRI <{0}> must end with `/`")]
    InvalidBase(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationOptions {
    base: Iri,
    pub merge_mode: bool,
}

impl GenerationOptions {
    pub fn new(base: Iri) -> Result<Self, EngineError> {
        if !base.as_str().ends_with('/') {
            return Err(EngineError::InvalidBase(base));
        }
        Ok(GenerationOptions {
            base,
            merge_mode: false,
        })
    }

    pub fn with_merge(mut self, merge_mode: bool) -> Self {
        self.merge_mode = merge_mode;
        self
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions::new(Iri::new(vocab::DEFAULT_BASE).expect("valid constant"))
            .expect("default base ends with a slash")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoVar {
    pub direction: Direction,
    pub iri: Iri,
    pub skolem: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMaterialization {
    pub label: String,
    pub raw_shex: String,
    /// Inputs first, then outputs, each in annotation order.
    pub io_vars: Vec<IoVar>,
    pub skolem_map: SkolemMap,
}

pub fn materialize_instance(
    schema: &ShexSchema,
    opts: &GenerationOptions,
    label: &str,
) -> Result<InstanceMaterialization, EngineError> {
    materialize_instance_with(schema, opts, label, &mut RandomUuids)
}

pub fn materialize_instance_with(
    schema: &ShexSchema,
    opts: &GenerationOptions,
    label: &str,
    uuids: &mut dyn UuidSource,
) -> Result<InstanceMaterialization, EngineError> {
    let first = schema.primary_shape().ok_or(EngineError::EmptySchema)?;
    let mut skolem_map = SkolemMap::new();
    let keys = collect_exvars(schema)
        .into_iter()
        .chain((0..schema.anonymous_shape_count()).map(anon_key));
    for key in keys {
        skolem_map.insert(key, skolem_iri_from(opts.base(), uuids.next_uuid()));
    }
    let io_vars = first
        .inputs
        .iter()
        .map(|iri| (Direction::In, iri))
        .chain(first.outputs.iter().map(|iri| (Direction::Out, iri)))
        .map(|(direction, iri)| {
            let skolem = skolem_map
                .get(iri)
                .cloned()
                .ok_or_else(|| EngineError::MissingSkolem(iri.clone()))?;
            Ok(IoVar {
                direction,
                iri: iri.clone(),
                skolem,
            })
        })
        .collect::<Result<_, EngineError>>()?;
    Ok(InstanceMaterialization {
        label: label.to_string(),
        raw_shex: schema.source.clone(),
        io_vars,
        skolem_map,
    })
}
