//! ShEx schemas as templates for RDF graphs.
//!
//! [`shexc`] parses templates, [`engine`] instantiates them with skolem IRIs
//! and assembles wired instances into one graph, [`rdf`] holds the graph
//! model and its Turtle writer, and [`store`] persists supply chains.

pub mod engine;
pub mod rdf;
pub mod shexc;
pub mod store;
pub mod vocab;

pub use engine::{
    assemble_chain, generate_skolem_iri, materialize_instance, process_template, EngineError,
    GenerationOptions, InstanceMaterialization, IoVar, SkolemMap,
};
pub use rdf::{graph_equal, serialize_turtle, Iri, Literal, RdfGraph, Term, Triple};
pub use shexc::{collect_exvars, parse_schema, Direction, ShexError, ShexSchema};
pub use store::{Store, StoreError};
