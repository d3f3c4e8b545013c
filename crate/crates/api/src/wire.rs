//! JSON shapes of requests and responses.

use serde::{Deserialize, Serialize};
use shexchain_core::store::{
    EdgeRecord, IoVariableRecord, SupplyChainRecord, Tables, TemplateInstanceRecord, TemplateRecord,
};
use shexchain_core::{parse_schema, Direction, Iri};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireSupplyChain {
    pub id: u64,
    pub label: String,
    pub description: String,
    pub template_instances: Vec<WireInstance>,
    pub edges: Vec<WireEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireInstance {
    pub id: u64,
    pub label: String,
    pub supply_chain_id: u64,
    pub io_variables: Vec<WireIoVariable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireIoVariable {
    pub id: u64,
    pub direction: Direction,
    pub iri: Iri,
    pub skolem_iri: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireEdge {
    pub id: u64,
    pub source_io_id: u64,
    pub target_io_id: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireTemplate {
    pub id: u64,
    pub label: String,
    pub description: String,
    pub raw_shex: String,
    /// Authoring hints, e.g. when the schema does not hold exactly one shape.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewInstance {
    pub template_id: u64,
    pub supply_chain_id: u64,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewEdge {
    pub supply_chain_id: u64,
    pub source_io_id: u64,
    pub target_io_id: u64,
}

impl From<IoVariableRecord> for WireIoVariable {
    fn from(r: IoVariableRecord) -> Self {
        WireIoVariable {
            id: r.id,
            direction: r.direction,
            iri: r.iri,
            skolem_iri: r.skolem_iri,
        }
    }
}

impl From<EdgeRecord> for WireEdge {
    fn from(r: EdgeRecord) -> Self {
        WireEdge {
            id: r.id,
            source_io_id: r.source_io_id,
            target_io_id: r.target_io_id,
        }
    }
}

impl From<TemplateRecord> for WireTemplate {
    fn from(r: TemplateRecord) -> Self {
        let warnings = match parse_schema(&r.raw_shex) {
            Ok(schema) if schema.shapes.len() == 1 => Vec::new(),
            Ok(schema) => vec![format!(
                "template declares {} shapes; exactly one is expected and only the first defines IO variables",
                schema.shapes.len()
            )],
            Err(e) => vec![format!("template does not parse: {e}")],
        };
        WireTemplate {
            id: r.id,
            label: r.label,
            description: r.description,
            raw_shex: r.raw_shex,
            warnings,
        }
    }
}

pub fn instance(tables: &Tables, r: &TemplateInstanceRecord) -> WireInstance {
    WireInstance {
        id: r.id,
        label: r.label.clone(),
        supply_chain_id: r.supply_chain_id,
        io_variables: tables
            .io_variables
            .values()
            .filter(|io| io.template_instance_id == r.id)
            .cloned()
            .map(Into::into)
            .collect(),
    }
}

pub fn supply_chain(tables: &Tables, r: &SupplyChainRecord) -> WireSupplyChain {
    WireSupplyChain {
        id: r.id,
        label: r.label.clone(),
        description: r.description.clone(),
        template_instances: tables
            .template_instances
            .values()
            .filter(|i| i.supply_chain_id == r.id)
            .map(|i| instance(tables, i))
            .collect(),
        edges: tables
            .edges
            .values()
            .filter(|e| e.supply_chain_id == r.id)
            .cloned()
            .map(Into::into)
            .collect(),
    }
}
