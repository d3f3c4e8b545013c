//! Persistence of supply chains, templates, instances, IO variables and
//! edges.
//!
//! All mutations go through one write lock: the tables are cloned, changed,
//! persisted and only then swapped in, so a failed operation leaves no trace.

mod backend;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::{RwLock, RwLockReadGuard};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineError, GenerationOptions, SkolemMap};
use crate::rdf::{Iri, RdfGraph};
use crate::shexc::{parse_schema, Direction, ShexError, ShexSchema};

pub use backend::{Backend, FileBackend, MemoryBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    SupplyChain,
    Template,
    TemplateInstance,
    IoVariable,
    Edge,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::SupplyChain => "supply chain",
            EntityKind::Template => "template",
            EntityKind::TemplateInstance => "template instance",
            EntityKind::IoVariable => "io variable",
            EntityKind::Edge => "edge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("{kind} {id} not found")]
    NotFound { kind: EntityKind, id: u64 },
    #[error("{message}")]
    Validation {
        message: String,
        fields: Vec<FieldError>,
    },
    #[error("{0}")]
    Conflict(String),
    #[error("storage failure: {0}")]
    Io(String),
    #[error("stored data is inconsistent: {0}")]
    Corrupt(String),
}

impl StoreError {
    fn not_found(kind: EntityKind, id: u64) -> Self {
        StoreError::NotFound { kind, id }
    }

    fn invalid(field: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        StoreError::Validation {
            fields: vec![FieldError::new(field, message.clone())],
            message,
        }
    }

    fn shex(field: &str, err: &ShexError) -> Self {
        StoreError::invalid(field, format!("template does not parse: {err}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupplyChainRecord {
    pub id: u64,
    pub label: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateRecord {
    pub id: u64,
    pub label: String,
    pub description: String,
    pub raw_shex: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateInstanceRecord {
    pub id: u64,
    pub label: String,
    /// Snapshot of the template text at instantiation; never changes.
    pub raw_shex: String,
    pub supply_chain_id: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoVariableRecord {
    pub id: u64,
    pub template_instance_id: u64,
    pub direction: Direction,
    pub iri: Iri,
    pub skolem_iri: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: u64,
    pub supply_chain_id: u64,
    /// Always an output variable.
    pub source_io_id: u64,
    /// Always an input variable.
    pub target_io_id: u64,
}

/// Skolem IRI of an exVar that is not an IO variable, or of an anonymous
/// shape, so that exports of an unchanged chain stay identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSkolemRecord {
    pub template_instance_id: u64,
    pub key: Iri,
    pub skolem_iri: Iri,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextIds {
    pub supply_chain: u64,
    pub template: u64,
    pub template_instance: u64,
    pub io_variable: u64,
    pub edge: u64,
}

impl NextIds {
    fn take(counter: &mut u64) -> u64 {
        *counter += 1;
        *counter
    }
}

/// The complete store contents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    /// Last id handed out per kind.
    pub last_ids: NextIds,
    pub supply_chains: BTreeMap<u64, SupplyChainRecord>,
    pub templates: BTreeMap<u64, TemplateRecord>,
    pub template_instances: BTreeMap<u64, TemplateInstanceRecord>,
    pub io_variables: BTreeMap<u64, IoVariableRecord>,
    pub edges: BTreeMap<u64, EdgeRecord>,
    pub aux_skolems: Vec<AuxSkolemRecord>,
}

impl Tables {
    fn chain(&self, id: u64) -> Result<&SupplyChainRecord, StoreError> {
        self.supply_chains
            .get(&id)
            .ok_or(StoreError::not_found(EntityKind::SupplyChain, id))
    }

    fn instance_io(&self, instance_id: u64) -> impl Iterator<Item = &IoVariableRecord> {
        self.io_variables
            .values()
            .filter(move |io| io.template_instance_id == instance_id)
    }

    fn remove_instance(&mut self, instance_id: u64) {
        let io_ids: Vec<u64> = self.instance_io(instance_id).map(|io| io.id).collect();
        self.edges
            .retain(|_, e| !io_ids.contains(&e.source_io_id) && !io_ids.contains(&e.target_io_id));
        for id in io_ids {
            self.io_variables.remove(&id);
        }
        self.aux_skolems
            .retain(|a| a.template_instance_id != instance_id);
        self.template_instances.remove(&instance_id);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SupplyChainInput {
    pub label: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct TemplateInput {
    pub label: String,
    #[serde(default)]
    pub description: String,
    pub raw_shex: String,
}

fn require_label(label: &str) -> Result<(), StoreError> {
    if label.trim().is_empty() {
        return Err(StoreError::invalid("label", "label must not be empty"));
    }
    Ok(())
}

fn parse_template(raw_shex: &str) -> Result<ShexSchema, StoreError> {
    parse_schema(raw_shex).map_err(|e| StoreError::shex("raw_shex", &e))
}

pub struct Store {
    backend: Box<dyn Backend>,
    tables: RwLock<Tables>,
    opts: GenerationOptions,
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store").field("opts", &self.opts).finish_non_exhaustive()
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Store::with_backend(Box::new(MemoryBackend), GenerationOptions::default())
            .expect("memory backend cannot fail")
    }

    /// Opens (or prepares to create) a file-backed store.
    pub fn open(path: impl Into<PathBuf>, opts: GenerationOptions) -> Result<Self, StoreError> {
        Store::with_backend(Box::new(FileBackend::new(path)), opts)
    }

    pub fn with_backend(backend: Box<dyn Backend>, opts: GenerationOptions) -> Result<Self, StoreError> {
        let tables = backend.load()?;
        Ok(Store {
            backend,
            tables: RwLock::new(tables),
            opts,
        })
    }

    pub fn options(&self) -> &GenerationOptions {
        &self.opts
    }

    fn read(&self) -> RwLockReadGuard<'_, Tables> {
        self.tables.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write<R>(&self, f: impl FnOnce(&mut Tables) -> Result<R, StoreError>) -> Result<R, StoreError> {
        let mut guard = self.tables.write().unwrap_or_else(|e| e.into_inner());
        let mut next = guard.clone();
        let out = f(&mut next)?;
        self.backend.persist(&next)?;
        *guard = next;
        Ok(out)
    }

    /// Runs `f` against a consistent view of every table.
    pub fn read_with<R>(&self, f: impl FnOnce(&Tables) -> R) -> R {
        f(&self.read())
    }

    /// A consistent copy of every table.
    pub fn snapshot(&self) -> Tables {
        self.read().clone()
    }

    pub fn create_supply_chain(&self, input: SupplyChainInput) -> Result<SupplyChainRecord, StoreError> {
        require_label(&input.label)?;
        self.write(|t| {
            let record = SupplyChainRecord {
                id: NextIds::take(&mut t.last_ids.supply_chain),
                label: input.label,
                description: input.description,
            };
            t.supply_chains.insert(record.id, record.clone());
            Ok(record)
        })
    }

    pub fn get_supply_chain(&self, id: u64) -> Result<SupplyChainRecord, StoreError> {
        self.read().chain(id).cloned()
    }

    pub fn list_supply_chains(&self) -> Vec<SupplyChainRecord> {
        self.read().supply_chains.values().cloned().collect()
    }

    pub fn update_supply_chain(&self, id: u64, input: SupplyChainInput) -> Result<SupplyChainRecord, StoreError> {
        require_label(&input.label)?;
        self.write(|t| {
            let record = t
                .supply_chains
                .get_mut(&id)
                .ok_or(StoreError::not_found(EntityKind::SupplyChain, id))?;
            record.label = input.label;
            record.description = input.description;
            Ok(record.clone())
        })
    }

    /// Removes the chain with its instances, their IO variables and skolems,
    /// and its edges.
    pub fn delete_supply_chain(&self, id: u64) -> Result<(), StoreError> {
        self.write(|t| {
            t.chain(id)?;
            let instances: Vec<u64> = t
                .template_instances
                .values()
                .filter(|i| i.supply_chain_id == id)
                .map(|i| i.id)
                .collect();
            for instance in instances {
                t.remove_instance(instance);
            }
            t.edges.retain(|_, e| e.supply_chain_id != id);
            t.supply_chains.remove(&id);
            Ok(())
        })
    }

    pub fn create_template(&self, input: TemplateInput) -> Result<TemplateRecord, StoreError> {
        require_label(&input.label)?;
        parse_template(&input.raw_shex)?;
        self.write(|t| {
            let record = TemplateRecord {
                id: NextIds::take(&mut t.last_ids.template),
                label: input.label,
                description: input.description,
                raw_shex: input.raw_shex,
            };
            t.templates.insert(record.id, record.clone());
            Ok(record)
        })
    }

    pub fn get_template(&self, id: u64) -> Result<TemplateRecord, StoreError> {
        self.read()
            .templates
            .get(&id)
            .cloned()
            .ok_or(StoreError::not_found(EntityKind::Template, id))
    }

    pub fn list_templates(&self) -> Vec<TemplateRecord> {
        self.read().templates.values().cloned().collect()
    }

    /// Existing instances keep their snapshot.
    pub fn update_template(&self, id: u64, input: TemplateInput) -> Result<TemplateRecord, StoreError> {
        require_label(&input.label)?;
        parse_template(&input.raw_shex)?;
        self.write(|t| {
            let record = t
                .templates
                .get_mut(&id)
                .ok_or(StoreError::not_found(EntityKind::Template, id))?;
            record.label = input.label;
            record.description = input.description;
            record.raw_shex = input.raw_shex;
            Ok(record.clone())
        })
    }

    /// Instances created from the template remain.
    pub fn delete_template(&self, id: u64) -> Result<(), StoreError> {
        self.write(|t| {
            t.templates
                .remove(&id)
                .map(|_| ())
                .ok_or(StoreError::not_found(EntityKind::Template, id))
        })
    }

    /// Snapshots a template into a chain and assigns its skolem IRIs. The
    /// instance label defaults to the template's.
    pub fn instantiate(
        &self,
        template_id: u64,
        supply_chain_id: u64,
        label: Option<String>,
    ) -> Result<(TemplateInstanceRecord, Vec<IoVariableRecord>), StoreError> {
        if let Some(label) = &label {
            require_label(label)?;
        }
        self.write(|t| {
            t.chain(supply_chain_id)?;
            let template = t
                .templates
                .get(&template_id)
                .ok_or(StoreError::not_found(EntityKind::Template, template_id))?
                .clone();
            let schema = parse_template(&template.raw_shex)?;
            let label = label.unwrap_or(template.label);
            let inst = engine::materialize_instance(&schema, &self.opts, &label).map_err(|e| match e {
                EngineError::EmptySchema => StoreError::invalid("template_id", "template has no shapes"),
                other => StoreError::Corrupt(other.to_string()),
            })?;

            let record = TemplateInstanceRecord {
                id: NextIds::take(&mut t.last_ids.template_instance),
                label: inst.label,
                raw_shex: inst.raw_shex,
                supply_chain_id,
            };
            let mut rows = Vec::with_capacity(inst.io_vars.len());
            for var in &inst.io_vars {
                let row = IoVariableRecord {
                    id: NextIds::take(&mut t.last_ids.io_variable),
                    template_instance_id: record.id,
                    direction: var.direction,
                    iri: var.iri.clone(),
                    skolem_iri: var.skolem.clone(),
                };
                t.io_variables.insert(row.id, row.clone());
                rows.push(row);
            }
            for (key, skolem) in inst.skolem_map.iter() {
                if !inst.io_vars.iter().any(|v| &v.iri == key) {
                    t.aux_skolems.push(AuxSkolemRecord {
                        template_instance_id: record.id,
                        key: key.clone(),
                        skolem_iri: skolem.clone(),
                    });
                }
            }
            t.template_instances.insert(record.id, record.clone());
            Ok((record, rows))
        })
    }

    pub fn get_instance(&self, id: u64) -> Result<TemplateInstanceRecord, StoreError> {
        self.read()
            .template_instances
            .get(&id)
            .cloned()
            .ok_or(StoreError::not_found(EntityKind::TemplateInstance, id))
    }

    pub fn list_instances(&self, supply_chain_id: u64) -> Vec<TemplateInstanceRecord> {
        self.read()
            .template_instances
            .values()
            .filter(|i| i.supply_chain_id == supply_chain_id)
            .cloned()
            .collect()
    }

    /// IO variables of an instance in creation order.
    pub fn io_variables(&self, instance_id: u64) -> Vec<IoVariableRecord> {
        self.read().instance_io(instance_id).cloned().collect()
    }

    /// Removes the instance along with its IO variables and every edge
    /// touching them.
    pub fn delete_instance(&self, id: u64) -> Result<(), StoreError> {
        self.write(|t| {
            if !t.template_instances.contains_key(&id) {
                return Err(StoreError::not_found(EntityKind::TemplateInstance, id));
            }
            t.remove_instance(id);
            Ok(())
        })
    }

    /// Wires two IO variables. Either may be the output; the stored edge
    /// always runs from the output to the input.
    pub fn add_edge(&self, supply_chain_id: u64, a: u64, b: u64) -> Result<EdgeRecord, StoreError> {
        self.write(|t| {
            t.chain(supply_chain_id)?;
            let io = |id: u64, field: &str| {
                t.io_variables.get(&id).ok_or_else(|| StoreError::Validation {
                    message: format!("io variable {id} not found"),
                    fields: vec![FieldError::new(field, "unknown io variable")],
                })
            };
            let (x, y) = (io(a, "source_io_id")?, io(b, "target_io_id")?);
            if a == b || x.template_instance_id == y.template_instance_id {
                return Err(StoreError::invalid(
                    "target_io_id",
                    "an edge must connect two different template instances",
                ));
            }
            for (v, field) in [(x, "source_io_id"), (y, "target_io_id")] {
                let owner = t.template_instances.get(&v.template_instance_id);
                if owner.map(|i| i.supply_chain_id) != Some(supply_chain_id) {
                    return Err(StoreError::invalid(
                        field,
                        format!("io variable {} is not part of supply chain {supply_chain_id}", v.id),
                    ));
                }
            }
            let (source, target) = match (x.direction, y.direction) {
                (Direction::Out, Direction::In) => (x.id, y.id),
                (Direction::In, Direction::Out) => (y.id, x.id),
                (d, _) => {
                    return Err(StoreError::invalid(
                        "target_io_id",
                        format!("both endpoints are {d} variables; an edge connects an output to an input"),
                    ))
                }
            };
            if t
                .edges
                .values()
                .any(|e| e.source_io_id == source && e.target_io_id == target)
            {
                return Err(StoreError::Conflict(format!(
                    "io variables {source} and {target} are already connected"
                )));
            }
            let record = EdgeRecord {
                id: NextIds::take(&mut t.last_ids.edge),
                supply_chain_id,
                source_io_id: source,
                target_io_id: target,
            };
            t.edges.insert(record.id, record.clone());
            Ok(record)
        })
    }

    pub fn get_edge(&self, id: u64) -> Result<EdgeRecord, StoreError> {
        self.read()
            .edges
            .get(&id)
            .cloned()
            .ok_or(StoreError::not_found(EntityKind::Edge, id))
    }

    pub fn list_edges(&self, supply_chain_id: u64) -> Vec<EdgeRecord> {
        self.read()
            .edges
            .values()
            .filter(|e| e.supply_chain_id == supply_chain_id)
            .cloned()
            .collect()
    }

    pub fn delete_edge(&self, id: u64) -> Result<(), StoreError> {
        self.write(|t| {
            t.edges
                .remove(&id)
                .map(|_| ())
                .ok_or(StoreError::not_found(EntityKind::Edge, id))
        })
    }

    /// The chain's RDF graph from the persisted snapshots, skolems and
    /// edges.
    pub fn chain_graph(&self, supply_chain_id: u64, merge_mode: bool) -> Result<RdfGraph, StoreError> {
        let t = self.read();
        t.chain(supply_chain_id)?;
        let mut parsed: Vec<(ShexSchema, SkolemMap)> = Vec::new();
        for inst in t
            .template_instances
            .values()
            .filter(|i| i.supply_chain_id == supply_chain_id)
        {
            let schema = parse_schema(&inst.raw_shex).map_err(|e| {
                StoreError::Corrupt(format!("template instance {} does not parse: {e}", inst.id))
            })?;
            let map: SkolemMap = t
                .instance_io(inst.id)
                .map(|io| (io.iri.clone(), io.skolem_iri.clone()))
                .chain(
                    t.aux_skolems
                        .iter()
                        .filter(|a| a.template_instance_id == inst.id)
                        .map(|a| (a.key.clone(), a.skolem_iri.clone())),
                )
                .collect();
            parsed.push((schema, map));
        }
        let skolem = |io_id: u64| {
            t.io_variables
                .get(&io_id)
                .map(|io| io.skolem_iri.clone())
                .ok_or_else(|| StoreError::Corrupt(format!("edge references missing io variable {io_id}")))
        };
        let edges = t
            .edges
            .values()
            .filter(|e| e.supply_chain_id == supply_chain_id)
            .map(|e| Ok((skolem(e.source_io_id)?, skolem(e.target_io_id)?)))
            .collect::<Result<Vec<_>, StoreError>>()?;
        let refs: Vec<(&ShexSchema, &SkolemMap)> = parsed.iter().map(|(s, m)| (s, m)).collect();
        let opts = self.opts.clone().with_merge(merge_mode);
        engine::assemble_chain(&refs, &edges, &opts).map_err(|e| StoreError::Corrupt(e.to_string()))
    }
}

#[cfg(test)]
mod tests;
