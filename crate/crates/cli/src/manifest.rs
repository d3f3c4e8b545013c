//! Wiring manifests for `shexchain generate`.
//!
//! ```toml
//! version = 1
//! seed = 42            # optional: reproducible skolem IRIs
//! merge = false        # optional: rewrite instead of owl:sameAs
//! base = "http://fokus.fraunhofer.de/"   # optional
//!
//! [[instances]]
//! name = "production"
//! template = "production.shex"   # relative to the manifest
//!
//! [[instances]]
//! name = "truck"
//! template = "truck_transport.shex"
//!
//! [[edges]]
//! from = { instance = "production", var = "exVar:product" }
//! to = { instance = "truck", var = "exVar:good" }
//! ```
//!
//! `var` is a prefixed name or `<iri>`, resolved with the template's own
//! directives. `from` must be one of its template's `#out:` variables and
//! `to` one of the `#in:` variables.

use std::path::PathBuf;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub merge: bool,
    #[serde(default)]
    pub base: Option<String>,
    #[serde(default)]
    pub instances: Vec<InstanceEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    pub name: String,
    pub template: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub instance: String,
    pub var: String,
}

pub const SUPPORTED_VERSION: u32 = 1;
