//! Namespaces and well-known IRIs.

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";

/// Namespace of existential variables in templates.
pub const EXVAR_NS: &str = "http://exVar/";

/// Namespace for synthetic keys of anonymous shapes in a skolem map.
pub const ANON_KEY_NS: &str = "http://internal/anon/";

/// Path segment under a base IRI that holds skolem IRIs.
pub const GENID_PATH: &str = ".well-known/genid/";

pub const DEFAULT_BASE: &str = "http://fokus.fraunhofer.de/";

pub fn is_exvar(iri: &str) -> bool {
    iri.starts_with(EXVAR_NS)
}
