use std::collections::{BTreeSet, HashMap};

use super::{process_template, EngineError, GenerationOptions, SkolemMap};
use crate::rdf::{Iri, RdfGraph, Triple};
use crate::shexc::ShexSchema;
use crate::vocab;

/// Unions the graphs of all instances and links each edge's endpoints.
///
/// Edges are `(source, target)` skolem pairs, source being an output
/// variable. Without merge mode every edge becomes one `owl:sameAs` triple.
/// In merge mode each group of wired skolems collapses onto one IRI: the
/// first edge source in the group that is never a target, or if every member
/// is a target (a wiring cycle) the group's first source.
///
/// With no instances the result is an empty graph carrying only the base.
pub fn assemble_chain(
    instances: &[(&ShexSchema, &SkolemMap)],
    edges: &[(Iri, Iri)],
    opts: &GenerationOptions,
) -> Result<RdfGraph, EngineError> {
    let mut graph = RdfGraph::with_base(opts.base().clone());
    if instances.is_empty() && edges.is_empty() {
        return Ok(graph);
    }
    for (schema, map) in instances {
        graph.extend_from(process_template(schema, map, opts)?);
    }
    graph.bind_prefix("owl", Iri::new(vocab::OWL_NS).expect("valid constant"));

    for (source, target) in edges {
        for end in [source, target] {
            if !instances.iter().any(|(_, map)| map.contains_skolem(end)) {
                return Err(EngineError::UnknownEndpoint(end.clone()));
            }
        }
    }

    if !opts.merge_mode {
        let same_as = Iri::new(vocab::OWL_SAME_AS).expect("valid constant");
        for (source, target) in edges {
            graph.add_triple(Triple::new(source.clone(), same_as.clone(), target.clone()));
        }
        return Ok(graph);
    }

    let rewrite = merge_targets(edges);
    graph.map_iris(|iri| rewrite.get(iri).cloned());
    Ok(graph)
}

/// For every wired skolem that is not its group's representative, the IRI it
/// is rewritten to.
pub(super) fn merge_targets(edges: &[(Iri, Iri)]) -> HashMap<Iri, Iri> {
    let mut uf = UnionFind::default();
    for (source, target) in edges {
        let s = uf.id(source);
        let t = uf.id(target);
        uf.union(s, t);
    }
    let targets: BTreeSet<&Iri> = edges.iter().map(|(_, t)| t).collect();

    let mut representative: HashMap<usize, Iri> = HashMap::new();
    for (source, _) in edges {
        let root = uf.find(uf.ids[source]);
        let entry = representative.entry(root).or_insert_with(|| source.clone());
        if targets.contains(entry) && !targets.contains(source) {
            *entry = source.clone();
        }
    }

    let mut rewrite = HashMap::new();
    for (iri, &id) in &uf.ids {
        let root = uf.find(id);
        let rep = &representative[&root];
        if rep != iri {
            rewrite.insert(iri.clone(), rep.clone());
        }
    }
    rewrite
}

#[derive(Default)]
struct UnionFind {
    ids: HashMap<Iri, usize>,
    parent: Vec<usize>,
}

impl UnionFind {
    fn id(&mut self, iri: &Iri) -> usize {
        if let Some(&id) = self.ids.get(iri) {
            return id;
        }
        let id = self.parent.len();
        self.parent.push(id);
        self.ids.insert(iri.clone(), id);
        id
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}
