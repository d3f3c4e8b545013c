//! Synthetic inputs for the pipeline benchmarks.

use shexchain_core::engine::{materialize_instance_with, SeededUuids};
use shexchain_core::{parse_schema, vocab, GenerationOptions, InstanceMaterialization, Iri, ShexSchema};

pub const PRODUCTION: &str = include_str!("../../core/tests/fixtures/asd7.shex");
pub const TRUCK: &str = include_str!("../../core/tests/fixtures/asd8.shex");

/// A template with `width` value-set constraints, each holding `members`
/// IRIs, and one exVar per constraint.
pub fn wide_template(width: usize, members: usize) -> String {
    let mut text = String::from(
        "BASE <http://fokus.fraunhofer.de/>\nPREFIX ex: <http://example.com/>\nPREFIX exVar: <http://exVar/>\n\n<Wide> {\n",
    );
    let body: Vec<String> = (0..width)
        .map(|i| {
            let values: Vec<String> = (0..members).map(|m| format!("ex:v{i}_{m}")).collect();
            format!("    ex:p{i} [{} exVar:x{i}]", values.join(" "))
        })
        .collect();
    text.push_str(&body.join(" ;\n"));
    text.push_str("\n}\n");
    text
}

pub struct Chain {
    pub schemas: Vec<ShexSchema>,
    pub instances: Vec<InstanceMaterialization>,
    /// product -> good, then location -> from.
    pub edges: Vec<(Iri, Iri)>,
}

/// `pairs` Production/TruckTransport pairs, each pair wired internally.
pub fn production_chain(pairs: usize, opts: &GenerationOptions) -> Chain {
    let production = parse_schema(PRODUCTION).expect("fixture parses");
    let truck = parse_schema(TRUCK).expect("fixture parses");
    let mut uuids = SeededUuids::new(1);
    let var = |inst: &InstanceMaterialization, local: &str| {
        let key = Iri::new(format!("{}{local}", vocab::EXVAR_NS)).unwrap();
        inst.skolem_map.get(&key).unwrap().clone()
    };
    let mut chain = Chain {
        schemas: Vec::new(),
        instances: Vec::new(),
        edges: Vec::new(),
    };
    for i in 0..pairs {
        let p = materialize_instance_with(&production, opts, &format!("p{i}"), &mut uuids).unwrap();
        let t = materialize_instance_with(&truck, opts, &format!("t{i}"), &mut uuids).unwrap();
        chain.edges.push((var(&p, "product"), var(&t, "good")));
        chain.edges.push((var(&p, "location"), var(&t, "from")));
        chain.schemas.extend([production.clone(), truck.clone()]);
        chain.instances.extend([p, t]);
    }
    chain
}
