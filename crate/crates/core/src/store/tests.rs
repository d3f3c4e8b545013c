use std::collections::HashSet;

use super::*;
use crate::engine::is_skolem_iri;
use crate::rdf::graph_equal;
use crate::vocab;

const ASD1: &str = include_str!("../../tests/fixtures/asd1.shex");
const ASD3: &str = include_str!("../../tests/fixtures/asd3.shex");
const ASD7: &str = include_str!("../../tests/fixtures/asd7.shex");
const ASD8: &str = include_str!("../../tests/fixtures/asd8.shex");

fn chain(store: &Store, label: &str) -> SupplyChainRecord {
    store
        .create_supply_chain(SupplyChainInput {
            label: label.into(),
            description: format!("{label} description"),
        })
        .unwrap()
}

fn template(store: &Store, label: &str, raw: &str) -> TemplateRecord {
    store
        .create_template(TemplateInput {
            label: label.into(),
            description: String::new(),
            raw_shex: raw.into(),
        })
        .unwrap()
}

fn io_by_name<'a>(rows: &'a [IoVariableRecord], dir: Direction, local: &str) -> &'a IoVariableRecord {
    rows.iter()
        .find(|r| r.direction == dir && r.iri.as_str() == format!("{}{local}", vocab::EXVAR_NS))
        .unwrap()
}

/// Rows whose parent is missing, found by scanning every table.
fn orphans(t: &Tables) -> usize {
    let instances = t
        .template_instances
        .values()
        .filter(|i| !t.supply_chains.contains_key(&i.supply_chain_id))
        .count();
    let io = t
        .io_variables
        .values()
        .filter(|v| !t.template_instances.contains_key(&v.template_instance_id))
        .count();
    let aux = t
        .aux_skolems
        .iter()
        .filter(|a| !t.template_instances.contains_key(&a.template_instance_id))
        .count();
    let edges = t
        .edges
        .values()
        .filter(|e| {
            !t.supply_chains.contains_key(&e.supply_chain_id)
                || !t.io_variables.contains_key(&e.source_io_id)
                || !t.io_variables.contains_key(&e.target_io_id)
        })
        .count();
    instances + io + aux + edges
}

#[test]
fn write_then_read() {
    let store = Store::in_memory();
    let c = chain(&store, "L");
    assert_eq!(c.id, 1);
    let got = store.get_supply_chain(1).unwrap();
    assert_eq!((got.label.as_str(), got.description.as_str()), ("L", "L description"));
    assert_eq!(store.list_supply_chains().len(), 1);
}

#[test]
fn ids_increase_and_are_not_reused() {
    let store = Store::in_memory();
    let a = chain(&store, "a");
    store.delete_supply_chain(a.id).unwrap();
    let b = chain(&store, "b");
    assert!(b.id > a.id);
    let t1 = template(&store, "t", ASD1);
    let t2 = template(&store, "t", ASD1);
    assert_eq!((t1.id, t2.id), (1, 2));
}

#[test]
fn not_found_errors() {
    let store = Store::in_memory();
    assert_eq!(
        store.get_supply_chain(9),
        Err(StoreError::NotFound { kind: EntityKind::SupplyChain, id: 9 })
    );
    assert!(matches!(store.get_template(9), Err(StoreError::NotFound { .. })));
    assert!(matches!(store.delete_edge(9), Err(StoreError::NotFound { .. })));
    assert!(matches!(store.delete_instance(9), Err(StoreError::NotFound { .. })));
    assert!(matches!(store.instantiate(1, 1, None), Err(StoreError::NotFound { .. })));
    assert!(matches!(store.chain_graph(3, false), Err(StoreError::NotFound { .. })));
}

#[test]
fn validation_errors() {
    let store = Store::in_memory();
    let err = store
        .create_template(TemplateInput {
            label: "bad".into(),
            description: String::new(),
            raw_shex: "<S> {".into(),
        })
        .unwrap_err();
    let StoreError::Validation { fields, .. } = err else {
        panic!("{err:?}");
    };
    assert_eq!(fields[0].field, "raw_shex");
    assert!(matches!(
        store.create_supply_chain(SupplyChainInput { label: " ".into(), description: String::new() }),
        Err(StoreError::Validation { .. })
    ));
    assert!(store.list_templates().is_empty());
}

#[test]
fn template_update_keeps_instance_snapshot() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let t = template(&store, "Production", ASD7);
    let (inst, _) = store.instantiate(t.id, c.id, None).unwrap();
    store
        .update_template(
            t.id,
            TemplateInput {
                label: "Roman".into(),
                description: "changed".into(),
                raw_shex: ASD1.into(),
            },
        )
        .unwrap();
    assert_eq!(store.get_template(t.id).unwrap().raw_shex, ASD1);
    let after = store.get_instance(inst.id).unwrap();
    assert_eq!(after.raw_shex.as_bytes(), ASD7.as_bytes());
    assert_eq!(after.label, "Production");
}

#[test]
fn template_delete_keeps_instances() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let t = template(&store, "Production", ASD7);
    store.instantiate(t.id, c.id, None).unwrap();
    store.instantiate(t.id, c.id, Some("second".into())).unwrap();
    store.delete_template(t.id).unwrap();
    let instances = store.list_instances(c.id);
    assert_eq!(instances.len(), 2);
    assert_eq!(instances[1].label, "second");
    assert!(store.chain_graph(c.id, false).is_ok());
}

#[test]
fn instantiate_production() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let t = template(&store, "Production", ASD7);
    let (inst, rows) = store.instantiate(t.id, c.id, None).unwrap();
    assert_eq!(inst.label, "Production");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r.direction == Direction::In).count(), 1);
    let loc_in = io_by_name(&rows, Direction::In, "location");
    let loc_out = io_by_name(&rows, Direction::Out, "location");
    assert_eq!(loc_in.skolem_iri, loc_out.skolem_iri);
    assert!(rows.iter().all(|r| is_skolem_iri(store.options().base(), &r.skolem_iri)));
    assert_eq!(store.io_variables(inst.id), rows);

    let (_, again) = store.instantiate(t.id, c.id, None).unwrap();
    let first: HashSet<&Iri> = rows.iter().map(|r| &r.skolem_iri).collect();
    assert!(again.iter().all(|r| !first.contains(&r.skolem_iri)));

    let plain = template(&store, "Roman", ASD1);
    assert!(store.instantiate(plain.id, c.id, None).unwrap().1.is_empty());
}

#[test]
fn instantiate_empty_template_fails_atomically() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let t = template(&store, "empty", "BASE <http://x/>");
    let before = store.snapshot();
    assert!(matches!(store.instantiate(t.id, c.id, None), Err(StoreError::Validation { .. })));
    assert_eq!(store.snapshot(), before);
}

fn wired_chain(store: &Store) -> (u64, Vec<IoVariableRecord>, Vec<IoVariableRecord>) {
    let c = chain(store, "c");
    let p = template(store, "Production", ASD7);
    let t = template(store, "TruckTransport", ASD8);
    let (_, prows) = store.instantiate(p.id, c.id, None).unwrap();
    let (_, trows) = store.instantiate(t.id, c.id, None).unwrap();
    (c.id, prows, trows)
}

#[test]
fn edges_are_oriented_and_checked() {
    let store = Store::in_memory();
    let (c, p, t) = wired_chain(&store);
    let product = io_by_name(&p, Direction::Out, "product").id;
    let good = io_by_name(&t, Direction::In, "good").id;
    let location = io_by_name(&p, Direction::Out, "location").id;

    let e = store.add_edge(c, product, good).unwrap();
    assert_eq!((e.source_io_id, e.target_io_id), (product, good));
    assert!(matches!(store.add_edge(c, good, product), Err(StoreError::Conflict(_))));
    store.delete_edge(e.id).unwrap();
    let reversed = store.add_edge(c, good, product).unwrap();
    assert_eq!((reversed.source_io_id, reversed.target_io_id), (product, good));

    assert!(matches!(store.add_edge(c, product, location), Err(StoreError::Validation { .. })));
    let loc_in = io_by_name(&p, Direction::In, "location").id;
    assert!(matches!(store.add_edge(c, location, loc_in), Err(StoreError::Validation { .. })));
    assert!(matches!(store.add_edge(c, product, product), Err(StoreError::Validation { .. })));
    assert!(matches!(store.add_edge(c, product, 999), Err(StoreError::Validation { .. })));

    let other = chain(&store, "other");
    assert!(matches!(store.add_edge(other.id, product, good), Err(StoreError::Validation { .. })));
    assert_eq!(store.list_edges(c).len(), 1);
}

#[test]
fn chain_delete_cascades() {
    let store = Store::in_memory();
    let (c, p, t) = wired_chain(&store);
    let keep = chain(&store, "keep");
    let roman = template(&store, "Roman", ASD3);
    store.instantiate(roman.id, keep.id, None).unwrap();
    store
        .add_edge(c, io_by_name(&p, Direction::Out, "product").id, io_by_name(&t, Direction::In, "good").id)
        .unwrap();
    let before = store.snapshot();
    assert_eq!(before.template_instances.len(), 3);
    assert_eq!(before.edges.len(), 1);

    store.delete_supply_chain(c).unwrap();
    let after = store.snapshot();
    assert_eq!(orphans(&after), 0);
    assert_eq!(after.template_instances.len(), 1);
    assert!(after.io_variables.is_empty());
    assert!(after.edges.is_empty());
    assert_eq!(after.aux_skolems.len(), 1);
    assert_eq!(after.templates.len(), 3);
}

#[test]
fn instance_delete_removes_edges() {
    let store = Store::in_memory();
    let (c, p, t) = wired_chain(&store);
    store
        .add_edge(c, io_by_name(&p, Direction::Out, "product").id, io_by_name(&t, Direction::In, "good").id)
        .unwrap();
    store.delete_instance(t[0].template_instance_id).unwrap();
    let snap = store.snapshot();
    assert_eq!(orphans(&snap), 0);
    assert!(snap.edges.is_empty());
    assert_eq!(snap.io_variables.len(), 3);
}

#[test]
fn chain_graph_is_stable_and_wired() {
    let store = Store::in_memory();
    let (c, p, t) = wired_chain(&store);
    let product = io_by_name(&p, Direction::Out, "product");
    let good = io_by_name(&t, Direction::In, "good");
    store.add_edge(c, product.id, good.id).unwrap();

    let a = store.chain_graph(c, false).unwrap();
    let b = store.chain_graph(c, false).unwrap();
    assert!(graph_equal(&a, &b));
    assert_eq!(a.to_turtle(), b.to_turtle());
    assert_eq!(a.len(), 8);
    let same_as: Vec<_> = a.triples().filter(|t| t.predicate.as_str() == vocab::OWL_SAME_AS).collect();
    assert_eq!(same_as.len(), 1);
    assert_eq!(same_as[0].subject, product.skolem_iri);

    let merged = store.chain_graph(c, true).unwrap();
    assert_eq!(merged.len(), 7);
    assert!(merged.triples().flat_map(|t| t.iris()).all(|i| *i != good.skolem_iri));
}

#[test]
fn anonymous_skolems_persist_across_exports() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let t = template(&store, "Roman", ASD3);
    store.instantiate(t.id, c.id, None).unwrap();
    let a = store.chain_graph(c.id, false).unwrap();
    assert_eq!(a.len(), 8);
    assert!(graph_equal(&a, &store.chain_graph(c.id, false).unwrap()));
}

#[test]
fn empty_chain_graph() {
    let store = Store::in_memory();
    let c = chain(&store, "c");
    let g = store.chain_graph(c.id, false).unwrap();
    assert!(g.is_empty());
    assert_eq!(g.to_turtle(), "@base <http://fokus.fraunhofer.de/> .\n");
}

#[test]
fn file_backend_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let store = Store::open(&path, GenerationOptions::default()).unwrap();
    assert!(!path.exists());
    let (c, p, t) = wired_chain(&store);
    store
        .add_edge(c, io_by_name(&p, Direction::Out, "product").id, io_by_name(&t, Direction::In, "good").id)
        .unwrap();
    assert!(path.exists());
    let graph = store.chain_graph(c, false).unwrap();
    let snapshot = store.snapshot();
    drop(store);

    let reopened = Store::open(&path, GenerationOptions::default()).unwrap();
    assert_eq!(reopened.snapshot(), snapshot);
    assert_eq!(reopened.chain_graph(c, false).unwrap().to_turtle(), graph.to_turtle());
    let next = reopened
        .create_supply_chain(SupplyChainInput { label: "n".into(), description: String::new() })
        .unwrap();
    assert_eq!(next.id, 2);
}

#[test]
fn corrupt_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    std::fs::write(&path, b"not json").unwrap();
    assert!(matches!(
        Store::open(&path, GenerationOptions::default()),
        Err(StoreError::Corrupt(_))
    ));
}

#[test]
fn failed_persist_leaves_state_unchanged() {
    struct Failing;
    impl Backend for Failing {
        fn load(&self) -> Result<Tables, StoreError> {
            Ok(Tables::default())
        }
        fn persist(&self, _: &Tables) -> Result<(), StoreError> {
            Err(StoreError::Io("disk full".into()))
        }
    }
    let store = Store::with_backend(Box::new(Failing), GenerationOptions::default()).unwrap();
    let res = store.create_supply_chain(SupplyChainInput { label: "x".into(), description: String::new() });
    assert_eq!(res, Err(StoreError::Io("disk full".into())));
    assert!(store.list_supply_chains().is_empty());
}

#[test]
fn concurrent_writers_serialize() {
    use std::sync::Arc;
    let store = Arc::new(Store::in_memory());
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let store = Arc::clone(&store);
            std::thread::spawn(move || {
                for j in 0..25 {
                    chain(&store, &format!("{i}-{j}"));
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let ids: Vec<u64> = store.list_supply_chains().iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=200).collect::<Vec<_>>());
}
