//! Deterministic Turtle writer.
//!
//! Layout: `@base`, then `@prefix` lines in binding order, a blank line, then
//! one block per subject. Subjects are sorted by absolute IRI; within a block
//! `rdf:type` comes first (written `a`) and the remaining predicates follow in
//! lexicographic order. Objects sharing a predicate are joined with `, `.

use std::fmt::Write;

use super::{Iri, Literal, RdfGraph, Term, Triple};
use crate::vocab;

const INDENT: &str = "    ";

pub fn serialize_turtle(graph: &RdfGraph) -> String {
    let writer = TermWriter {
        base: graph.base().map(Iri::as_str),
        prefixes: graph.prefixes(),
    };
    let mut out = String::new();
    if let Some(base) = graph.base() {
        let _ = writeln!(out, "@base <{}> .", escape_iri(base.as_str()));
    }
    for (label, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {}: <{}> .", label, escape_iri(ns.as_str()));
    }
    if graph.is_empty() {
        return out;
    }
    if !out.is_empty() {
        out.push('\n');
    }

    let triples: Vec<&Triple> = graph.triples().collect();
    let mut first_block = true;
    for block in triples.chunk_by(|a, b| a.subject == b.subject) {
        if !first_block {
            out.push('\n');
        }
        first_block = false;
        write_subject_block(&mut out, &writer, block);
    }
    out
}

fn write_subject_block(out: &mut String, writer: &TermWriter<'_>, block: &[&Triple]) {
    let mut groups: Vec<&[&Triple]> = block.chunk_by(|a, b| a.predicate == b.predicate).collect();
    // Stable, so the remaining groups keep their lexicographic order.
    groups.sort_by_key(|g| g[0].predicate.as_str() != vocab::RDF_TYPE);

    out.push_str(&writer.iri(&block[0].subject));
    for (i, group) in groups.iter().enumerate() {
        if i == 0 {
            out.push(' ');
        } else {
            out.push_str(" ;\n");
            out.push_str(INDENT);
        }
        let predicate = &group[0].predicate;
        if predicate.as_str() == vocab::RDF_TYPE {
            out.push('a');
        } else {
            out.push_str(&writer.iri(predicate));
        }
        for (j, triple) in group.iter().enumerate() {
            out.push_str(if j == 0 { " " } else { ", " });
            out.push_str(&writer.term(&triple.object));
        }
    }
    out.push_str(" .\n");
}

struct TermWriter<'g> {
    base: Option<&'g str>,
    prefixes: &'g [(String, Iri)],
}

impl TermWriter<'_> {
    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Literal(lit) => self.literal(lit),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        let mut s = format!("\"{}\"", escape_string(lit.lexical()));
        if let Some(lang) = lit.language() {
            s.push('@');
            s.push_str(lang);
        } else if let Some(dt) = lit.datatype() {
            s.push_str("^^");
            s.push_str(&self.iri(dt));
        }
        s
    }

    fn iri(&self, iri: &Iri) -> String {
        let value = iri.as_str();
        if let Some(rel) = self.base.and_then(|base| relative_reference(base, value)) {
            return format!("<{}>", escape_iri(rel));
        }
        if let Some((label, local)) = self.compact(value) {
            return format!("{label}:{local}");
        }
        format!("<{}>", escape_iri(value))
    }

    /// Longest matching namespace wins; on equal length the earliest binding.
    fn compact<'a>(&'a self, value: &'a str) -> Option<(&'a str, &'a str)> {
        let mut best: Option<(&str, &str, usize)> = None;
        for (label, ns) in self.prefixes {
            let ns = ns.as_str();
            let Some(local) = value.strip_prefix(ns) else {
                continue;
            };
            if !is_safe_local_name(local) {
                continue;
            }
            if best.is_none_or(|(_, _, len)| ns.len() > len) {
                best = Some((label.as_str(), local, ns.len()));
            }
        }
        best.map(|(label, local, _)| (label, local))
    }
}

/// The part of `value` after `base`, provided writing it as a relative
/// reference resolves back to `value` unchanged.
fn relative_reference<'a>(base: &str, value: &'a str) -> Option<&'a str> {
    if !base.ends_with('/') {
        return None;
    }
    let rest = value.strip_prefix(base)?;
    if rest.is_empty() || rest.contains('#') || rest.starts_with(['/', '?']) {
        return None;
    }
    let first_segment = rest.split(['/', '?']).next().unwrap_or(rest);
    if first_segment.contains(':') {
        return None;
    }
    let path = rest.split('?').next().unwrap_or(rest);
    if path.split('/').any(|seg| seg == "." || seg == "..") {
        return None;
    }
    Some(rest)
}

/// Conservative subset of Turtle `PN_LOCAL`.
fn is_safe_local_name(local: &str) -> bool {
    let Some(first) = local.chars().next() else {
        return true;
    };
    let body_ok = local
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    body_ok && first != '.' && first != '-' && !local.ends_with('.')
}

/// `_:` is written as `\u005F:` so output never contains a blank-node label.
fn escape_iri(value: &str) -> String {
    value.replace("_:", "\\u005F:")
}

fn escape_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.replace("_:", "\\u005F:")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    const BASE: &str = "http://fokus.fraunhofer.de/";
    const FOAF: &str = "http://xmlns.com/foaf/0.1/";

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn prefixed_graph() -> RdfGraph {
        let mut g = RdfGraph::with_base(iri(BASE));
        g.bind_prefix("rdf", iri(vocab::RDF_NS));
        g.bind_prefix("foaf", iri(FOAF));
        g
    }

    #[test]
    fn asd2_rendering() {
        let g = prefixed_graph()
            .with_triple(Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri(vocab::RDF_TYPE),
                iri("http://xmlns.com/foaf/0.1/Person"),
            ))
            .with_triple(Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri("http://xmlns.com/foaf/0.1/name"),
                Literal::plain("Roman Laas"),
            ));
        let expected = "\
@base <http://fokus.fraunhofer.de/> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .

<Roman> a foaf:Person ;
    foaf:name \"Roman Laas\" .
";
        assert_eq!(serialize_turtle(&g), expected);
    }

    #[test]
    fn base_only_graph() {
        let g = RdfGraph::with_base(iri(BASE));
        assert_eq!(serialize_turtle(&g), "@base <http://fokus.fraunhofer.de/> .\n");
    }

    #[test]
    fn empty_graph_is_empty_text() {
        assert_eq!(serialize_turtle(&RdfGraph::new()), "");
    }

    #[test]
    fn language_and_datatype_literals() {
        let g = prefixed_graph()
            .with_triple(Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri("http://xmlns.com/foaf/0.1/name"),
                Literal::with_language("Roman Laas", "de"),
            ))
            .with_triple(Triple::new(
                iri("http://fokus.fraunhofer.de/Roman"),
                iri("http://xmlns.com/foaf/0.1/age"),
                Literal::typed("30", iri(vocab::XSD_INTEGER)),
            ));
        let out = serialize_turtle(&g);
        assert!(out.contains("\"Roman Laas\"@de"), "{out}");
        assert!(out.contains("\"30\"^^<http://www.w3.org/2001/XMLSchema#integer>"), "{out}");

        let mut with_xsd = g.clone();
        with_xsd.bind_prefix("xsd", iri(vocab::XSD_NS));
        assert!(serialize_turtle(&with_xsd).contains("\"30\"^^xsd:integer"));
    }

    #[test]
    fn predicates_sorted_with_type_first() {
        let s = iri("http://fokus.fraunhofer.de/S");
        let g = prefixed_graph()
            .with_triple(Triple::new(s.clone(), iri("http://xmlns.com/foaf/0.1/z"), Literal::plain("z")))
            .with_triple(Triple::new(s.clone(), iri(vocab::RDF_TYPE), iri("http://xmlns.com/foaf/0.1/T")))
            .with_triple(Triple::new(s.clone(), iri("http://xmlns.com/foaf/0.1/a"), Literal::plain("b")))
            .with_triple(Triple::new(s, iri("http://xmlns.com/foaf/0.1/a"), Literal::plain("a")));
        let out = serialize_turtle(&g);
        let body: Vec<&str> = out.lines().skip(4).collect();
        assert_eq!(
            body,
            vec!["<S> a foaf:T ;", "    foaf:a \"a\", \"b\" ;", "    foaf:z \"z\" ."]
        );
    }

    #[test]
    fn longest_prefix_wins_then_earliest() {
        let mut g = RdfGraph::new();
        g.bind_prefix("ex", iri("http://example.com/"));
        g.bind_prefix("exsub", iri("http://example.com/sub/"));
        g.bind_prefix("dup", iri("http://example.com/sub/"));
        g.add_triple(Triple::new(
            iri("http://example.com/sub/a"),
            iri("http://example.com/p"),
            iri("http://example.com/o"),
        ));
        let out = serialize_turtle(&g);
        assert!(out.contains("exsub:a ex:p ex:o ."), "{out}");
    }

    #[test]
    fn relativization_guards() {
        assert_eq!(relative_reference(BASE, "http://fokus.fraunhofer.de/Roman"), Some("Roman"));
        assert_eq!(
            relative_reference(BASE, "http://fokus.fraunhofer.de/.well-known/genid/x"),
            Some(".well-known/genid/x")
        );
        assert_eq!(relative_reference(BASE, BASE), None);
        assert_eq!(relative_reference(BASE, "http://fokus.fraunhofer.de/a#b"), None);
        assert_eq!(relative_reference(BASE, "http://fokus.fraunhofer.de//x"), None);
        assert_eq!(relative_reference(BASE, "http://fokus.fraunhofer.de/a:b"), None);
        assert_eq!(relative_reference(BASE, "http://fokus.fraunhofer.de/../x"), None);
        assert_eq!(relative_reference("http://x/a", "http://x/ab"), None);
        assert_eq!(relative_reference(BASE, "http://other/x"), None);
    }

    #[test]
    fn unsafe_local_names_stay_absolute() {
        let mut g = RdfGraph::new();
        g.bind_prefix("ex", iri("http://example.com/"));
        g.add_triple(Triple::new(
            iri("http://example.com/a/b"),
            iri("http://example.com/p."),
            iri("http://example.com/ok"),
        ));
        let out = serialize_turtle(&g);
        assert!(out.contains("<http://example.com/a/b> <http://example.com/p.> ex:ok ."), "{out}");
    }

    #[test]
    fn escapes_strings_and_blank_node_lookalikes() {
        let g = RdfGraph::new().with_triple(Triple::new(
            iri("http://x/a_:b"),
            iri("http://x/p"),
            Literal::plain("say \"hi\"\n_:x\\"),
        ));
        let out = serialize_turtle(&g);
        assert!(!out.contains("_:"), "{out}");
        assert!(out.contains(r#""say \"hi\"\n\u005F:x\\""#), "{out}");
    }
}
