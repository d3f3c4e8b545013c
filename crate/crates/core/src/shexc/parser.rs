use std::collections::{BTreeMap, HashMap};

use super::lexer::{tokenize, NumberKind, Tok, Token};
use super::*;
use crate::rdf::{Iri, Literal, Term};
use crate::vocab;

/// Parses ShExC text into a schema.
pub fn parse_schema(text: &str) -> Result<ShexSchema, ShexError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        base: None,
        prefixes: Vec::new(),
        brace_depth: 0,
        nested_depth: 0,
        io: None,
        anon_counter: 0,
        shapes: Vec::new(),
        shape_labels: HashMap::new(),
        expr_labels: BTreeMap::new(),
        expr_label_pos: HashMap::new(),
        shape_refs: Vec::new(),
        expr_refs: Vec::new(),
    };
    parser.schema()?;
    parser.check_references()?;
    Ok(ShexSchema {
        base: parser.base,
        prefixes: parser.prefixes,
        shapes: parser.shapes,
        triple_expr_labels: parser.expr_labels,
        source: text.to_string(),
    })
}

/// IO annotations collected for the top-level shape being parsed.
#[derive(Default)]
struct IoAnnotations {
    inputs: Option<Vec<Iri>>,
    outputs: Option<Vec<Iri>>,
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    base: Option<Iri>,
    prefixes: Vec<(String, Iri)>,
    /// Open `{` of any shape body.
    brace_depth: usize,
    /// Open nested (anonymous) shape bodies.
    nested_depth: usize,
    io: Option<IoAnnotations>,
    anon_counter: u32,
    shapes: Vec<ShapeDecl>,
    shape_labels: HashMap<Iri, Position>,
    expr_labels: BTreeMap<Iri, TripleExprGroup>,
    expr_label_pos: HashMap<Iri, Position>,
    shape_refs: Vec<(Iri, Position)>,
    expr_refs: Vec<(Iri, Position)>,
}

const FACET_KEYWORDS: &[&str] = &[
    "LENGTH",
    "MINLENGTH",
    "MAXLENGTH",
    "MININCLUSIVE",
    "MINEXCLUSIVE",
    "MAXINCLUSIVE",
    "MAXEXCLUSIVE",
    "TOTALDIGITS",
    "FRACTIONDIGITS",
];

fn syntax(pos: Position, message: impl Into<String>) -> ShexError {
    ShexError::Syntax {
        pos,
        message: message.into(),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::IriRef(i) => format!("<{i}>"),
        Tok::PName { prefix, local } => format!("{prefix}:{local}"),
        Tok::Keyword(k) => k.clone(),
        Tok::A => "a".into(),
        Tok::Str(s) => format!("{s:?}"),
        Tok::LangTag(t) => format!("@{t}"),
        Tok::Number { lexical, .. } => lexical.clone(),
        Tok::Regex { pattern, .. } => format!("/{pattern}/"),
        Tok::Annotation { direction, .. } => format!("#{direction}: annotation"),
        Tok::Eof => "end of input".into(),
        other => {
            let s = match other {
                Tok::LBrace => "{",
                Tok::RBrace => "}",
                Tok::LBracket => "[",
                Tok::RBracket => "]",
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Semi => ";",
                Tok::Comma => ",",
                Tok::Caret => "^",
                Tok::DoubleCaret => "^^",
                Tok::At => "@",
                Tok::Amp => "&",
                Tok::Dollar => "$",
                Tok::Star => "*",
                Tok::Plus => "+",
                Tok::Question => "?",
                _ => ".",
            };
            format!("`{s}`")
        }
    }
}

fn has_scheme(raw: &str) -> bool {
    let mut chars = raw.chars();
    if !chars.next().is_some_and(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    for c in chars {
        if c == ':' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
            return false;
        }
    }
    false
}

fn resolve_iri_ref(base: Option<&Iri>, raw: &str, pos: Position) -> Result<Iri, ShexError> {
    let value = if has_scheme(raw) {
        raw.to_string()
    } else {
        match base {
            Some(base) => format!("{base}{raw}"),
            None => {
                return Err(ShexError::NoBase {
                    pos,
                    iri: raw.to_string(),
                })
            }
        }
    };
    Iri::new(value).map_err(|e| syntax(pos, e.to_string()))
}

fn resolve_pname(
    prefixes: &[(String, Iri)],
    prefix: &str,
    local: &str,
    pos: Position,
) -> Result<Iri, ShexError> {
    let ns = prefixes
        .iter()
        .find(|(l, _)| l == prefix)
        .map(|(_, ns)| ns)
        .ok_or_else(|| ShexError::UnknownPrefix {
            pos,
            prefix: prefix.to_string(),
        })?;
    ns.join(local).map_err(|e| syntax(pos, e.to_string()))
}

fn resolve_raw_token(
    base: Option<&Iri>,
    prefixes: &[(String, Iri)],
    token: &str,
    pos: Position,
) -> Result<Iri, ShexError> {
    if let Some(inner) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return resolve_iri_ref(base, inner, pos);
    }
    match token.split_once(':') {
        Some((prefix, local))
            if prefix
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !local.contains(char::is_whitespace) =>
        {
            resolve_pname(prefixes, prefix, local, pos)
        }
        _ => Err(syntax(pos, format!("expected <iri> or prefixed name, found `{token}`"))),
    }
}

pub(super) fn resolve_token(schema: &ShexSchema, token: &str) -> Result<Iri, ShexError> {
    resolve_raw_token(
        schema.base.as_ref(),
        &schema.prefixes,
        token,
        Position { line: 1, column: 1 },
    )
}

impl Parser {
    fn skip_outer_annotations(&mut self) {
        if self.brace_depth == 0 {
            while matches!(self.tokens[self.idx].tok, Tok::Annotation { .. }) {
                self.idx += 1;
            }
        }
    }

    fn peek(&mut self) -> &Token {
        self.skip_outer_annotations();
        &self.tokens[self.idx]
    }

    fn peek_tok(&mut self) -> &Tok {
        &self.peek().tok
    }

    fn next(&mut self) -> Token {
        self.skip_outer_annotations();
        let token = self.tokens[self.idx].clone();
        if token.tok != Tok::Eof {
            self.idx += 1;
        }
        token
    }

    fn expect(&mut self, expected: Tok, what: &str) -> Result<Position, ShexError> {
        let token = self.next();
        if token.tok == expected {
            Ok(token.pos)
        } else {
            Err(syntax(
                token.pos,
                format!("expected {what}, found {}", describe(&token.tok)),
            ))
        }
    }

    fn resolve_iri_token(&self, token: &Token) -> Option<Result<Iri, ShexError>> {
        match &token.tok {
            Tok::IriRef(raw) => Some(resolve_iri_ref(self.base.as_ref(), raw, token.pos)),
            Tok::PName { prefix, local } => {
                Some(resolve_pname(&self.prefixes, prefix, local, token.pos))
            }
            _ => None,
        }
    }

    /// `<iri>` or `prefix:local`.
    fn iri(&mut self, what: &str) -> Result<(Iri, Position), ShexError> {
        let token = self.next();
        match self.resolve_iri_token(&token) {
            Some(res) => res.map(|iri| (iri, token.pos)),
            None => Err(syntax(
                token.pos,
                format!("expected {what}, found {}", describe(&token.tok)),
            )),
        }
    }

    fn schema(&mut self) -> Result<(), ShexError> {
        loop {
            let token = self.peek().clone();
            match &token.tok {
                Tok::Eof => return Ok(()),
                Tok::Keyword(k) if k == "BASE" => {
                    self.next();
                    let next = self.next();
                    let Tok::IriRef(raw) = &next.tok else {
                        return Err(syntax(next.pos, "expected <iri> after BASE"));
                    };
                    self.base = Some(resolve_iri_ref(self.base.as_ref(), raw, next.pos)?);
                }
                Tok::Keyword(k) if k == "PREFIX" => {
                    self.next();
                    self.prefix_directive()?;
                }
                Tok::Keyword(k) if k == "IMPORT" => {
                    return Err(ShexError::UnsupportedDirective {
                        pos: token.pos,
                        directive: "IMPORT".into(),
                    })
                }
                Tok::Keyword(k) => {
                    return Err(syntax(token.pos, format!("unsupported keyword {k}")));
                }
                _ => self.shape_decl()?,
            }
        }
    }

    fn prefix_directive(&mut self) -> Result<(), ShexError> {
        let label_token = self.next();
        let label = match &label_token.tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix.clone(),
            other => {
                return Err(syntax(
                    label_token.pos,
                    format!("expected prefix label after PREFIX, found {}", describe(other)),
                ))
            }
        };
        let ns_token = self.next();
        let Tok::IriRef(raw) = &ns_token.tok else {
            return Err(syntax(ns_token.pos, "expected <iri> after prefix label"));
        };
        let ns = resolve_iri_ref(self.base.as_ref(), raw, ns_token.pos)?;
        match self.prefixes.iter_mut().find(|(l, _)| *l == label) {
            Some(slot) => slot.1 = ns,
            None => self.prefixes.push((label, ns)),
        }
        Ok(())
    }

    fn shape_decl(&mut self) -> Result<(), ShexError> {
        let mut inverse_shorthand = false;
        if *self.peek_tok() == Tok::Caret {
            self.next();
            inverse_shorthand = true;
        }
        let (label, pos) = self.iri("shape label")?;
        let (body, io) = if !inverse_shorthand && *self.peek_tok() == Tok::LBrace {
            self.io = Some(IoAnnotations::default());
            let body = self.braced_body(false)?;
            (body, self.io.take().unwrap_or_default())
        } else {
            let tc = self.triple_constraint(inverse_shorthand)?;
            (
                TripleExprGroup {
                    items: vec![TripleExprItem::Constraint(tc)],
                },
                IoAnnotations::default(),
            )
        };
        if self.shape_labels.contains_key(&label) {
            return Err(ShexError::DuplicateLabel {
                pos,
                kind: LabelKind::Shape,
                label,
            });
        }
        self.shape_labels.insert(label.clone(), pos);
        self.shapes.push(ShapeDecl {
            label: ShapeLabel::Named(label),
            inputs: io.inputs.unwrap_or_default(),
            outputs: io.outputs.unwrap_or_default(),
            body,
        });
        Ok(())
    }

    fn braced_body(&mut self, nested: bool) -> Result<TripleExprGroup, ShexError> {
        self.expect(Tok::LBrace, "`{`")?;
        self.brace_depth += 1;
        if nested {
            self.nested_depth += 1;
        }
        let group = self.items(Tok::RBrace, "`;` or `}`")?;
        self.brace_depth -= 1;
        if nested {
            self.nested_depth -= 1;
        }
        Ok(group)
    }

    /// Triple expressions separated by `;` up to and including `terminator`.
    fn items(&mut self, terminator: Tok, what: &str) -> Result<TripleExprGroup, ShexError> {
        let mut items = Vec::new();
        loop {
            self.annotations()?;
            if *self.peek_tok() == terminator {
                self.next();
                break;
            }
            items.push(self.unit()?);
            self.annotations()?;
            let token = self.next();
            match &token.tok {
                Tok::Semi => {}
                t if *t == terminator => break,
                other => {
                    return Err(syntax(
                        token.pos,
                        format!("expected {what}, found {}", describe(other)),
                    ))
                }
            }
        }
        Ok(TripleExprGroup { items })
    }

    fn annotations(&mut self) -> Result<(), ShexError> {
        loop {
            let token = self.peek().clone();
            let Tok::Annotation { direction, text } = &token.tok else {
                return Ok(());
            };
            self.next();
            if self.nested_depth > 0 || self.io.is_none() {
                return Err(syntax(
                    token.pos,
                    format!("#{direction}: annotations are only allowed in top-level shapes"),
                ));
            }
            let entries = self.annotation_entries(text, token.pos)?;
            let io = self.io.as_mut().expect("checked above");
            let slot = match direction {
                Direction::In => &mut io.inputs,
                Direction::Out => &mut io.outputs,
            };
            if slot.is_some() {
                return Err(ShexError::DuplicateAnnotation {
                    pos: token.pos,
                    direction: *direction,
                });
            }
            *slot = Some(entries);
        }
    }

    fn annotation_entries(&self, text: &str, pos: Position) -> Result<Vec<Iri>, ShexError> {
        let mut entries = Vec::new();
        if text.trim().is_empty() {
            return Ok(entries);
        }
        for raw in text.split(',') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(syntax(pos, "empty entry in annotation list"));
            }
            let iri = resolve_raw_token(self.base.as_ref(), &self.prefixes, raw, pos)?;
            if !iri.is_exvar() {
                return Err(syntax(
                    pos,
                    format!("annotation entry {raw} is not in the exVar namespace {}", vocab::EXVAR_NS),
                ));
            }
            if entries.contains(&iri) {
                return Err(syntax(pos, format!("annotation entry {raw} listed twice")));
            }
            entries.push(iri);
        }
        Ok(entries)
    }

    fn unit(&mut self) -> Result<TripleExprItem, ShexError> {
        match self.peek_tok() {
            Tok::Amp => {
                self.next();
                let (label, pos) = self.iri("triple expression label")?;
                self.expr_refs.push((label.clone(), pos));
                Ok(TripleExprItem::ExprRef(label))
            }
            Tok::Dollar => {
                self.next();
                let (label, pos) = self.iri("triple expression label")?;
                self.expect(Tok::LParen, "`(`")?;
                let group = self.items(Tok::RParen, "`;` or `)`")?;
                if group.items.is_empty() {
                    return Err(syntax(pos, "labeled triple expression is empty"));
                }
                if self.expr_labels.contains_key(&label) {
                    return Err(ShexError::DuplicateLabel {
                        pos,
                        kind: LabelKind::TripleExpression,
                        label,
                    });
                }
                self.expr_labels.insert(label.clone(), group.clone());
                self.expr_label_pos.insert(label.clone(), pos);
                Ok(TripleExprItem::Labeled(label, group))
            }
            _ => Ok(TripleExprItem::Constraint(self.triple_constraint(false)?)),
        }
    }

    fn triple_constraint(&mut self, inverse: bool) -> Result<TripleConstraintDecl, ShexError> {
        let mut inverse = inverse;
        if *self.peek_tok() == Tok::Caret {
            self.next();
            inverse = true;
        }
        let token = self.next();
        let predicate = match &token.tok {
            Tok::A => Iri::new(vocab::RDF_TYPE).expect("valid constant"),
            _ => match self.resolve_iri_token(&token) {
                Some(res) => res?,
                None => {
                    return Err(syntax(
                        token.pos,
                        format!("expected predicate, found {}", describe(&token.tok)),
                    ))
                }
            },
        };
        if predicate.is_exvar() {
            return Err(syntax(token.pos, "exVar IRIs cannot be used as predicates"));
        }
        let value_expr = self.value_expr()?;
        let cardinality = self.cardinality()?;
        Ok(TripleConstraintDecl {
            inverse,
            predicate,
            value_expr,
            cardinality,
        })
    }

    fn value_expr(&mut self) -> Result<ValueExpr, ShexError> {
        let token = self.peek().clone();
        let constraint = match &token.tok {
            Tok::LBracket => {
                self.next();
                NodeConstraintDecl::ValueSet(self.value_set(token.pos)?)
            }
            Tok::LBrace => {
                let ordinal = self.anon_counter;
                self.anon_counter += 1;
                let body = self.braced_body(true)?;
                return Ok(ValueExpr::Nested(Box::new(ShapeDecl {
                    label: ShapeLabel::Anonymous(ordinal),
                    inputs: Vec::new(),
                    outputs: Vec::new(),
                    body,
                })));
            }
            Tok::At => {
                self.next();
                let (label, pos) = self.iri("shape label")?;
                self.shape_refs.push((label.clone(), pos));
                return Ok(ValueExpr::ShapeRef(label));
            }
            Tok::Keyword(k) => {
                let kind = match k.as_str() {
                    "IRI" => Some(NodeKind::Iri),
                    "BNODE" => Some(NodeKind::BNode),
                    "LITERAL" => Some(NodeKind::Literal),
                    "NONLITERAL" => Some(NodeKind::NonLiteral),
                    _ => None,
                };
                match kind {
                    Some(kind) => {
                        self.next();
                        let facets = self.facets()?;
                        NodeConstraintDecl::NodeKind { kind, facets }
                    }
                    None if FACET_KEYWORDS.contains(&k.as_str()) => {
                        NodeConstraintDecl::Facets(self.facets()?)
                    }
                    None => {
                        return Err(syntax(token.pos, format!("unsupported keyword {k}")));
                    }
                }
            }
            Tok::Regex { .. } => NodeConstraintDecl::Facets(self.facets()?),
            Tok::IriRef(_) | Tok::PName { .. } => {
                let (iri, _) = self.iri("datatype")?;
                if iri.is_exvar() {
                    NodeConstraintDecl::ValueSet(vec![ValueSetValue::ExVar(iri)])
                } else {
                    let facets = self.facets()?;
                    NodeConstraintDecl::Datatype {
                        datatype: iri,
                        facets,
                    }
                }
            }
            Tok::Dot => {
                self.next();
                NodeConstraintDecl::Wildcard
            }
            other => {
                return Err(syntax(
                    token.pos,
                    format!("expected node constraint, found {}", describe(other)),
                ))
            }
        };
        Ok(ValueExpr::Node(constraint))
    }

    fn value_set(&mut self, open: Position) -> Result<Vec<ValueSetValue>, ShexError> {
        let mut values = Vec::new();
        loop {
            let token = self.next();
            let value = match &token.tok {
                Tok::RBracket => break,
                Tok::IriRef(_) | Tok::PName { .. } => {
                    let iri = self.resolve_iri_token(&token).expect("iri token")?;
                    if iri.is_exvar() {
                        ValueSetValue::ExVar(iri)
                    } else {
                        ValueSetValue::Term(Term::Iri(iri))
                    }
                }
                Tok::Str(lexical) => ValueSetValue::Term(Term::Literal(self.literal_suffix(lexical)?)),
                Tok::Number { lexical, kind } => {
                    let dt = match kind {
                        NumberKind::Integer => vocab::XSD_INTEGER,
                        NumberKind::Decimal => vocab::XSD_DECIMAL,
                        NumberKind::Double => vocab::XSD_DOUBLE,
                    };
                    ValueSetValue::Term(Term::Literal(Literal::typed(
                        lexical.clone(),
                        Iri::new(dt).expect("valid constant"),
                    )))
                }
                Tok::Keyword(k) if k == "TRUE" || k == "FALSE" => ValueSetValue::Term(Term::Literal(
                    Literal::typed(k.to_ascii_lowercase(), Iri::new(vocab::XSD_BOOLEAN).expect("valid constant")),
                )),
                Tok::LangTag(tag) => ValueSetValue::Language(tag.clone()),
                Tok::Eof => return Err(syntax(open, "unterminated value set")),
                other => {
                    return Err(syntax(
                        token.pos,
                        format!("unexpected {} in value set", describe(other)),
                    ))
                }
            };
            values.push(value);
        }
        if values.is_empty() {
            return Err(syntax(open, "empty value set"));
        }
        Ok(values)
    }

    fn literal_suffix(&mut self, lexical: &str) -> Result<Literal, ShexError> {
        match self.peek_tok().clone() {
            Tok::LangTag(tag) => {
                self.next();
                Ok(Literal::with_language(lexical, tag))
            }
            Tok::DoubleCaret => {
                self.next();
                let (datatype, pos) = self.iri("datatype IRI")?;
                if datatype.is_exvar() {
                    return Err(syntax(pos, "exVar IRIs cannot be used as datatypes"));
                }
                Ok(Literal::typed(lexical, datatype))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }

    fn facets(&mut self) -> Result<Vec<Facet>, ShexError> {
        let mut facets = Vec::new();
        loop {
            let token = self.peek().clone();
            let facet = match &token.tok {
                Tok::Regex { pattern, flags } => {
                    self.next();
                    Facet::String(StringFacet::Pattern {
                        pattern: pattern.clone(),
                        flags: flags.clone(),
                    })
                }
                Tok::Keyword(k) if FACET_KEYWORDS.contains(&k.as_str()) => {
                    self.next();
                    let arg = self.next();
                    let Tok::Number { lexical, kind } = &arg.tok else {
                        return Err(syntax(arg.pos, format!("expected number after {k}")));
                    };
                    let count = || -> Result<u64, ShexError> {
                        if *kind != NumberKind::Integer {
                            return Err(syntax(arg.pos, format!("{k} takes an integer")));
                        }
                        lexical
                            .parse::<u64>()
                            .map_err(|_| syntax(arg.pos, format!("{k} takes a non-negative integer")))
                    };
                    let numeric = |kind| {
                        Facet::Numeric(NumericFacet {
                            kind,
                            value: lexical.clone(),
                        })
                    };
                    match k.as_str() {
                        "LENGTH" => Facet::String(StringFacet::Length(count()?)),
                        "MINLENGTH" => Facet::String(StringFacet::MinLength(count()?)),
                        "MAXLENGTH" => Facet::String(StringFacet::MaxLength(count()?)),
                        "MININCLUSIVE" => numeric(NumericFacetKind::MinInclusive),
                        "MINEXCLUSIVE" => numeric(NumericFacetKind::MinExclusive),
                        "MAXINCLUSIVE" => numeric(NumericFacetKind::MaxInclusive),
                        "MAXEXCLUSIVE" => numeric(NumericFacetKind::MaxExclusive),
                        "TOTALDIGITS" => {
                            count()?;
                            numeric(NumericFacetKind::TotalDigits)
                        }
                        _ => {
                            count()?;
                            numeric(NumericFacetKind::FractionDigits)
                        }
                    }
                }
                _ => return Ok(facets),
            };
            facets.push(facet);
        }
    }

    fn cardinality(&mut self) -> Result<Cardinality, ShexError> {
        let token = self.peek().clone();
        let card = match &token.tok {
            Tok::Star => Cardinality { min: 0, max: None },
            Tok::Plus => Cardinality { min: 1, max: None },
            Tok::Question => Cardinality { min: 0, max: Some(1) },
            Tok::LBrace => {
                self.next();
                let min = self.card_bound()?;
                let max = if *self.peek_tok() == Tok::Comma {
                    self.next();
                    match self.peek_tok() {
                        Tok::Star => {
                            self.next();
                            None
                        }
                        Tok::RBrace => None,
                        _ => Some(self.card_bound()?),
                    }
                } else {
                    Some(min)
                };
                self.expect(Tok::RBrace, "`}` closing cardinality")?;
                if max.is_some_and(|m| m < min) {
                    return Err(syntax(token.pos, "cardinality maximum is below its minimum"));
                }
                return Ok(Cardinality { min, max });
            }
            _ => return Ok(Cardinality::ONE),
        };
        self.next();
        Ok(card)
    }

    fn card_bound(&mut self) -> Result<u32, ShexError> {
        let token = self.next();
        match &token.tok {
            Tok::Number {
                lexical,
                kind: NumberKind::Integer,
            } => lexical
                .parse::<u32>()
                .map_err(|_| syntax(token.pos, "cardinality must be a non-negative integer")),
            other => Err(syntax(
                token.pos,
                format!("expected cardinality bound, found {}", describe(other)),
            )),
        }
    }

    fn check_references(&self) -> Result<(), ShexError> {
        for (label, pos) in &self.shape_refs {
            if !self.shape_labels.contains_key(label) {
                return Err(ShexError::UnresolvedReference {
                    pos: *pos,
                    kind: LabelKind::Shape,
                    label: label.clone(),
                });
            }
        }
        for (label, pos) in &self.expr_refs {
            if !self.expr_labels.contains_key(label) {
                return Err(ShexError::UnresolvedReference {
                    pos: *pos,
                    kind: LabelKind::TripleExpression,
                    label: label.clone(),
                });
            }
        }
        self.check_cycles()
    }

    fn check_cycles(&self) -> Result<(), ShexError> {
        fn refs(group: &TripleExprGroup, out: &mut Vec<Iri>) {
            for item in &group.items {
                match item {
                    TripleExprItem::ExprRef(label) => out.push(label.clone()),
                    TripleExprItem::Labeled(_, inner) => refs(inner, out),
                    TripleExprItem::Constraint(tc) => {
                        if let ValueExpr::Nested(shape) = &tc.value_expr {
                            refs(&shape.body, out);
                        }
                    }
                }
            }
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit(
            label: &Iri,
            graph: &HashMap<&Iri, Vec<Iri>>,
            marks: &mut HashMap<Iri, Mark>,
        ) -> Result<(), Iri> {
            match marks.get(label) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Active) => return Err(label.clone()),
                None => {}
            }
            marks.insert(label.clone(), Mark::Active);
            for next in graph.get(label).into_iter().flatten() {
                visit(next, graph, marks)?;
            }
            marks.insert(label.clone(), Mark::Done);
            Ok(())
        }
        let graph: HashMap<&Iri, Vec<Iri>> = self
            .expr_labels
            .iter()
            .map(|(label, group)| {
                let mut out = Vec::new();
                refs(group, &mut out);
                (label, out)
            })
            .collect();
        let mut marks = HashMap::new();
        for label in self.expr_labels.keys() {
            if let Err(label) = visit(label, &graph, &mut marks) {
                let pos = self.expr_label_pos.get(&label).copied().unwrap_or(Position {
                    line: 1,
                    column: 1,
                });
                return Err(ShexError::CyclicReference { pos, label });
            }
        }
        Ok(())
    }
}
