//! PENMAN notation reader and writer for AMR graphs.
//!
//! Accepted grammar:
//!
//! ```text
//! node     := '(' VAR '/' CONCEPT (ROLE target)* ')'
//! target   := node | '(' VAR ')' | VAR | STRING | SYMBOL
//! ```
//!
//! Metadata lines starting with `#` and `~e.N` alignment suffixes are skipped.
//! A bare symbol is a variable reference when that variable is declared
//! anywhere in the graph; otherwise it is a constant, unless it is shaped like
//! a variable (a letter followed only by digits), which is reported as a
//! reference to an undeclared variable.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;

use super::types::{AmrGraph, Attribute, Constant, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("PENMAN parse error at line {line}, column {column}: {kind}")]
pub struct PenmanError {
    pub line: usize,
    pub column: usize,
    pub kind: PenmanErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PenmanErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("expected {expected}, found {found:?}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unbalanced ')'")]
    UnbalancedClose,
    #[error("variable {var:?} redefined as {second:?} (already {first:?})")]
    ConflictingRedefinition { var: String, first: String, second: String },
    #[error("relation to undeclared variable {0:?}")]
    UndeclaredVariable(String),
    #[error("graph contains a cycle through {0:?}")]
    Cycle(String),
    #[error("trailing input after graph: {0:?}")]
    TrailingInput(String),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Str(String),
    Sym(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "(".into(),
            Tok::Close => ")".into(),
            Tok::Slash => "/".into(),
            Tok::Role(r) => r.clone(),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => s.clone(),
        }
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/' | '~')
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, PenmanError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let mut at_line_start = true;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
                at_line_start = true;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            bump!();
            continue;
        }
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' && at_line_start {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        at_line_start = false;
        match c {
            '(' => {
                bump!();
                out.push((Tok::Open, pos));
            }
            ')' => {
                bump!();
                out.push((Tok::Close, pos));
            }
            '/' => {
                bump!();
                out.push((Tok::Slash, pos));
            }
            '~' => {
                // alignment marker, e.g. ~e.12
                bump!();
                while chars.peek().is_some_and(|&c| !is_delim(c)) {
                    bump!();
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None => {
                            return Err(PenmanError {
                                line: pos.line,
                                column: pos.column,
                                kind: PenmanErrorKind::UnterminatedString,
                            })
                        }
                        Some('\\') => match bump!() {
                            Some(esc) => s.push(esc),
                            None => {
                                return Err(PenmanError {
                                    line: pos.line,
                                    column: pos.column,
                                    kind: PenmanErrorKind::UnterminatedString,
                                })
                            }
                        },
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if is_delim(c) {
                        break;
                    }
                    s.push(c);
                    bump!();
                }
                if s.starts_with(':') && s.len() > 1 {
                    out.push((Tok::Role(s), pos));
                } else {
                    out.push((Tok::Sym(s), pos));
                }
            }
        }
    }
    Ok(out)
}

enum RawTarget {
    Node(usize),
    Ref(String, Pos),
    Str(String),
    Sym(String, Pos),
}

struct RawNode {
    var: String,
    concept: String,
    edges: Vec<(String, RawTarget)>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    nodes: Vec<RawNode>,
}

impl Parser {
    fn err(&self, pos: Pos, kind: PenmanErrorKind) -> PenmanError {
        PenmanError { line: pos.line, column: pos.column, kind }
    }

    fn next(&mut self) -> Result<(Tok, Pos), PenmanError> {
        let t = self.toks.get(self.at).cloned().ok_or_else(|| self.err(self.end, PenmanErrorKind::UnexpectedEof))?;
        self.at += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn expect_sym(&mut self, what: &'static str) -> Result<(String, Pos), PenmanError> {
        match self.next()? {
            (Tok::Sym(s), p) if !s.is_empty() => Ok((s, p)),
            (t, p) => Err(self.err(p, PenmanErrorKind::Unexpected { expected: what, found: t.describe() })),
        }
    }

    /// Parses after the opening parenthesis has been consumed.
    fn node_body(&mut self, allow_ref: bool) -> Result<RawTarget, PenmanError> {
        let (var, var_pos) = self.expect_sym("variable")?;
        match self.next()? {
            (Tok::Slash, _) => {}
            (Tok::Close, _) if allow_ref => return Ok(RawTarget::Ref(var, var_pos)),
            (t, p) => return Err(self.err(p, PenmanErrorKind::Unexpected { expected: "'/'", found: t.describe() })),
        }
        let (concept, _) = self.expect_sym("concept")?;
        let idx = self.nodes.len();
        self.nodes.push(RawNode { var, concept, edges: Vec::new() });
        loop {
            match self.next()? {
                (Tok::Close, _) => break,
                (Tok::Role(role), _) => {
                    let target = match self.next()? {
                        (Tok::Open, _) => self.node_body(true)?,
                        (Tok::Str(s), _) => RawTarget::Str(s),
                        (Tok::Sym(s), p) if !s.is_empty() => RawTarget::Sym(s, p),
                        (t, p) => {
                            return Err(self
                                .err(p, PenmanErrorKind::Unexpected { expected: "role target", found: t.describe() }))
                        }
                    };
                    self.nodes[idx].edges.push((role, target));
                }
                (t, p) => {
                    return Err(
                        self.err(p, PenmanErrorKind::Unexpected { expected: "role or ')'", found: t.describe() })
                    );
                }
            }
        }
        Ok(RawTarget::Node(idx))
    }
}

fn looks_like_variable(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_digit())
}

/// Inverse roles (`:ARG0-of`) flip direction; `:consist-of` is a real role.
pub fn normalize_role(role: &str) -> (String, bool) {
    match role.strip_suffix("-of") {
        Some(base) if role != ":consist-of" && base.len() > 1 => (base.to_string(), true),
        _ => (role.to_string(), false),
    }
}

/// Parses a single PENMAN graph.
pub fn parse_penman(text: &str) -> Result<AmrGraph, PenmanError> {
    let toks = lex(text)?;
    let end =
        toks.last().map(|(_, p)| Pos { line: p.line, column: p.column + 1 }).unwrap_or(Pos { line: 1, column: 1 });
    let mut parser = Parser { toks, at: 0, end, nodes: Vec::new() };

    match parser.next()? {
        (Tok::Open, _) => {
            parser.node_body(false)?;
        }
        (Tok::Close, p) => return Err(parser.err(p, PenmanErrorKind::UnbalancedClose)),
        (t, p) => return Err(parser.err(p, PenmanErrorKind::Unexpected { expected: "'('", found: t.describe() })),
    }
    if let Some(tok) = parser.peek().cloned() {
        let pos = parser.toks[parser.at].1;
        let kind = if tok == Tok::Close {
            PenmanErrorKind::UnbalancedClose
        } else {
            PenmanErrorKind::TrailingInput(tok.describe())
        };
        return Err(parser.err(pos, kind));
    }

    // Declarations first so that forward references resolve.
    let mut instances: IndexMap<String, String> = IndexMap::new();
    for node in &parser.nodes {
        if let Some(first) = instances.get(&node.var) {
            if *first != node.concept {
                // locate the conflicting declaration for the error position
                let pos = parser
                    .toks
                    .windows(3)
                    .filter_map(|w| match (&w[0].0, &w[1].0, &w[2].0) {
                        (Tok::Sym(v), Tok::Slash, Tok::Sym(c)) if *v == node.var && *c == node.concept => Some(w[0].1),
                        _ => None,
                    })
                    .next()
                    .unwrap_or(end);
                return Err(parser.err(
                    pos,
                    PenmanErrorKind::ConflictingRedefinition {
                        var: node.var.clone(),
                        first: first.clone(),
                        second: node.concept.clone(),
                    },
                ));
            }
        } else {
            instances.insert(node.var.clone(), node.concept.clone());
        }
    }

    let mut attributes = Vec::new();
    let mut relations = Vec::new();
    collect_edges(&parser, 0, &instances, &mut attributes, &mut relations)?;

    let root = parser.nodes[0].var.clone();
    let graph = AmrGraph { root, instances, attributes, relations, sentence_ref: None };
    if let Some(var) = find_cycle(&graph) {
        return Err(parser.err(Pos { line: 1, column: 1 }, PenmanErrorKind::Cycle(var)));
    }
    Ok(graph)
}

/// Walks the raw tree from `idx`, emitting relations and attributes in textual order.
fn collect_edges(
    parser: &Parser,
    idx: usize,
    instances: &IndexMap<String, String>,
    attributes: &mut Vec<Attribute>,
    relations: &mut Vec<Relation>,
) -> Result<(), PenmanError> {
    let node = &parser.nodes[idx];
    let relation =
        |target: &str| Relation { source: node.var.clone(), role: String::new(), target: target.to_string() };
    for (role, target) in &node.edges {
        match target {
            RawTarget::Node(i) => {
                relations.push(Relation { role: role.clone(), ..relation(&parser.nodes[*i].var) });
                collect_edges(parser, *i, instances, attributes, relations)?;
            }
            RawTarget::Ref(v, p) => {
                if !instances.contains_key(v) {
                    return Err(parser.err(*p, PenmanErrorKind::UndeclaredVariable(v.clone())));
                }
                relations.push(Relation { role: role.clone(), ..relation(v) });
            }
            RawTarget::Sym(s, p) => {
                if instances.contains_key(s) {
                    relations.push(Relation { role: role.clone(), ..relation(s) });
                } else if looks_like_variable(s) {
                    return Err(parser.err(*p, PenmanErrorKind::UndeclaredVariable(s.clone())));
                } else {
                    attributes.push(Attribute {
                        source: node.var.clone(),
                        role: role.clone(),
                        value: Constant::Symbol(s.clone()),
                    });
                }
            }
            RawTarget::Str(s) => attributes.push(Attribute {
                source: node.var.clone(),
                role: role.clone(),
                value: Constant::Str(s.clone()),
            }),
        }
    }
    Ok(())
}

/// Cycle detection over relations with inverse roles normalized.
fn find_cycle(graph: &AmrGraph) -> Option<String> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in &graph.relations {
        let (_, inverted) = normalize_role(&r.role);
        let (from, to) =
            if inverted { (r.target.as_str(), r.source.as_str()) } else { (r.source.as_str(), r.target.as_str()) };
        adj.entry(from).or_default().push(to);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<&str, u8> = HashMap::new();
    for start in graph.instances.keys() {
        if state.get(start.as_str()).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
        state.insert(start.as_str(), 1);
        while let Some((v, i)) = stack.pop() {
            let succ = adj.get(v).map(Vec::as_slice).unwrap_or(&[]);
            if i < succ.len() {
                stack.push((v, i + 1));
                let w = succ[i];
                match state.get(w).copied().unwrap_or(0) {
                    0 => {
                        state.insert(w, 1);
                        stack.push((w, 0));
                    }
                    1 => return Some(w.to_string()),
                    _ => {}
                }
            } else {
                state.insert(v, 2);
            }
        }
    }
    None
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Serializes to indented PENMAN. Each variable is expanded at its first
/// depth-first visit and referenced bare afterwards.
pub fn to_penman(graph: &AmrGraph) -> String {
    let mut attrs: HashMap<&str, Vec<&Attribute>> = HashMap::new();
    for a in &graph.attributes {
        attrs.entry(a.source.as_str()).or_default().push(a);
    }
    let mut rels: HashMap<&str, Vec<&Relation>> = HashMap::new();
    for r in &graph.relations {
        rels.entry(r.source.as_str()).or_default().push(r);
    }
    let mut out = String::new();
    let mut seen = HashSet::new();
    write_node(graph, &graph.root, 0, &attrs, &rels, &mut seen, &mut out);
    out
}

fn write_node<'g>(
    graph: &'g AmrGraph,
    var: &'g str,
    depth: usize,
    attrs: &HashMap<&str, Vec<&'g Attribute>>,
    rels: &HashMap<&str, Vec<&'g Relation>>,
    seen: &mut HashSet<&'g str>,
    out: &mut String,
) {
    seen.insert(var);
    let concept = graph.concept(var).unwrap_or("");
    let _ = write!(out, "({var} / {concept}");
    let indent = "    ".repeat(depth + 1);
    for a in attrs.get(var).into_iter().flatten() {
        let value = match &a.value {
            Constant::Str(s) => quote(s),
            Constant::Symbol(s) => s.clone(),
        };
        let _ = write!(out, "\n{indent}{} {value}", a.role);
    }
    for r in rels.get(var).into_iter().flatten() {
        let _ = write!(out, "\n{indent}{} ", r.role);
        if seen.contains(r.target.as_str()) {
            out.push_str(&r.target);
        } else {
            write_node(graph, &r.target, depth + 1, attrs, rels, seen, out);
        }
    }
    out.push(')');
}

#[cfg(test)]
pub(crate) const BEDTIME_FOR_TESTS: &str = r#"(a / and
    :op1 (p / put-01
        :ARG0 (p2 / person
            :ARG0-of (h / have-rel-role-91
                :ARG1 (p3 / person
                    :name (n / name
                        :op1 "Peter"))
                :ARG2 (m / mother)))
        :ARG1 p3
        :ARG2 (b / bed))
    :op2 (m2 / make-01
        :ARG0 p2
        :ARG1 (t / tea
            :mod (c / camomile)
            :quant (s / some)))
    :op3 (d / dose-01
        :ARG0 p2
        :ARG1 p3
        :ARG2 t))"#;

#[cfg(test)]
mod tests {
    use super::*;

    const BEDTIME: &str = BEDTIME_FOR_TESTS;

    #[test]
    fn bedtime_graph_shape() {
        let g = parse_penman(BEDTIME).unwrap();
        assert_eq!(g.root, "a");
        let vars: Vec<&str> = g.instances.keys().map(String::as_str).collect();
        assert_eq!(vars, ["a", "p", "p2", "h", "p3", "n", "m", "b", "m2", "t", "c", "s", "d"]);
        assert_eq!(g.concept("p3"), Some("person"));
        let p3_in: Vec<(&str, &str)> =
            g.relations.iter().filter(|r| r.target == "p3").map(|r| (r.source.as_str(), r.role.as_str())).collect();
        assert_eq!(p3_in, [("h", ":ARG1"), ("p", ":ARG1"), ("d", ":ARG1")]);
        assert_eq!(g.attributes.len(), 1);
        assert_eq!(g.attributes[0].role, ":op1");
        assert_eq!(g.attributes[0].value, Constant::Str("Peter".into()));
        assert!(g.relations.iter().any(|r| r.role == ":ARG0-of" && r.source == "p2"));
        assert!(g.relations.iter().any(|r| r.role == ":quant" && r.target == "s"));
    }

    #[test]
    fn minimal_graph() {
        let g = parse_penman("(p / person)").unwrap();
        assert_eq!(g.root, "p");
        assert_eq!(g.instances.len(), 1);
        assert!(g.relations.is_empty() && g.attributes.is_empty());
    }

    #[test]
    fn parenthesized_reference_is_reentrancy() {
        let g = parse_penman("(g / give-01 :ARG0 (m / mother) :ARG1 (t / tea) :ARG2 (m))").unwrap();
        assert_eq!(g.instances.len(), 3);
        assert_eq!(g.relations.iter().filter(|r| r.target == "m").count(), 2);
    }

    #[test]
    fn conflicting_redefinition_is_an_error() {
        let err = parse_penman("(g / give-01 :ARG0 (m / mother) :ARG0 (m / mom))").unwrap_err();
        assert!(matches!(err.kind, PenmanErrorKind::ConflictingRedefinition { ref var, .. } if var == "m"));
        assert_eq!((err.line, err.column), (1, 40));
    }

    #[test]
    fn same_concept_redeclaration_merges() {
        let g = parse_penman("(a / and :op1 (m / mother) :op2 (m / mother :mod (o / old)))").unwrap();
        assert_eq!(g.instances.len(), 3);
    }

    #[test]
    fn error_positions() {
        let err = parse_penman("(a / and\n  :op1 (b / bee)").unwrap_err();
        assert_eq!(err.kind, PenmanErrorKind::UnexpectedEof);
        let err = parse_penman("(a / and))").unwrap_err();
        assert_eq!(err.kind, PenmanErrorKind::UnbalancedClose);
        assert_eq!((err.line, err.column), (1, 10));
        let err = parse_penman("(a / and\n  :op1 x2)").unwrap_err();
        assert_eq!(err.kind, PenmanErrorKind::UndeclaredVariable("x2".into()));
        assert_eq!((err.line, err.column), (2, 8));
        let err = parse_penman("(a / and :op1 (z))").unwrap_err();
        assert_eq!(err.kind, PenmanErrorKind::UndeclaredVariable("z".into()));
        assert!(matches!(parse_penman("(a / and :op1 \"oops)").unwrap_err().kind, PenmanErrorKind::UnterminatedString));
        assert!(matches!(parse_penman("(a / and) (b / bee)").unwrap_err().kind, PenmanErrorKind::TrailingInput(_)));
        assert!(parse_penman("").is_err());
    }

    #[test]
    fn constants_and_metadata() {
        let src = "# ::snt Do not run!\n(r / run-02~e.3 :polarity - :mode imperative :quant 5 :ARG0 (y / you))";
        let g = parse_penman(src).unwrap();
        assert_eq!(g.concept("r"), Some("run-02"));
        let vals: Vec<&str> = g.attributes.iter().map(|a| a.value.text()).collect();
        assert_eq!(vals, ["-", "imperative", "5"]);
    }

    #[test]
    fn cycles_are_rejected() {
        // b :ARG1-of a normalizes to a :ARG1 b, which is not a cycle
        parse_penman("(a / act-01 :ARG0 (b / boy :ARG1-of a))").unwrap();
        let err = parse_penman("(a / act-01 :ARG0 (b / boy :ARG1 a))").unwrap_err();
        assert!(matches!(err.kind, PenmanErrorKind::Cycle(_)));
    }

    #[test]
    fn inverse_reentrancy_is_acyclic() {
        parse_penman("(b / boy :ARG0-of (w / want-01 :ARG1 (g / go-01 :ARG0 b)))").unwrap();
    }

    #[test]
    fn serialize_round_trip_bedtime() {
        let g = parse_penman(BEDTIME).unwrap();
        let text = to_penman(&g);
        let back = parse_penman(&text).unwrap();
        assert_eq!(g, back);
        assert_eq!(text, BEDTIME);
    }

    #[test]
    fn role_normalization() {
        assert_eq!(normalize_role(":ARG0-of"), (":ARG0".into(), true));
        assert_eq!(normalize_role(":consist-of"), (":consist-of".into(), false));
        assert_eq!(normalize_role(":mod"), (":mod".into(), false));
    }
}
