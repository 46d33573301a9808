//! Graph construction from AMR parses.
//!
//! Per AMR graph:
//! - PropBank-sense concepts (`give-01`) become action nodes, one per occurrence.
//!   Relational frames (`have-rel-role-91` and other `-9N` frames) are not actions.
//! - Other concepts become entity nodes, except structural ones (`and`, `or`,
//!   `name`, `amr-unknown`, ...) and descriptors folded into a parent entity's
//!   mention text (`:mod`, `:quant`, `:part-of`, the role concept of a
//!   `have-rel-role-91` frame, ...).
//! - Any role between an action and an entity is an action-entity edge
//!   (`:ARGn` is written `An`); coordinations distribute the edge over their ops.
//! - Actions are ordered depth-first with `:opN` children visited by `N`, and
//!   chained with `next` edges.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use regex::Regex;

use super::merge::{merge, Fragment, LocalNode};
use super::{check_kind, BuildError, GroundedKg};
use crate::exec::Execution;
use crate::ingest::penman::normalize_role;
use crate::ingest::{AmrGraph, Constant, DocumentParse, ParseKind, SentenceParses, TextId};

static SENSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z][a-z0-9'_-]*-(\d{2,3})$").unwrap());

const COORDINATION: &[&str] = &["and", "or", "either", "neither", "multi-sentence", "slash"];
const STRUCTURAL: &[&str] = &["name", "amr-unknown", "amr-choice", "amr-empty"];
const MAX_MENTION_DEPTH: usize = 3;
/// Quantifier concepts that read as determiners ("some tea", not "some of tea").
const DETERMINERS: &[&str] =
    &["some", "many", "few", "all", "several", "much", "more", "most", "any", "no", "each", "every"];

/// True for PropBank-style `lemma-NN` concepts, excluding `-9N` relational frames.
pub fn is_action_concept(concept: &str) -> bool {
    match SENSE.captures(concept) {
        Some(c) => !c[1].starts_with('9'),
        None => false,
    }
}

fn is_relational(concept: &str) -> bool {
    SENSE.captures(concept).is_some_and(|c| c[1].starts_with('9'))
}

fn is_role_frame(concept: &str) -> bool {
    matches!(concept, "have-rel-role-91" | "have-org-role-91")
}

/// `give-01` -> `give`.
pub(crate) fn lemma(concept: &str) -> &str {
    match SENSE.captures(concept) {
        Some(c) => &concept[..concept.len() - c[1].len() - 1],
        None => concept,
    }
}

/// `:ARG1` -> `A1`, `:location` -> `location`.
pub(crate) fn edge_role(role: &str) -> String {
    let bare = role.trim_start_matches(':');
    match bare.strip_prefix("ARG") {
        Some(n) if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => format!("A{n}"),
        _ => bare.to_string(),
    }
}

/// Position of an `:opN` / `:sntN` coordination member.
fn op_index(role: &str) -> Option<u32> {
    role.strip_prefix(":op").or_else(|| role.strip_prefix(":snt")).and_then(|n| n.parse().ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Action,
    Entity,
    Coordination,
    Relational,
    Structural,
}

fn classify(concept: &str) -> Kind {
    if is_action_concept(concept) {
        Kind::Action
    } else if is_relational(concept) {
        Kind::Relational
    } else if COORDINATION.contains(&concept) {
        Kind::Coordination
    } else if STRUCTURAL.contains(&concept) {
        Kind::Structural
    } else {
        Kind::Entity
    }
}

struct View<'g> {
    graph: &'g AmrGraph,
    kinds: HashMap<&'g str, Kind>,
    /// Children in the direction written, textual order.
    written: HashMap<&'g str, Vec<(&'g str, &'g str)>>,
    /// `(source, role, target)` with inverse roles flipped.
    normalized: Vec<(&'g str, String, &'g str)>,
}

impl<'g> View<'g> {
    fn new(graph: &'g AmrGraph) -> Self {
        let kinds = graph.instances.iter().map(|(v, c)| (v.as_str(), classify(c))).collect();
        let mut written: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
        let mut normalized = Vec::with_capacity(graph.relations.len());
        for r in &graph.relations {
            written.entry(r.source.as_str()).or_default().push((r.role.as_str(), r.target.as_str()));
            let (role, inverted) = normalize_role(&r.role);
            if inverted {
                normalized.push((r.target.as_str(), role, r.source.as_str()));
            } else {
                normalized.push((r.source.as_str(), role, r.target.as_str()));
            }
        }
        Self { graph, kinds, written, normalized }
    }

    fn kind(&self, var: &str) -> Kind {
        self.kinds.get(var).copied().unwrap_or(Kind::Structural)
    }

    fn concept(&self, var: &str) -> &'g str {
        self.graph.concept(var).unwrap_or("")
    }

    fn children(&self, var: &str) -> &[(&'g str, &'g str)] {
        self.written.get(var).map(Vec::as_slice).unwrap_or(&[])
    }

    fn attrs(&self, var: &'g str) -> impl Iterator<Item = (&'g str, &'g Constant)> + 'g {
        self.graph.attributes.iter().filter(move |a| a.source == var).map(|a| (a.role.as_str(), &a.value))
    }

    fn out(&self, var: &str, role: &str) -> Option<&'g str> {
        self.normalized.iter().find(|(s, r, _)| *s == var && r == role).map(|(_, _, t)| *t)
    }

    fn name_of(&self, var: &'g str) -> Option<String> {
        let (_, name_var) = self.children(var).iter().find(|(r, _)| *r == ":name")?;
        let mut ops: Vec<(u32, &str)> =
            self.attrs(name_var).filter_map(|(r, c)| op_index(r).map(|i| (i, c.text()))).collect();
        ops.sort_by_key(|(i, _)| *i);
        let name = ops.iter().map(|(_, s)| *s).collect::<Vec<_>>().join(" ");
        (!name.trim().is_empty()).then_some(name)
    }

    /// Relational frame in which `var` is the ARG0 (`person :ARG0-of have-rel-role-91`).
    fn role_frame(&self, var: &str) -> Option<&'g str> {
        self.normalized
            .iter()
            .find(|(s, r, t)| *t == var && r == ":ARG0" && is_role_frame(self.concept(s)))
            .map(|(s, _, _)| *s)
    }

    fn label(&self, var: &'g str) -> String {
        if let Some(name) = self.name_of(var) {
            return name;
        }
        if let Some(frame) = self.role_frame(var) {
            if let Some(role) = self.out(frame, ":ARG2") {
                if self.kind(role) == Kind::Entity {
                    return self.concept(role).to_string();
                }
            }
        }
        self.concept(var).to_string()
    }

    /// Full mention (quantifier, modifiers, head, trailing descriptors) and core
    /// mention (modifiers and head).
    fn mentions(&self, var: &'g str, depth: usize, visiting: &mut HashSet<&'g str>) -> (String, String) {
        let head = self.label(var);
        if depth >= MAX_MENTION_DEPTH || !visiting.insert(var) {
            return (head.clone(), head);
        }
        let mut quant: Vec<String> = Vec::new();
        let mut pre: Vec<String> = Vec::new();
        let mut post: Vec<String> = Vec::new();

        for (role, value) in self.attrs(var) {
            match role {
                ":quant" => quant.push(value.text().to_string()),
                ":polarity" if value.text() == "-" => pre.insert(0, "no".to_string()),
                ":mod" | ":value" | ":ord" | ":degree" | ":age" => pre.push(value.text().to_string()),
                _ => {}
            }
        }
        if let Some(frame) = self.role_frame(var) {
            if let Some(rel) = self.out(frame, ":ARG1") {
                if self.kind(rel) == Kind::Entity && rel != var {
                    post.push(format!("of {}", self.mentions(rel, depth + 1, visiting).0));
                }
            }
        }
        for &(role, child) in self.children(var) {
            if role == ":name" {
                continue;
            }
            let rendered = match self.kind(child) {
                Kind::Entity => self.mentions(child, depth + 1, visiting).0,
                Kind::Coordination => self.coordination_mention(child, depth + 1, visiting),
                _ => continue,
            };
            if rendered.is_empty() {
                continue;
            }
            match role {
                ":quant" if DETERMINERS.contains(&self.concept(child)) => quant.push(rendered),
                ":quant" => quant.push(format!("{rendered} of")),
                ":mod" | ":degree" | ":age" | ":ord" | ":value" | ":color" => pre.push(rendered),
                ":poss" | ":part-of" | ":consist-of" | ":topic" | ":part" | ":subset-of" => {
                    post.push(format!("of {rendered}"))
                }
                ":location" => post.push(format!("in {rendered}")),
                ":source" => post.push(format!("from {rendered}")),
                ":destination" | ":direction" => post.push(format!("to {rendered}")),
                ":accompanier" | ":instrument" => post.push(format!("with {rendered}")),
                ":beneficiary" | ":purpose" => post.push(format!("for {rendered}")),
                _ => post.push(rendered),
            }
        }
        visiting.remove(var);

        let core = pre.iter().cloned().chain(std::iter::once(head.clone())).collect::<Vec<_>>().join(" ");
        let full = quant.into_iter().chain(pre).chain(std::iter::once(head)).chain(post).collect::<Vec<_>>().join(" ");
        (full, core)
    }

    fn coordination_mention(&self, var: &'g str, depth: usize, visiting: &mut HashSet<&'g str>) -> String {
        let parts: Vec<String> = self
            .ops(var)
            .into_iter()
            .filter(|v| self.kind(v) == Kind::Entity)
            .map(|v| self.mentions(v, depth, visiting).0)
            .collect();
        match parts.len() {
            0 => String::new(),
            1 => parts[0].clone(),
            n => format!("{} {} {}", parts[..n - 1].join(", "), self.concept(var), parts[n - 1]),
        }
    }

    /// `:opN` children ordered by N.
    fn ops(&self, var: &str) -> Vec<&'g str> {
        let mut ops: Vec<(u32, &str)> =
            self.children(var).iter().filter_map(|(r, t)| op_index(r).map(|i| (i, *t))).collect();
        ops.sort_by_key(|(i, _)| *i);
        ops.into_iter().map(|(_, t)| t).collect()
    }

    /// Entities reachable through (possibly nested) coordination.
    fn distribute(&self, var: &'g str, out: &mut Vec<&'g str>) {
        match self.kind(var) {
            Kind::Entity => out.push(var),
            Kind::Coordination => {
                for op in self.ops(var) {
                    self.distribute(op, out);
                }
            }
            _ => {}
        }
    }

    /// Actions in depth-first order from the root; coordination ops by index.
    fn action_order(&self) -> Vec<&'g str> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        self.visit(&self.graph.root, &mut seen, &mut order);
        // unreachable variables cannot occur in a parsed tree, but keep them anyway
        for v in self.graph.instances.keys() {
            if self.kind(v) == Kind::Action && !seen.contains(v.as_str()) {
                self.visit(v, &mut seen, &mut order);
            }
        }
        order
    }

    fn visit(&self, var: &'g str, seen: &mut HashSet<&'g str>, order: &mut Vec<&'g str>) {
        if !seen.insert(var) {
            return;
        }
        if self.kind(var) == Kind::Action {
            order.push(var);
        }
        let mut children: Vec<(Option<u32>, usize, &str)> =
            self.children(var).iter().enumerate().map(|(i, (r, t))| (op_index(r), i, *t)).collect();
        if self.kind(var) == Kind::Coordination {
            children.sort_by_key(|(op, i, _)| (op.unwrap_or(u32::MAX), *i));
        }
        for (_, _, child) in children {
            self.visit(child, seen, order);
        }
    }

    fn fragment(&self) -> Fragment {
        let mut frag = Fragment::default();
        let actions = self.action_order();
        let action_idx: HashMap<&str, usize> = actions.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        for &a in &actions {
            let concept = self.concept(a);
            let negated = self.attrs(a).any(|(r, c)| r == ":polarity" && c.text() == "-");
            let surface = if negated { format!("not {}", lemma(concept)) } else { lemma(concept).to_string() };
            frag.actions.push(LocalNode { label: concept.to_string(), texts: vec![surface] });
        }

        // (action, entity, role) links, and which entities stand on their own
        let mut links: Vec<(&str, &str, String)> = Vec::new();
        let mut independent: HashSet<&str> = HashSet::new();
        let mut top = Vec::new();
        self.distribute(&self.graph.root, &mut top);
        independent.extend(top);
        for (s, role, t) in &self.normalized {
            let (action, other) = match (self.kind(s), self.kind(t)) {
                (Kind::Action, Kind::Entity | Kind::Coordination) => (*s, *t),
                (Kind::Entity, Kind::Action) => (*t, *s),
                (Kind::Relational, Kind::Entity) if role == ":ARG1" => {
                    independent.insert(*t);
                    continue;
                }
                (Kind::Entity, Kind::Entity) if role == ":poss" => {
                    independent.insert(*t);
                    continue;
                }
                _ => continue,
            };
            let mut targets = Vec::new();
            self.distribute(other, &mut targets);
            for e in targets {
                independent.insert(e);
                links.push((action, e, edge_role(role)));
            }
        }
        for v in self.graph.instances.keys() {
            if self.kind(v) == Kind::Entity && self.name_of(v).is_some() {
                independent.insert(v.as_str());
            }
        }

        let mut keys: HashMap<&str, String> = HashMap::new();
        for v in self.graph.instances.keys() {
            let v = v.as_str();
            if self.kind(v) != Kind::Entity || !independent.contains(v) {
                continue;
            }
            let label = self.label(v);
            if label.trim().is_empty() {
                continue;
            }
            let (full, core) = self.mentions(v, 0, &mut HashSet::new());
            let key = frag.add_entity(&label, [full, core]);
            keys.insert(v, key);
        }
        for (action, entity, role) in links {
            if let Some(key) = keys.get(entity) {
                frag.add_edge(action_idx[action], key.clone(), role);
            }
        }
        frag
    }
}

/// Builds the graph for one AMR graph in isolation (no global merge).
pub(crate) fn amr_fragment(graph: &AmrGraph) -> Fragment {
    View::new(graph).fragment()
}

pub fn build_from_amr(parse: &DocumentParse) -> Result<GroundedKg, BuildError> {
    build_from_amr_with(parse, Execution::default())
}

pub fn build_from_amr_with(parse: &DocumentParse, exec: Execution) -> Result<GroundedKg, BuildError> {
    check_kind(parse, ParseKind::Amr)?;
    let sentences: Vec<(&TextId, &SentenceParses)> = parse.parses.iter().collect();
    let per_sentence = exec.map(&sentences, |(tid, parses)| {
        let frags = match parses {
            SentenceParses::Amr(graphs) => graphs.iter().map(amr_fragment).collect(),
            SentenceParses::Srl(_) => Vec::new(),
        };
        (**tid, frags)
    });
    Ok(merge(parse, per_sentence))
}
