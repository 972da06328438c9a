//! Model file parsing, canonical printing, and DOT/JSON/report emission.
//!
//! The model grammar is line-based; `#` starts a comment anywhere in a line.
//!
//! ```text
//! node <name> <max>                     # declare a node and its top level
//! edge <from> -> <to> [sign=+|-] [observable]
//! init <name>=<level> ...               # unset nodes start at 0
//! option minmax                         # enable the extreme-context rule
//! ```
//!
//! Nodes must be declared before they are referenced. Edge attributes turn
//! into influence constraints; `option minmax` enables the additional
//! extreme-context narrowing.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::constraints::{ConstraintKind, ConstraintSet, InfluenceConstraint};
use crate::model::{Dir, InfluenceGraph, NodeId, Prn, State};
use crate::prefix::{Prefix, PrefixStats};

/// A fully assembled model file: network, constraints and initial state.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub prn: Prn,
    pub constraints: ConstraintSet,
    pub init: State,
}

/// Parse failure, tagged with the 1-based source line.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected `node <name> <max>`")]
    MalformedNode,
    #[error("`{0}` is not a valid node name")]
    BadName(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("maximum level {0} is out of range (0-255)")]
    MaxOutOfRange(u64),
    #[error("expected `edge <from> -> <to> [sign=+|-] [observable]`")]
    MalformedEdge,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("edge `{0} -> {1}` declared twice")]
    DuplicateEdge(String, String),
    #[error("sign given more than once for edge `{0} -> {1}`")]
    ConflictingSigns(String, String),
    #[error("`observable` given more than once for edge `{0} -> {1}`")]
    RepeatedObservable(String, String),
    #[error("expected `init <name>=<level> ...`")]
    MalformedInit,
    #[error("initial level {level} for node `{node}` exceeds its maximum {max}")]
    InitOutOfRange { node: String, level: u64, max: u8 },
    #[error("initial level for node `{0}` set twice")]
    DuplicateInit(String),
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("model needs {0} parameter coordinates, more than the supported {MAX_PARAM_COORDS}")]
    ModelTooLarge(u128),
}

/// Hard cap on the number of parameter coordinates a parsed model may have.
/// Coordinate tables are materialised eagerly, so the cap keeps adversarial
/// inputs (many high-level regulators of one node) from exhausting memory.
pub const MAX_PARAM_COORDS: u128 = 1 << 20;

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<ModelFile, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut max: Vec<u8> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut edge_set: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut constraints: Vec<InfluenceConstraint> = Vec::new();
    let mut init: Vec<Option<u8>> = Vec::new();
    // Number of regulator states of each node so far; their sum is the
    // number of parameter coordinates, kept under MAX_PARAM_COORDS.
    let mut contexts: Vec<u128> = Vec::new();
    let mut coords: u128 = 0;
    let mut minmax = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fail = |kind| Err(ParseError { line, kind });
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let lookup = |name: &str| -> Result<NodeId, ParseError> {
            index
                .get(name)
                .copied()
                .ok_or(ParseError { line, kind: ParseErrorKind::UnknownNode(name.to_string()) })
        };
        match tokens[0] {
            "node" => {
                let [_, name, level] = tokens[..] else {
                    return fail(ParseErrorKind::MalformedNode);
                };
                if !is_identifier(name) {
                    return fail(ParseErrorKind::BadName(name.to_string()));
                }
                if index.contains_key(name) {
                    return fail(ParseErrorKind::DuplicateNode(name.to_string()));
                }
                let Ok(level) = level.parse::<u64>() else {
                    return fail(ParseErrorKind::MalformedNode);
                };
                if level > 255 {
                    return fail(ParseErrorKind::MaxOutOfRange(level));
                }
                index.insert(name.to_string(), names.len());
                names.push(name.to_string());
                max.push(level as u8);
                init.push(None);
                contexts.push(1);
                coords += 1;
                if coords > MAX_PARAM_COORDS {
                    return fail(ParseErrorKind::ModelTooLarge(coords));
                }
            }
            "edge" => {
                if tokens.len() < 4 || tokens[2] != "->" {
                    return fail(ParseErrorKind::MalformedEdge);
                }
                let from = lookup(tokens[1])?;
                let to = lookup(tokens[3])?;
                if !edge_set.insert((from, to)) {
                    return fail(ParseErrorKind::DuplicateEdge(
                        tokens[1].to_string(),
                        tokens[3].to_string(),
                    ));
                }
                let grown = contexts[to] * (max[from] as u128 + 1);
                coords = coords - contexts[to] + grown;
                contexts[to] = grown;
                if coords > MAX_PARAM_COORDS {
                    return fail(ParseErrorKind::ModelTooLarge(coords));
                }
                let mut sign: Option<ConstraintKind> = None;
                let mut observable = false;
                for attr in &tokens[4..] {
                    let kind = match *attr {
                        "sign=+" => Some(ConstraintKind::Positive),
                        "sign=-" => Some(ConstraintKind::Negative),
                        "observable" => None,
                        _ => return fail(ParseErrorKind::MalformedEdge),
                    };
                    match kind {
                        Some(kind) => {
                            if sign.is_some() {
                                return fail(ParseErrorKind::ConflictingSigns(
                                    tokens[1].to_string(),
                                    tokens[3].to_string(),
                                ));
                            }
                            sign = Some(kind);
                        }
                        None => {
                            if observable {
                                return fail(ParseErrorKind::RepeatedObservable(
                                    tokens[1].to_string(),
                                    tokens[3].to_string(),
                                ));
                            }
                            observable = true;
                        }
                    }
                }
                edges.push((from, to));
                if let Some(kind) = sign {
                    constraints.push(InfluenceConstraint::new(from, to, kind));
                }
                if observable {
                    constraints.push(InfluenceConstraint::new(
                        from,
                        to,
                        ConstraintKind::Observable,
                    ));
                }
            }
            "init" => {
                if tokens.len() < 2 {
                    return fail(ParseErrorKind::MalformedInit);
                }
                for assignment in &tokens[1..] {
                    let Some((name, level)) = assignment.split_once('=') else {
                        return fail(ParseErrorKind::MalformedInit);
                    };
                    let v = lookup(name)?;
                    let Ok(level) = level.parse::<u64>() else {
                        return fail(ParseErrorKind::MalformedInit);
                    };
                    if level > max[v] as u64 {
                        return fail(ParseErrorKind::InitOutOfRange {
                            node: name.to_string(),
                            level,
                            max: max[v],
                        });
                    }
                    if init[v].is_some() {
                        return fail(ParseErrorKind::DuplicateInit(name.to_string()));
                    }
                    init[v] = Some(level as u8);
                }
            }
            "option" => {
                let [_, option] = tokens[..] else {
                    return fail(ParseErrorKind::UnknownOption(tokens[1..].join(" ")));
                };
                if option != "minmax" {
                    return fail(ParseErrorKind::UnknownOption(option.to_string()));
                }
                minmax = true;
            }
            other => return fail(ParseErrorKind::UnknownDirective(other.to_string())),
        }
    }

    let graph = InfluenceGraph::new(names, edges).expect("edges validated during parsing");
    let prn = Prn::new(graph, max).expect("domains validated during parsing");
    let constraints =
        ConstraintSet::new(&prn, constraints, minmax).expect("constraints validated during parsing");
    let init = State(init.into_iter().map(|x| x.unwrap_or(0)).collect());
    Ok(ModelFile { prn, constraints, init })
}

/// Renders a model in canonical form; `parse_model` is its inverse.
pub fn print_model(model: &ModelFile) -> String {
    let prn = &model.prn;
    let graph = prn.graph();
    let mut out = String::new();
    for v in 0..prn.node_count() {
        writeln!(out, "node {} {}", graph.name(v), prn.max_of(v)).unwrap();
    }
    for (u, v) in graph.influences() {
        write!(out, "edge {} -> {}", graph.name(u), graph.name(v)).unwrap();
        match model.constraints.sign_of(prn, u, v) {
            Some(1) => write!(out, " sign=+").unwrap(),
            Some(-1) => write!(out, " sign=-").unwrap(),
            _ => {}
        }
        let observable = model
            .constraints
            .iter()
            .any(|c| c.regulator == u && c.target == v && c.kind == ConstraintKind::Observable);
        if observable {
            write!(out, " observable").unwrap();
        }
        out.push('\n');
    }
    let nonzero: Vec<String> = (0..prn.node_count())
        .filter(|&v| model.init.0[v] != 0)
        .map(|v| format!("{}={}", graph.name(v), model.init.0[v]))
        .collect();
    if !nonzero.is_empty() {
        writeln!(out, "init {}", nonzero.join(" ")).unwrap();
    }
    if model.constraints.minmax_enabled() {
        writeln!(out, "option minmax").unwrap();
    }
    out
}

/// Renders a prefix as a deterministic DOT graph: circles for conditions
/// (initial ones filled), boxes for events, dashed boxes for cut-offs.
pub fn emit_dot(prefix: &Prefix, prn: &Prn) -> String {
    let net = &prefix.net;
    let graph = prn.graph();
    let mut out = String::new();
    out.push_str("digraph prefix {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    for c in net.conditions() {
        let style = if c.producer.is_none() {
            ", style=filled, fillcolor=lightblue"
        } else {
            ""
        };
        writeln!(
            out,
            "  c{} [shape=circle, label=\"{} {}\"{}];",
            c.id,
            graph.name(c.node),
            c.level,
            style
        )
        .unwrap();
    }
    for e in net.events() {
        let style = if e.is_cutoff() { ", style=dashed" } else { "" };
        let dir = match e.dir {
            Dir::Up => "+",
            Dir::Down => "-",
        };
        writeln!(
            out,
            "  e{} [shape=box, label=\"{}{}\"{}];",
            e.id,
            graph.name(e.node),
            dir,
            style
        )
        .unwrap();
    }
    for e in net.events() {
        for &c in &e.preset {
            writeln!(out, "  c{} -> e{};", c, e.id).unwrap();
        }
        for &c in &e.postset {
            writeln!(out, "  e{} -> c{};", e.id, c).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// The JSON report schema.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Report {
    pub model: String,
    pub nodes: usize,
    /// Non-cut-off events.
    pub events: usize,
    /// All events, cut-offs included.
    pub events_with_cutoffs: usize,
    pub conditions: usize,
    /// States witnessed by local configurations plus the initial state.
    pub reachable_states: usize,
    /// Wall-clock construction time; populated only on request so that
    /// repeated runs stay byte-identical.
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn new(model: impl Into<String>, prn: &Prn, stats: &PrefixStats) -> Self {
        Report {
            model: model.into(),
            nodes: prn.node_count(),
            events: stats.events_non_cutoff,
            events_with_cutoffs: stats.events_total,
            conditions: stats.conditions,
            reachable_states: stats.reachable_states,
            runtime_ms: None,
        }
    }

    /// The headline event count in `non-cutoff (total)` shape.
    pub fn event_summary(&self) -> String {
        format!("{} ({})", self.events, self.events_with_cutoffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Aligned-table text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "model       {}", self.model).unwrap();
        writeln!(out, "nodes       {}", self.nodes).unwrap();
        writeln!(out, "events      {}", self.event_summary()).unwrap();
        writeln!(out, "conditions  {}", self.conditions).unwrap();
        writeln!(out, "reachable   {}", self.reachable_states).unwrap();
        if let Some(ms) = self.runtime_ms {
            writeln!(out, "runtime_ms  {}", ms).unwrap();
        }
        out
    }
}
