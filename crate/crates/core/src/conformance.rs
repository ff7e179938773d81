//! Pre-defined process models and expected/unexpected classification.
//!
//! A model is a directly-follows graph: an edge `A -> B` states that B may
//! start once A has completed, with branching read as exclusive choice.
//! A path is *expected* when it is a walk from the start pseudo-node to the
//! end pseudo-node; anything else — including, possibly, a scenario's
//! normal flow — is *unexpected*.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Reserved start pseudo-node.
pub const START: &str = "__START__";
/// Reserved end pseudo-node.
pub const END: &str = "__END__";

/// Whether a path is described by the process model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expectedness {
    Expected,
    Unexpected,
}

impl Expectedness {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectedness::Expected => "expected",
            Expectedness::Unexpected => "unexpected",
        }
    }
}

/// A directly-follows process model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessModel {
    /// Activity labels, excluding the two pseudo-nodes.
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl ProcessModel {
    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.contains(&(from.to_string(), to.to_string()))
    }

    /// Build a model from explicit edges, enforcing the same invariants as
    /// [`parse_model`].
    pub fn from_edges<I>(edges: I) -> Result<ProcessModel>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            if to == START {
                return Err(Error::Model { line: 0, message: "edge into __START__".into() });
            }
            if from == END {
                return Err(Error::Model { line: 0, message: "edge out of __END__".into() });
            }
            set.insert((from, to));
        }
        finish_model(set)
    }
}

fn finish_model(edges: BTreeSet<(String, String)>) -> Result<ProcessModel> {
    if !edges.iter().any(|(from, _)| from == START) {
        return Err(Error::ModelNoStart);
    }
    if !edges.iter().any(|(_, to)| to == END) {
        return Err(Error::ModelNoEnd);
    }
    let nodes = edges
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .filter(|n| n != START && n != END)
        .collect();
    Ok(ProcessModel { nodes, edges })
}

/// Parse a model file: one `A -> B` edge per line, labels may contain
/// spaces, `#` starts a comment, blank lines are ignored, duplicate edges
/// collapse.
pub fn parse_model(text: &str) -> Result<ProcessModel> {
    let mut edges = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split("->").collect();
        if parts.len() != 2 {
            return Err(Error::Model {
                line: line_no,
                message: format!("expected exactly one '->' in '{line}'"),
            });
        }
        let from = parts[0].trim();
        let to = parts[1].trim();
        if from.is_empty() || to.is_empty() {
            return Err(Error::Model { line: line_no, message: "empty edge label".into() });
        }
        if to == START {
            return Err(Error::Model { line: line_no, message: "edge into __START__".into() });
        }
        if from == END {
            return Err(Error::Model { line: line_no, message: "edge out of __END__".into() });
        }
        edges.insert((from.to_string(), to.to_string()));
    }
    finish_model(edges)
}

/// Parse a model from a file path.
pub fn parse_model_path(path: &std::path::Path) -> Result<ProcessModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

/// A path is expected iff it is a start-to-end walk of the model.
pub fn classify_expectedness(path: &[String], model: &ProcessModel) -> Expectedness {
    let Some(first) = path.first() else {
        return Expectedness::Unexpected;
    };
    let last = path.last().expect("non-empty path");
    if !model.has_edge(START, first) || !model.has_edge(last, END) {
        return Expectedness::Unexpected;
    }
    for pair in path.windows(2) {
        if !model.has_edge(&pair[0], &pair[1]) {
            return Expectedness::Unexpected;
        }
    }
    Expectedness::Expected
}
