use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::dialogue::Player;
use crate::interchange::StrategyDocument;

use super::{StrategyNode, StrategyTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown export format `{0}` (expected json or dot)")]
pub struct ExportError(pub String);

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(ExportError(other.to_string())),
        }
    }
}

/// Serializes a strategy as an interchange document or a Graphviz graph.
///
/// In the graph, nodes are numbered in preorder and labelled with their
/// move; edges into P moves are solid, edges into O moves dashed, and
/// leaves are drawn as double circles.
pub fn export_strategy(t: &StrategyTree, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Json => StrategyDocument::from_tree(t).to_json().into_bytes(),
        ExportFormat::Dot => to_dot(t).into_bytes(),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(t: &StrategyTree) -> String {
    let mut out = String::new();
    writeln!(out, "digraph strategy {{").unwrap();
    writeln!(
        out,
        "  label=\"{} under {}\";",
        escape(&t.formula.render()),
        escape(&t.ruleset.spec_text())
    )
    .unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    let mut next = 0usize;
    write_node(&t.root, 0, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn write_node(n: &StrategyNode, position: usize, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let shape = if n.children.is_empty() {
        ", shape=doublecircle"
    } else {
        ""
    };
    let label = format!("{position}: {}", n.mv);
    writeln!(out, "  n{id} [label=\"{}\"{shape}];", escape(&label)).unwrap();
    for c in &n.children {
        let child = write_node(c, position + 1, next, out);
        let style = match c.mv.player {
            Player::P => "solid",
            Player::O => "dashed",
        };
        writeln!(out, "  n{id} -> n{child} [style={style}];").unwrap();
    }
    id
}
